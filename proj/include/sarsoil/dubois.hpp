#pragma once

#include <vector>

namespace sarsoil {

/// Coefficients of the adjusted Dubois model. The defaults are the fitted
/// values for the P/L/C drone-borne system this library targets.
struct DuboisConstants {
  double a = 1.4;     // roughness-term exponent
  double b = 0.47;    // wavelength power-law exponent (lambda in cm)
  double c = 0.014;   // dielectric sensitivity, per unit eps
  double d = -0.72;   // dielectric-term offset (log10 domain)
  double a0 = 0.42;   // crop-height slope, per meter (log10 domain)
  double b0 = 0.17;   // crop-height offset (log10 domain)
  double c0 = -2.4;   // wavelength-term quadratic coefficient (lambda in m)
  double d0 = 1.76;   // wavelength-term linear coefficient (lambda in m)
};

/// Inputs of one forward evaluation.
struct SceneParams {
  double theta_deg = 60.0;      // incidence angle, degrees, (0, 90)
  double h_rms_cm = 2.21;       // surface rms roughness, cm, > 0
  double eps = 10.0;            // soil dielectric constant
  double lambda_cm = 22.8;      // radar wavelength, cm, > 0
  double crop_height_m = 0.0;   // crop height, m, >= 0
};

/// Backscatter coefficient in both radiometric representations.
struct Reflectivity {
  double linear = 1.0;  // dimensionless power ratio, > 0
  double db = 0.0;      // 10 log10(linear)

  static Reflectivity from_linear(double linear);
  static Reflectivity from_db(double db);
};

/// Band wavelengths of the tri-band system, cm. Defaults: P/L/C.
struct BandProfile {
  double lambda_p_cm = 70.5;
  double lambda_l_cm = 22.8;
  double lambda_c_cm = 5.6;
};

/// Advisory flags for inputs outside the Dubois validity region
/// (mv < 0.35, k*h_rms < 3, theta > 30 deg).
enum class ValidityFlag { kMoistureHigh, kRoughnessHigh, kAngleLow };

double db_from_linear(double linear);
double linear_from_db(double db);

/// Normalized roughness h_lambda = (2*pi/lambda) * h_rms, both in cm.
double normalized_roughness(double h_rms_cm, double lambda_cm);

/// Angular factor cos(theta)^1.5 / sin(theta)^5. Zero at 90 deg.
double angular_term(double theta_deg);

/// Roughness factor h_lambda * sin(theta).
double roughness_term(double h_lambda, double theta_deg);

/// Dielectric factor 10^(c * eps * tan(theta) + d).
double moisture_term(double eps, double theta_deg, const DuboisConstants& k = {});

/// Vegetation factor 10^(a0 * h + b0), h in meters.
double height_term(double crop_height_m, const DuboisConstants& k = {});

/// Wavelength factor 10^(c0 * lm^2 + d0 * lm).
///
/// Unit note: the power-law term lambda^b uses centimeters, but this factor
/// evaluates the quadratic with lm = lambda_cm / 100 (meters). With the
/// default c0/d0 a centimeter argument would collapse the factor to ~10^-65
/// at C band; in meters it stays in the physical 1.1-1.9 range with its peak
/// between the P and L bands.
double wavelength_term(double lambda_cm, const DuboisConstants& k = {});

/// Bare-soil core f * g^a * m * lambda^b (no vegetation or wavelength factor).
double dubois_reflectivity(const SceneParams& scene, const DuboisConstants& k = {});

/// Core times the crop-height factor; the form whose residuals the
/// wavelength factor was fitted to absorb.
double height_adjusted_reflectivity(const SceneParams& scene, const DuboisConstants& k = {});

/// Full adjusted model: f * g^a * m * lambda^b * n_h * n_w.
Reflectivity forward_reflectivity(const SceneParams& scene, const DuboisConstants& k = {});

/// Never blocks computation; the model is routinely used outside these bounds.
std::vector<ValidityFlag> validity_check(const SceneParams& scene, double mv);

const char* to_string(ValidityFlag flag);

}  // namespace sarsoil
