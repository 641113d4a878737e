#include "sarsoil/dubois.hpp"

#include <cmath>

#include "sarsoil/errors.hpp"

namespace sarsoil {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

Reflectivity Reflectivity::from_linear(double linear) {
  return {linear, db_from_linear(linear)};
}

Reflectivity Reflectivity::from_db(double db) {
  return {linear_from_db(db), db};
}

double db_from_linear(double linear) {
  if (!(linear > 0.0)) {
    throw DomainError("dB conversion requires a positive power ratio");
  }
  return 10.0 * std::log10(linear);
}

double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

double normalized_roughness(double h_rms_cm, double lambda_cm) {
  if (!(h_rms_cm > 0.0) || !(lambda_cm > 0.0)) {
    throw DomainError("roughness and wavelength must be > 0");
  }
  return 2.0 * kPi * h_rms_cm / lambda_cm;
}

double angular_term(double theta_deg) {
  if (!(theta_deg > 0.0 && theta_deg <= 90.0)) {
    throw DomainError("incidence angle must be in (0, 90] degrees");
  }
  if (theta_deg == 90.0) return 0.0;  // cos(pi/2) does not round to zero
  const double t = deg2rad(theta_deg);
  return std::pow(std::cos(t), 1.5) / std::pow(std::sin(t), 5.0);
}

double roughness_term(double h_lambda, double theta_deg) {
  if (!(h_lambda >= 0.0)) {
    throw DomainError("normalized roughness must be >= 0");
  }
  return h_lambda * std::sin(deg2rad(theta_deg));
}

double moisture_term(double eps, double theta_deg, const DuboisConstants& k) {
  if (!(eps >= 0.0)) {
    throw DomainError("dielectric constant must be >= 0");
  }
  if (!(theta_deg >= 0.0 && theta_deg < 90.0)) {
    throw DomainError("tan(theta) diverges at 90 degrees");
  }
  return std::pow(10.0, k.c * eps * std::tan(deg2rad(theta_deg)) + k.d);
}

double height_term(double crop_height_m, const DuboisConstants& k) {
  return std::pow(10.0, k.a0 * crop_height_m + k.b0);
}

double wavelength_term(double lambda_cm, const DuboisConstants& k) {
  const double lm = lambda_cm / 100.0;
  return std::pow(10.0, k.c0 * lm * lm + k.d0 * lm);
}

double dubois_reflectivity(const SceneParams& scene, const DuboisConstants& k) {
  const double h_lambda = normalized_roughness(scene.h_rms_cm, scene.lambda_cm);
  return angular_term(scene.theta_deg) *
         std::pow(roughness_term(h_lambda, scene.theta_deg), k.a) *
         moisture_term(scene.eps, scene.theta_deg, k) *
         std::pow(scene.lambda_cm, k.b);
}

double height_adjusted_reflectivity(const SceneParams& scene, const DuboisConstants& k) {
  return dubois_reflectivity(scene, k) * height_term(scene.crop_height_m, k);
}

Reflectivity forward_reflectivity(const SceneParams& scene, const DuboisConstants& k) {
  return Reflectivity::from_linear(height_adjusted_reflectivity(scene, k) *
                                   wavelength_term(scene.lambda_cm, k));
}

std::vector<ValidityFlag> validity_check(const SceneParams& scene, double mv) {
  std::vector<ValidityFlag> flags;
  if (mv >= 0.35) flags.push_back(ValidityFlag::kMoistureHigh);
  if (normalized_roughness(scene.h_rms_cm, scene.lambda_cm) >= 3.0) {
    flags.push_back(ValidityFlag::kRoughnessHigh);
  }
  if (scene.theta_deg <= 30.0) flags.push_back(ValidityFlag::kAngleLow);
  return flags;
}

const char* to_string(ValidityFlag flag) {
  switch (flag) {
    case ValidityFlag::kMoistureHigh: return "MoistureHigh";
    case ValidityFlag::kRoughnessHigh: return "RoughnessHigh";
    case ValidityFlag::kAngleLow: return "AngleLow";
  }
  return "?";
}

}  // namespace sarsoil
