#pragma once

#include <string>
#include <vector>

#include "sarsoil/dubois.hpp"
#include "sarsoil/optim.hpp"
#include "sarsoil/synth.hpp"

namespace sarsoil {

/// Crop height is physically bounded by the vegetated training ceiling.
inline constexpr double kMaxCropHeightM = 3.0;

/// Linear crop-height model h = intercept + coef_l * sigma_L + coef_p * sigma_P
/// with reflectivities in dB. Defaults are the fitted values.
struct HeightLmCoeffs {
  double intercept = 3.119;  // m
  double coef_l = 0.1372;    // m/dB
  double coef_p = 0.1117;    // m/dB
};

/// Unclamped affine evaluation.
double estimate_height_raw(double sigma_l_db, double sigma_p_db,
                           const HeightLmCoeffs& coeffs = {});

/// Affine evaluation clamped to [0, 3] m.
double estimate_height(double sigma_l_db, double sigma_p_db,
                       const HeightLmCoeffs& coeffs = {});

struct HeightLmFit {
  HeightLmCoeffs coeffs;
  double rmse = 0.0;  // residual RMSE, m
  int n = 0;
};

/// Ordinary least squares of measured height on [1, sigma_L, sigma_P].
/// Throws FitError when the design is rank deficient (fewer than three
/// distinct (sigma_L, sigma_P) points; note that noiseless forward-model
/// records are exactly collinear across two bands and also fail here).
HeightLmFit fit_height_lm(const std::vector<SampleRecord>& records);

/// Measured reflectivity minus the height-adjusted model (wavelength factor
/// forced to one), in dB. The per-band spread of these residuals is what the
/// wavelength factor was fitted to absorb.
double residual_sigma_dif(double measured_db, const SceneParams& scene,
                          const DuboisConstants& k = {});

struct BandResidualSummary {
  std::string band;
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
  double mean = 0.0;
  int n = 0;
};

/// Quartiles of residual_sigma_dif per band over a tuning table.
std::vector<BandResidualSummary> band_residual_quartiles(
    const std::vector<SampleRecord>& records, const DuboisConstants& k = {},
    const BandProfile& bands = {});

struct DuboisFit {
  DuboisConstants constants;
  double final_mse = 0.0;  // mean squared dB residual
  int iterations = 0;
  bool converged = false;
};

LmOptions default_dubois_fit_options();

/// Minimum mean-square-error refit of all eight coefficients against measured
/// dB reflectivities, via Levenberg-Marquardt from `init`.
///
/// The dB-domain model is linear in the coefficients and three wavelengths
/// cannot pin down (b, c0, d0, d+b0) individually, so the recovered values are
/// init-dependent; predictions on the same bands are what the fit determines.
/// Requires records spanning at least two moisture values, two crop heights
/// and all three bands.
DuboisFit fit_dubois_constants(const std::vector<SampleRecord>& records,
                               const DuboisConstants& init = {},
                               const BandProfile& bands = {},
                               const LmOptions& opts = default_dubois_fit_options());

}  // namespace sarsoil
