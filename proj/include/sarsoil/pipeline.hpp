#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "sarsoil/calib.hpp"
#include "sarsoil/dubois.hpp"
#include "sarsoil/mlp.hpp"
#include "sarsoil/raster.hpp"

namespace sarsoil {

enum class Branch { kBare, kVegetated };

const char* to_string(Branch branch);

/// Everything needed to turn multiband reflectivity into soil moisture:
/// model constants, the crop-height gate, and the two inverters.
struct RetrievalModel {
  DuboisConstants constants;
  HeightLmCoeffs height_lm;
  Mlp bnn;  // 6 inputs: theta, h_rms, height, sigma_P, sigma_L, sigma_C
  Mlp vnn;  // 5 inputs: theta, h_rms, height, sigma_P, sigma_L
  double height_threshold_m = 0.5;
  double h_rms_default_cm = 2.21;
  BandProfile bands;  // used only for the advisory validity flags

  void validate() const;  // throws ConfigError
};

struct PointEstimate {
  double mv = 0.0;       // clamped to [0, 0.5]
  double height_m = 0.0; // clamped crop-height estimate driving the gate
  Branch branch = Branch::kBare;
  std::vector<ValidityFlag> validity_flags;
};

/// One retrieval: estimate the crop height from sigma_L/sigma_P, route to the
/// bare inverter (height below threshold, consumes sigma_C) or the vegetated
/// one (ignores sigma_C). Throws InputError when sigma_C is needed but absent.
PointEstimate estimate_point(double sigma_p_db, double sigma_l_db,
                             std::optional<double> sigma_c_db, double theta_deg,
                             double h_rms_cm, const RetrievalModel& model);

struct RasterEstimateOptions {
  double speckle_window_m = 0.0;  // 0 disables the pre-filter
  int threads = 1;                // 0 = hardware concurrency
};

struct RasterEstimate {
  Raster mv;
  Raster height;
  Raster branch;  // 0 = bare, 1 = vegetated
  long missing_sigma_c = 0;  // bare-branch pixels dropped for lack of sigma_C
};

/// Per-pixel retrieval over co-registered rasters (dB). `sigma_c` may be null
/// when the scene is vegetated; bare pixels then come out nodata. Nodata in
/// any required input propagates to all outputs. Pixels are independent; the
/// only spatial coupling is the optional speckle pre-filter. Output rasters
/// use a -9999 sentinel regardless of the input sentinels.
RasterEstimate estimate_raster(const Raster& sigma_p, const Raster& sigma_l,
                               const Raster* sigma_c, double theta_deg, double h_rms_cm,
                               const RetrievalModel& model,
                               const RasterEstimateOptions& opts = {});

/// Same, with a per-pixel incidence-angle raster.
RasterEstimate estimate_raster(const Raster& sigma_p, const Raster& sigma_l,
                               const Raster* sigma_c, const Raster& theta_deg,
                               double h_rms_cm, const RetrievalModel& model,
                               const RasterEstimateOptions& opts = {});

struct EvalPair {
  double estimate = 0.0;
  double truth = 0.0;
  std::optional<Branch> branch;
};

struct EvalStats {
  int n = 0;
  double rmse = 0.0;
  double bias = 0.0;  // mean(estimate - truth)
};

struct EvalReport {
  EvalStats overall;
  std::optional<EvalStats> bare;
  std::optional<EvalStats> vegetated;
};

/// RMSE/bias of estimate-truth pairs, with per-branch breakdowns when branch
/// tags are present. Throws InputError on an empty pairing.
EvalReport evaluate(const std::vector<EvalPair>& pairs);

/// Model bundle directory: constants.txt, height_lm.txt, meta.txt (key=value)
/// plus bnn.mlpw and vnn.mlpw. Loading falls back to default constants,
/// height coefficients and meta values when the text files are absent.
void save_model(const RetrievalModel& model, const std::filesystem::path& dir);
RetrievalModel load_model(const std::filesystem::path& dir);

}  // namespace sarsoil
