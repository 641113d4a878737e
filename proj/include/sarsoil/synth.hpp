#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "sarsoil/dubois.hpp"

namespace sarsoil {

enum class Scenario { kBare, kVegetated };

const char* to_string(Scenario scenario);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// Sampling ranges for dataset generation. Defaults reproduce the training
/// envelopes of the two inverters: crop height [0, 0.5] m for the bare
/// scenario and [0.5, 3.0] m for the vegetated one.
struct RangeSpec {
  Range theta_deg{60.0, 65.0};
  Range mv{0.05, 0.45};
  Range h_rms_cm{1.5, 3.5};
  Range crop_height_m{0.0, 0.5};

  static RangeSpec defaults_for(Scenario scenario);
  void validate() const;  // throws ConfigError
};

struct SampleRecord {
  double theta_deg = 0.0;
  double h_rms_cm = 0.0;
  double crop_height_m = 0.0;
  double sigma_p_db = 0.0;
  double sigma_l_db = 0.0;
  std::optional<double> sigma_c_db;
  double mv = 0.0;
};

struct SampleSet {
  Scenario scenario = Scenario::kBare;
  std::vector<SampleRecord> records;
};

/// Draws n scenes i.i.d. uniform over the ranges and evaluates the forward
/// model per band. `noise_db` is the standard deviation of independent
/// Gaussian perturbations applied in the dB domain (0 disables noise without
/// changing the drawn scene parameters). Deterministic per seed. Vegetated
/// sets still carry the C band; it is dropped at input assembly.
SampleSet generate(Scenario scenario, const RangeSpec& ranges, int n, std::uint64_t seed,
                   double noise_db, const BandProfile& bands = {});

/// Seeded shuffle, then a (floor(n*fraction), remainder) partition.
std::pair<SampleSet, SampleSet> split(const SampleSet& set, double fraction,
                                      std::uint64_t seed);

struct NnDataset {
  Eigen::MatrixXd inputs;   // row per record
  Eigen::VectorXd targets;  // mv
};

/// Input assembly. Bare: [theta, h_rms, height, sigma_P, sigma_L, sigma_C].
/// Vegetated: the same without sigma_C.
NnDataset to_nn_dataset(const SampleSet& set, Scenario scenario);
NnDataset to_nn_dataset(const std::vector<SampleRecord>& records, Scenario scenario);

/// CSV with header theta_deg,h_rms_cm,height_m,sigma_p_db,sigma_l_db,sigma_c_db,mv.
/// "NA" is accepted only in the sigma_c_db column. The reader additionally
/// tolerates trailing `site` and `date` columns, which it ignores.
void write_sample_csv(const std::vector<SampleRecord>& records,
                      const std::filesystem::path& path);
std::vector<SampleRecord> read_sample_csv(const std::filesystem::path& path);

}  // namespace sarsoil
