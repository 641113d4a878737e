#include "sarsoil/synth.hpp"

#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "sarsoil/detail/num_io.hpp"
#include "sarsoil/errors.hpp"
#include "sarsoil/rng.hpp"
#include "sarsoil/soil_physics.hpp"

namespace sarsoil {

namespace {

constexpr const char* kCsvHeader =
    "theta_deg,h_rms_cm,height_m,sigma_p_db,sigma_l_db,sigma_c_db,mv";

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

const char* to_string(Scenario scenario) {
  return scenario == Scenario::kBare ? "bare" : "vegetated";
}

RangeSpec RangeSpec::defaults_for(Scenario scenario) {
  RangeSpec spec;
  spec.crop_height_m = scenario == Scenario::kBare ? Range{0.0, 0.5} : Range{0.5, 3.0};
  return spec;
}

void RangeSpec::validate() const {
  const auto ordered = [](const Range& r) { return r.lo <= r.hi; };
  if (!ordered(theta_deg) || !ordered(mv) || !ordered(h_rms_cm) || !ordered(crop_height_m)) {
    throw ConfigError("range minimum exceeds maximum");
  }
  if (!(theta_deg.lo > 0.0 && theta_deg.hi < 90.0)) {
    throw ConfigError("incidence angle range must stay inside (0, 90) degrees");
  }
  if (!(mv.lo >= 0.0 && mv.hi <= kMaxVolumetricMoisture)) {
    throw ConfigError("moisture range must stay inside [0, 0.5]");
  }
  if (!(h_rms_cm.lo > 0.0)) throw ConfigError("roughness range must be positive");
  if (!(crop_height_m.lo >= 0.0)) throw ConfigError("crop height range must be >= 0");
}

SampleSet generate(Scenario scenario, const RangeSpec& ranges, int n, std::uint64_t seed,
                   double noise_db, const BandProfile& bands) {
  ranges.validate();
  if (n <= 0) throw ConfigError("sample count must be positive");
  if (!(noise_db >= 0.0)) throw ConfigError("noise level must be >= 0");

  Rng rng(seed);
  SampleSet set;
  set.scenario = scenario;
  set.records.reserve(n);
  for (int i = 0; i < n; ++i) {
    SampleRecord rec;
    rec.theta_deg = rng.uniform(ranges.theta_deg.lo, ranges.theta_deg.hi);
    rec.mv = rng.uniform(ranges.mv.lo, ranges.mv.hi);
    rec.h_rms_cm = rng.uniform(ranges.h_rms_cm.lo, ranges.h_rms_cm.hi);
    rec.crop_height_m = rng.uniform(ranges.crop_height_m.lo, ranges.crop_height_m.hi);

    SceneParams scene;
    scene.theta_deg = rec.theta_deg;
    scene.h_rms_cm = rec.h_rms_cm;
    scene.eps = dielectric_from_moisture(rec.mv);
    scene.crop_height_m = rec.crop_height_m;

    scene.lambda_cm = bands.lambda_p_cm;
    rec.sigma_p_db = forward_reflectivity(scene).db;
    scene.lambda_cm = bands.lambda_l_cm;
    rec.sigma_l_db = forward_reflectivity(scene).db;
    scene.lambda_cm = bands.lambda_c_cm;
    rec.sigma_c_db = forward_reflectivity(scene).db;

    if (noise_db > 0.0) {
      rec.sigma_p_db += rng.normal(0.0, noise_db);
      rec.sigma_l_db += rng.normal(0.0, noise_db);
      rec.sigma_c_db = *rec.sigma_c_db + rng.normal(0.0, noise_db);
    }
    set.records.push_back(rec);
  }
  return set;
}

std::pair<SampleSet, SampleSet> split(const SampleSet& set, double fraction,
                                      std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("split fraction must be in (0, 1)");
  }
  std::vector<std::size_t> order(set.records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.index(i)]);
  }
  const auto cut = static_cast<std::size_t>(
      static_cast<double>(set.records.size()) * fraction);
  SampleSet train{set.scenario, {}};
  SampleSet holdout{set.scenario, {}};
  train.records.reserve(cut);
  holdout.records.reserve(order.size() - cut);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < cut ? train : holdout).records.push_back(set.records[order[i]]);
  }
  return {std::move(train), std::move(holdout)};
}

NnDataset to_nn_dataset(const SampleSet& set, Scenario scenario) {
  if (set.scenario != scenario) {
    throw InputError("sample set scenario does not match the requested assembly");
  }
  return to_nn_dataset(set.records, scenario);
}

NnDataset to_nn_dataset(const std::vector<SampleRecord>& records, Scenario scenario) {
  const int width = scenario == Scenario::kBare ? 6 : 5;
  NnDataset data;
  data.inputs.resize(static_cast<Eigen::Index>(records.size()), width);
  data.targets.resize(static_cast<Eigen::Index>(records.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SampleRecord& rec = records[i];
    const auto row = static_cast<Eigen::Index>(i);
    data.inputs(row, 0) = rec.theta_deg;
    data.inputs(row, 1) = rec.h_rms_cm;
    data.inputs(row, 2) = rec.crop_height_m;
    data.inputs(row, 3) = rec.sigma_p_db;
    data.inputs(row, 4) = rec.sigma_l_db;
    if (scenario == Scenario::kBare) {
      if (!rec.sigma_c_db) {
        throw InputError("record " + std::to_string(i + 1) +
                         " lacks the C-band reflectivity required for the bare assembly");
      }
      data.inputs(row, 5) = *rec.sigma_c_db;
    }
    data.targets[row] = rec.mv;
  }
  return data;
}

void write_sample_csv(const std::vector<SampleRecord>& records,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << kCsvHeader << "\n";
  for (const SampleRecord& rec : records) {
    out << detail::format_double(rec.theta_deg) << ','
        << detail::format_double(rec.h_rms_cm) << ','
        << detail::format_double(rec.crop_height_m) << ','
        << detail::format_double(rec.sigma_p_db) << ','
        << detail::format_double(rec.sigma_l_db) << ','
        << (rec.sigma_c_db ? detail::format_double(*rec.sigma_c_db) : "NA") << ','
        << detail::format_double(rec.mv) << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::vector<SampleRecord> read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) {
    throw FormatError(path.string() + ": empty file", 1);
  }
  const auto header = split_fields(line);
  const auto expected = split_fields(kCsvHeader);
  if (header.size() < expected.size()) {
    throw FormatError(path.string() + ": incomplete header", 1);
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (header[i] != expected[i]) {
      throw FormatError(path.string() + ": expected column '" + expected[i] +
                            "', found '" + header[i] + "'",
                        1);
    }
  }
  for (std::size_t i = expected.size(); i < header.size(); ++i) {
    if (header[i] != "site" && header[i] != "date") {
      throw FormatError(path.string() + ": unknown column '" + header[i] + "'", 1);
    }
  }

  std::vector<SampleRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw FormatError(path.string() + ": expected " + std::to_string(header.size()) +
                            " fields, found " + std::to_string(fields.size()),
                        line_no);
    }
    const auto parse = [&](std::size_t idx) {
      double v;
      if (!detail::parse_double(fields[idx], v)) {
        throw FormatError(path.string() + ": bad number '" + fields[idx] + "'", line_no);
      }
      return v;
    };
    SampleRecord rec;
    rec.theta_deg = parse(0);
    rec.h_rms_cm = parse(1);
    rec.crop_height_m = parse(2);
    rec.sigma_p_db = parse(3);
    rec.sigma_l_db = parse(4);
    if (fields[5] != "NA") rec.sigma_c_db = parse(5);
    rec.mv = parse(6);
    records.push_back(rec);
  }
  return records;
}

}  // namespace sarsoil
