#include "sarsoil/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "sarsoil/detail/num_io.hpp"
#include "sarsoil/errors.hpp"
#include "sarsoil/soil_physics.hpp"

namespace sarsoil {

namespace {

/// Retrieval for one pixel. nullopt means the bare branch needed sigma_C and
/// it was absent; the raster path turns that into nodata.
std::optional<PointEstimate> estimate_or_missing(double sigma_p_db, double sigma_l_db,
                                                 std::optional<double> sigma_c_db,
                                                 double theta_deg, double h_rms_cm,
                                                 const RetrievalModel& model) {
  PointEstimate est;
  est.height_m = estimate_height(sigma_l_db, sigma_p_db, model.height_lm);
  est.branch = est.height_m < model.height_threshold_m ? Branch::kBare : Branch::kVegetated;

  if (est.branch == Branch::kBare) {
    if (!sigma_c_db) return std::nullopt;
    Eigen::VectorXd input(6);
    input << theta_deg, h_rms_cm, est.height_m, sigma_p_db, sigma_l_db, *sigma_c_db;
    est.mv = mlp_forward(model.bnn, input);
  } else {
    Eigen::VectorXd input(5);
    input << theta_deg, h_rms_cm, est.height_m, sigma_p_db, sigma_l_db;
    est.mv = mlp_forward(model.vnn, input);
  }
  est.mv = std::clamp(est.mv, 0.0, kMaxVolumetricMoisture);

  // Advisory flags, unioned over the bands this branch consumed.
  const double eps = dielectric_from_moisture(est.mv);
  std::vector<double> lambdas{model.bands.lambda_p_cm, model.bands.lambda_l_cm};
  if (est.branch == Branch::kBare) lambdas.push_back(model.bands.lambda_c_cm);
  for (double lambda_cm : lambdas) {
    SceneParams scene{theta_deg, h_rms_cm, eps, lambda_cm, est.height_m};
    for (ValidityFlag flag : validity_check(scene, est.mv)) {
      if (std::find(est.validity_flags.begin(), est.validity_flags.end(), flag) ==
          est.validity_flags.end()) {
        est.validity_flags.push_back(flag);
      }
    }
  }
  return est;
}

void run_rows(int nrows, int threads, const std::function<void(int)>& row_fn) {
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
  }
  threads = std::clamp(threads, 1, std::max(nrows, 1));
  if (threads == 1) {
    for (int row = 0; row < nrows; ++row) row_fn(row);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  const auto worker = [&]() {
    for (int row = next.fetch_add(1); row < nrows; row = next.fetch_add(1)) {
      row_fn(row);
    }
  };
  for (int i = 0; i < threads - 1; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

RasterEstimate estimate_raster_impl(const Raster& sigma_p, const Raster& sigma_l,
                                    const Raster* sigma_c, const Raster* theta_raster,
                                    double theta_scalar, double h_rms_cm,
                                    const RetrievalModel& model,
                                    const RasterEstimateOptions& opts) {
  model.validate();
  if (!sigma_l.same_grid(sigma_p)) throw GridError("raster grid mismatch: sigma_l");
  if (sigma_c && !sigma_c->same_grid(sigma_p)) {
    throw GridError("raster grid mismatch: sigma_c");
  }
  if (theta_raster && !theta_raster->same_grid(sigma_p)) {
    throw GridError("raster grid mismatch: theta");
  }

  const Raster* p = &sigma_p;
  const Raster* l = &sigma_l;
  const Raster* c = sigma_c;
  std::optional<Raster> filtered_p, filtered_l, filtered_c;
  if (opts.speckle_window_m > 0.0) {
    filtered_p = moving_average(sigma_p, opts.speckle_window_m);
    filtered_l = moving_average(sigma_l, opts.speckle_window_m);
    p = &*filtered_p;
    l = &*filtered_l;
    if (sigma_c) {
      filtered_c = moving_average(*sigma_c, opts.speckle_window_m);
      c = &*filtered_c;
    }
  }

  // Outputs get a fixed sentinel: clamped moisture, height and branch values
  // can never collide with it, whatever the input sentinels were.
  const double out_nodata = -9999.0;
  const Raster blank(sigma_p.ncols(), sigma_p.nrows(), sigma_p.xll(), sigma_p.yll(),
                     sigma_p.cellsize(), out_nodata);
  RasterEstimate out{blank, blank, blank};
  std::atomic<long> missing{0};

  run_rows(sigma_p.nrows(), opts.threads, [&](int row) {
    for (int col = 0; col < sigma_p.ncols(); ++col) {
      if (p->is_nodata(row, col) || l->is_nodata(row, col)) continue;
      double theta = theta_scalar;
      if (theta_raster) {
        if (theta_raster->is_nodata(row, col)) continue;
        theta = theta_raster->at(row, col);
      }
      std::optional<double> sc;
      if (c && !c->is_nodata(row, col)) sc = c->at(row, col);

      const auto est = estimate_or_missing(p->at(row, col), l->at(row, col), sc, theta,
                                           h_rms_cm, model);
      if (!est) {
        ++missing;
        continue;
      }
      out.mv.at(row, col) = est->mv;
      out.height.at(row, col) = est->height_m;
      out.branch.at(row, col) = est->branch == Branch::kBare ? 0.0 : 1.0;
    }
  });

  out.missing_sigma_c = missing.load();
  return out;
}

}  // namespace

const char* to_string(Branch branch) {
  return branch == Branch::kBare ? "bare" : "vegetated";
}

void RetrievalModel::validate() const {
  if (bnn.spec.layer_sizes.empty() || vnn.spec.layer_sizes.empty()) {
    throw ConfigError("retrieval model is missing trained networks");
  }
  if (bnn.spec.inputs() != 6) {
    throw ConfigError("bare-soil network must take 6 inputs");
  }
  if (vnn.spec.inputs() != 5) {
    throw ConfigError("vegetated network must take 5 inputs");
  }
  if (!(height_threshold_m > 0.0 && height_threshold_m < kMaxCropHeightM)) {
    throw ConfigError("height threshold must lie in (0, 3) m");
  }
  if (!(h_rms_default_cm > 0.0)) throw ConfigError("default roughness must be positive");
}

PointEstimate estimate_point(double sigma_p_db, double sigma_l_db,
                             std::optional<double> sigma_c_db, double theta_deg,
                             double h_rms_cm, const RetrievalModel& model) {
  model.validate();
  auto est = estimate_or_missing(sigma_p_db, sigma_l_db, sigma_c_db, theta_deg, h_rms_cm,
                                 model);
  if (!est) {
    throw InputError("C-band reflectivity is required on the bare branch");
  }
  return *est;
}

RasterEstimate estimate_raster(const Raster& sigma_p, const Raster& sigma_l,
                               const Raster* sigma_c, double theta_deg, double h_rms_cm,
                               const RetrievalModel& model,
                               const RasterEstimateOptions& opts) {
  return estimate_raster_impl(sigma_p, sigma_l, sigma_c, nullptr, theta_deg, h_rms_cm,
                              model, opts);
}

RasterEstimate estimate_raster(const Raster& sigma_p, const Raster& sigma_l,
                               const Raster* sigma_c, const Raster& theta_deg,
                               double h_rms_cm, const RetrievalModel& model,
                               const RasterEstimateOptions& opts) {
  return estimate_raster_impl(sigma_p, sigma_l, sigma_c, &theta_deg, 0.0, h_rms_cm, model,
                              opts);
}

namespace {

EvalStats stats_of(const std::vector<const EvalPair*>& pairs) {
  EvalStats s;
  s.n = static_cast<int>(pairs.size());
  double sq = 0.0, sum = 0.0;
  for (const EvalPair* p : pairs) {
    const double err = p->estimate - p->truth;
    sq += err * err;
    sum += err;
  }
  s.rmse = std::sqrt(sq / s.n);
  s.bias = sum / s.n;
  return s;
}

}  // namespace

EvalReport evaluate(const std::vector<EvalPair>& pairs) {
  if (pairs.empty()) throw InputError("no estimate/truth pairs to evaluate");
  std::vector<const EvalPair*> all, bare, veg;
  for (const EvalPair& p : pairs) {
    all.push_back(&p);
    if (p.branch == Branch::kBare) bare.push_back(&p);
    if (p.branch == Branch::kVegetated) veg.push_back(&p);
  }
  EvalReport report;
  report.overall = stats_of(all);
  if (!bare.empty()) report.bare = stats_of(bare);
  if (!veg.empty()) report.vegetated = stats_of(veg);
  return report;
}

namespace {

void write_kv(const std::filesystem::path& path,
              const std::vector<std::pair<std::string, double>>& entries) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  for (const auto& [key, value] : entries) {
    out << key << "=" << detail::format_double(value) << "\n";
  }
  if (!out) throw Error("write failed: " + path.string());
}

std::map<std::string, double> read_kv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::map<std::string, double> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError(path.string() + ": expected key=value", line_no);
    }
    double value;
    if (!detail::parse_double(std::string_view(line).substr(eq + 1), value)) {
      throw FormatError(path.string() + ": bad value in '" + line + "'", line_no);
    }
    kv[line.substr(0, eq)] = value;
  }
  return kv;
}

double kv_get(const std::map<std::string, double>& kv, const std::string& key,
              const std::filesystem::path& path) {
  const auto it = kv.find(key);
  if (it == kv.end()) {
    throw FormatError(path.string() + ": missing key '" + key + "'");
  }
  return it->second;
}

}  // namespace

void save_model(const RetrievalModel& model, const std::filesystem::path& dir) {
  model.validate();
  std::filesystem::create_directories(dir);
  write_kv(dir / "constants.txt",
           {{"a", model.constants.a},
            {"b", model.constants.b},
            {"c", model.constants.c},
            {"d", model.constants.d},
            {"a0", model.constants.a0},
            {"b0", model.constants.b0},
            {"c0", model.constants.c0},
            {"d0", model.constants.d0}});
  write_kv(dir / "height_lm.txt",
           {{"intercept", model.height_lm.intercept},
            {"coef_l", model.height_lm.coef_l},
            {"coef_p", model.height_lm.coef_p}});
  write_kv(dir / "meta.txt",
           {{"format_version", 1.0},
            {"height_threshold_m", model.height_threshold_m},
            {"h_rms_default_cm", model.h_rms_default_cm}});
  mlp_save(model.bnn, dir / "bnn.mlpw");
  mlp_save(model.vnn, dir / "vnn.mlpw");
}

RetrievalModel load_model(const std::filesystem::path& dir) {
  RetrievalModel model;
  const auto constants_path = dir / "constants.txt";
  if (std::filesystem::exists(constants_path)) {
    const auto kv = read_kv(constants_path);
    model.constants = {kv_get(kv, "a", constants_path),  kv_get(kv, "b", constants_path),
                       kv_get(kv, "c", constants_path),  kv_get(kv, "d", constants_path),
                       kv_get(kv, "a0", constants_path), kv_get(kv, "b0", constants_path),
                       kv_get(kv, "c0", constants_path), kv_get(kv, "d0", constants_path)};
  }
  const auto height_path = dir / "height_lm.txt";
  if (std::filesystem::exists(height_path)) {
    const auto kv = read_kv(height_path);
    model.height_lm = {kv_get(kv, "intercept", height_path),
                       kv_get(kv, "coef_l", height_path),
                       kv_get(kv, "coef_p", height_path)};
  }
  const auto meta_path = dir / "meta.txt";
  if (std::filesystem::exists(meta_path)) {
    const auto kv = read_kv(meta_path);
    const double version = kv_get(kv, "format_version", meta_path);
    if (version != 1.0) {
      throw FormatError(meta_path.string() + ": unsupported format version " +
                        detail::format_double(version));
    }
    model.height_threshold_m = kv_get(kv, "height_threshold_m", meta_path);
    model.h_rms_default_cm = kv_get(kv, "h_rms_default_cm", meta_path);
  }
  model.bnn = mlp_load(dir / "bnn.mlpw");
  model.vnn = mlp_load(dir / "vnn.mlpw");
  model.validate();
  return model;
}

}  // namespace sarsoil
