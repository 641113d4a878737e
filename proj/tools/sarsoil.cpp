// Command-line front end: synthetic data generation, inverter training,
// raster estimation, evaluation against ground samples, and coefficient fits.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sarsoil/calib.hpp"
#include "sarsoil/detail/num_io.hpp"
#include "sarsoil/errors.hpp"
#include "sarsoil/mlp.hpp"
#include "sarsoil/pipeline.hpp"
#include "sarsoil/raster.hpp"
#include "sarsoil/synth.hpp"

namespace {

using namespace sarsoil;

int thread_cap() {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (const char* env = std::getenv("SARSOIL_THREADS")) {
    try {
      threads = std::clamp(std::stoi(env), 1, threads);
    } catch (const std::exception&) {
      throw ConfigError("SARSOIL_THREADS must be a positive integer");
    }
  }
  return threads;
}

Scenario parse_scenario(const std::string& name) {
  return name == "bare" ? Scenario::kBare : Scenario::kVegetated;
}

struct SynthArgs {
  std::string scenario;
  int n = 10000;
  std::uint64_t seed = 1;
  double noise_db = 0.5;
  std::string out;
  BandProfile bands;
};

int run_synth(const SynthArgs& args) {
  const Scenario scenario = parse_scenario(args.scenario);
  const auto set = generate(scenario, RangeSpec::defaults_for(scenario), args.n,
                            args.seed, args.noise_db, args.bands);
  write_sample_csv(set.records, args.out);
  std::cout << "wrote " << set.records.size() << " " << to_string(scenario)
            << " records to " << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string scenario;
  std::string data;
  std::string out;
  std::string report;
  int max_iter = 500;
  double mse_goal = 1e-6;
  std::uint64_t seed = 1;
};

int run_train(const TrainArgs& args) {
  const Scenario scenario = parse_scenario(args.scenario);
  const auto records = read_sample_csv(args.data);
  const auto data = to_nn_dataset(records, scenario);

  const MlpSpec spec{scenario == Scenario::kBare ? std::vector<int>{6, 20, 20, 1}
                                                 : std::vector<int>{5, 20, 20, 1}};
  Mlp mlp = mlp_init(spec, args.seed);
  set_scalers_from_data(mlp, data.inputs, data.targets);

  LmOptions opts;
  opts.max_iter = args.max_iter;
  opts.mse_goal = args.mse_goal;
  const TrainReport report = lm_train(mlp, data.inputs, data.targets, opts);
  mlp_save(mlp, args.out);

  const std::string report_path =
      args.report.empty() ? args.out + ".report.txt" : args.report;
  std::ofstream rep(report_path);
  if (!rep) throw Error("cannot open " + report_path + " for writing");
  rep << "scenario: " << to_string(scenario) << "\n";
  rep << "data: " << args.data << " (" << data.inputs.rows() << " records)\n";
  rep << "layers:";
  for (int s : spec.layer_sizes) rep << " " << s;
  rep << "\nseed: " << args.seed << "\n";
  rep << "iterations: " << report.iterations << "\n";
  rep << "final_mse_scaled: " << detail::format_double(report.final_mse) << "\n";
  rep << "converged: " << (report.converged ? "yes" : "no") << "\n";
  if (!report.warning.empty()) rep << "warning: " << report.warning << "\n";

  std::cout << "trained " << to_string(scenario) << " inverter: " << report.iterations
            << " iterations, final scaled MSE "
            << detail::format_double(report.final_mse) << "\n";
  if (!report.warning.empty()) std::cout << "warning: " << report.warning << "\n";
  std::cout << "weights: " << args.out << "\nreport: " << report_path << "\n";
  return 0;
}

struct EstimateArgs {
  std::string model_dir;
  std::string sigma_p, sigma_l, sigma_c;
  std::string theta;
  double h_rms = 0.0;  // 0 = use the model default
  double speckle_window_m = 0.0;
  std::string out_prefix;
};

int run_estimate(const EstimateArgs& args) {
  const RetrievalModel model = load_model(args.model_dir);
  const Raster sigma_p = read_asc(args.sigma_p);
  const Raster sigma_l = read_asc(args.sigma_l);
  std::optional<Raster> sigma_c;
  if (!args.sigma_c.empty()) sigma_c = read_asc(args.sigma_c);

  RasterEstimateOptions opts;
  opts.speckle_window_m = args.speckle_window_m;
  opts.threads = thread_cap();
  const double h_rms = args.h_rms > 0.0 ? args.h_rms : model.h_rms_default_cm;

  double theta_value = 0.0;
  RasterEstimate out = [&] {
    if (detail::parse_double(args.theta, theta_value)) {
      return estimate_raster(sigma_p, sigma_l, sigma_c ? &*sigma_c : nullptr, theta_value,
                             h_rms, model, opts);
    }
    const Raster theta = read_asc(args.theta);
    return estimate_raster(sigma_p, sigma_l, sigma_c ? &*sigma_c : nullptr, theta, h_rms,
                           model, opts);
  }();

  write_asc(out.mv, args.out_prefix + "_mv.asc");
  write_asc(out.height, args.out_prefix + "_height.asc");
  write_asc(out.branch, args.out_prefix + "_branch.asc");
  std::cout << "wrote " << args.out_prefix << "_{mv,height,branch}.asc\n";
  if (out.missing_sigma_c > 0) {
    std::cout << "warning: " << out.missing_sigma_c
              << " bare-branch pixels had no C-band value and are nodata\n";
  }
  return 0;
}

struct EvaluateArgs {
  std::string estimates;
  std::string samples;
  std::string branch;
  double window_m = 3.0;
  std::string out;
};

int run_evaluate(const EvaluateArgs& args) {
  const Raster estimates = read_asc(args.estimates);
  const SampleTable table = read_samples(args.samples);
  std::optional<Raster> branch;
  if (!args.branch.empty()) branch = read_asc(args.branch);

  struct Row {
    const SamplePoint* point;
    double estimate;
    std::optional<Branch> branch;
  };
  std::vector<Row> rows;
  long outside = 0, invalid = 0;
  for (const SamplePoint& point : table.rows) {
    if (!estimates.contains(point.x, point.y)) {
      ++outside;
      continue;
    }
    const double value = window_mean(estimates, point.x, point.y, args.window_m);
    if (value == estimates.nodata()) {
      ++invalid;
      continue;
    }
    Row row{&point, value, std::nullopt};
    if (branch && branch->contains(point.x, point.y)) {
      const double b = branch->at(branch->row_at(point.y), branch->col_at(point.x));
      if (b == 0.0) row.branch = Branch::kBare;
      if (b == 1.0) row.branch = Branch::kVegetated;
    }
    rows.push_back(row);
  }
  if (rows.empty()) {
    throw InputError("no usable sample points (" + std::to_string(outside) +
                     " outside the extent, " + std::to_string(invalid) + " on nodata)");
  }

  std::vector<EvalPair> pairs;
  for (const Row& row : rows) pairs.push_back({row.estimate, row.point->mv, row.branch});
  const EvalReport report = evaluate(pairs);

  std::ofstream rep(args.out);
  if (!rep) throw Error("cannot open " + args.out + " for writing");
  const auto print_stats = [&rep](const char* label, const EvalStats& s) {
    rep << label << ": n=" << s.n << " rmse=" << detail::format_double(s.rmse)
        << " bias=" << detail::format_double(s.bias) << "\n";
  };
  print_stats("overall", report.overall);
  if (report.bare) print_stats("bare", *report.bare);
  if (report.vegetated) print_stats("vegetated", *report.vegetated);
  rep << "skipped_outside: " << outside << "\n";
  rep << "skipped_nodata: " << invalid << "\n";

  const std::string csv_path = args.out + ".csv";
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot open " + csv_path + " for writing");
  csv << "id,x,y,mv_measured,mv_estimated,error,branch\n";
  for (const Row& row : rows) {
    csv << row.point->id << ',' << detail::format_double(row.point->x) << ','
        << detail::format_double(row.point->y) << ','
        << detail::format_double(row.point->mv) << ','
        << detail::format_double(row.estimate) << ','
        << detail::format_double(row.estimate - row.point->mv) << ','
        << (row.branch ? to_string(*row.branch) : "") << "\n";
  }

  std::cout << "n=" << report.overall.n
            << " rmse=" << detail::format_double(report.overall.rmse)
            << " bias=" << detail::format_double(report.overall.bias) << "\n";
  std::cout << "report: " << args.out << "\nper-point: " << csv_path << "\n";
  return 0;
}

struct FitArgs {
  std::string what;
  std::string data;
  std::string out;
  std::string init;
  BandProfile bands;
};

void write_residual_csv(const std::string& path,
                        const std::vector<BandResidualSummary>& summaries) {
  std::ofstream csv(path);
  if (!csv) throw Error("cannot open " + path + " for writing");
  csv << "band,min,q1,median,q3,max,mean,n\n";
  for (const auto& s : summaries) {
    csv << s.band << ',' << detail::format_double(s.min) << ','
        << detail::format_double(s.q1) << ',' << detail::format_double(s.median) << ','
        << detail::format_double(s.q3) << ',' << detail::format_double(s.max) << ','
        << detail::format_double(s.mean) << ',' << s.n << "\n";
  }
}

int run_fit(const FitArgs& args) {
  const auto records = read_sample_csv(args.data);
  const std::string residuals_path = args.out + ".residuals.csv";

  if (args.what == "height-lm") {
    const HeightLmFit fit = fit_height_lm(records);
    std::ofstream out(args.out);
    if (!out) throw Error("cannot open " + args.out + " for writing");
    out << "intercept=" << detail::format_double(fit.coeffs.intercept) << "\n";
    out << "coef_l=" << detail::format_double(fit.coeffs.coef_l) << "\n";
    out << "coef_p=" << detail::format_double(fit.coeffs.coef_p) << "\n";
    out << "rmse_m=" << detail::format_double(fit.rmse) << "\n";
    out << "n=" << fit.n << "\n";

    // Height residual quartiles in the same diagnostics layout.
    std::vector<double> residuals;
    for (const auto& rec : records) {
      residuals.push_back(rec.crop_height_m -
                          estimate_height_raw(rec.sigma_l_db, rec.sigma_p_db, fit.coeffs));
    }
    std::sort(residuals.begin(), residuals.end());
    const auto q = [&](double p) {
      const double h = p * (residuals.size() - 1);
      const auto i = static_cast<std::size_t>(h);
      return i + 1 < residuals.size()
                 ? residuals[i] + (h - i) * (residuals[i + 1] - residuals[i])
                 : residuals.back();
    };
    double mean = 0.0;
    for (double r : residuals) mean += r;
    mean /= residuals.size();
    BandResidualSummary s{"height_m", residuals.front(), q(0.25), q(0.5), q(0.75),
                          residuals.back(), mean, static_cast<int>(residuals.size())};
    write_residual_csv(residuals_path, {s});

    std::cout << "height-lm fit: intercept=" << detail::format_double(fit.coeffs.intercept)
              << " coef_l=" << detail::format_double(fit.coeffs.coef_l)
              << " coef_p=" << detail::format_double(fit.coeffs.coef_p)
              << " rmse=" << detail::format_double(fit.rmse) << " m (n=" << fit.n << ")\n";
  } else {
    DuboisConstants init;
    if (!args.init.empty()) {
      std::ifstream in(args.init);
      if (!in) throw Error("cannot open " + args.init);
      std::map<std::string, double> kv;
      std::string line;
      int line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        double value = 0.0;
        if (eq == std::string::npos ||
            !detail::parse_double(std::string_view(line).substr(eq + 1), value)) {
          throw FormatError(args.init + ": expected key=value", line_no);
        }
        kv[line.substr(0, eq)] = value;
      }
      const auto get = [&](const char* key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw FormatError(args.init + ": missing key " + key);
        return it->second;
      };
      init = {get("a"),  get("b"),  get("c"),  get("d"),
              get("a0"), get("b0"), get("c0"), get("d0")};
    }

    const DuboisFit fit = fit_dubois_constants(records, init, args.bands);
    std::ofstream out(args.out);
    if (!out) throw Error("cannot open " + args.out + " for writing");
    out << "a=" << detail::format_double(fit.constants.a) << "\n";
    out << "b=" << detail::format_double(fit.constants.b) << "\n";
    out << "c=" << detail::format_double(fit.constants.c) << "\n";
    out << "d=" << detail::format_double(fit.constants.d) << "\n";
    out << "a0=" << detail::format_double(fit.constants.a0) << "\n";
    out << "b0=" << detail::format_double(fit.constants.b0) << "\n";
    out << "c0=" << detail::format_double(fit.constants.c0) << "\n";
    out << "d0=" << detail::format_double(fit.constants.d0) << "\n";
    out << "final_mse_db2=" << detail::format_double(fit.final_mse) << "\n";
    out << "rmse_db=" << detail::format_double(std::sqrt(fit.final_mse)) << "\n";
    out << "iterations=" << fit.iterations << "\n";

    write_residual_csv(residuals_path,
                       band_residual_quartiles(records, fit.constants, args.bands));

    std::cout << "constants fit: rmse " << detail::format_double(std::sqrt(fit.final_mse))
              << " dB over " << records.size() << " records\n";
  }
  std::cout << "coefficients: " << args.out << "\nresiduals: " << residuals_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiband SAR soil-moisture retrieval toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic sample-set CSV");
  synth->add_option("--scenario", synth_args.scenario, "bare or veg")
      ->required()
      ->check(CLI::IsMember({"bare", "veg"}));
  synth->add_option("--n", synth_args.n, "number of records")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed)->capture_default_str();
  synth->add_option("--noise-db", synth_args.noise_db, "dB noise std-dev")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth->add_option("--out", synth_args.out, "output CSV")->required();
  synth->add_option("--lambda-p", synth_args.bands.lambda_p_cm, "P wavelength, cm")
      ->capture_default_str();
  synth->add_option("--lambda-l", synth_args.bands.lambda_l_cm, "L wavelength, cm")
      ->capture_default_str();
  synth->add_option("--lambda-c", synth_args.bands.lambda_c_cm, "C wavelength, cm")
      ->capture_default_str();

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "Train an inverter on a sample CSV");
  train->add_option("--scenario", train_args.scenario, "bare or veg")
      ->required()
      ->check(CLI::IsMember({"bare", "veg"}));
  train->add_option("--data", train_args.data, "training CSV")->required();
  train->add_option("--out", train_args.out, "output MLPW1 weight file")->required();
  train->add_option("--report", train_args.report, "report path (default <out>.report.txt)");
  train->add_option("--max-iter", train_args.max_iter)
      ->check(CLI::Range(1, 1000000))
      ->capture_default_str();
  train->add_option("--mse-goal", train_args.mse_goal, "scaled-unit MSE goal")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--seed", train_args.seed)->capture_default_str();

  EstimateArgs est_args;
  CLI::App* estimate = app.add_subcommand("estimate", "Estimate moisture over rasters");
  estimate->add_option("--model", est_args.model_dir, "model bundle directory")->required();
  estimate->add_option("--sigma-p", est_args.sigma_p, "P-band dB raster")->required();
  estimate->add_option("--sigma-l", est_args.sigma_l, "L-band dB raster")->required();
  estimate->add_option("--sigma-c", est_args.sigma_c, "C-band dB raster (optional)");
  estimate->add_option("--theta", est_args.theta, "incidence angle: degrees or raster")
      ->required();
  estimate->add_option("--h-rms", est_args.h_rms, "surface roughness, cm")
      ->check(CLI::PositiveNumber);
  estimate->add_option("--speckle-window-m", est_args.speckle_window_m,
                       "moving-average window, m (0 = off)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  estimate->add_option("--out-prefix", est_args.out_prefix, "output path prefix")
      ->required();

  EvaluateArgs eval_args;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare estimates to samples");
  evaluate->add_option("--estimates", eval_args.estimates, "estimate raster")->required();
  evaluate->add_option("--samples", eval_args.samples, "ground-sample CSV")->required();
  evaluate->add_option("--branch", eval_args.branch, "branch raster (optional)");
  evaluate->add_option("--window-m", eval_args.window_m, "sampling window, m")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--out", eval_args.out, "report path")->required();

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Refit empirical coefficients");
  fit->add_option("--what", fit_args.what, "height-lm or dubois")
      ->required()
      ->check(CLI::IsMember({"height-lm", "dubois"}));
  fit->add_option("--data", fit_args.data, "tuning CSV")->required();
  fit->add_option("--out", fit_args.out, "coefficients output file")->required();
  fit->add_option("--init", fit_args.init, "initial constants file (dubois)");
  fit->add_option("--lambda-p", fit_args.bands.lambda_p_cm)->capture_default_str();
  fit->add_option("--lambda-l", fit_args.bands.lambda_l_cm)->capture_default_str();
  fit->add_option("--lambda-c", fit_args.bands.lambda_c_cm)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) return run_synth(synth_args);
    if (train->parsed()) return run_train(train_args);
    if (estimate->parsed()) return run_estimate(est_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (fit->parsed()) return run_fit(fit_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
