#include "sarsoil/calib.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "sarsoil/errors.hpp"
#include "sarsoil/soil_physics.hpp"

namespace sarsoil {

namespace {

constexpr double kPi = 3.14159265358979323846;

double quantile(const std::vector<double>& sorted, double p) {
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(h);
  if (i + 1 >= sorted.size()) return sorted.back();
  return sorted[i] + (h - i) * (sorted[i + 1] - sorted[i]);
}

/// One dB-domain measurement row of the coefficient fit.
struct FitRow {
  double log_f;       // 10 log10 f(theta)
  double log_g;       // 10 log10 g(h_lambda, theta)
  double eps_tan;     // 10 eps tan(theta)
  double log_lambda;  // 10 log10 lambda_cm
  double height;      // 10 h
  double lambda_m;    // lambda_cm / 100
  double measured_db;
};

double predict_db(const FitRow& row, const Eigen::VectorXd& p) {
  // p = [a, b, c, d, a0, b0, c0, d0]
  return row.log_f + p[0] * row.log_g + p[1] * row.log_lambda + p[2] * row.eps_tan +
         10.0 * p[3] + p[4] * row.height + 10.0 * p[5] +
         p[6] * 10.0 * row.lambda_m * row.lambda_m + p[7] * 10.0 * row.lambda_m;
}

}  // namespace

double estimate_height_raw(double sigma_l_db, double sigma_p_db,
                           const HeightLmCoeffs& coeffs) {
  return coeffs.intercept + coeffs.coef_l * sigma_l_db + coeffs.coef_p * sigma_p_db;
}

double estimate_height(double sigma_l_db, double sigma_p_db, const HeightLmCoeffs& coeffs) {
  return std::clamp(estimate_height_raw(sigma_l_db, sigma_p_db, coeffs), 0.0,
                    kMaxCropHeightM);
}

HeightLmFit fit_height_lm(const std::vector<SampleRecord>& records) {
  const auto n = static_cast<Eigen::Index>(records.size());
  if (n < 3) throw FitError("height fit needs at least three records");

  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd heights(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = records[i].sigma_l_db;
    design(i, 2) = records[i].sigma_p_db;
    heights[i] = records[i].crop_height_m;
  }

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < 3) {
    throw FitError("rank-deficient height design: reflectivities do not span a plane");
  }
  const Eigen::VectorXd beta = qr.solve(heights);

  HeightLmFit fit;
  fit.coeffs = {beta[0], beta[1], beta[2]};
  fit.n = static_cast<int>(n);
  fit.rmse = std::sqrt((heights - design * beta).squaredNorm() / static_cast<double>(n));
  return fit;
}

double residual_sigma_dif(double measured_db, const SceneParams& scene,
                          const DuboisConstants& k) {
  return measured_db - db_from_linear(height_adjusted_reflectivity(scene, k));
}

std::vector<BandResidualSummary> band_residual_quartiles(
    const std::vector<SampleRecord>& records, const DuboisConstants& k,
    const BandProfile& bands) {
  const std::vector<std::pair<std::string, double>> band_list{
      {"P", bands.lambda_p_cm}, {"L", bands.lambda_l_cm}, {"C", bands.lambda_c_cm}};

  std::vector<BandResidualSummary> summaries;
  for (const auto& [name, lambda_cm] : band_list) {
    std::vector<double> residuals;
    for (const SampleRecord& rec : records) {
      double measured;
      if (name == "P") {
        measured = rec.sigma_p_db;
      } else if (name == "L") {
        measured = rec.sigma_l_db;
      } else {
        if (!rec.sigma_c_db) continue;
        measured = *rec.sigma_c_db;
      }
      SceneParams scene{rec.theta_deg, rec.h_rms_cm, dielectric_from_moisture(rec.mv),
                        lambda_cm, rec.crop_height_m};
      residuals.push_back(residual_sigma_dif(measured, scene, k));
    }
    BandResidualSummary s;
    s.band = name;
    s.n = static_cast<int>(residuals.size());
    if (!residuals.empty()) {
      std::sort(residuals.begin(), residuals.end());
      s.min = residuals.front();
      s.q1 = quantile(residuals, 0.25);
      s.median = quantile(residuals, 0.5);
      s.q3 = quantile(residuals, 0.75);
      s.max = residuals.back();
      double sum = 0.0;
      for (double r : residuals) sum += r;
      s.mean = sum / s.n;
    }
    summaries.push_back(std::move(s));
  }
  return summaries;
}

LmOptions default_dubois_fit_options() {
  LmOptions opts;
  opts.max_iter = 200;
  opts.mse_goal = 1e-18;
  return opts;
}

DuboisFit fit_dubois_constants(const std::vector<SampleRecord>& records,
                               const DuboisConstants& init, const BandProfile& bands,
                               const LmOptions& opts) {
  std::set<double> moistures, heights;
  bool any_c = false;
  for (const SampleRecord& rec : records) {
    moistures.insert(rec.mv);
    heights.insert(rec.crop_height_m);
    any_c = any_c || rec.sigma_c_db.has_value();
  }
  if (moistures.size() < 2 || heights.size() < 2 || !any_c) {
    throw FitError(
        "coefficient fit needs records spanning two moisture values, two crop heights "
        "and all three bands");
  }

  std::vector<FitRow> rows;
  for (const SampleRecord& rec : records) {
    const double eps = dielectric_from_moisture(rec.mv);
    const double tan_theta = std::tan(rec.theta_deg * kPi / 180.0);
    const auto add_band = [&](double lambda_cm, double measured_db) {
      const double h_lambda = normalized_roughness(rec.h_rms_cm, lambda_cm);
      FitRow row;
      row.log_f = 10.0 * std::log10(angular_term(rec.theta_deg));
      row.log_g = 10.0 * std::log10(roughness_term(h_lambda, rec.theta_deg));
      row.eps_tan = 10.0 * eps * tan_theta;
      row.log_lambda = 10.0 * std::log10(lambda_cm);
      row.height = 10.0 * rec.crop_height_m;
      row.lambda_m = lambda_cm / 100.0;
      row.measured_db = measured_db;
      rows.push_back(row);
    };
    add_band(bands.lambda_p_cm, rec.sigma_p_db);
    add_band(bands.lambda_l_cm, rec.sigma_l_db);
    if (rec.sigma_c_db) add_band(bands.lambda_c_cm, *rec.sigma_c_db);
  }

  const auto residual_fn = [&rows](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      r[static_cast<Eigen::Index>(i)] = predict_db(rows[i], p) - rows[i].measured_db;
    }
    return r;
  };
  const auto jacobian_fn = [&rows](const Eigen::VectorXd&) {
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(rows.size()), 8);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      jac(r, 0) = rows[i].log_g;
      jac(r, 1) = rows[i].log_lambda;
      jac(r, 2) = rows[i].eps_tan;
      jac(r, 3) = 10.0;
      jac(r, 4) = rows[i].height;
      jac(r, 5) = 10.0;
      jac(r, 6) = 10.0 * rows[i].lambda_m * rows[i].lambda_m;
      jac(r, 7) = 10.0 * rows[i].lambda_m;
    }
    return jac;
  };

  Eigen::VectorXd params(8);
  params << init.a, init.b, init.c, init.d, init.a0, init.b0, init.c0, init.d0;
  LmResult lm;
  try {
    lm = lm_minimize(residual_fn, jacobian_fn, params, opts);
  } catch (const TrainingError& e) {
    // params holds the best accepted point; report it with the failure.
    std::string best = "best-so-far:";
    const char* names[] = {"a", "b", "c", "d", "a0", "b0", "c0", "d0"};
    for (int i = 0; i < 8; ++i) {
      best += std::string(" ") + names[i] + "=" + std::to_string(params[i]);
    }
    throw FitError(std::string("coefficient fit did not converge: ") + e.what() + "; " +
                   best);
  }

  DuboisFit fit;
  fit.constants = {params[0], params[1], params[2], params[3],
                   params[4], params[5], params[6], params[7]};
  fit.final_mse = lm.final_mse;
  fit.iterations = lm.iterations;
  fit.converged = lm.converged;
  return fit;
}

}  // namespace sarsoil
