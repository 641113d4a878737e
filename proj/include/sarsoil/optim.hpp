#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace sarsoil {

struct LmOptions {
  int max_iter = 500;
  double mse_goal = 1e-6;
  double damping_init = 1e-3;
  double damping_up = 10.0;
  double damping_down = 0.1;
  double damping_max = 1e10;
};

struct LmResult {
  int iterations = 0;           // accepted outer iterations
  double final_mse = 0.0;
  std::vector<double> mse_history;  // initial MSE, then one entry per accepted step
  bool converged = false;       // mse_goal reached
  double damping_final = 0.0;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// One damped Gauss-Newton step: solves (J^T J + damping I) delta = -J^T r.
/// As damping -> 0 this is the Gauss-Newton step; as damping -> infinity it
/// aligns with the negative gradient -J^T r.
Eigen::VectorXd lm_step(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual,
                        double damping);

/// Full-batch Levenberg-Marquardt over params (updated in place).
///
/// Steps are accepted only when they strictly decrease the residual MSE,
/// so the recorded history is strictly decreasing. Stops on mse_goal,
/// max_iter, or when the damping factor escalates past damping_max without
/// finding an acceptable step. Throws TrainingError if the normal equations
/// stay unsolvable (non-finite) through the whole damping escalation.
LmResult lm_minimize(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                     Eigen::VectorXd& params, const LmOptions& opts = {});

}  // namespace sarsoil
