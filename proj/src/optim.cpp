#include "sarsoil/optim.hpp"

#include <cmath>

#include "sarsoil/errors.hpp"

namespace sarsoil {

Eigen::VectorXd lm_step(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& residual,
                        double damping) {
  const Eigen::Index n = jacobian.cols();
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n, n);
  normal.selfadjointView<Eigen::Lower>().rankUpdate(jacobian.transpose());
  normal.diagonal().array() += damping;
  const Eigen::VectorXd rhs = -jacobian.transpose() * residual;
  return normal.selfadjointView<Eigen::Lower>().ldlt().solve(rhs);
}

LmResult lm_minimize(const ResidualFn& residual_fn, const JacobianFn& jacobian_fn,
                     Eigen::VectorXd& params, const LmOptions& opts) {
  if (opts.max_iter < 0 || !(opts.damping_init > 0.0) || !(opts.damping_up > 1.0) ||
      !(opts.damping_down > 0.0 && opts.damping_down < 1.0)) {
    throw ConfigError("invalid Levenberg-Marquardt options");
  }

  Eigen::VectorXd residual = residual_fn(params);
  const double inv_n = 1.0 / static_cast<double>(residual.size());
  double mse = residual.squaredNorm() * inv_n;

  LmResult result;
  result.mse_history.push_back(mse);
  result.damping_final = opts.damping_init;
  double damping = opts.damping_init;

  if (mse <= opts.mse_goal) {
    result.final_mse = mse;
    result.converged = true;
    return result;
  }

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const Eigen::MatrixXd jacobian = jacobian_fn(params);
    const Eigen::Index np = jacobian.cols();
    // The normal matrix is formed once per Jacobian; damping retries only
    // re-solve. Only the lower triangle is maintained.
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(np, np);
    normal.selfadjointView<Eigen::Lower>().rankUpdate(jacobian.transpose());
    const Eigen::VectorXd rhs = -jacobian.transpose() * residual;
    bool accepted = false;
    bool any_solvable = false;

    while (damping <= opts.damping_max) {
      Eigen::MatrixXd damped = normal;
      damped.diagonal().array() += damping;
      const auto system = damped.selfadjointView<Eigen::Lower>();
      const Eigen::VectorXd delta = system.ldlt().solve(rhs);
      // LDLT does not signal NaN/singular inputs reliably; verify the solve.
      if (!delta.allFinite() ||
          !((system * delta - rhs).norm() <= 1e-8 * (rhs.norm() + 1.0))) {
        damping *= opts.damping_up;
        continue;
      }
      any_solvable = true;
      const Eigen::VectorXd trial = params + delta;
      const Eigen::VectorXd trial_residual = residual_fn(trial);
      const double trial_mse = trial_residual.squaredNorm() * inv_n;
      if (std::isfinite(trial_mse) && trial_mse < mse) {
        params = trial;
        residual = trial_residual;
        mse = trial_mse;
        damping *= opts.damping_down;
        result.mse_history.push_back(mse);
        ++result.iterations;
        accepted = true;
        break;
      }
      damping *= opts.damping_up;
    }

    if (!accepted) {
      if (!any_solvable) {
        throw TrainingError("normal equations unsolvable at maximum damping");
      }
      break;  // damping overflow: no improving step exists
    }
    if (mse <= opts.mse_goal) {
      result.converged = true;
      break;
    }
  }

  result.final_mse = mse;
  result.damping_final = damping;
  return result;
}

}  // namespace sarsoil
