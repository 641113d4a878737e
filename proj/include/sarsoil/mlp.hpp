#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sarsoil/optim.hpp"

namespace sarsoil {

/// Layer layout of a feed-forward network: tanh hidden layers, linear output.
/// The output layer must have a single neuron. A two-entry spec (no hidden
/// layer) degenerates to an affine map, which is occasionally useful as a
/// linear-regression sanity case.
struct MlpSpec {
  std::vector<int> layer_sizes;

  void validate() const;  // throws ConfigError
  int inputs() const { return layer_sizes.front(); }
};

/// Per-dimension affine map between a value range and [-1, 1].
class Scaler {
 public:
  Scaler() = default;
  Scaler(Eigen::VectorXd lo, Eigen::VectorXd hi);  // throws ConfigError on width <= 0

  static Scaler identity(int dims);  // [-1, 1] -> [-1, 1]

  Eigen::VectorXd scale(const Eigen::VectorXd& x) const;
  Eigen::VectorXd descale(const Eigen::VectorXd& y) const;

  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }
  int dims() const { return static_cast<int>(lo_.size()); }
  /// d(descaled)/d(scaled) for dimension i.
  double half_width(int i) const { return 0.5 * (hi_[i] - lo_[i]); }

 private:
  Eigen::VectorXd lo_, hi_;
};

struct Mlp {
  MlpSpec spec;
  std::vector<Eigen::MatrixXd> weights;  // weights[k]: size[k+1] x size[k]
  std::vector<Eigen::VectorXd> biases;   // biases[k]: size[k+1]
  Scaler input_scaler;
  Scaler output_scaler;

  int parameter_count() const;
};

struct TrainReport {
  int iterations = 0;
  double final_mse = 0.0;               // scaled output units
  std::vector<double> mse_history;      // strictly decreasing over accepted steps
  bool converged = false;
  double damping_final = 0.0;
  std::string warning;                  // empty when none
};

/// Fresh network with weights uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)],
/// zero biases, identity scalers. Deterministic per seed.
Mlp mlp_init(const MlpSpec& spec, std::uint64_t seed);

/// Scaled input -> tanh hidden layers -> linear output -> descaled output.
double mlp_forward(const Mlp& mlp, const Eigen::VectorXd& input);

/// One forward evaluation per row of `inputs`.
Eigen::VectorXd mlp_forward_batch(const Mlp& mlp, const Eigen::MatrixXd& inputs);

/// Analytic Jacobian of mlp_forward with respect to every parameter,
/// one row per input sample. Column order matches mlp_parameters.
Eigen::MatrixXd mlp_jacobian(const Mlp& mlp, const Eigen::MatrixXd& inputs);

/// Flattened parameters: per layer, per neuron, bias then incoming weights
/// (the same order as the lines of the weight file).
Eigen::VectorXd mlp_parameters(const Mlp& mlp);
void mlp_set_parameters(Mlp& mlp, const Eigen::VectorXd& params);

/// Fits the scalers to the per-column data extents. Constant columns are
/// widened by +-0.5 to keep the ranges invertible.
void set_scalers_from_data(Mlp& mlp, const Eigen::MatrixXd& inputs,
                           const Eigen::VectorXd& targets);

/// Full-batch Levenberg-Marquardt regression of `targets` on `inputs`.
/// Residuals and the reported MSE are in scaled output units. The network is
/// updated in place; training is deterministic given (network, data, opts).
TrainReport lm_train(Mlp& mlp, const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& targets, const LmOptions& opts = {});

/// Text weight format "MLPW1": magic line, layer sizes, scaler ranges, then
/// one line per neuron (bias followed by incoming weights), written with
/// shortest round-trip precision. Loading reproduces outputs bit-identically.
void mlp_save(const Mlp& mlp, const std::filesystem::path& path);
Mlp mlp_load(const std::filesystem::path& path);

}  // namespace sarsoil
