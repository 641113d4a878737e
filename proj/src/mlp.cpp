#include "sarsoil/mlp.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sarsoil/detail/num_io.hpp"
#include "sarsoil/errors.hpp"
#include "sarsoil/rng.hpp"

namespace sarsoil {

namespace {

/// Activations of every layer for a batch; activations[0] is the scaled input.
std::vector<Eigen::MatrixXd> forward_trace(const Mlp& mlp, const Eigen::MatrixXd& scaled) {
  const std::size_t num_weight_layers = mlp.weights.size();
  std::vector<Eigen::MatrixXd> activations(num_weight_layers + 1);
  activations[0] = scaled;
  for (std::size_t k = 0; k < num_weight_layers; ++k) {
    Eigen::MatrixXd z = activations[k] * mlp.weights[k].transpose();
    z.rowwise() += mlp.biases[k].transpose();
    activations[k + 1] = (k + 1 == num_weight_layers) ? z : z.array().tanh().matrix();
  }
  return activations;
}

Eigen::MatrixXd scale_rows(const Scaler& scaler, const Eigen::MatrixXd& raw) {
  Eigen::MatrixXd scaled(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    scaled.row(i) = scaler.scale(raw.row(i).transpose()).transpose();
  }
  return scaled;
}

/// Jacobian of the scaled scalar output w.r.t. every parameter, one row per sample.
Eigen::MatrixXd scaled_jacobian(const Mlp& mlp, const Eigen::MatrixXd& scaled_inputs) {
  const Eigen::Index n = scaled_inputs.rows();
  const std::size_t layers = mlp.weights.size();
  const auto activations = forward_trace(mlp, scaled_inputs);

  // sens[k](i, j) = d output_i / d preactivation of neuron j in layer k.
  std::vector<Eigen::MatrixXd> sens(layers);
  sens[layers - 1] = Eigen::MatrixXd::Ones(n, 1);
  for (std::size_t k = layers - 1; k-- > 0;) {
    const Eigen::MatrixXd upstream = sens[k + 1] * mlp.weights[k + 1];
    sens[k] = upstream.array() * (1.0 - activations[k + 1].array().square());
  }

  Eigen::MatrixXd jac(n, mlp.parameter_count());
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < layers; ++k) {
    const Eigen::Index out_size = mlp.weights[k].rows();
    const Eigen::Index in_size = mlp.weights[k].cols();
    for (Eigen::Index j = 0; j < out_size; ++j) {
      jac.col(col++) = sens[k].col(j);
      for (Eigen::Index m = 0; m < in_size; ++m) {
        jac.col(col++) = sens[k].col(j).cwiseProduct(activations[k].col(m));
      }
    }
  }
  return jac;
}

}  // namespace

void MlpSpec::validate() const {
  if (layer_sizes.size() < 2) {
    throw ConfigError("network needs at least input and output layers");
  }
  for (int size : layer_sizes) {
    if (size < 1) throw ConfigError("layer sizes must be positive");
  }
  if (layer_sizes.back() != 1) {
    throw ConfigError("output layer must have exactly one neuron");
  }
}

Scaler::Scaler(Eigen::VectorXd lo, Eigen::VectorXd hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw ConfigError("scaler bounds length mismatch");
  if (((hi_ - lo_).array() <= 0.0).any()) {
    throw ConfigError("scaler ranges must have positive width");
  }
}

Scaler Scaler::identity(int dims) {
  return Scaler(Eigen::VectorXd::Constant(dims, -1.0), Eigen::VectorXd::Constant(dims, 1.0));
}

Eigen::VectorXd Scaler::scale(const Eigen::VectorXd& x) const {
  if (x.size() != lo_.size()) throw ShapeError("scaler dimension mismatch");
  return (2.0 * (x - lo_).array() / (hi_ - lo_).array() - 1.0).matrix();
}

Eigen::VectorXd Scaler::descale(const Eigen::VectorXd& y) const {
  if (y.size() != lo_.size()) throw ShapeError("scaler dimension mismatch");
  return (lo_.array() + (y.array() + 1.0) * 0.5 * (hi_ - lo_).array()).matrix();
}

int Mlp::parameter_count() const {
  int count = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    count += static_cast<int>(weights[k].size() + biases[k].size());
  }
  return count;
}

Mlp mlp_init(const MlpSpec& spec, std::uint64_t seed) {
  spec.validate();
  Rng rng(seed);
  Mlp mlp;
  mlp.spec = spec;
  const auto& sizes = spec.layer_sizes;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[k]));
    Eigen::MatrixXd w(sizes[k + 1], sizes[k]);
    for (Eigen::Index j = 0; j < w.rows(); ++j) {
      for (Eigen::Index m = 0; m < w.cols(); ++m) {
        w(j, m) = rng.uniform(-bound, bound);
      }
    }
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(Eigen::VectorXd::Zero(sizes[k + 1]));
  }
  mlp.input_scaler = Scaler::identity(sizes.front());
  mlp.output_scaler = Scaler::identity(1);
  return mlp;
}

double mlp_forward(const Mlp& mlp, const Eigen::VectorXd& input) {
  if (input.size() != mlp.spec.inputs()) {
    throw ShapeError("input length does not match the first layer");
  }
  Eigen::VectorXd a = mlp.input_scaler.scale(input);
  for (std::size_t k = 0; k < mlp.weights.size(); ++k) {
    Eigen::VectorXd z = mlp.weights[k] * a + mlp.biases[k];
    a = (k + 1 == mlp.weights.size()) ? z : z.array().tanh().matrix();
  }
  return mlp.output_scaler.descale(a)[0];
}

Eigen::VectorXd mlp_forward_batch(const Mlp& mlp, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() != mlp.spec.inputs()) {
    throw ShapeError("input width does not match the first layer");
  }
  const auto activations = forward_trace(mlp, scale_rows(mlp.input_scaler, inputs));
  const Eigen::VectorXd scaled_out = activations.back().col(0);
  Eigen::VectorXd out(scaled_out.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out[i] = mlp.output_scaler.descale(scaled_out.segment(i, 1))[0];
  }
  return out;
}

Eigen::MatrixXd mlp_jacobian(const Mlp& mlp, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() == 0) throw ShapeError("empty input batch");
  if (inputs.cols() != mlp.spec.inputs()) {
    throw ShapeError("input width does not match the first layer");
  }
  return mlp.output_scaler.half_width(0) *
         scaled_jacobian(mlp, scale_rows(mlp.input_scaler, inputs));
}

Eigen::VectorXd mlp_parameters(const Mlp& mlp) {
  Eigen::VectorXd params(mlp.parameter_count());
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < mlp.weights.size(); ++k) {
    for (Eigen::Index j = 0; j < mlp.weights[k].rows(); ++j) {
      params[pos++] = mlp.biases[k][j];
      for (Eigen::Index m = 0; m < mlp.weights[k].cols(); ++m) {
        params[pos++] = mlp.weights[k](j, m);
      }
    }
  }
  return params;
}

void mlp_set_parameters(Mlp& mlp, const Eigen::VectorXd& params) {
  if (params.size() != mlp.parameter_count()) {
    throw ShapeError("parameter vector length mismatch");
  }
  Eigen::Index pos = 0;
  for (std::size_t k = 0; k < mlp.weights.size(); ++k) {
    for (Eigen::Index j = 0; j < mlp.weights[k].rows(); ++j) {
      mlp.biases[k][j] = params[pos++];
      for (Eigen::Index m = 0; m < mlp.weights[k].cols(); ++m) {
        mlp.weights[k](j, m) = params[pos++];
      }
    }
  }
}

void set_scalers_from_data(Mlp& mlp, const Eigen::MatrixXd& inputs,
                           const Eigen::VectorXd& targets) {
  if (inputs.rows() == 0) throw ShapeError("empty dataset");
  if (inputs.cols() != mlp.spec.inputs()) {
    throw ShapeError("input width does not match the first layer");
  }
  Eigen::VectorXd lo = inputs.colwise().minCoeff();
  Eigen::VectorXd hi = inputs.colwise().maxCoeff();
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (hi[i] <= lo[i]) {
      lo[i] -= 0.5;
      hi[i] += 0.5;
    }
  }
  double out_lo = targets.minCoeff();
  double out_hi = targets.maxCoeff();
  if (out_hi <= out_lo) {
    out_lo -= 0.5;
    out_hi += 0.5;
  }
  mlp.input_scaler = Scaler(lo, hi);
  mlp.output_scaler = Scaler(Eigen::VectorXd::Constant(1, out_lo),
                             Eigen::VectorXd::Constant(1, out_hi));
}

TrainReport lm_train(Mlp& mlp, const Eigen::MatrixXd& inputs,
                     const Eigen::VectorXd& targets, const LmOptions& opts) {
  if (inputs.rows() != targets.size()) {
    throw ShapeError("inputs and targets disagree on sample count");
  }
  if (inputs.cols() != mlp.spec.inputs()) {
    throw ShapeError("input width does not match the first layer");
  }

  TrainReport report;
  if (inputs.rows() < mlp.parameter_count()) {
    report.warning = "dataset smaller than the parameter count (" +
                     std::to_string(inputs.rows()) + " < " +
                     std::to_string(mlp.parameter_count()) + ")";
  }

  const Eigen::MatrixXd scaled_inputs = scale_rows(mlp.input_scaler, inputs);
  Eigen::VectorXd scaled_targets(targets.size());
  for (Eigen::Index i = 0; i < targets.size(); ++i) {
    scaled_targets[i] = mlp.output_scaler.scale(targets.segment(i, 1))[0];
  }

  Mlp work = mlp;
  const auto residual_fn = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
    mlp_set_parameters(work, p);
    const auto activations = forward_trace(work, scaled_inputs);
    return activations.back().col(0) - scaled_targets;
  };
  const auto jacobian_fn = [&](const Eigen::VectorXd& p) -> Eigen::MatrixXd {
    mlp_set_parameters(work, p);
    return scaled_jacobian(work, scaled_inputs);
  };

  Eigen::VectorXd params = mlp_parameters(mlp);
  const LmResult lm = lm_minimize(residual_fn, jacobian_fn, params, opts);
  mlp_set_parameters(mlp, params);

  report.iterations = lm.iterations;
  report.final_mse = lm.final_mse;
  report.mse_history = lm.mse_history;
  report.converged = lm.converged;
  report.damping_final = lm.damping_final;
  return report;
}

void mlp_save(const Mlp& mlp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "MLPW1\n";
  for (std::size_t i = 0; i < mlp.spec.layer_sizes.size(); ++i) {
    out << (i ? " " : "") << mlp.spec.layer_sizes[i];
  }
  out << "\n";
  const auto write_vec = [&out](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      out << (i ? " " : "") << detail::format_double(v[i]);
    }
    out << "\n";
  };
  write_vec(mlp.input_scaler.lo());
  write_vec(mlp.input_scaler.hi());
  write_vec(mlp.output_scaler.lo());
  write_vec(mlp.output_scaler.hi());
  for (std::size_t k = 0; k < mlp.weights.size(); ++k) {
    for (Eigen::Index j = 0; j < mlp.weights[k].rows(); ++j) {
      out << detail::format_double(mlp.biases[k][j]);
      for (Eigen::Index m = 0; m < mlp.weights[k].cols(); ++m) {
        out << " " << detail::format_double(mlp.weights[k](j, m));
      }
      out << "\n";
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

class LineReader {
 public:
  explicit LineReader(const std::filesystem::path& path) : in_(path), path_(path) {
    if (!in_) throw Error("cannot open " + path.string());
  }

  std::string next() {
    std::string line;
    if (!std::getline(in_, line)) {
      throw FormatError(path_.string() + ": unexpected end of file", line_no_ + 1);
    }
    ++line_no_;
    return line;
  }

  bool at_end() {
    return in_.peek() == std::char_traits<char>::eof();
  }

  int line_no() const { return line_no_; }
  std::string where() const { return path_.string(); }

 private:
  std::ifstream in_;
  std::filesystem::path path_;
  int line_no_ = 0;
};

std::vector<double> parse_doubles(LineReader& reader, const std::string& line,
                                  std::size_t expected) {
  std::istringstream ss(line);
  std::vector<double> values;
  std::string token;
  while (ss >> token) {
    double v;
    if (!detail::parse_double(token, v)) {
      throw FormatError(reader.where() + ": bad number '" + token + "'", reader.line_no());
    }
    values.push_back(v);
  }
  if (values.size() != expected) {
    throw FormatError(reader.where() + ": expected " + std::to_string(expected) +
                          " values, found " + std::to_string(values.size()),
                      reader.line_no());
  }
  return values;
}

}  // namespace

Mlp mlp_load(const std::filesystem::path& path) {
  LineReader reader(path);
  if (reader.next() != "MLPW1") {
    throw FormatError(path.string() + ": not an MLPW1 weight file", 1);
  }

  MlpSpec spec;
  {
    std::istringstream ss(reader.next());
    int size;
    while (ss >> size) spec.layer_sizes.push_back(size);
    if (!ss.eof()) {
      throw FormatError(path.string() + ": bad layer size list", reader.line_no());
    }
  }
  try {
    spec.validate();
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what(), 2);
  }

  const int in_dims = spec.inputs();
  const auto in_lo = parse_doubles(reader, reader.next(), in_dims);
  const auto in_hi = parse_doubles(reader, reader.next(), in_dims);
  const auto out_lo = parse_doubles(reader, reader.next(), 1);
  const auto out_hi = parse_doubles(reader, reader.next(), 1);

  Mlp mlp;
  mlp.spec = spec;
  try {
    mlp.input_scaler = Scaler(Eigen::Map<const Eigen::VectorXd>(in_lo.data(), in_dims),
                              Eigen::Map<const Eigen::VectorXd>(in_hi.data(), in_dims));
    mlp.output_scaler = Scaler(Eigen::VectorXd::Constant(1, out_lo[0]),
                               Eigen::VectorXd::Constant(1, out_hi[0]));
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what(), reader.line_no());
  }

  for (std::size_t k = 0; k + 1 < spec.layer_sizes.size(); ++k) {
    const int in_size = spec.layer_sizes[k];
    const int out_size = spec.layer_sizes[k + 1];
    Eigen::MatrixXd w(out_size, in_size);
    Eigen::VectorXd b(out_size);
    for (int j = 0; j < out_size; ++j) {
      const auto row = parse_doubles(reader, reader.next(), 1 + in_size);
      b[j] = row[0];
      for (int m = 0; m < in_size; ++m) w(j, m) = row[m + 1];
    }
    mlp.weights.push_back(std::move(w));
    mlp.biases.push_back(std::move(b));
  }
  if (!reader.at_end()) {
    throw FormatError(path.string() + ": trailing content after weights",
                      reader.line_no() + 1);
  }
  return mlp;
}

}  // namespace sarsoil
