#ifndef EDFA_NETWORK_HPP
#define EDFA_NETWORK_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "edfa/features.hpp"

namespace edfa {

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InsufficientBatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// SELU constants as commonly rounded; full-precision values available via
// selu_constants(false).
inline constexpr double kSeluAlphaRounded = 1.673;
inline constexpr double kSeluLambdaRounded = 1.050;
inline constexpr double kSeluAlphaFull = 1.6732632423543772;
inline constexpr double kSeluLambdaFull = 1.0507009873554805;

inline double selu(double x, double alpha = kSeluAlphaRounded,
                   double lambda = kSeluLambdaRounded) {
  return x > 0.0 ? lambda * x : lambda * alpha * (std::exp(x) - 1.0);
}

inline double selu_prime(double x, double alpha = kSeluAlphaRounded,
                         double lambda = kSeluLambdaRounded) {
  return x > 0.0 ? lambda : lambda * alpha * std::exp(x);
}

inline std::vector<int> canonical_dims() { return {196, 200, 200, 100, 100, 95}; }

/// Layered SELU MLP. Weight layer l maps dims[l] -> dims[l+1]; SELU on the
/// four hidden layers, identity on the output.
struct Network {
  std::vector<int> dims = canonical_dims();
  std::vector<Eigen::MatrixXd> weights;  // [out x in] per layer
  std::vector<Eigen::VectorXd> biases;
  double selu_alpha = kSeluAlphaRounded;
  double selu_lambda = kSeluLambdaRounded;
  Standardizer standardizer;
  std::optional<Eigen::MatrixXd> coral_reference;  // last-hidden covariance
  nlohmann::json metadata;

  int n_layers() const { return static_cast<int>(weights.size()); }
};

/// Weights ~ N(0, 1/fan_in), biases 0 (the SELU fixed-point scheme).
Network init_network(std::mt19937_64& rng, const std::vector<int>& dims = canonical_dims(),
                     bool full_precision_selu = false);

long param_count(const Network& net);

/// Multiply-add pairs counted as 2 FLOPs plus one add per bias; activations
/// uncounted.
long flop_count(const Network& net);

struct ForwardCache {
  std::vector<Eigen::MatrixXd> pre;  // pre-activations z_l, N x dims[l+1]
  std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[l] = post-activation
  const Eigen::MatrixXd& output() const { return act.back(); }
  const Eigen::MatrixXd& last_hidden() const { return act[act.size() - 2]; }
};

/// Batch rows are standardized feature vectors (sentinels intact).
ForwardCache forward(const Network& net, const Eigen::MatrixXd& batch);

/// Mean over records of (1/sum c_i) * sum c_i (pred_i - meas_i)^2.
double weighted_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas,
                    const Eigen::MatrixXd& mask);

/// Sample covariance C = (F - mean)^T (F - mean) / (N - 1).
Eigen::MatrixXd batch_covariance(const Eigen::MatrixXd& feats);

/// ||C_S - C_T||_F^2 / (4 d^2); the lambda weighting is the caller's.
double coral_penalty(const Eigen::MatrixXd& c_source, const Eigen::MatrixXd& c_target);

struct LossBreakdown {
  double weighted_mse = 0.0;
  double coral = 0.0;
  double lambda_coral = 0.0;
  double total() const { return weighted_mse + lambda_coral * coral; }
};

struct LossSpec {
  double lambda_coral = 0.0;
  const Eigen::MatrixXd* coral_reference = nullptr;  // required when lambda > 0
};

struct Gradients {
  std::vector<Eigen::MatrixXd> d_weights;
  std::vector<Eigen::VectorXd> d_biases;
};

/// Exact gradients of weighted MSE plus the optional CORAL term; the CORAL
/// gradient flows through the batch covariance of the last hidden layer.
LossBreakdown backward(const Network& net, const ForwardCache& cache,
                       const Eigen::MatrixXd& meas, const Eigen::MatrixXd& mask,
                       const LossSpec& spec, Gradients& grads);

struct AdamState {
  std::vector<Eigen::MatrixXd> m_w, v_w;
  std::vector<Eigen::VectorXd> m_b, v_b;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam_state(const Network& net);

/// Global L2-norm clipping then Adam, with a per-weight-layer learning rate.
void adam_step(Network& net, AdamState& state, const Gradients& grads,
               const std::vector<double>& lr_per_layer, double clip);

double global_grad_norm(const Gradients& grads);

// Checkpoint (de)serialization; doubles survive round trip bit-exactly.
nlohmann::json checkpoint_to_json(const Network& net);
Network checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

/// Convenience: assemble + standardize + forward for a set of records.
Eigen::MatrixXd predict_gain(const Network& net,
                             const std::vector<MeasurementRecord>& records);

}  // namespace edfa

#endif
