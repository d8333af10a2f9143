#include "edfa/network.hpp"

#include <cmath>
#include <fstream>

namespace edfa {

namespace {

Eigen::MatrixXd selu_matrix(const Eigen::MatrixXd& z, double alpha, double lambda) {
  return z.unaryExpr([=](double x) { return selu(x, alpha, lambda); });
}

Eigen::MatrixXd selu_prime_matrix(const Eigen::MatrixXd& z, double alpha, double lambda) {
  return z.unaryExpr([=](double x) { return selu_prime(x, alpha, lambda); });
}

std::vector<double> to_flat(const Eigen::MatrixXd& m) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  return out;
}

Eigen::MatrixXd from_flat(const std::vector<double>& v, Eigen::Index rows,
                          Eigen::Index cols) {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw DimensionMismatch("checkpoint array size mismatch");
  Eigen::MatrixXd m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = v[k++];
  return m;
}

}  // namespace

Network init_network(std::mt19937_64& rng, const std::vector<int>& dims,
                     bool full_precision_selu) {
  if (dims.size() < 2) throw DimensionMismatch("need at least one weight layer");
  Network net;
  net.dims = dims;
  if (full_precision_selu) {
    net.selu_alpha = kSeluAlphaFull;
    net.selu_lambda = kSeluLambdaFull;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double stddev = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = stddev * gauss(rng);
    net.weights.push_back(std::move(w));
    net.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  net.standardizer.mean = Eigen::VectorXd::Zero(dims.front());
  net.standardizer.std = Eigen::VectorXd::Ones(dims.front());
  return net;
}

long param_count(const Network& net) {
  long n = 0;
  for (int l = 0; l < net.n_layers(); ++l)
    n += net.weights[static_cast<std::size_t>(l)].size() + net.biases[static_cast<std::size_t>(l)].size();
  return n;
}

long flop_count(const Network& net) {
  long n = 0;
  for (int l = 0; l < net.n_layers(); ++l) {
    const auto& w = net.weights[static_cast<std::size_t>(l)];
    n += 2 * static_cast<long>(w.size()) + static_cast<long>(w.rows());
  }
  return n;
}

ForwardCache forward(const Network& net, const Eigen::MatrixXd& batch) {
  if (batch.cols() != net.dims.front())
    throw DimensionMismatch("input width " + std::to_string(batch.cols()) +
                            " != " + std::to_string(net.dims.front()));
  ForwardCache cache;
  cache.act.push_back(batch);
  const int n_layers = net.n_layers();
  for (int l = 0; l < n_layers; ++l) {
    const auto& w = net.weights[static_cast<std::size_t>(l)];
    const auto& b = net.biases[static_cast<std::size_t>(l)];
    Eigen::MatrixXd z = cache.act.back() * w.transpose();
    z.rowwise() += b.transpose();
    cache.pre.push_back(z);
    if (l + 1 < n_layers)
      cache.act.push_back(selu_matrix(z, net.selu_alpha, net.selu_lambda));
    else
      cache.act.push_back(std::move(z));
  }
  return cache;
}

double weighted_mse(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& meas,
                    const Eigen::MatrixXd& mask) {
  if (pred.rows() != meas.rows() || pred.cols() != meas.cols() ||
      pred.rows() != mask.rows() || pred.cols() != mask.cols())
    throw DimensionMismatch("weighted_mse shape mismatch");
  double total = 0.0;
  for (Eigen::Index n = 0; n < pred.rows(); ++n) {
    double wsum = 0.0, err = 0.0;
    for (Eigen::Index i = 0; i < pred.cols(); ++i) {
      if (mask(n, i) == 0.0) continue;
      const double d = pred(n, i) - meas(n, i);
      wsum += mask(n, i);
      err += mask(n, i) * d * d;
    }
    if (wsum <= 0.0) throw EmptyMask();
    total += err / wsum;
  }
  return total / static_cast<double>(pred.rows());
}

Eigen::MatrixXd batch_covariance(const Eigen::MatrixXd& feats) {
  if (feats.rows() < 2) throw InsufficientBatch("batch_covariance needs N >= 2");
  const Eigen::RowVectorXd mean = feats.colwise().mean();
  const Eigen::MatrixXd centered = feats.rowwise() - mean;
  return centered.transpose() * centered / static_cast<double>(feats.rows() - 1);
}

double coral_penalty(const Eigen::MatrixXd& c_source, const Eigen::MatrixXd& c_target) {
  if (c_source.rows() != c_target.rows() || c_source.cols() != c_target.cols() ||
      c_source.rows() != c_source.cols())
    throw DimensionMismatch("coral_penalty expects matching square matrices");
  const double d = static_cast<double>(c_source.rows());
  return (c_source - c_target).squaredNorm() / (4.0 * d * d);
}

LossBreakdown backward(const Network& net, const ForwardCache& cache,
                       const Eigen::MatrixXd& meas, const Eigen::MatrixXd& mask,
                       const LossSpec& spec, Gradients& grads) {
  const int n_layers = net.n_layers();
  const Eigen::MatrixXd& pred = cache.output();
  const Eigen::Index batch = pred.rows();

  LossBreakdown loss;
  loss.lambda_coral = spec.lambda_coral;
  loss.weighted_mse = weighted_mse(pred, meas, mask);

  // d(loss)/d(pred)
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(pred.rows(), pred.cols());
  for (Eigen::Index n = 0; n < batch; ++n) {
    const double wsum = mask.row(n).sum();
    for (Eigen::Index i = 0; i < pred.cols(); ++i)
      if (mask(n, i) != 0.0)
        delta(n, i) = 2.0 * mask(n, i) * (pred(n, i) - meas(n, i)) /
                      (wsum * static_cast<double>(batch));
  }

  // CORAL contribution to the last hidden layer's activations.
  Eigen::MatrixXd coral_d_hidden;
  if (spec.lambda_coral != 0.0) {
    if (!spec.coral_reference)
      throw DimensionMismatch("CORAL loss requested without a reference covariance");
    const Eigen::MatrixXd& hidden = cache.last_hidden();
    if (hidden.rows() < 2) throw InsufficientBatch("CORAL batch needs N >= 2");
    const Eigen::MatrixXd c_t = batch_covariance(hidden);
    loss.coral = coral_penalty(*spec.coral_reference, c_t);
    const double d = static_cast<double>(c_t.rows());
    Eigen::MatrixXd diff = (c_t - *spec.coral_reference) / (2.0 * d * d);
    diff = 0.5 * (diff + diff.transpose().eval());
    const Eigen::RowVectorXd mean = hidden.colwise().mean();
    const Eigen::MatrixXd centered = hidden.rowwise() - mean;
    Eigen::MatrixXd d_centered =
        centered * (2.0 * diff) / static_cast<double>(hidden.rows() - 1);
    coral_d_hidden =
        d_centered.rowwise() - d_centered.colwise().mean();  // through centering
    coral_d_hidden *= spec.lambda_coral;
  }

  grads.d_weights.assign(static_cast<std::size_t>(n_layers), Eigen::MatrixXd());
  grads.d_biases.assign(static_cast<std::size_t>(n_layers), Eigen::VectorXd());
  for (int l = n_layers - 1; l >= 0; --l) {
    const auto ul = static_cast<std::size_t>(l);
    grads.d_weights[ul] = delta.transpose() * cache.act[ul];
    grads.d_biases[ul] = delta.colwise().sum().transpose();
    if (l == 0) break;
    Eigen::MatrixXd d_act = delta * net.weights[ul];
    if (l == n_layers - 1 && coral_d_hidden.size() > 0) d_act += coral_d_hidden;
    delta = d_act.cwiseProduct(
        selu_prime_matrix(cache.pre[ul - 1], net.selu_alpha, net.selu_lambda));
  }
  return loss;
}

AdamState make_adam_state(const Network& net) {
  AdamState s;
  for (int l = 0; l < net.n_layers(); ++l) {
    const auto ul = static_cast<std::size_t>(l);
    s.m_w.push_back(Eigen::MatrixXd::Zero(net.weights[ul].rows(), net.weights[ul].cols()));
    s.v_w.push_back(Eigen::MatrixXd::Zero(net.weights[ul].rows(), net.weights[ul].cols()));
    s.m_b.push_back(Eigen::VectorXd::Zero(net.biases[ul].size()));
    s.v_b.push_back(Eigen::VectorXd::Zero(net.biases[ul].size()));
  }
  return s;
}

double global_grad_norm(const Gradients& grads) {
  double sq = 0.0;
  for (const auto& g : grads.d_weights) sq += g.squaredNorm();
  for (const auto& g : grads.d_biases) sq += g.squaredNorm();
  return std::sqrt(sq);
}

void adam_step(Network& net, AdamState& state, const Gradients& grads,
               const std::vector<double>& lr_per_layer, double clip) {
  const int n_layers = net.n_layers();
  if (static_cast<int>(lr_per_layer.size()) != n_layers)
    throw DimensionMismatch("lr_per_layer size mismatch");

  double scale = 1.0;
  if (clip > 0.0) {
    const double norm = global_grad_norm(grads);
    if (norm > clip) scale = clip / norm;
  }

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (int l = 0; l < n_layers; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    const double lr = lr_per_layer[ul];
    const Eigen::MatrixXd gw = grads.d_weights[ul] * scale;
    const Eigen::VectorXd gb = grads.d_biases[ul] * scale;
    state.m_w[ul] = state.beta1 * state.m_w[ul] + (1.0 - state.beta1) * gw;
    state.v_w[ul] = state.beta2 * state.v_w[ul] + (1.0 - state.beta2) * gw.cwiseAbs2();
    state.m_b[ul] = state.beta1 * state.m_b[ul] + (1.0 - state.beta1) * gb;
    state.v_b[ul] = state.beta2 * state.v_b[ul] + (1.0 - state.beta2) * gb.cwiseAbs2();
    net.weights[ul] -=
        lr * (state.m_w[ul] / bc1)
                 .cwiseQuotient(((state.v_w[ul] / bc2).cwiseSqrt().array() + state.eps).matrix());
    net.biases[ul] -=
        lr * (state.m_b[ul] / bc1)
                 .cwiseQuotient(((state.v_b[ul] / bc2).cwiseSqrt().array() + state.eps).matrix());
  }
}

nlohmann::json checkpoint_to_json(const Network& net) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["layer_dims"] = net.dims;
  j["selu_alpha"] = net.selu_alpha;
  j["selu_lambda"] = net.selu_lambda;
  nlohmann::json weights = nlohmann::json::array();
  nlohmann::json biases = nlohmann::json::array();
  for (int l = 0; l < net.n_layers(); ++l) {
    const auto ul = static_cast<std::size_t>(l);
    weights.push_back(to_flat(net.weights[ul]));
    biases.push_back(std::vector<double>(net.biases[ul].begin(), net.biases[ul].end()));
  }
  j["weights"] = std::move(weights);
  j["biases"] = std::move(biases);
  j["standardizer"] = {
      {"mean", std::vector<double>(net.standardizer.mean.begin(), net.standardizer.mean.end())},
      {"std", std::vector<double>(net.standardizer.std.begin(), net.standardizer.std.end())},
      {"sentinel", net.standardizer.sentinel}};
  if (net.coral_reference) j["coral_reference"] = to_flat(*net.coral_reference);
  j["metadata"] = net.metadata.is_null() ? nlohmann::json::object() : net.metadata;
  return j;
}

Network checkpoint_from_json(const nlohmann::json& j) {
  if (j.at("schema_version").get<int>() != 1)
    throw std::runtime_error("unsupported checkpoint schema_version");
  Network net;
  net.dims = j.at("layer_dims").get<std::vector<int>>();
  net.selu_alpha = j.at("selu_alpha").get<double>();
  net.selu_lambda = j.at("selu_lambda").get<double>();
  const auto& weights = j.at("weights");
  const auto& biases = j.at("biases");
  for (std::size_t l = 0; l + 1 < net.dims.size(); ++l) {
    net.weights.push_back(from_flat(weights.at(l).get<std::vector<double>>(),
                                    net.dims[l + 1], net.dims[l]));
    const auto b = biases.at(l).get<std::vector<double>>();
    net.biases.push_back(Eigen::Map<const Eigen::VectorXd>(
        b.data(), static_cast<Eigen::Index>(b.size())));
  }
  const auto& s = j.at("standardizer");
  const auto mean = s.at("mean").get<std::vector<double>>();
  const auto stdv = s.at("std").get<std::vector<double>>();
  net.standardizer.mean =
      Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  net.standardizer.std =
      Eigen::Map<const Eigen::VectorXd>(stdv.data(), static_cast<Eigen::Index>(stdv.size()));
  net.standardizer.sentinel = s.at("sentinel").get<double>();
  if (j.contains("coral_reference")) {
    const int d = net.dims[net.dims.size() - 2];
    net.coral_reference =
        from_flat(j["coral_reference"].get<std::vector<double>>(), d, d);
  }
  if (j.contains("metadata")) net.metadata = j["metadata"];
  return net;
}

void save_checkpoint(const Network& net, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << checkpoint_to_json(net).dump(2) << '\n';
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  nlohmann::json j;
  f >> j;
  return checkpoint_from_json(j);
}

Eigen::MatrixXd predict_gain(const Network& net,
                             const std::vector<MeasurementRecord>& records) {
  Eigen::MatrixXd batch(static_cast<Eigen::Index>(records.size()), kFeatureDim);
  for (std::size_t n = 0; n < records.size(); ++n)
    batch.row(static_cast<Eigen::Index>(n)) =
        net.standardizer.apply(assemble_features(records[n])).transpose();
  return forward(net, batch).output();
}

}  // namespace edfa
