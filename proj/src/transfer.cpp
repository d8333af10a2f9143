#include "edfa/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace edfa {

namespace {

void build_batch(const Network& net, const std::vector<MeasurementRecord>& records,
                 Eigen::MatrixXd& features, Eigen::MatrixXd& gains,
                 Eigen::MatrixXd& masks) {
  const Eigen::Index n = static_cast<Eigen::Index>(records.size());
  features.resize(n, kFeatureDim);
  gains.resize(n, kNumChannels);
  masks.resize(n, kNumChannels);
  for (Eigen::Index i = 0; i < n; ++i) {
    features.row(i) =
        net.standardizer.apply(assemble_features(records[static_cast<std::size_t>(i)]))
            .transpose();
    Eigen::VectorXd g, m;
    assemble_target(records[static_cast<std::size_t>(i)], g, m);
    gains.row(i) = g.transpose();
    masks.row(i) = m.transpose();
  }
}

}  // namespace

double layer_lr(TlMode mode, int l, int n_layers, int epoch, double alpha0,
                double theta_or_ratio, int halving_period) {
  if (l < 1 || l > n_layers) throw std::invalid_argument("layer index out of range");
  if (mode == TlMode::Homogeneous)
    return alpha0 * std::pow(10.0, theta_or_ratio * (n_layers - l));
  double lr = alpha0 * std::pow(theta_or_ratio, n_layers - l);
  if (halving_period > 0)
    lr *= std::pow(0.5, static_cast<double>(epoch / halving_period));
  return lr;
}

Network homogeneous_transfer(const Network& source,
                             const std::vector<MeasurementRecord>& shots,
                             const HomoTlConfig& cfg, std::mt19937_64& /*rng*/,
                             const ProgressFn& progress) {
  if (shots.empty()) throw EmptyShots("homogeneous transfer needs shots");

  Network net = source;  // fine-tune a copy, source untouched
  Eigen::MatrixXd features, gains, masks;
  build_batch(net, shots, features, gains, masks);

  const int n_layers = net.n_layers();
  std::vector<double> lrs(static_cast<std::size_t>(n_layers));
  for (int l = 1; l <= n_layers; ++l)
    lrs[static_cast<std::size_t>(l - 1)] =
        layer_lr(TlMode::Homogeneous, l, n_layers, 0, cfg.alpha0, cfg.theta);

  AdamState adam = make_adam_state(net);
  Gradients grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {  // tiny shot sets: full batch
    const ForwardCache cache = forward(net, features);
    const LossBreakdown loss = backward(net, cache, gains, masks, LossSpec{}, grads);
    adam_step(net, adam, grads, lrs, cfg.clip);
    if (progress) progress({"homo_tl", 0, epoch + 1, loss.weighted_mse});
  }
  net.metadata["transfer"] = "homogeneous";
  net.metadata["shots"] = static_cast<int>(shots.size());
  return net;
}

Eigen::MatrixXd reference_covariance(const Network& source,
                                     const std::vector<FeatureVector>& source_train,
                                     int n, std::mt19937_64& rng) {
  if (static_cast<int>(source_train.size()) < n)
    throw InsufficientData("source training set smaller than reference batch");
  std::vector<std::size_t> idx(source_train.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);

  Eigen::MatrixXd batch(n, kFeatureDim);
  for (int k = 0; k < n; ++k)
    batch.row(k) =
        source.standardizer.apply(source_train[idx[static_cast<std::size_t>(k)]])
            .transpose();
  return batch_covariance(forward(source, batch).last_hidden());
}

Network heterogeneous_transfer(const Network& source,
                               const std::vector<MeasurementRecord>& shots,
                               const HeteroTlConfig& cfg, std::mt19937_64& rng,
                               const ProgressFn& progress) {
  if (shots.empty()) throw EmptyShots("heterogeneous transfer needs shots");
  if (cfg.lambda_coral != 0.0 && !source.coral_reference)
    throw MissingReference("source checkpoint has no CORAL reference covariance");

  Network net = source;
  Eigen::MatrixXd features, gains, masks;
  build_batch(net, shots, features, gains, masks);
  const Eigen::Index n = features.rows();

  LossSpec spec;
  spec.lambda_coral = cfg.lambda_coral;
  if (net.coral_reference) spec.coral_reference = &*net.coral_reference;

  const int n_layers = net.n_layers();
  AdamState adam = make_adam_state(net);
  Gradients grads;
  std::vector<double> lrs(static_cast<std::size_t>(n_layers));
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int l = 1; l <= n_layers; ++l)
      lrs[static_cast<std::size_t>(l - 1)] =
          layer_lr(TlMode::Heterogeneous, l, n_layers, epoch, cfg.output_lr,
                   cfg.layer_ratio, cfg.halving_period);

    // Batch for C_T: the whole shot set when it fits, else a random subset.
    const Eigen::MatrixXd* bf = &features;
    const Eigen::MatrixXd* bg = &gains;
    const Eigen::MatrixXd* bm = &masks;
    Eigen::MatrixXd sf, sg, sm;
    if (n > cfg.reference_batch) {
      std::shuffle(idx.begin(), idx.end(), rng);
      sf.resize(cfg.reference_batch, kFeatureDim);
      sg.resize(cfg.reference_batch, kNumChannels);
      sm.resize(cfg.reference_batch, kNumChannels);
      for (int k = 0; k < cfg.reference_batch; ++k) {
        sf.row(k) = features.row(idx[static_cast<std::size_t>(k)]);
        sg.row(k) = gains.row(idx[static_cast<std::size_t>(k)]);
        sm.row(k) = masks.row(idx[static_cast<std::size_t>(k)]);
      }
      bf = &sf;
      bg = &sg;
      bm = &sm;
    }

    const ForwardCache cache = forward(net, *bf);
    const LossBreakdown loss = backward(net, cache, *bg, *bm, spec, grads);
    adam_step(net, adam, grads, lrs, /*clip=*/1.0);
    if (progress) progress({"hetero_tl", 0, epoch + 1, loss.total()});
  }
  net.metadata["transfer"] = "heterogeneous";
  net.metadata["lambda_coral"] = cfg.lambda_coral;
  net.metadata["shots"] = static_cast<int>(shots.size());
  return net;
}

std::vector<MeasurementRecord> tl_shot_sampler(
    const std::vector<MeasurementRecord>& target_campaign, TlMode mode, int shots,
    std::mt19937_64& rng) {
  std::map<double, std::vector<std::size_t>> full_by_gain, random_by_gain;
  for (std::size_t i = 0; i < target_campaign.size(); ++i) {
    const auto& r = target_campaign[i];
    if (r.mask == ChannelMask::full()) full_by_gain[r.gain_target_db].push_back(i);
    if (r.config_class == ConfigClass::Random)
      random_by_gain[r.gain_target_db].push_back(i);
  }
  if (full_by_gain.empty())
    throw MissingFullLoad("target campaign has no fully loaded record");

  std::vector<MeasurementRecord> out;
  for (auto& [gain, full_idx] : full_by_gain) {
    out.push_back(target_campaign[full_idx.front()]);
    if (mode == TlMode::Homogeneous) continue;
    auto& pool = random_by_gain[gain];
    if (static_cast<int>(pool.size()) < shots - 1)
      throw InsufficientData("gain setting " + std::to_string(gain) +
                             ": not enough random-class records for shots");
    std::shuffle(pool.begin(), pool.end(), rng);
    for (int k = 0; k < shots - 1; ++k)
      out.push_back(target_campaign[pool[static_cast<std::size_t>(k)]]);
  }
  return out;
}

}  // namespace edfa
