#include "edfa/train.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <numeric>

namespace edfa {

namespace {

Eigen::MatrixXd stack_standardized(const std::vector<FeatureVector>& vectors,
                                   const Standardizer& standardizer) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(vectors.size()), kFeatureDim);
  for (std::size_t n = 0; n < vectors.size(); ++n)
    rows.row(static_cast<Eigen::Index>(n)) =
        standardizer.apply(vectors[n]).transpose();
  return rows;
}

// Propagate through the first n_frozen hidden layers only.
Eigen::MatrixXd frozen_prefix(const Network& net, const Eigen::MatrixXd& input,
                              int n_frozen) {
  Eigen::MatrixXd a = input;
  for (int l = 0; l < n_frozen; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    Eigen::MatrixXd z = a * net.weights[ul].transpose();
    z.rowwise() += net.biases[ul].transpose();
    a = z.unaryExpr(
        [&](double x) { return selu(x, net.selu_alpha, net.selu_lambda); });
  }
  return a;
}

}  // namespace

Network pretrain_layerwise(const std::vector<FeatureVector>& unlabeled,
                           const Standardizer& standardizer,
                           const PretrainConfig& cfg, std::mt19937_64& rng,
                           const ProgressFn& progress, const StageFn& stage_end) {
  if (unlabeled.size() < 2)
    throw InsufficientData("pretraining needs at least 2 vectors");

  Network net = init_network(rng);
  net.standardizer = standardizer;

  Eigen::MatrixXd clean = stack_standardized(unlabeled, standardizer);
  if (cfg.voa_immunize)
    for (int j = kVoaSlotFirst; j <= kVoaSlotLast; ++j) clean.col(j).setZero();
  std::normal_distribution<double> noise(0.0, cfg.noise_std);

  const int n_hidden = net.n_layers() - 1;
  for (int l = 0; l < n_hidden; ++l) {
    const auto ul = static_cast<std::size_t>(l);
    const Eigen::MatrixXd target = frozen_prefix(net, clean, l);

    // Throwaway autoencoder: trainable layer l plus an untied linear decoder
    // back to layer l's input dimension.
    Network ae;
    ae.dims = {net.dims[ul], net.dims[ul + 1], net.dims[ul]};
    ae.selu_alpha = net.selu_alpha;
    ae.selu_lambda = net.selu_lambda;
    ae.weights.push_back(net.weights[ul]);
    ae.biases.push_back(net.biases[ul]);
    {
      std::normal_distribution<double> gauss(0.0, 1.0);
      const double stddev = 1.0 / std::sqrt(static_cast<double>(ae.dims[1]));
      Eigen::MatrixXd wd(ae.dims[2], ae.dims[1]);
      for (Eigen::Index r = 0; r < wd.rows(); ++r)
        for (Eigen::Index c = 0; c < wd.cols(); ++c) wd(r, c) = stddev * gauss(rng);
      ae.weights.push_back(std::move(wd));
      ae.biases.push_back(Eigen::VectorXd::Zero(ae.dims[2]));
    }

    AdamState adam = make_adam_state(ae);
    const std::vector<double> lrs(2, cfg.lr);
    Gradients grads;

    const Eigen::Index n_rows = clean.rows();
    const Eigen::Index batch = cfg.batch_size > 0
                                   ? std::min<Eigen::Index>(cfg.batch_size, n_rows)
                                   : n_rows;
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_rows));
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs_per_layer; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double epoch_loss = 0.0;
      int n_batches = 0;
      for (Eigen::Index start = 0; start < n_rows; start += batch) {
        const Eigen::Index bs = std::min<Eigen::Index>(batch, n_rows - start);
        // Corrupt the layer's own input space on every presentation; the
        // reconstruction target stays clean.
        Eigen::MatrixXd input(bs, target.cols());
        Eigen::MatrixXd batch_target(bs, target.cols());
        for (Eigen::Index k = 0; k < bs; ++k) {
          const Eigen::Index src = order[static_cast<std::size_t>(start + k)];
          batch_target.row(k) = target.row(src);
          input.row(k) = target.row(src);
          if (cfg.noise_std > 0.0)
            for (Eigen::Index j = 0; j < input.cols(); ++j) {
              if (l == 0 && cfg.voa_immunize && j >= kVoaSlotFirst &&
                  j <= kVoaSlotLast)
                continue;  // keep the neutralized slots exactly zero
              if (l > 0 || input(k, j) != standardizer.sentinel)
                input(k, j) += noise(rng);
            }
        }
        const ForwardCache cache = forward(ae, input);
        const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(bs, target.cols());
        const LossBreakdown loss =
            backward(ae, cache, batch_target, ones, LossSpec{}, grads);
        adam_step(ae, adam, grads, lrs, /*clip=*/0.0);
        epoch_loss += loss.weighted_mse;
        ++n_batches;
      }
      if (progress)
        progress({"pretrain", l + 1, epoch + 1,
                  epoch_loss / std::max(n_batches, 1)});
    }
    net.weights[ul] = ae.weights[0];
    net.biases[ul] = ae.biases[0];
    if (stage_end) stage_end(l + 1, net);
  }
  return net;
}

void least_squares_readout(Network& net,
                           const std::vector<MeasurementRecord>& labeled,
                           double ridge, int replicas, double channel_dropout,
                           std::mt19937_64* rng) {
  if (labeled.empty()) throw InsufficientData("no labeled records");
  if (replicas > 0 && rng == nullptr)
    throw std::invalid_argument("least_squares_readout: replicas require rng");
  const int h = net.dims[net.dims.size() - 2];
  const Eigen::Index n = static_cast<Eigen::Index>(labeled.size());
  const int copies = 1 + std::max(replicas, 0);

  Eigen::MatrixXd x(n * copies, kFeatureDim);
  std::bernoulli_distribution zap(std::clamp(channel_dropout, 0.0, 1.0));
  for (int rep = 0; rep < copies; ++rep)
    for (Eigen::Index i = 0; i < n; ++i) {
      FeatureVector v = net.standardizer.apply(
          assemble_features(labeled[static_cast<std::size_t>(i)]));
      if (rep > 0 && channel_dropout > 0.0)
        for (int j = kFeatureDim - 2 * kNumChannels; j < kFeatureDim; ++j)
          if (zap(*rng)) v[j] = 0.0;
      x.row(rep * n + i) = v.transpose();
    }
  const Eigen::MatrixXd feats = forward(net, x).last_hidden();

  Eigen::MatrixXd w(kNumChannels, h);
  Eigen::VectorXd b(kNumChannels);
  Eigen::MatrixXd a(h + 1, h + 1);
  Eigen::VectorXd rhs(h + 1);
  Eigen::VectorXd phi(h + 1);
  for (int ch = 0; ch < kNumChannels; ++ch) {
    a.setZero();
    rhs.setZero();
    for (Eigen::Index row = 0; row < feats.rows(); ++row) {
      const auto& r = labeled[static_cast<std::size_t>(row % n)];
      if (!r.mask.active(ch)) continue;
      phi.head(h) = feats.row(row).transpose();
      phi[h] = 1.0;
      a.noalias() += phi * phi.transpose();
      rhs.noalias() += phi * (r.p_out_dbm[ch] - r.p_in_dbm[ch]);
    }
    a.diagonal().array() += ridge;
    const Eigen::VectorXd beta = a.ldlt().solve(rhs);
    w.row(ch) = beta.head(h).transpose();
    b[ch] = beta[h];
  }
  net.weights.back() = std::move(w);
  net.biases.back() = std::move(b);
}

Network finetune_supervised(Network net,
                            const std::vector<MeasurementRecord>& labeled,
                            const FinetuneConfig& cfg, std::mt19937_64& rng,
                            const ProgressFn& progress) {
  if (labeled.empty()) throw InsufficientData("no labeled records");

  if (cfg.voa_immunize && cfg.epochs > 0) {
    // Neutralize the sentinel pathway before anything sees the network:
    // zeroed (and below, frozen) first-layer VOA weights make -999-imputed
    // inputs contribute nothing instead of blowing up through SELU's linear
    // half, so records with and without VOA telemetry share the same
    // feature geometry.
    for (int j = kVoaSlotFirst; j <= kVoaSlotLast; ++j)
      net.weights.front().col(j).setZero();
  }

  if (cfg.ls_readout && cfg.epochs > 0)
    least_squares_readout(net, labeled, cfg.ls_ridge, cfg.ls_replicas,
                          cfg.channel_dropout, &rng);

  const Eigen::Index n = static_cast<Eigen::Index>(labeled.size());
  Eigen::MatrixXd features(n, kFeatureDim), gains(n, kNumChannels),
      masks(n, kNumChannels);
  for (Eigen::Index i = 0; i < n; ++i) {
    features.row(i) =
        net.standardizer.apply(assemble_features(labeled[static_cast<std::size_t>(i)]))
            .transpose();
    Eigen::VectorXd g, m;
    assemble_target(labeled[static_cast<std::size_t>(i)], g, m);
    gains.row(i) = g.transpose();
    masks.row(i) = m.transpose();
  }

  AdamState adam = make_adam_state(net);
  const std::vector<double> lrs(static_cast<std::size_t>(net.n_layers()), cfg.lr);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Gradients grads;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    int n_batches = 0;
    for (Eigen::Index start = 0; start < n; start += cfg.batch_size) {
      const Eigen::Index bs = std::min<Eigen::Index>(cfg.batch_size, n - start);
      Eigen::MatrixXd bf(bs, kFeatureDim), bg(bs, kNumChannels), bm(bs, kNumChannels);
      for (Eigen::Index k = 0; k < bs; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(start + k)];
        bf.row(k) = features.row(src);
        bg.row(k) = gains.row(src);
        bm.row(k) = masks.row(src);
      }
      if (cfg.channel_dropout > 0.0) {
        std::bernoulli_distribution zap(cfg.channel_dropout);
        for (Eigen::Index k = 0; k < bs; ++k)
          for (int j = kFeatureDim - 2 * kNumChannels; j < kFeatureDim; ++j)
            if (zap(rng)) bf(k, j) = 0.0;  // standardized mean
      }
      const ForwardCache cache = forward(net, bf);
      const LossBreakdown loss = backward(net, cache, bg, bm, LossSpec{}, grads);
      if (cfg.voa_immunize)
        for (int j = kVoaSlotFirst; j <= kVoaSlotLast; ++j)
          grads.d_weights.front().col(j).setZero();
      adam_step(net, adam, grads, lrs, cfg.clip);
      epoch_loss += loss.weighted_mse;
      ++n_batches;
    }
    if (progress)
      progress({"finetune", 0, epoch + 1, epoch_loss / std::max(n_batches, 1)});
  }
  if (cfg.ls_readout && cfg.epochs > 0)
    least_squares_readout(net, labeled, cfg.ls_ridge, cfg.ls_replicas,
                          cfg.channel_dropout, &rng);
  return net;
}

Network train_direct(const std::vector<MeasurementRecord>& train_records,
                     const PretrainConfig& pre_cfg, const FinetuneConfig& fin_cfg,
                     std::mt19937_64& rng, bool skip_pretrain,
                     const ProgressFn& progress) {
  if (train_records.empty()) throw InsufficientData("empty training campaign");

  std::vector<FeatureVector> all_features;
  all_features.reserve(train_records.size());
  for (const auto& r : train_records) all_features.push_back(assemble_features(r));
  const Standardizer standardizer = fit_standardizer(all_features);

  // Unlabeled pretraining pool: per gain setting, a seeded draw of the
  // input-side feature vectors.
  std::map<double, std::vector<std::size_t>> by_gain;
  for (std::size_t i = 0; i < train_records.size(); ++i)
    by_gain[train_records[i].gain_target_db].push_back(i);
  std::vector<FeatureVector> pretrain_pool;
  for (auto& [gain, idx] : by_gain) {
    if (static_cast<int>(idx.size()) < pre_cfg.samples_per_gain_setting)
      throw InsufficientData("gain setting " + std::to_string(gain) +
                             ": fewer records than samples_per_gain_setting");
    std::shuffle(idx.begin(), idx.end(), rng);
    for (int k = 0; k < pre_cfg.samples_per_gain_setting; ++k)
      pretrain_pool.push_back(all_features[idx[static_cast<std::size_t>(k)]]);
  }

  Network net;
  if (skip_pretrain) {
    net = init_network(rng);
    net.standardizer = standardizer;
  } else {
    net = pretrain_layerwise(pretrain_pool, standardizer, pre_cfg, rng, progress);
  }

  // Labeled fine-tuning pool: fully loaded plus random channel configs.
  std::vector<std::size_t> labeled_pool;
  for (std::size_t i = 0; i < train_records.size(); ++i) {
    const auto& r = train_records[i];
    if (r.config_class == ConfigClass::Random ||
        (r.config_class == ConfigClass::Fixed && r.mask == ChannelMask::full()))
      labeled_pool.push_back(i);
  }
  if (static_cast<int>(labeled_pool.size()) < fin_cfg.labeled_count)
    throw InsufficientData("labeled pool smaller than labeled_count");
  std::shuffle(labeled_pool.begin(), labeled_pool.end(), rng);
  std::vector<MeasurementRecord> labeled;
  for (int k = 0; k < fin_cfg.labeled_count; ++k)
    labeled.push_back(train_records[labeled_pool[static_cast<std::size_t>(k)]]);

  net.metadata["source_device"] = train_records.front().device_id;
  net.metadata["training"] = skip_pretrain ? "supervised_only" : "pretrain+finetune";
  net.metadata["labeled_count"] = fin_cfg.labeled_count;
  return finetune_supervised(std::move(net), labeled, fin_cfg, rng, progress);
}

}  // namespace edfa
