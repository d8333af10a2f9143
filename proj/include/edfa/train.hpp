#ifndef EDFA_TRAIN_HPP
#define EDFA_TRAIN_HPP

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "edfa/network.hpp"

namespace edfa {

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PretrainConfig {
  int samples_per_gain_setting = 512;
  int epochs_per_layer = 1800;
  double lr = 1e-3;
  double noise_std = 0.1;  // on standardized features
  int batch_size = 16;     // <= 0 trains full-batch
  // Zero the VOA telemetry slots of every pretraining input so the learned
  // features never depend on them; pairs with FinetuneConfig::voa_immunize.
  bool voa_immunize = true;
};

struct FinetuneConfig {
  int labeled_count = 256;
  int epochs = 1200;
  double lr = 1e-3;
  int batch_size = 32;
  double clip = 1.0;
  // Per-channel input features (the 95 P(lambda) + 95 loading entries) are
  // zeroed in standardized space with this probability on every batch
  // presentation. The per-channel gain targets are unaffected by which
  // channels the model can see, so this is a label-consistent augmentation
  // that stops the network from memorizing loading patterns.
  double channel_dropout = 0.6;
  // Zero the first-layer weights on the three VOA telemetry slots and keep
  // them frozen at zero through fine-tuning. VOA telemetry is redundant
  // given the gain setting, and ILA records carry the -999 sentinel there
  // instead; with a zeroed pathway, sentinel-imputed inputs share the same
  // feature geometry as telemetry-bearing ones instead of blowing up
  // through SELU's linear half, which is what makes the trained model a
  // usable heterogeneous-transfer source.
  bool voa_immunize = true;
  // Solve the output layer by ridge regression on the last hidden layer's
  // features before the first epoch and again after the last one. The solve
  // sees ls_replicas extra dropout-corrupted copies of each labeled record
  // so the readout generalizes the same way the fine-tuned features do.
  bool ls_readout = true;
  double ls_ridge = 1e-3;
  int ls_replicas = 7;
};

struct TrainEvent {
  std::string stage;
  int layer = 0;
  int epoch = 0;
  double loss = 0.0;
};
using ProgressFn = std::function<void(const TrainEvent&)>;
using StageFn = std::function<void(int layer, const Network& snapshot)>;

/// Greedy layer-wise denoising pretraining. Each hidden layer trains inside
/// a throwaway autoencoder fed noisy inputs propagated through the already
/// frozen stack, reconstructing that layer's clean input; earlier layers are
/// never touched. The output layer stays at its random initialization.
Network pretrain_layerwise(const std::vector<FeatureVector>& unlabeled,
                           const Standardizer& standardizer,
                           const PretrainConfig& cfg, std::mt19937_64& rng,
                           const ProgressFn& progress = {},
                           const StageFn& stage_end = {});

/// Ridge solve of the output layer (weights + bias) on the last hidden
/// layer's features over the given labeled records, per output channel using
/// only the records where that channel is active. With replicas > 0 the
/// design matrix additionally holds that many channel-dropout-corrupted
/// copies of every record (requires rng).
void least_squares_readout(Network& net,
                           const std::vector<MeasurementRecord>& labeled,
                           double ridge, int replicas = 0,
                           double channel_dropout = 0.0,
                           std::mt19937_64* rng = nullptr);

/// Supervised phase: Adam over shuffled mini-batches with the masked MSE
/// loss and global-norm clipping. All layers trainable; the standardizer is
/// never refit.
Network finetune_supervised(Network net,
                            const std::vector<MeasurementRecord>& labeled,
                            const FinetuneConfig& cfg, std::mt19937_64& rng,
                            const ProgressFn& progress = {});

/// Standardizer fit -> layer-wise pretraining -> supervised fine-tuning on a
/// single device's training records.
Network train_direct(const std::vector<MeasurementRecord>& train_records,
                     const PretrainConfig& pre_cfg, const FinetuneConfig& fin_cfg,
                     std::mt19937_64& rng, bool skip_pretrain = false,
                     const ProgressFn& progress = {});

}  // namespace edfa

#endif
