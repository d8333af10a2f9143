#ifndef EDFA_TRANSFER_HPP
#define EDFA_TRANSFER_HPP

#include <random>
#include <stdexcept>
#include <vector>

#include "edfa/network.hpp"
#include "edfa/train.hpp"

namespace edfa {

struct EmptyShots : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingReference : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingFullLoad : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TlMode { Homogeneous, Heterogeneous };

struct HomoTlConfig {
  int shots_per_gain_setting = 1;  // the fully loaded measurement
  int epochs = 10000;
  double alpha0 = 1e-3;  // output-layer learning rate
  double theta = -1.0;   // exponential decay per layer towards the input
  double clip = 1.0;
};

struct HeteroTlConfig {
  int shots_per_gain_setting = 48;  // 32 for ILA->B/P, 48 for B/P->ILA
  int epochs = 10000;
  double output_lr = 1e-2;
  double layer_ratio = 0.1;    // each hidden layer: 10% of the next layer's lr
  int halving_period = 2000;   // epochs
  double lambda_coral = 0.4;
  int reference_batch = 128;
};

/// Layer-wise learning rate, l in 1..n_layers (output layer = n_layers).
/// Homogeneous: alpha0 * 10^(theta * (L - l)). Heterogeneous:
/// output_lr * ratio^(L - l), halved every halving_period epochs.
double layer_lr(TlMode mode, int l, int n_layers, int epoch, double alpha0,
                double theta_or_ratio, int halving_period = 0);

/// One-shot fine-tuning of a copy of the source model on the target shots.
Network homogeneous_transfer(const Network& source,
                             const std::vector<MeasurementRecord>& shots,
                             const HomoTlConfig& cfg, std::mt19937_64& rng,
                             const ProgressFn& progress = {});

/// Covariance of the source model's last hidden layer over n randomly drawn
/// source training vectors; saved into checkpoints as the CORAL reference.
Eigen::MatrixXd reference_covariance(const Network& source,
                                     const std::vector<FeatureVector>& source_train,
                                     int n, std::mt19937_64& rng);

/// CORAL-regularized fine-tuning across device types. Requires the source
/// checkpoint to carry a reference covariance when lambda_coral > 0.
Network heterogeneous_transfer(const Network& source,
                               const std::vector<MeasurementRecord>& shots,
                               const HeteroTlConfig& cfg, std::mt19937_64& rng,
                               const ProgressFn& progress = {});

/// Shot selection from a target campaign: homogeneous mode takes the fully
/// loaded record per gain setting; heterogeneous mode adds (shots-1)
/// random-class records per setting.
std::vector<MeasurementRecord> tl_shot_sampler(
    const std::vector<MeasurementRecord>& target_campaign, TlMode mode, int shots,
    std::mt19937_64& rng);

}  // namespace edfa

#endif
