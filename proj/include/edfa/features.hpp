#ifndef EDFA_FEATURES_HPP
#define EDFA_FEATURES_HPP

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "edfa/record.hpp"

namespace edfa {

inline constexpr int kFeatureDim = 196;
inline constexpr double kSentinel = -999.0;

// Feature layout: [G0, P_in, P_out, VOA_in, VOA_out, VOA_attn,
//                  P(lambda_1..95), c_1..c_95]
inline constexpr int kVoaSlotFirst = 3;
inline constexpr int kVoaSlotLast = 5;

using FeatureVector = Eigen::VectorXd;  // length 196

struct DegenerateStatistics : std::runtime_error {
  explicit DegenerateStatistics(int feature)
      : std::runtime_error("feature " + std::to_string(feature) +
                           " has fewer than 2 non-sentinel observations") {}
};

/// 196-vector in the fixed order; VOA slots carry telemetry for
/// booster/preamp records and the -999 sentinel for ILAs.
FeatureVector assemble_features(const MeasurementRecord& r);

/// Target vector for supervised training: measured gain, 0 on dark channels
/// (masked out of the loss anyway), plus the 0/1 mask row.
void assemble_target(const MeasurementRecord& r, Eigen::VectorXd& gain,
                     Eigen::VectorXd& mask);

/// Per-feature z-score statistics fit on the training set. Sentinel entries
/// are excluded from the statistics and pass through standardization
/// unchanged, so saturation of the corresponding units is preserved.
struct Standardizer {
  Eigen::VectorXd mean;  // length 196
  Eigen::VectorXd std;   // length 196, all > 0
  double sentinel = kSentinel;

  FeatureVector apply(const FeatureVector& v) const;
  Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& rows) const;
};

Standardizer fit_standardizer(const std::vector<FeatureVector>& train);

}  // namespace edfa

#endif
