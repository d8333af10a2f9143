#include "edfa/features.hpp"

#include <cmath>

namespace edfa {

FeatureVector assemble_features(const MeasurementRecord& r) {
  FeatureVector v(kFeatureDim);
  v[0] = r.gain_target_db;
  v[1] = r.total_in_dbm;
  v[2] = r.total_out_dbm;
  v[3] = r.voa_in_dbm.value_or(kSentinel);
  v[4] = r.voa_out_dbm.value_or(kSentinel);
  v[5] = r.voa_attn_db.value_or(kSentinel);
  for (int i = 0; i < kNumChannels; ++i) {
    v[6 + i] = r.mask.active(i) ? r.p_in_dbm[i] : kDarkChannelFloorDbm;
    v[6 + kNumChannels + i] = r.mask.active(i) ? 1.0 : 0.0;
  }
  return v;
}

void assemble_target(const MeasurementRecord& r, Eigen::VectorXd& gain,
                     Eigen::VectorXd& mask) {
  gain.setZero(kNumChannels);
  mask.setZero(kNumChannels);
  for (int i = 0; i < kNumChannels; ++i) {
    if (!r.mask.active(i)) continue;
    gain[i] = r.p_out_dbm[i] - r.p_in_dbm[i];
    mask[i] = 1.0;
  }
}

FeatureVector Standardizer::apply(const FeatureVector& v) const {
  FeatureVector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j)
    out[j] = v[j] == sentinel ? sentinel : (v[j] - mean[j]) / std[j];
  return out;
}

Eigen::MatrixXd Standardizer::apply_rows(const Eigen::MatrixXd& rows) const {
  Eigen::MatrixXd out(rows.rows(), rows.cols());
  for (Eigen::Index n = 0; n < rows.rows(); ++n)
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      out(n, j) =
          rows(n, j) == sentinel ? sentinel : (rows(n, j) - mean[j]) / std[j];
  return out;
}

Standardizer fit_standardizer(const std::vector<FeatureVector>& train) {
  if (train.size() < 2)
    throw std::invalid_argument("fit_standardizer needs at least 2 vectors");
  const int d = static_cast<int>(train.front().size());
  Standardizer s;
  s.mean.setZero(d);
  s.std.setOnes(d);
  for (int j = 0; j < d; ++j) {
    double sum = 0.0, sumsq = 0.0;
    long n = 0;
    for (const auto& v : train) {
      if (v[j] == s.sentinel) continue;
      sum += v[j];
      sumsq += v[j] * v[j];
      ++n;
    }
    if (n == 0) continue;  // all-sentinel feature: stats never consulted
    if (n == 1) throw DegenerateStatistics(j);
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, sumsq / static_cast<double>(n) - mean * mean);
    s.mean[j] = mean;
    s.std[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return s;
}

}  // namespace edfa
