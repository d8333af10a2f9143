#ifndef EDFA_EVAL_HPP
#define EDFA_EVAL_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "edfa/network.hpp"
#include "edfa/transfer.hpp"

namespace edfa {

struct EmptyTestSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalCell {
  std::string device_id;
  double gain_target_db = 0.0;
  ConfigClass config_class = ConfigClass::Fixed;
  double mae_db = 0.0;
  double mean_error_db = 0.0;
  double p50_db = 0.0;
  double p95_db = 0.0;
  double max_abs_db = 0.0;
  long count = 0;  // per-channel error samples
};

struct EvalReport {
  std::vector<EvalCell> cells;
  EvalCell overall;
  std::vector<double> abs_errors_db;  // flattened, for CDF export

  nlohmann::json to_json() const;
};

/// Per-channel absolute gain errors on active channels, aggregated per
/// (device, gain setting, config class). p95 is nearest-rank.
EvalReport evaluate(const Network& net, const std::vector<MeasurementRecord>& test);

/// CSV of (abs_error_db, cumulative_fraction), ascending, last fraction 1.0.
void export_cdf(const EvalReport& report, const std::filesystem::path& path);

/// Minimal polyline rendering of the CDF.
void export_cdf_svg(const EvalReport& report, const std::filesystem::path& path);

/// Everything needed to place one device in a transfer matrix.
struct DeviceBundle {
  std::string device_id;
  Network net;  // direct-trained model
  std::vector<MeasurementRecord> train;
  std::vector<MeasurementRecord> test;
};

struct TlMatrix {
  std::vector<std::string> device_ids;
  Eigen::MatrixXd mae_db;  // (i,j): source i -> target j; diagonal = direct

  nlohmann::json to_json() const;
};

struct TlRunConfig {
  TlMode mode = TlMode::Homogeneous;
  HomoTlConfig homo;
  HeteroTlConfig hetero;
  std::uint64_t seed = 0;
};

TlMatrix tl_matrix(const std::vector<DeviceBundle>& devices, const TlRunConfig& cfg);

struct SweepRow {
  int shots = 0;
  std::uint64_t seed = 0;
  double mae_db = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<double> mean_mae_per_shots;  // aligned with the shots list
  std::vector<int> shots;
};

/// MAE as a function of shot count for one source->target pair.
SweepTable shot_sweep(const DeviceBundle& source, const DeviceBundle& target,
                      const std::vector<int>& shot_counts, const TlRunConfig& cfg,
                      const std::vector<std::uint64_t>& seeds);

void write_sweep_csv(const SweepTable& table, const std::filesystem::path& path);

}  // namespace edfa

#endif
