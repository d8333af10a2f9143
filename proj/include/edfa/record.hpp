#ifndef EDFA_RECORD_HPP
#define EDFA_RECORD_HPP

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "edfa/channel_plan.hpp"

namespace edfa {

/// Input power reported on channels with no carrier.
inline constexpr double kDarkChannelFloorDbm = -60.0;

enum class EdfaKind { Booster, Preamp, Ila };
enum class Direction { AB, BA, NA };
enum class ConfigClass { Fixed, Random, Goalpost };

const char* to_string(EdfaKind k);
const char* to_string(Direction d);
const char* to_string(ConfigClass c);
EdfaKind kind_from_string(const std::string& s);
Direction direction_from_string(const std::string& s);
ConfigClass config_class_from_string(const std::string& s);

using PowerSpectrum = Eigen::VectorXd;  // dBm per channel, length 95
using GainSpectrum = Eigen::VectorXd;   // dB per channel; NaN on dark channels

/// One gain-spectrum observation.
struct MeasurementRecord {
  std::string device_id;
  EdfaKind kind = EdfaKind::Booster;
  Direction direction = Direction::NA;
  double gain_target_db = 0.0;
  double tilt_db = 0.0;
  PowerSpectrum p_in_dbm;
  PowerSpectrum p_out_dbm;
  ChannelMask mask;
  double total_in_dbm = 0.0;
  double total_out_dbm = 0.0;
  std::optional<double> voa_in_dbm;
  std::optional<double> voa_out_dbm;
  std::optional<double> voa_attn_db;
  ConfigClass config_class = ConfigClass::Fixed;
};

/// Per-active-channel dB difference; inactive entries are NaN and excluded
/// from every downstream metric.
GainSpectrum compute_gain(const PowerSpectrum& p_in, const PowerSpectrum& p_out,
                          const ChannelMask& mask);

/// Invariant check. Violations are data, not failures.
std::vector<std::string> validate_record(const MeasurementRecord& r);

}  // namespace edfa

#endif
