#ifndef EDFA_SYNTH_HPP
#define EDFA_SYNTH_HPP

#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "edfa/record.hpp"

namespace edfa {

struct UnsupportedGain : std::invalid_argument {
  explicit UnsupportedGain(double g)
      : std::invalid_argument("gain setting " + std::to_string(g) +
                              " dB not in device's declared list") {}
};

enum class GainMode { High, Low };

struct RippleTerm {
  double amplitude_db = 0.0;
  int spatial_freq = 1;  // cycles across the band, 1..5
  double phase = 0.0;
};

/// Synthetic device parameter set, deterministic from (seed, kind).
struct DeviceProfile {
  std::uint64_t seed = 0;
  EdfaKind kind = EdfaKind::Booster;
  std::array<RippleTerm, 4> ripple{};
  double ripple_amp_max_db = 0.4;
  double tilt_coeff_db = 0.0;      // end-to-end linear component
  double loading_sens_db = 0.0;    // gain shift, empty vs full loading
  double gain_sens = 0.0;          // ripple scaling per dB of (g0 - 18)
  std::vector<double> gain_settings;
  GainMode gain_mode = GainMode::High;
  double voa_max_attn_db = 15.0;
  double meas_noise_db = 0.02;
};

/// Per-kind defaults: ripple envelope 0.4/0.6/0.8 dB and measurement noise
/// 0.02/0.02/0.05 dB for booster/preamp/ILA.
DeviceProfile device_from_seed(std::uint64_t seed, EdfaKind kind);

/// Noise-free closed-form gain spectrum.
GainSpectrum true_gain(const DeviceProfile& profile, double g0_db,
                       const ChannelMask& mask, const PowerSpectrum& p_in_dbm);

MeasurementRecord simulate_measurement(const DeviceProfile& profile, double g0_db,
                                       const ChannelMask& mask,
                                       double launch_dbm_per_ch,
                                       std::mt19937_64& rng);

struct CampaignConfig {
  int n_fixed = -1;  // -1: the full enumerated fixed family (194 masks)
  int n_random = 1487;
  int n_goalpost = 1487;
  double launch_dbm_per_ch = -10.0;
};

/// One campaign = every gain setting crossed with the configured channel
/// loading classes; defaults give 3,168 records per gain setting.
std::vector<MeasurementRecord> generate_campaign(const DeviceProfile& profile,
                                                 const CampaignConfig& cfg,
                                                 std::mt19937_64& rng);

}  // namespace edfa

#endif
