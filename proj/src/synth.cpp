#include "edfa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "edfa/configs.hpp"
#include "edfa/units.hpp"

namespace edfa {

namespace {

double ripple_at(const DeviceProfile& p, double u) {
  double r = 0.0;
  for (const auto& t : p.ripple)
    r += t.amplitude_db *
         std::sin(2.0 * std::numbers::pi * t.spatial_freq * u + t.phase);
  return r;
}

// Smooth weighting for the loading-dependent gain shift: strongest at the
// short-wavelength band edge, tapering to zero across the band.
double loading_weight(double u) {
  return 0.5 * (1.0 + std::cos(std::numbers::pi * u));
}

double grid_u(int i) { return static_cast<double>(i) / (kNumChannels - 1); }

}  // namespace

DeviceProfile device_from_seed(std::uint64_t seed, EdfaKind kind) {
  DeviceProfile p;
  p.seed = seed;
  p.kind = kind;
  switch (kind) {
    case EdfaKind::Booster:
      p.ripple_amp_max_db = 0.4;
      p.meas_noise_db = 0.02;
      p.gain_settings = {15.0, 20.0, 25.0};
      p.gain_mode = GainMode::High;
      break;
    case EdfaKind::Preamp:
      p.ripple_amp_max_db = 0.6;
      p.meas_noise_db = 0.02;
      p.gain_settings = {15.0, 20.0, 25.0};
      p.gain_mode = GainMode::High;
      break;
    case EdfaKind::Ila:
      p.ripple_amp_max_db = 0.8;
      p.meas_noise_db = 0.05;
      p.gain_settings = {10.0, 15.0, 20.0};
      p.gain_mode = GainMode::Low;
      break;
  }

  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL +
                      static_cast<std::uint64_t>(kind) + 1);
  std::uniform_real_distribution<double> amp_dist(0.3, 1.0);
  std::uniform_int_distribution<int> freq_dist(1, 5);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  std::bernoulli_distribution sign(0.5);
  for (auto& t : p.ripple) {
    t.amplitude_db = amp_dist(rng) * (sign(rng) ? 1.0 : -1.0);
    t.spatial_freq = freq_dist(rng);
    t.phase = phase_dist(rng);
  }
  // Rescale so the peak ripple over the grid hits a seeded fraction of the
  // per-kind envelope.
  double peak = 0.0;
  for (int i = 0; i < kNumChannels; ++i)
    peak = std::max(peak, std::abs(ripple_at(p, grid_u(i))));
  std::uniform_real_distribution<double> env_dist(0.6, 1.0);
  const double target_peak = p.ripple_amp_max_db * env_dist(rng);
  if (peak > 0.0)
    for (auto& t : p.ripple) t.amplitude_db *= target_peak / peak;

  p.tilt_coeff_db = std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
  p.loading_sens_db = std::uniform_real_distribution<double>(0.05, 0.35)(rng);
  p.gain_sens = std::uniform_real_distribution<double>(-0.03, 0.03)(rng);
  return p;
}

GainSpectrum true_gain(const DeviceProfile& profile, double g0_db,
                       const ChannelMask& mask, const PowerSpectrum& /*p_in_dbm*/) {
  if (std::find(profile.gain_settings.begin(), profile.gain_settings.end(), g0_db) ==
      profile.gain_settings.end())
    throw UnsupportedGain(g0_db);
  if (mask.empty()) throw EmptyMask();

  const double ripple_scale = 1.0 + profile.gain_sens * (g0_db - 18.0);
  const double loading = 1.0 - static_cast<double>(mask.popcount()) / kNumChannels;
  GainSpectrum g =
      GainSpectrum::Constant(kNumChannels, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < kNumChannels; ++i) {
    if (!mask.active(i)) continue;
    const double u = grid_u(i);
    g[i] = g0_db + ripple_scale * ripple_at(profile, u) +
           profile.tilt_coeff_db * (u - 0.5) +
           profile.loading_sens_db * loading * loading_weight(u);
  }
  return g;
}

MeasurementRecord simulate_measurement(const DeviceProfile& profile, double g0_db,
                                       const ChannelMask& mask,
                                       double launch_dbm_per_ch,
                                       std::mt19937_64& rng) {
  const GainSpectrum g = true_gain(profile, g0_db, mask, PowerSpectrum());

  MeasurementRecord r;
  r.device_id = std::string(to_string(profile.kind)) + "-" + std::to_string(profile.seed);
  r.kind = profile.kind;
  r.direction = profile.kind == EdfaKind::Ila ? Direction::AB : Direction::NA;
  r.gain_target_db = g0_db;
  r.mask = mask;
  r.p_in_dbm = PowerSpectrum::Constant(kNumChannels, kDarkChannelFloorDbm);
  r.p_out_dbm = PowerSpectrum::Constant(kNumChannels, kDarkChannelFloorDbm);

  std::normal_distribution<double> noise(0.0, profile.meas_noise_db);
  double sum_in_mw = 0.0, sum_out_mw = 0.0;
  for (int i = 0; i < kNumChannels; ++i) {
    if (!mask.active(i)) continue;
    const double eps = profile.meas_noise_db > 0.0 ? noise(rng) : 0.0;
    r.p_in_dbm[i] = launch_dbm_per_ch;
    r.p_out_dbm[i] = launch_dbm_per_ch + g[i] + eps;
    sum_in_mw += dbm_to_mw(r.p_in_dbm[i]);
    sum_out_mw += dbm_to_mw(r.p_out_dbm[i]);
  }
  r.total_in_dbm = mw_to_dbm(sum_in_mw);
  r.total_out_dbm = mw_to_dbm(sum_out_mw);

  if (profile.kind != EdfaKind::Ila) {
    const double headroom =
        *std::max_element(profile.gain_settings.begin(), profile.gain_settings.end()) +
        5.0 - g0_db;
    const double attn = std::clamp(headroom, 0.0, profile.voa_max_attn_db);
    r.voa_in_dbm = r.total_in_dbm;
    r.voa_out_dbm = *r.voa_in_dbm - attn;
    r.voa_attn_db = attn;
  }
  return r;
}

std::vector<MeasurementRecord> generate_campaign(const DeviceProfile& profile,
                                                 const CampaignConfig& cfg,
                                                 std::mt19937_64& rng) {
  std::vector<ChannelMask> fixed = gen_fixed_configs();
  if (cfg.n_fixed >= 0) fixed.resize(static_cast<std::size_t>(
      std::min<int>(cfg.n_fixed, static_cast<int>(fixed.size()))));

  std::vector<MeasurementRecord> out;
  for (double g0 : profile.gain_settings) {
    auto emit = [&](const std::vector<ChannelMask>& masks, ConfigClass cls) {
      for (const auto& m : masks) {
        MeasurementRecord r =
            simulate_measurement(profile, g0, m, cfg.launch_dbm_per_ch, rng);
        r.config_class = cls;
        out.push_back(std::move(r));
      }
    };
    emit(fixed, ConfigClass::Fixed);
    emit(gen_random_configs(cfg.n_random, rng), ConfigClass::Random);
    emit(gen_goalpost_configs(cfg.n_goalpost, rng), ConfigClass::Goalpost);
  }
  return out;
}

}  // namespace edfa
