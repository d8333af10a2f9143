#include "edfa/record.hpp"

#include <cmath>
#include <stdexcept>

namespace edfa {

const char* to_string(EdfaKind k) {
  switch (k) {
    case EdfaKind::Booster: return "booster";
    case EdfaKind::Preamp: return "preamp";
    case EdfaKind::Ila: return "ila";
  }
  return "?";
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::AB: return "ab";
    case Direction::BA: return "ba";
    case Direction::NA: return "na";
  }
  return "?";
}

const char* to_string(ConfigClass c) {
  switch (c) {
    case ConfigClass::Fixed: return "fixed";
    case ConfigClass::Random: return "random";
    case ConfigClass::Goalpost: return "goalpost";
  }
  return "?";
}

EdfaKind kind_from_string(const std::string& s) {
  if (s == "booster") return EdfaKind::Booster;
  if (s == "preamp") return EdfaKind::Preamp;
  if (s == "ila") return EdfaKind::Ila;
  throw std::invalid_argument("unknown EDFA kind: " + s);
}

Direction direction_from_string(const std::string& s) {
  if (s == "ab") return Direction::AB;
  if (s == "ba") return Direction::BA;
  if (s == "na") return Direction::NA;
  throw std::invalid_argument("unknown direction: " + s);
}

ConfigClass config_class_from_string(const std::string& s) {
  if (s == "fixed") return ConfigClass::Fixed;
  if (s == "random") return ConfigClass::Random;
  if (s == "goalpost") return ConfigClass::Goalpost;
  throw std::invalid_argument("unknown config class: " + s);
}

GainSpectrum compute_gain(const PowerSpectrum& p_in, const PowerSpectrum& p_out,
                          const ChannelMask& mask) {
  if (mask.empty()) throw EmptyMask();
  GainSpectrum g =
      GainSpectrum::Constant(kNumChannels, std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < kNumChannels; ++i)
    if (mask.active(i)) g[i] = p_out[i] - p_in[i];
  return g;
}

std::vector<std::string> validate_record(const MeasurementRecord& r) {
  std::vector<std::string> v;
  const bool has_voa = r.voa_in_dbm || r.voa_out_dbm || r.voa_attn_db;
  const bool full_voa = r.voa_in_dbm && r.voa_out_dbm && r.voa_attn_db;
  if (r.kind == EdfaKind::Ila && has_voa) v.push_back("voa_on_ila");
  if (r.kind != EdfaKind::Ila && !full_voa) v.push_back("missing_voa");
  if (r.mask.empty()) v.push_back("empty_mask");
  if (r.p_in_dbm.size() != kNumChannels || r.p_out_dbm.size() != kNumChannels)
    v.push_back("bad_spectrum_length");
  else
    for (int i = 0; i < kNumChannels; ++i)
      if (r.mask.active(i) &&
          (!std::isfinite(r.p_in_dbm[i]) || !std::isfinite(r.p_out_dbm[i]))) {
        v.push_back("nonfinite_active_power");
        break;
      }
  return v;
}

}  // namespace edfa
