#ifndef EDFA_CHANNEL_PLAN_HPP
#define EDFA_CHANNEL_PLAN_HPP

#include <bitset>
#include <cstddef>
#include <stdexcept>

namespace edfa {

inline constexpr int kNumChannels = 95;

/// Fixed 95-channel, 50 GHz C-band grid. The absolute anchor frequency is a
/// deployment convention (the ITU grid fixes spacing, not the first channel);
/// it is configurable but defaults to 191.35 THz.
struct ChannelPlan {
  int n_channels = kNumChannels;
  double spacing_ghz = 50.0;
  double f_start_thz = 191.35;

  double frequency_thz(int channel_1based) const {
    return f_start_thz + (channel_1based - 1) * spacing_ghz * 1e-3;
  }
};

struct EmptyMask : std::invalid_argument {
  EmptyMask() : std::invalid_argument("channel mask has no active channel") {}
};

/// Binary loading vector over the 95-channel grid.
class ChannelMask {
 public:
  ChannelMask() = default;

  static ChannelMask full() {
    ChannelMask m;
    m.bits_.set();
    return m;
  }

  bool active(int i) const { return bits_[static_cast<std::size_t>(i)]; }
  void set(int i, bool on = true) { bits_[static_cast<std::size_t>(i)] = on; }
  int popcount() const { return static_cast<int>(bits_.count()); }
  bool empty() const { return bits_.none(); }

  bool operator==(const ChannelMask&) const = default;

 private:
  std::bitset<kNumChannels> bits_;
};

}  // namespace edfa

#endif
