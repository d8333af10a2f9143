#ifndef EDFA_CONFIGS_HPP
#define EDFA_CONFIGS_HPP

#include <random>
#include <vector>

#include "edfa/channel_plan.hpp"

namespace edfa {

/// The enumerated fixed-loading family: full, lower/upper half, even, odd,
/// all 95 single-channel masks, all 94 adjacent double-channel masks.
/// 1 + 2 + 2 + 95 + 94 = 194 masks.
std::vector<ChannelMask> gen_fixed_configs();

/// Popcount uniform on [1,95], channels uniform without replacement.
std::vector<ChannelMask> gen_random_configs(int n, std::mt19937_64& rng);

/// Goalpost loading over bands 1-32 / 33-64 / 65-95, channels contiguous
/// from each band edge; balanced (equal per-band count) or unbalanced.
std::vector<ChannelMask> gen_goalpost_configs(int n, std::mt19937_64& rng);

}  // namespace edfa

#endif
