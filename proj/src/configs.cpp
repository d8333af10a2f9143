#include "edfa/configs.hpp"

#include <algorithm>
#include <numeric>

namespace edfa {

namespace {

ChannelMask range_mask(int lo, int hi) {  // inclusive, 1-based
  ChannelMask m;
  for (int c = lo; c <= hi; ++c) m.set(c - 1);
  return m;
}

}  // namespace

std::vector<ChannelMask> gen_fixed_configs() {
  std::vector<ChannelMask> out;
  out.reserve(194);
  out.push_back(ChannelMask::full());
  out.push_back(range_mask(1, 47));
  out.push_back(range_mask(48, kNumChannels));
  ChannelMask even, odd;
  for (int c = 1; c <= kNumChannels; ++c) (c % 2 == 0 ? even : odd).set(c - 1);
  out.push_back(even);
  out.push_back(odd);
  for (int c = 1; c <= kNumChannels; ++c) out.push_back(range_mask(c, c));
  for (int c = 1; c < kNumChannels; ++c) out.push_back(range_mask(c, c + 1));
  return out;
}

std::vector<ChannelMask> gen_random_configs(int n, std::mt19937_64& rng) {
  std::vector<ChannelMask> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  std::uniform_int_distribution<int> pop_dist(1, kNumChannels);
  std::vector<int> idx(kNumChannels);
  std::iota(idx.begin(), idx.end(), 0);
  for (int k = 0; k < n; ++k) {
    const int pop = pop_dist(rng);
    std::shuffle(idx.begin(), idx.end(), rng);
    ChannelMask m;
    for (int j = 0; j < pop; ++j) m.set(idx[static_cast<std::size_t>(j)]);
    out.push_back(m);
  }
  return out;
}

std::vector<ChannelMask> gen_goalpost_configs(int n, std::mt19937_64& rng) {
  struct Band {
    int lo, hi;
  };
  constexpr Band bands[3] = {{1, 32}, {33, 64}, {65, 95}};
  std::vector<ChannelMask> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  std::bernoulli_distribution balanced(0.5);
  std::uniform_int_distribution<int> k_bal(1, 31);  // smallest band has 31 ch
  for (int i = 0; i < n; ++i) {
    int counts[3];
    if (balanced(rng)) {
      counts[0] = counts[1] = counts[2] = k_bal(rng);
    } else {
      do {
        for (int b = 0; b < 3; ++b) {
          std::uniform_int_distribution<int> k_b(0, bands[b].hi - bands[b].lo + 1);
          counts[b] = k_b(rng);
        }
      } while ((counts[0] == counts[1] && counts[1] == counts[2]) ||
               counts[0] + counts[1] + counts[2] == 0);
    }
    ChannelMask m;
    for (int b = 0; b < 3; ++b)
      for (int c = bands[b].lo; c < bands[b].lo + counts[b]; ++c) m.set(c - 1);
    out.push_back(m);
  }
  return out;
}

}  // namespace edfa
