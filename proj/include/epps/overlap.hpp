#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "epps/market_data.hpp"

namespace epps {

struct OverlapConfig {
  // Upper bound on dt/dt_o; larger weights are clipped and counted.
  double w_max = 50.0;
};

// One grid step of a pair of previous-tick sampled paths.
//
// dt_o = min(gamma1(t+dt), gamma2(t+dt)) - max(gamma1(t), gamma2(t)) is the
// overlap of the two effective return intervals. It may be negative (the
// intervals are disjoint) or larger than dt. Steps with dt_o <= 0 are marked
// excluded and carry weight 0.
//
// Prices and changes are in ticks; they feed the discretization correction.
struct ReturnPairSample {
  Timestamp t = 0;
  Timestamp dt = 0;
  double r1 = 0.0;
  double r2 = 0.0;
  double price1 = 0.0;   // S1(t)
  double price2 = 0.0;   // S2(t)
  double change1 = 0.0;  // S1(t+dt) - S1(t)
  double change2 = 0.0;
  Timestamp dt_o = 0;
  double weight = 0.0;  // min(dt/dt_o, w_max) when included
  bool included = false;
  bool capped = false;
};

// Throws Error{config} when the grids differ.
std::vector<ReturnPairSample> compute_overlaps(const SampledPath& path1,
                                               const SampledPath& path2,
                                               const OverlapConfig& config = {});

struct OverlapStats {
  Timestamp dt = 0;
  double mean_fractional_overlap = 0.0;  // over included samples
  std::size_t n_included = 0;
  std::size_t n_excluded = 0;
  std::size_t n_capped = 0;
};

// Throws Error{insufficient_data} for no samples and
// Error{degenerate_statistics} when every sample is excluded.
OverlapStats overlap_stats(std::span<const ReturnPairSample> samples);

}  // namespace epps
