#pragma once

#include <span>

#include "epps/estimate.hpp"
#include "epps/market_data.hpp"
#include "epps/overlap.hpp"
#include "epps/tick_correction.hpp"

namespace epps {

// All sample-based estimators use population (1/n) moments over the included
// samples, i.e. those whose effective intervals overlap.

// Product-moment correlation. `include_non_overlapping` restores the textbook
// estimator over every grid step.
CorrelationEstimate pearson(std::span<const ReturnPairSample> samples,
                            bool include_non_overlapping = false);

// <g1 g2 dt/dt_o>, g_i the returns standardized over the included samples.
CorrelationEstimate corr_async(std::span<const ReturnPairSample> samples);

struct TimeWindow {
  Timestamp begin = 0;
  Timestamp end = 0;  // inclusive
};

// Hayashi-Yoshida: sum of r1_i r2_j over all tick-to-tick return pairs whose
// intervals (t_{i-1}, t_i] overlap, divided by the square root of the product
// of the tick-level realized variances. Trades sharing a timestamp collapse to
// the last one.
CorrelationEstimate hayashi_yoshida(const TickSeries& ticks1,
                                    const TickSeries& ticks2,
                                    TimeWindow window);

// Combined asynchrony and discretization compensation:
//   { <r1 r2 w> + [cov(change1/S1, err2/S2) + cov(change2/S2, err1/S1)
//                  + cov(err1/S1, err2/S2) - <r1><r2>] <w> }
//   / (sigma_hat1 sigma_hat2),  w = dt/dt_o.
CorrelationEstimate corr_combined(std::span<const ReturnPairSample> samples,
                                  const DiscretizationMoments& moments1,
                                  const DiscretizationMoments& moments2);

// <r1 r2 w> / (sigma_hat1 sigma_hat2). Uncentred.
CorrelationEstimate corr_combined_approx(std::span<const ReturnPairSample> samples,
                                         const DiscretizationMoments& moments1,
                                         const DiscretizationMoments& moments2);

}  // namespace epps
