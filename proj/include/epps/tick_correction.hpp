#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "epps/estimate.hpp"
#include "epps/market_data.hpp"
#include "epps/overlap.hpp"

namespace epps {

// Counts of discretized price changes, keyed by the change in ticks.
struct PriceChangeHistogram {
  Timestamp dt = 0;
  double tick_size = 0.0;
  std::map<std::int64_t, std::size_t> counts;

  std::size_t total() const noexcept;
};

// `changes` are price changes in ticks and must be integral.
// Throws Error{insufficient_data} below `min_count` changes.
PriceChangeHistogram build_histogram(std::span<const double> changes,
                                     Timestamp dt, double tick_size,
                                     std::size_t min_count = 100);

// Prior on the discretization error of a price change.
//   triangular: difference of two independent uniform rounding errors, on [-q, q]
//   uniform:    a single uniform rounding error, on [-q/2, q/2]
enum class ErrorPrior { triangular, uniform };

enum class MomentsMethod {
  null,          // no discretization: e1 = e2 = 0
  uniform_null,  // symmetric errors: e1 = 0, e2 = q^2/6
  interpolated,  // conditional on the bin, from an interpolated density
};

struct BinMoments {
  double e1 = 0.0;  // E[err | change = k*q], currency units
  double e2 = 0.0;  // E[err^2 | change = k*q], currency units squared
};

// Conditional moments of the discretization error err = (true change) -
// (observed change), per observed change bin k.
class DiscretizationMoments {
 public:
  static DiscretizationMoments null(double tick_size);
  static DiscretizationMoments uniform_null(double tick_size);
  static DiscretizationMoments interpolated(double tick_size,
                                            std::map<std::int64_t, BinMoments> bins,
                                            std::size_t n_fallback);

  MomentsMethod method() const noexcept { return method_; }
  double tick_size() const noexcept { return tick_size_; }
  const std::map<std::int64_t, BinMoments>& bins() const noexcept { return bins_; }
  // Bins that had no usable density and fell back to the uniform_null values.
  std::size_t n_fallback() const noexcept { return n_fallback_; }

  // Throws Error{incomplete_moments} for a bin the interpolated table lacks.
  BinMoments at(std::int64_t k) const;

 private:
  DiscretizationMoments(MomentsMethod method, double tick_size)
      : method_(method), tick_size_(tick_size) {}

  MomentsMethod method_;
  double tick_size_;
  std::map<std::int64_t, BinMoments> bins_;
  std::size_t n_fallback_ = 0;
};

// Density of the true price change, in ticks (x = change / q). Only ratios
// matter, so it need not be normalized. `bin` is the tick cell
// [bin - 1/2, bin + 1/2] the integrator is working in; it resolves which side
// of a cell edge is meant for densities that jump there.
class PriceChangeDensity {
 public:
  virtual ~PriceChangeDensity() = default;
  virtual double operator()(double x, std::int64_t bin) const = 0;
};

// Piecewise exponential density built from a histogram. On bin j it is
// A_j * exp(b_j * (x - j)) for |x - j| <= 1/2, with A_j chosen so that the bin
// integrates to its count. Slopes b_j are centred differences of log counts
// (one-sided at the edges); empty interior bins count as 0.5. Beyond the
// observed range the edge segments are extrapolated.
class LogLinearDensity final : public PriceChangeDensity {
 public:
  explicit LogLinearDensity(const PriceChangeHistogram& hist);

  double operator()(double x, std::int64_t bin) const override;

  // False when the histogram has a single occupied bin: no slope is defined.
  bool normalizable() const noexcept { return segments_.size() > 1; }

 private:
  struct Segment {
    double amplitude;
    double slope;
  };
  std::int64_t k_min_ = 0;
  std::vector<Segment> segments_;
};

// Per-bin conditional moments by Simpson quadrature of density(k + u) * w(u)
// over the prior's support, split at the bin edges and at 0.
DiscretizationMoments estimate_moments(const PriceChangeHistogram& hist,
                                       const PriceChangeDensity& density,
                                       ErrorPrior prior);
// Same, with LogLinearDensity. A single-bin histogram falls back to
// uniform_null values for that bin (reported through n_fallback()).
DiscretizationMoments estimate_moments(const PriceChangeHistogram& hist,
                                       ErrorPrior prior);

// CSV `k,e1,e2` with one row per bin of the table.
void write_moments_csv(std::ostream& out, const DiscretizationMoments& moments);

struct CorrectedSigma {
  Timestamp dt = 0;
  double sigma_raw = 0.0;  // standard deviation of the observed returns
  double sigma_hat = 0.0;  // discretization-corrected
  double var_err = 0.0;    // var(err / S)
  double cov_err = 0.0;    // cov(change / S, err / S)

  // The correction is expected to shrink sigma on discretized data.
  bool exceeds_raw() const noexcept { return sigma_hat > sigma_raw; }
};

// sigma_hat = sqrt(var(r) + var(err/S) + 2 cov(change/S, err/S)), with err
// replaced per sample by e1[k(t)] (and err^2 by e2[k(t)]). `prices` and
// `changes` are in ticks, returns = changes / prices.
// Throws Error{correction_overshoot} when the radicand is not positive.
CorrectedSigma corrected_sigma(std::span<const double> returns,
                               std::span<const double> prices,
                               std::span<const double> changes,
                               const DiscretizationMoments& moments,
                               Timestamp dt = 0);

// Convenience overload over the included samples of one instrument (1 or 2).
CorrectedSigma corrected_sigma(std::span<const ReturnPairSample> samples,
                               int instrument,
                               const DiscretizationMoments& moments);

// [cov(r1,r2) + cov(change1/S1, err2/S2) + cov(change2/S2, err1/S1)
//  + cov(err1/S1, err2/S2)] / (sigma_hat1 * sigma_hat2)
// over included samples. Cross errors use E[err1 err2 | k1, k2] = e1[k1] e1[k2].
CorrelationEstimate corr_tick(std::span<const ReturnPairSample> samples,
                              const DiscretizationMoments& moments1,
                              const DiscretizationMoments& moments2);

// cov(r1, r2) / (sigma_hat1 * sigma_hat2).
CorrelationEstimate corr_tick_approx(std::span<const ReturnPairSample> samples,
                                     const DiscretizationMoments& moments1,
                                     const DiscretizationMoments& moments2);

}  // namespace epps
