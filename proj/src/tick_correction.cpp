#include "epps/tick_correction.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "epps/error.hpp"
#include "pair_columns.hpp"
#include "summation.hpp"
#include "text.hpp"
#include "tick_terms.hpp"

namespace epps {

std::size_t PriceChangeHistogram::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [k, c] : counts) n += c;
  return n;
}

PriceChangeHistogram build_histogram(std::span<const double> changes,
                                     Timestamp dt, double tick_size,
                                     std::size_t min_count) {
  if (changes.size() < min_count || changes.empty())
    throw Error(ErrorKind::insufficient_data,
                std::to_string(changes.size()) + " price changes, need " +
                    std::to_string(min_count));
  PriceChangeHistogram hist{dt, tick_size, {}};
  for (double c : changes) {
    const double k = std::round(c);
    if (std::abs(c - k) > 1e-9)
      throw Error(ErrorKind::grid_violation,
                  "price change " + detail::format_double(c) +
                      " is not a whole number of ticks");
    ++hist.counts[static_cast<std::int64_t>(k)];
  }
  return hist;
}

DiscretizationMoments DiscretizationMoments::null(double tick_size) {
  return DiscretizationMoments(MomentsMethod::null, tick_size);
}

DiscretizationMoments DiscretizationMoments::uniform_null(double tick_size) {
  return DiscretizationMoments(MomentsMethod::uniform_null, tick_size);
}

DiscretizationMoments DiscretizationMoments::interpolated(
    double tick_size, std::map<std::int64_t, BinMoments> bins,
    std::size_t n_fallback) {
  DiscretizationMoments m(MomentsMethod::interpolated, tick_size);
  m.bins_ = std::move(bins);
  m.n_fallback_ = n_fallback;
  return m;
}

BinMoments DiscretizationMoments::at(std::int64_t k) const {
  switch (method_) {
    case MomentsMethod::null:
      return {0.0, 0.0};
    case MomentsMethod::uniform_null:
      return {0.0, tick_size_ * tick_size_ / 6.0};
    case MomentsMethod::interpolated:
      break;
  }
  const auto it = bins_.find(k);
  if (it == bins_.end())
    throw Error(ErrorKind::incomplete_moments,
                "no discretization moments for a change of " +
                    std::to_string(k) + " ticks");
  return it->second;
}

LogLinearDensity::LogLinearDensity(const PriceChangeHistogram& hist) {
  if (hist.counts.empty())
    throw Error(ErrorKind::insufficient_data, "empty histogram");
  k_min_ = hist.counts.begin()->first;
  const std::int64_t k_max = hist.counts.rbegin()->first;
  const auto n = static_cast<std::size_t>(k_max - k_min_ + 1);

  std::vector<double> count(n, 0.5);
  for (const auto& [k, c] : hist.counts)
    if (c > 0) count[static_cast<std::size_t>(k - k_min_)] = static_cast<double>(c);
  std::vector<double> log_count(n);
  for (std::size_t j = 0; j < n; ++j) log_count[j] = std::log(count[j]);

  segments_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    double slope = 0.0;
    if (n > 1) {
      if (j == 0)
        slope = log_count[1] - log_count[0];
      else if (j == n - 1)
        slope = log_count[n - 1] - log_count[n - 2];
      else
        slope = 0.5 * (log_count[j + 1] - log_count[j - 1]);
    }
    // integral of exp(slope * u) over [-1/2, 1/2]
    const double h = 0.5 * slope;
    const double mass = std::abs(h) < 1e-8 ? 1.0 : std::sinh(h) / h;
    segments_[j] = {count[j] / mass, slope};
  }
}

double LogLinearDensity::operator()(double x, std::int64_t bin) const {
  const auto last = static_cast<std::int64_t>(segments_.size()) - 1;
  const std::int64_t j = std::clamp<std::int64_t>(bin - k_min_, 0, last);
  const Segment& seg = segments_[static_cast<std::size_t>(j)];
  return seg.amplitude * std::exp(seg.slope * (x - static_cast<double>(k_min_ + j)));
}

namespace {

constexpr int kSimpsonIntervals = 200;  // 201 nodes per piece

struct Integrals {
  double z = 0.0, m1 = 0.0, m2 = 0.0;
};

// Simpson over u in [a, b] of density(k + u) * weight(u) * {1, u, u^2}, with
// the density evaluated inside tick cell `cell`.
template <class Weight>
void integrate_piece(const PriceChangeDensity& density, std::int64_t k,
                     std::int64_t cell, double a, double b, Weight weight,
                     Integrals& acc) {
  const double h = (b - a) / kSimpsonIntervals;
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (int i = 0; i <= kSimpsonIntervals; ++i) {
    const double u = a + h * i;
    const double c = (i == 0 || i == kSimpsonIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double f = c * density(static_cast<double>(k) + u, cell) * weight(u);
    z += f;
    m1 += f * u;
    m2 += f * u * u;
  }
  acc.z += z * h / 3.0;
  acc.m1 += m1 * h / 3.0;
  acc.m2 += m2 * h / 3.0;
}

Integrals conditional_integrals(const PriceChangeDensity& density, std::int64_t k,
                                ErrorPrior prior) {
  Integrals acc;
  if (prior == ErrorPrior::triangular) {
    const auto tri = [](double u) { return 1.0 - std::abs(u); };
    integrate_piece(density, k, k - 1, -1.0, -0.5, tri, acc);
    integrate_piece(density, k, k, -0.5, 0.0, tri, acc);
    integrate_piece(density, k, k, 0.0, 0.5, tri, acc);
    integrate_piece(density, k, k + 1, 0.5, 1.0, tri, acc);
  } else {
    const auto flat = [](double) { return 1.0; };
    integrate_piece(density, k, k, -0.5, 0.0, flat, acc);
    integrate_piece(density, k, k, 0.0, 0.5, flat, acc);
  }
  return acc;
}

BinMoments fallback_moments(double q) { return {0.0, q * q / 6.0}; }

}  // namespace

DiscretizationMoments estimate_moments(const PriceChangeHistogram& hist,
                                       const PriceChangeDensity& density,
                                       ErrorPrior prior) {
  if (hist.counts.empty() || hist.total() == 0)
    throw Error(ErrorKind::insufficient_data, "empty histogram");
  const double q = hist.tick_size;
  std::map<std::int64_t, BinMoments> bins;
  std::size_t n_fallback = 0;
  for (const auto& [k, count] : hist.counts) {
    const Integrals in = conditional_integrals(density, k, prior);
    if (!(in.z > 0.0) || !std::isfinite(in.z) || !std::isfinite(in.m2)) {
      bins[k] = fallback_moments(q);
      ++n_fallback;
      continue;
    }
    bins[k] = {in.m1 / in.z * q, in.m2 / in.z * q * q};
  }
  return DiscretizationMoments::interpolated(q, std::move(bins), n_fallback);
}

DiscretizationMoments estimate_moments(const PriceChangeHistogram& hist,
                                       ErrorPrior prior) {
  const LogLinearDensity density(hist);
  if (!density.normalizable()) {
    std::map<std::int64_t, BinMoments> bins;
    for (const auto& [k, c] : hist.counts) bins[k] = fallback_moments(hist.tick_size);
    const std::size_t n = bins.size();
    return DiscretizationMoments::interpolated(hist.tick_size, std::move(bins), n);
  }
  return estimate_moments(hist, density, prior);
}

void write_moments_csv(std::ostream& out, const DiscretizationMoments& moments) {
  out << "k,e1,e2\n";
  for (const auto& [k, m] : moments.bins())
    out << k << ',' << detail::format_double(m.e1) << ','
        << detail::format_double(m.e2) << '\n';
}

namespace {

// err/S per sample with err -> e1[k], and err^2/S^2 with err^2 -> e2[k].
struct ErrorColumns {
  std::vector<double> first;
  std::vector<double> second;
};

ErrorColumns error_columns(std::span<const double> prices,
                           std::span<const double> changes,
                           const DiscretizationMoments& m) {
  const double q = m.tick_size();
  ErrorColumns cols;
  cols.first.reserve(prices.size());
  cols.second.reserve(prices.size());
  for (std::size_t i = 0; i < prices.size(); ++i) {
    std::int64_t k = 0;
    if (m.method() == MomentsMethod::interpolated) {
      const double kr = std::round(changes[i]);
      if (std::abs(changes[i] - kr) > 1e-9)
        throw Error(ErrorKind::incomplete_moments,
                    "price change " + detail::format_double(changes[i]) +
                        " falls between tick bins");
      k = static_cast<std::int64_t>(kr);
    }
    const BinMoments b = m.at(k);
    cols.first.push_back(b.e1 / q / prices[i]);
    cols.second.push_back(b.e2 / (q * q) / (prices[i] * prices[i]));
  }
  return cols;
}

struct SigmaParts {
  CorrectedSigma sigma;
  std::vector<double> err;  // e1[k]/S per sample
};

SigmaParts sigma_parts(std::span<const double> returns, std::span<const double> prices,
                       std::span<const double> changes,
                       const DiscretizationMoments& moments, Timestamp dt) {
  if (returns.size() != prices.size() || returns.size() != changes.size())
    throw Error(ErrorKind::config, "column lengths differ");
  if (returns.size() < 2)
    throw Error(ErrorKind::insufficient_data, "need at least 2 returns");
  ErrorColumns ec = error_columns(prices, changes, moments);

  const double m = detail::mean(returns);
  const double var_raw = detail::variance(returns, m);
  const double m_err = detail::mean(ec.first);
  const double var_err = detail::mean(ec.second) - m_err * m_err;
  const double cov_err = detail::covariance(returns, ec.first);
  const double radicand = var_raw + var_err + 2.0 * cov_err;
  if (!(radicand > 0.0))
    throw Error(ErrorKind::correction_overshoot,
                "corrected variance is not positive: var(r)=" +
                    detail::format_double(var_raw) +
                    " var(err/S)=" + detail::format_double(var_err) +
                    " cov(r,err/S)=" + detail::format_double(cov_err));
  SigmaParts out;
  out.sigma = {dt, std::sqrt(var_raw), std::sqrt(radicand), var_err, cov_err};
  out.err = std::move(ec.first);
  return out;
}

}  // namespace

CorrectedSigma corrected_sigma(std::span<const double> returns,
                               std::span<const double> prices,
                               std::span<const double> changes,
                               const DiscretizationMoments& moments, Timestamp dt) {
  return sigma_parts(returns, prices, changes, moments, dt).sigma;
}

CorrectedSigma corrected_sigma(std::span<const ReturnPairSample> samples,
                               int instrument, const DiscretizationMoments& moments) {
  if (instrument != 1 && instrument != 2)
    throw Error(ErrorKind::config, "instrument must be 1 or 2");
  const detail::PairColumns c = detail::collect(samples);
  const Timestamp dt = samples.empty() ? 0 : samples.front().dt;
  return instrument == 1 ? corrected_sigma(c.r1, c.price1, c.change1, moments, dt)
                         : corrected_sigma(c.r2, c.price2, c.change2, moments, dt);
}

namespace detail {

TickTerms tick_terms(const PairColumns& cols, const DiscretizationMoments& m1,
                     const DiscretizationMoments& m2) {
  // Raw returns must vary, independently of what the correction adds.
  const Standardization raw1 = standardize(cols.r1, "returns of instrument 1");
  const Standardization raw2 = standardize(cols.r2, "returns of instrument 2");

  const SigmaParts p1 = sigma_parts(cols.r1, cols.price1, cols.change1, m1, 0);
  const SigmaParts p2 = sigma_parts(cols.r2, cols.price2, cols.change2, m2, 0);

  TickTerms t;
  t.s1 = {raw1.mean, p1.sigma.sigma_hat};
  t.s2 = {raw2.mean, p2.sigma.sigma_hat};
  t.cov_change1_err2 = covariance(cols.r1, p2.err);
  t.cov_change2_err1 = covariance(cols.r2, p1.err);
  t.cov_err1_err2 = covariance(p1.err, p2.err);
  return t;
}

}  // namespace detail

CorrelationEstimate corr_tick(std::span<const ReturnPairSample> samples,
                              const DiscretizationMoments& moments1,
                              const DiscretizationMoments& moments2) {
  const detail::PairColumns cols = detail::collect(samples);
  detail::require_samples(cols, samples.size());
  const detail::TickTerms t = detail::tick_terms(cols, moments1, moments2);
  const double base = detail::normalized_cross(cols.r1, t.s1, cols.r2, t.s2);
  const double extra =
      (t.cov_change1_err2 + t.cov_change2_err1 + t.cov_err1_err2) /
      (t.s1.sigma * t.s2.sigma);
  return {base + extra, cols.size(), EstimatorKind::tick};
}

CorrelationEstimate corr_tick_approx(std::span<const ReturnPairSample> samples,
                                     const DiscretizationMoments& moments1,
                                     const DiscretizationMoments& moments2) {
  const detail::PairColumns cols = detail::collect(samples);
  detail::require_samples(cols, samples.size());
  const detail::TickTerms t = detail::tick_terms(cols, moments1, moments2);
  return {detail::normalized_cross(cols.r1, t.s1, cols.r2, t.s2), cols.size(),
          EstimatorKind::tick_approx};
}

}  // namespace epps
