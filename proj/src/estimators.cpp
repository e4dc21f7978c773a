#include "epps/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "epps/error.hpp"
#include "pair_columns.hpp"
#include "summation.hpp"
#include "tick_terms.hpp"

namespace epps {

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::plain: return "plain";
    case EstimatorKind::hayashi_yoshida: return "hayashi_yoshida";
    case EstimatorKind::async: return "async";
    case EstimatorKind::tick: return "tick";
    case EstimatorKind::tick_approx: return "tick_approx";
    case EstimatorKind::combined: return "combined";
    case EstimatorKind::combined_approx: return "combined_approx";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept {
  for (EstimatorKind k : kAllEstimators)
    if (to_string(k) == name) return k;
  if (name == "hy") return EstimatorKind::hayashi_yoshida;
  return std::nullopt;
}

CorrelationEstimate pearson(std::span<const ReturnPairSample> samples,
                            bool include_non_overlapping) {
  const detail::PairColumns cols = detail::collect(samples, include_non_overlapping);
  detail::require_samples(cols, samples.size());
  const auto s1 = detail::standardize(cols.r1, "returns of instrument 1");
  const auto s2 = detail::standardize(cols.r2, "returns of instrument 2");
  double value = detail::normalized_cross(cols.r1, s1, cols.r2, s2);
  value = std::clamp(value, -1.0, 1.0);  // rounding can overshoot by an ulp
  return {value, cols.size(), EstimatorKind::plain};
}

CorrelationEstimate corr_async(std::span<const ReturnPairSample> samples) {
  const detail::PairColumns cols = detail::collect(samples);
  detail::require_samples(cols, samples.size());
  const auto s1 = detail::standardize(cols.r1, "returns of instrument 1");
  const auto s2 = detail::standardize(cols.r2, "returns of instrument 2");
  double value = detail::normalized_cross(cols.r1, s1, cols.r2, s2, cols.w);
  // Keep the unit-weight reduction exact: pearson clamps the same way.
  if (std::all_of(cols.w.begin(), cols.w.end(), [](double w) { return w == 1.0; }))
    value = std::clamp(value, -1.0, 1.0);
  return {value, cols.size(), EstimatorKind::async};
}

namespace {

struct TickReturn {
  Timestamp begin;  // exclusive
  Timestamp end;    // inclusive
  double value;
};

std::vector<TickReturn> tick_returns(const TickSeries& series, TimeWindow window) {
  // Collapse equal timestamps to the last trade, restricted to the window.
  std::vector<Trade> last;
  for (const Trade& tr : series.trades()) {
    if (tr.time < window.begin || tr.time > window.end) continue;
    if (!last.empty() && last.back().time == tr.time)
      last.back() = tr;
    else
      last.push_back(tr);
  }
  std::vector<TickReturn> out;
  if (last.size() < 2) return out;
  out.reserve(last.size() - 1);
  for (std::size_t i = 1; i < last.size(); ++i)
    out.push_back({last[i - 1].time, last[i].time,
                   (last[i].price - last[i - 1].price) / last[i - 1].price});
  return out;
}

}  // namespace

CorrelationEstimate hayashi_yoshida(const TickSeries& ticks1, const TickSeries& ticks2,
                                    TimeWindow window) {
  if (window.end <= window.begin)
    throw Error(ErrorKind::config, "empty Hayashi-Yoshida window");
  const auto a = tick_returns(ticks1, window);
  const auto b = tick_returns(ticks2, window);
  if (a.empty() || b.empty())
    throw Error(ErrorKind::insufficient_data,
                "need at least 2 distinct trade times per series in the window");

  detail::NeumaierSum cross, var_a, var_b;
  for (const auto& r : a) var_a.add(r.value * r.value);
  for (const auto& r : b) var_b.add(r.value * r.value);

  // Intervals are contiguous and sorted, so the first partner of interval i
  // never moves backwards.
  std::size_t pairs = 0;
  std::size_t j0 = 0;
  for (const auto& ra : a) {
    while (j0 < b.size() && b[j0].end <= ra.begin) ++j0;
    for (std::size_t j = j0; j < b.size() && b[j].begin < ra.end; ++j) {
      cross.add(ra.value * b[j].value);
      ++pairs;
    }
  }
  if (pairs == 0)
    throw Error(ErrorKind::no_overlap, "no overlapping tick intervals in the window");
  const double va = var_a.value();
  const double vb = var_b.value();
  if (!(va > 0.0) || !(vb > 0.0))
    throw Error(ErrorKind::degenerate_variance, "zero realized variance");
  return {cross.value() / std::sqrt(va * vb), pairs, EstimatorKind::hayashi_yoshida};
}

namespace {

double mean_weighted_product(const detail::PairColumns& cols) {
  detail::NeumaierSum s;
  for (std::size_t i = 0; i < cols.size(); ++i) s.add(cols.r1[i] * cols.r2[i] * cols.w[i]);
  return s.value() / static_cast<double>(cols.size());
}

}  // namespace

CorrelationEstimate corr_combined(std::span<const ReturnPairSample> samples,
                                  const DiscretizationMoments& moments1,
                                  const DiscretizationMoments& moments2) {
  const detail::PairColumns cols = detail::collect(samples);
  detail::require_samples(cols, samples.size());
  const detail::TickTerms t = detail::tick_terms(cols, moments1, moments2);
  const double mean_w = detail::mean(cols.w);
  const double numerator =
      mean_weighted_product(cols) +
      (t.cov_change1_err2 + t.cov_change2_err1 + t.cov_err1_err2 -
       t.s1.mean * t.s2.mean) *
          mean_w;
  return {numerator / (t.s1.sigma * t.s2.sigma), cols.size(), EstimatorKind::combined};
}

CorrelationEstimate corr_combined_approx(std::span<const ReturnPairSample> samples,
                                         const DiscretizationMoments& moments1,
                                         const DiscretizationMoments& moments2) {
  const detail::PairColumns cols = detail::collect(samples);
  detail::require_samples(cols, samples.size());
  const detail::TickTerms t = detail::tick_terms(cols, moments1, moments2);
  return {mean_weighted_product(cols) / (t.s1.sigma * t.s2.sigma), cols.size(),
          EstimatorKind::combined_approx};
}

}  // namespace epps
