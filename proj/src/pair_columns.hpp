#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "epps/error.hpp"
#include "epps/overlap.hpp"
#include "summation.hpp"

namespace epps::detail {

// Column view of the samples an estimator sees.
struct PairColumns {
  std::vector<double> r1, r2, w, price1, price2, change1, change2;

  std::size_t size() const noexcept { return r1.size(); }
};

inline PairColumns collect(std::span<const ReturnPairSample> samples,
                           bool include_all = false) {
  PairColumns c;
  for (const auto& s : samples) {
    if (!include_all && !s.included) continue;
    c.r1.push_back(s.r1);
    c.r2.push_back(s.r2);
    c.w.push_back(s.weight);
    c.price1.push_back(s.price1);
    c.price2.push_back(s.price2);
    c.change1.push_back(s.change1);
    c.change2.push_back(s.change2);
  }
  return c;
}

inline void require_samples(const PairColumns& c, std::size_t total) {
  if (c.size() == 0 && total > 0)
    throw Error(ErrorKind::no_overlap, "no sample has an overlapping interval");
  if (c.size() < 2)
    throw Error(ErrorKind::insufficient_data, "need at least 2 samples");
}

struct Standardization {
  double mean = 0.0;
  double sigma = 0.0;
};

inline Standardization standardize(std::span<const double> xs, const char* label) {
  Standardization st;
  st.mean = mean(xs);
  st.sigma = std::sqrt(variance(xs, st.mean));
  if (!(st.sigma > 0.0))
    throw Error(ErrorKind::degenerate_variance,
                std::string("zero variance in ") + label);
  return st;
}

// <((a - ma)/sa) ((b - mb)/sb) w>; w empty means unit weights. Pearson and the
// asynchrony estimator both go through here, so unit weights reproduce
// Pearson bit for bit.
inline double normalized_cross(std::span<const double> a, Standardization sa,
                               std::span<const double> b, Standardization sb,
                               std::span<const double> w = {}) {
  NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double term = ((a[i] - sa.mean) / sa.sigma) * ((b[i] - sb.mean) / sb.sigma);
    if (!w.empty()) term *= w[i];
    s.add(term);
  }
  return s.value() / static_cast<double>(a.size());
}

// Population covariance, two-pass.
inline double covariance(std::span<const double> a, std::span<const double> b) {
  const double ma = mean(a);
  const double mb = mean(b);
  NeumaierSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add((a[i] - ma) * (b[i] - mb));
  return s.value() / static_cast<double>(a.size());
}

}  // namespace epps::detail
