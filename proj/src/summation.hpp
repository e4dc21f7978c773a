#pragma once

#include <cmath>
#include <span>

namespace epps::detail {

// Neumaier-compensated running sum. Always folded left to right, so a given
// input order yields a bit-identical result.
class NeumaierSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double mean(std::span<const double> xs) noexcept {
  NeumaierSum s;
  for (double x : xs) s.add(x);
  return s.value() / static_cast<double>(xs.size());
}

// Population variance (divide by n), two-pass.
inline double variance(std::span<const double> xs, double m) noexcept {
  NeumaierSum s;
  for (double x : xs) s.add((x - m) * (x - m));
  return s.value() / static_cast<double>(xs.size());
}

}  // namespace epps::detail
