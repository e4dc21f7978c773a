#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

namespace epps {

enum class EstimatorKind {
  plain,
  hayashi_yoshida,
  async,
  tick,
  tick_approx,
  combined,
  combined_approx,
};

inline constexpr EstimatorKind kAllEstimators[] = {
    EstimatorKind::plain,       EstimatorKind::hayashi_yoshida,
    EstimatorKind::async,       EstimatorKind::tick,
    EstimatorKind::tick_approx, EstimatorKind::combined,
    EstimatorKind::combined_approx,
};

std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept;

struct CorrelationEstimate {
  double value = 0.0;
  std::size_t n_samples = 0;
  EstimatorKind kind = EstimatorKind::plain;

  // Compensated estimators can leave [-1, 1] on noisy data. This is reported,
  // never treated as a failure.
  bool out_of_range() const noexcept { return std::abs(value) > 1.0; }
};

}  // namespace epps
