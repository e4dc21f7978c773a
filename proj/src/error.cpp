#include "epps/error.hpp"

namespace epps {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse";
    case ErrorKind::grid_violation: return "grid_violation";
    case ErrorKind::empty_series: return "empty_series";
    case ErrorKind::no_prior_trade: return "no_prior_trade";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::degenerate_statistics: return "degenerate_statistics";
    case ErrorKind::degenerate_variance: return "degenerate_variance";
    case ErrorKind::no_overlap: return "no_overlap";
    case ErrorKind::incomplete_moments: return "incomplete_moments";
    case ErrorKind::correction_overshoot: return "correction_overshoot";
    case ErrorKind::nonpositive_price: return "nonpositive_price";
  }
  return "unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::degenerate_statistics:
    case ErrorKind::degenerate_variance:
    case ErrorKind::no_overlap:
    case ErrorKind::correction_overshoot:
    case ErrorKind::nonpositive_price:
      return true;
    default:
      return false;
  }
}

}  // namespace epps
