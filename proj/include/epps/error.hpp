#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace epps {

enum class ErrorKind {
  parse,
  grid_violation,
  empty_series,
  no_prior_trade,
  config,
  io,
  insufficient_data,
  degenerate_statistics,
  degenerate_variance,
  no_overlap,
  incomplete_moments,
  correction_overshoot,
  nonpositive_price,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Numerical degeneracies (as opposed to bad input or bad configuration).
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace epps
