#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epps/market_data.hpp"

namespace epps {

enum class VolatilityCoupling {
  // One variance process for both stocks, driven by (r1^2 + r2^2)/2. The
  // correlation of the generated returns is then exactly c in expectation.
  shared,
  // sigma_i^2 driven by r_i^2 alone. With heavy-tailed parameters the two
  // variances drift apart and the realized correlation falls below c.
  per_stock,
};

// r_i(t) = sigma_i(t) (sqrt(c) eta(t) + sqrt(1 - c) eps_i(t))
// sigma^2(t) = alpha0 + alpha1 r^2(t-1) + beta1 sigma^2(t-1)
struct GarchConfig {
  double alpha0 = 2.4e-4;
  double alpha1 = 0.15;
  double beta1 = 0.84;
  double c = 0.4;
  std::size_t n_steps = 720'000;
  std::uint64_t seed = 1;
  std::size_t burn_in = 1'000;
  VolatilityCoupling coupling = VolatilityCoupling::shared;

  // Throws Error{config}.
  void validate() const;
  double stationary_variance() const noexcept {
    return alpha0 / (1.0 - alpha1 - beta1);
  }
};

// Independent RNG streams: the common innovation eta and each stock's eps.
struct GarchSeeds {
  std::uint64_t common = 0;
  std::uint64_t idio1 = 0;
  std::uint64_t idio2 = 0;

  static GarchSeeds derive(std::uint64_t seed) noexcept;
};

struct ReturnPair {
  std::vector<double> r1;
  std::vector<double> r2;
};

// Starts from the stationary variance and discards `burn_in` steps.
ReturnPair generate_correlated_garch(const GarchConfig& config);
ReturnPair generate_correlated_garch(const GarchConfig& config, const GarchSeeds& seeds);

// S(0) = start_price, S(t+1) = S(t) (1 + r(t)); returns.size() + 1 prices.
// Throws Error{nonpositive_price} naming the step when some r <= -1.
std::vector<double> returns_to_prices(std::span<const double> returns, double start_price);

struct SimMarketConfig {
  double start_price = 1000.0;  // in base ticks
  std::array<double, 2> mean_waiting_times{15.0, 25.0};
  bool rounding = true;
  // Tick coarseness: prices are expressed in ticks of base_tick_size * q_scale.
  double q_scale = 1.0;
  double base_tick_size = 0.01;
  // Multiplies GARCH returns before they are compounded into prices.
  double return_scale = 1e-3;
  // Redraws allowed when a scaled return reaches -100%.
  std::size_t max_redraws = 100;

  void validate() const;
};

// Trades at t = 0 and after geometric waiting times with the given mean (the
// ceiling of an exponential draw), so timestamps are distinct integer steps.
// A mean <= 1 trades every step. The trade price is prices[t] / q_scale in
// ticks, rounded half away from zero when `rounding`.
TickSeries sample_trades(std::span<const double> prices, double mean_waiting_time,
                         bool rounding, std::uint64_t seed, double q_scale = 1.0,
                         double base_tick_size = 0.01, std::string symbol = "SIM");

struct SimulatedPair {
  TickSeries a;
  TickSeries b;
  std::size_t redraws = 0;  // rejected seeds (a return <= -100%)
};

SimulatedPair simulate_pair(const GarchConfig& garch, const SimMarketConfig& market);

// splitmix64 finalizer over (seed, stream), used to derive sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace epps
