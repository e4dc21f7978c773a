#include "epps/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <random>

#include "epps/error.hpp"

namespace epps {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

GarchSeeds GarchSeeds::derive(std::uint64_t seed) noexcept {
  return {mix_seed(seed, 0), mix_seed(seed, 1), mix_seed(seed, 2)};
}

void GarchConfig::validate() const {
  if (!(alpha0 > 0.0)) throw Error(ErrorKind::config, "alpha0 must be positive");
  if (alpha1 < 0.0 || beta1 < 0.0)
    throw Error(ErrorKind::config, "alpha1 and beta1 must be non-negative");
  if (!(alpha1 + beta1 < 1.0))
    throw Error(ErrorKind::config, "alpha1 + beta1 must be below 1 (stationarity)");
  if (!(c >= 0.0 && c <= 1.0)) throw Error(ErrorKind::config, "c must lie in [0, 1]");
  if (n_steps == 0) throw Error(ErrorKind::config, "n_steps must be positive");
}

ReturnPair generate_correlated_garch(const GarchConfig& config) {
  return generate_correlated_garch(config, GarchSeeds::derive(config.seed));
}

ReturnPair generate_correlated_garch(const GarchConfig& config, const GarchSeeds& seeds) {
  config.validate();
  std::mt19937_64 common(seeds.common), idio1(seeds.idio1), idio2(seeds.idio2);
  std::normal_distribution<double> n_common, n1, n2;

  const double load_common = std::sqrt(config.c);
  const double load_idio = std::sqrt(1.0 - config.c);
  double var1 = config.stationary_variance();
  double var2 = var1;

  ReturnPair out;
  out.r1.reserve(config.n_steps);
  out.r2.reserve(config.n_steps);
  const std::size_t total = config.burn_in + config.n_steps;
  for (std::size_t t = 0; t < total; ++t) {
    const double eta = n_common(common);
    const double x1 = std::sqrt(var1) * (load_common * eta + load_idio * n1(idio1));
    const double x2 = std::sqrt(var2) * (load_common * eta + load_idio * n2(idio2));
    if (t >= config.burn_in) {
      out.r1.push_back(x1);
      out.r2.push_back(x2);
    }
    if (config.coupling == VolatilityCoupling::shared) {
      var1 = config.alpha0 + config.alpha1 * 0.5 * (x1 * x1 + x2 * x2) +
             config.beta1 * var1;
      var2 = var1;
    } else {
      var1 = config.alpha0 + config.alpha1 * x1 * x1 + config.beta1 * var1;
      var2 = config.alpha0 + config.alpha1 * x2 * x2 + config.beta1 * var2;
    }
  }
  return out;
}

std::vector<double> returns_to_prices(std::span<const double> returns, double start_price) {
  if (!(start_price > 0.0))
    throw Error(ErrorKind::config, "start price must be positive");
  std::vector<double> prices;
  prices.reserve(returns.size() + 1);
  prices.push_back(start_price);
  for (std::size_t t = 0; t < returns.size(); ++t) {
    if (!(returns[t] > -1.0))
      throw Error(ErrorKind::nonpositive_price,
                  "return <= -100% at step " + std::to_string(t));
    prices.push_back(prices.back() * (1.0 + returns[t]));
  }
  return prices;
}

void SimMarketConfig::validate() const {
  if (!(start_price > 0.0)) throw Error(ErrorKind::config, "start price must be positive");
  for (double w : mean_waiting_times)
    if (!(w > 0.0)) throw Error(ErrorKind::config, "waiting times must be positive");
  if (!(q_scale > 0.0)) throw Error(ErrorKind::config, "q_scale must be positive");
  if (!(base_tick_size > 0.0)) throw Error(ErrorKind::config, "tick size must be positive");
  if (!(return_scale > 0.0)) throw Error(ErrorKind::config, "return scale must be positive");
}

TickSeries sample_trades(std::span<const double> prices, double mean_waiting_time,
                         bool rounding, std::uint64_t seed, double q_scale,
                         double base_tick_size, std::string symbol) {
  if (prices.empty()) throw Error(ErrorKind::empty_series, "no prices to sample");
  if (!(mean_waiting_time > 0.0))
    throw Error(ErrorKind::config, "mean waiting time must be positive");
  if (!(q_scale > 0.0)) throw Error(ErrorKind::config, "q_scale must be positive");

  // ceil(Exp) is geometric on {1, 2, ...}; pick the rate that makes its mean
  // equal the requested waiting time.
  std::mt19937_64 rng(seed);
  std::optional<std::exponential_distribution<double>> wait;
  if (mean_waiting_time > 1.0)
    wait.emplace(-std::log1p(-1.0 / mean_waiting_time));

  const auto to_ticks = [&](double p) {
    const double ticks = p / q_scale;
    return rounding ? std::round(ticks) : ticks;
  };

  std::vector<Trade> trades;
  trades.reserve(static_cast<std::size_t>(static_cast<double>(prices.size()) /
                                          std::max(1.0, mean_waiting_time)) + 16);
  const auto n = static_cast<Timestamp>(prices.size());
  Timestamp t = 0;
  while (t < n) {
    const double price = to_ticks(prices[static_cast<std::size_t>(t)]);
    if (!(price > 0.0))
      throw Error(ErrorKind::nonpositive_price,
                  "price rounds to zero ticks at step " + std::to_string(t));
    trades.push_back({t, price});
    Timestamp gap = 1;
    if (wait) gap = std::max<Timestamp>(1, static_cast<Timestamp>(std::ceil((*wait)(rng))));
    t += gap;
  }
  return TickSeries(std::move(symbol), base_tick_size * q_scale, std::move(trades));
}

SimulatedPair simulate_pair(const GarchConfig& garch, const SimMarketConfig& market) {
  garch.validate();
  market.validate();
  std::size_t redraws = 0;
  for (;;) {
    const std::uint64_t seed =
        redraws == 0 ? garch.seed : mix_seed(garch.seed, 1000 + redraws);
    ReturnPair r = generate_correlated_garch(garch, GarchSeeds::derive(seed));
    for (double& x : r.r1) x *= market.return_scale;
    for (double& x : r.r2) x *= market.return_scale;
    try {
      const auto p1 = returns_to_prices(r.r1, market.start_price);
      const auto p2 = returns_to_prices(r.r2, market.start_price);
      TickSeries a = sample_trades(p1, market.mean_waiting_times[0], market.rounding,
                                   mix_seed(seed, 11), market.q_scale,
                                   market.base_tick_size, "SIM1");
      TickSeries b = sample_trades(p2, market.mean_waiting_times[1], market.rounding,
                                   mix_seed(seed, 12), market.q_scale,
                                   market.base_tick_size, "SIM2");
      return {std::move(a), std::move(b), redraws};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::nonpositive_price) throw;
      if (++redraws > market.max_redraws)
        throw Error(ErrorKind::nonpositive_price,
                    "gave up after " + std::to_string(market.max_redraws) +
                        " redraws: " + e.what());
    }
  }
}

}  // namespace epps
