#pragma once

// Seeded generators for property tests.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "epps/market_data.hpp"
#include "epps/overlap.hpp"

namespace gen {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(engine_);
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return std::normal_distribution<double>()(engine_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Trades starting at t = 0 with gaps in [0, max_gap] (repeated timestamps
// allowed) and integral prices in ticks.
inline epps::TickSeries series(Rng& rng, const std::string& symbol, int n_trades,
                               std::int64_t max_gap, double tick_size = 0.01) {
  std::vector<epps::Trade> trades;
  epps::Timestamp t = 0;
  double price = static_cast<double>(rng.integer(500, 1500));
  for (int i = 0; i < n_trades; ++i) {
    if (i > 0) {
      t += rng.integer(0, max_gap);
      price = std::max(1.0, price + static_cast<double>(rng.integer(-3, 3)));
    }
    trades.push_back({t, price});
  }
  return epps::TickSeries(symbol, tick_size, std::move(trades));
}

// Fully synchronous samples built straight from two return series, dt = 1,
// every weight 1. Prices and changes are consistent with the returns.
inline std::vector<epps::ReturnPairSample> synchronous(const std::vector<double>& r1,
                                                       const std::vector<double>& r2,
                                                       double price1 = 100.0,
                                                       double price2 = 100.0) {
  std::vector<epps::ReturnPairSample> out;
  for (std::size_t i = 0; i < r1.size(); ++i) {
    epps::ReturnPairSample s;
    s.t = static_cast<epps::Timestamp>(i);
    s.dt = 1;
    s.r1 = r1[i];
    s.r2 = r2[i];
    s.price1 = price1;
    s.price2 = price2;
    s.change1 = r1[i] * price1;
    s.change2 = r2[i] * price2;
    s.dt_o = 1;
    s.weight = 1.0;
    s.included = true;
    out.push_back(s);
  }
  return out;
}

// Correlated Gaussian pairs with correlation rho.
inline void gaussian_pair(Rng& rng, std::size_t n, double rho, std::vector<double>& a,
                          std::vector<double>& b, double scale = 1e-3) {
  a.resize(n);
  b.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = rng.normal();
    a[i] = scale * (std::sqrt(rho) * common + std::sqrt(1 - rho) * rng.normal());
    b[i] = scale * (std::sqrt(rho) * common + std::sqrt(1 - rho) * rng.normal());
  }
}

// Unrounded prices compounded from `returns`, one trade every `spacing`
// seconds starting at t = 0 and price 1000.
inline epps::TickSeries compounded(const std::string& symbol, const std::vector<double>& returns,
                                   epps::Timestamp spacing = 1) {
  std::vector<epps::Trade> trades;
  double p = 1000;
  trades.push_back({0, p});
  for (std::size_t i = 0; i < returns.size(); ++i) {
    p *= 1 + returns[i];
    trades.push_back({static_cast<epps::Timestamp>(i + 1) * spacing, p});
  }
  return epps::TickSeries(symbol, 0.01, std::move(trades));
}

inline void demean(std::vector<double>& x) {
  double m = 0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  for (double& v : x) v -= m;
}

}  // namespace gen
