#include <cmath>
#include <numeric>

#include "doctest.h"
#include "epps/error.hpp"
#include "epps/simulator.hpp"

using namespace epps;

namespace {

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

ErrorKind error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

}  // namespace

TEST_CASE("c = 1 with a shared innovation gives identical returns") {
  GarchConfig cfg;
  cfg.c = 1.0;
  cfg.n_steps = 10'000;
  const auto r = generate_correlated_garch(cfg);
  CHECK(r.r1 == r.r2);
  CHECK(correlation(r.r1, r.r2) == doctest::Approx(1.0));
}

TEST_CASE("realized one-step correlation is unbiased for c") {
  // Heavy GARCH tails widen the spread of a single run well beyond
  // 1/sqrt(n), so the band is taken from the seeds themselves.
  for (double c : {0.0, 0.4, 0.8}) {
    std::vector<double> d;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      GarchConfig cfg;
      cfg.c = c;
      cfg.n_steps = 100'000;
      cfg.seed = 900 + seed;
      const auto r = generate_correlated_garch(cfg);
      REQUIRE(r.r1.size() == cfg.n_steps);
      d.push_back(correlation(r.r1, r.r2) - c);
    }
    const double m = std::accumulate(d.begin(), d.end(), 0.0) / 20;
    double v = 0;
    for (double x : d) v += (x - m) * (x - m);
    const double se = std::sqrt(v / 19 / 20);
    INFO("c=" << c << " mean error " << m << " se " << se);
    CHECK(std::abs(m) < 3 * se);
  }
}

TEST_SUITE("literal tolerance") {
  TEST_CASE("a single run recovers c within 3/sqrt(n)") {
    for (double c : {0.0, 0.4, 0.8}) {
      GarchConfig cfg;
      cfg.c = c;
      cfg.n_steps = 200'000;
      cfg.seed = 17;
      const auto r = generate_correlated_garch(cfg);
      INFO("c=" << c);
      CHECK(std::abs(correlation(r.r1, r.r2) - c) < 3.0 / std::sqrt(static_cast<double>(cfg.n_steps)));
    }
  }
}

TEST_CASE("sample variance approaches the stationary variance") {
  GarchConfig cfg;
  cfg.n_steps = 7'200'000;
  cfg.seed = 3;
  CHECK(cfg.stationary_variance() == doctest::Approx(0.024));
  const auto r = generate_correlated_garch(cfg);
  double s = 0;
  for (double x : r.r1) s += x * x;
  const double var = s / static_cast<double>(r.r1.size());
  CHECK(std::abs(var / cfg.stationary_variance() - 1) < 0.10);
}

TEST_CASE("GARCH determinism and validation") {
  GarchConfig cfg;
  cfg.n_steps = 5'000;
  CHECK(generate_correlated_garch(cfg).r1 == generate_correlated_garch(cfg).r1);
  GarchConfig other = cfg;
  other.seed = 2;
  CHECK(generate_correlated_garch(cfg).r1 != generate_correlated_garch(other).r1);

  auto bad = cfg;
  bad.beta1 = 0.86;
  CHECK(error_of([&] { generate_correlated_garch(bad); }) == ErrorKind::config);
  bad = cfg;
  bad.alpha0 = 0;
  CHECK(error_of([&] { generate_correlated_garch(bad); }) == ErrorKind::config);
  bad = cfg;
  bad.c = 1.5;
  CHECK(error_of([&] { generate_correlated_garch(bad); }) == ErrorKind::config);
  bad = cfg;
  bad.alpha1 = -0.1;
  CHECK(error_of([&] { generate_correlated_garch(bad); }) == ErrorKind::config);
}

TEST_CASE("returns to prices") {
  const std::vector<double> r{0.01, -0.01};
  const auto p = returns_to_prices(r, 1000);
  REQUIRE(p.size() == 3);
  CHECK(p[0] == 1000);
  CHECK(p[1] == doctest::Approx(1010));
  CHECK(p[2] == doctest::Approx(999.9));

  const std::vector<double> zeros(10, 0.0);
  for (double x : returns_to_prices(zeros, 1000)) CHECK(x == 1000);

  const std::vector<double> crash{0.1, -1.0, 0.2};
  try {
    returns_to_prices(crash, 1000);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::nonpositive_price);
    CHECK(std::string(e.what()).find("step 1") != std::string::npos);
  }
  CHECK(error_of([&] { returns_to_prices(r, 0); }) == ErrorKind::config);
}

TEST_CASE("trade sampling") {
  SUBCASE("mean waiting time") {
    const std::vector<double> prices(1'500'001, 1000.0);
    const auto s = sample_trades(prices, 15, true, 5);
    REQUIRE(s.size() > 100'000);
    const double mean = static_cast<double>(s.last_time() - s.first_time()) /
                        static_cast<double>(s.size() - 1);
    CHECK(std::abs(mean - 15) < 0.5);
    CHECK(s.first_time() == 0);
  }
  SUBCASE("unrounded prices are the underlying prices") {
    std::vector<double> prices;
    for (int i = 0; i < 2000; ++i) prices.push_back(1000 + 0.37 * i);
    const auto s = sample_trades(prices, 7, false, 9);
    for (const auto& tr : s.trades()) CHECK(tr.price == prices[static_cast<std::size_t>(tr.time)]);
    CHECK_FALSE(s.discretized());
  }
  SUBCASE("rounding half away from zero") {
    const std::vector<double> prices{1000.49, 1000.5, 999.5};
    const auto s = sample_trades(prices, 1, true, 1);
    REQUIRE(s.size() == 3);
    CHECK(s.trades()[0].price == 1000);
    CHECK(s.trades()[1].price == 1001);
    CHECK(s.trades()[2].price == 1000);
    CHECK(s.discretized());
  }
  SUBCASE("coarser ticks") {
    const std::vector<double> prices{1004.0};
    const auto s = sample_trades(prices, 1, true, 1, 10.0);
    CHECK(s.trades()[0].price == 100);
    CHECK(s.tick_size() == doctest::Approx(0.1));
  }
  SUBCASE("timestamps are distinct and strictly increasing") {
    const std::vector<double> prices(50'000, 1000.0);
    const auto s = sample_trades(prices, 2.5, true, 4);
    for (std::size_t i = 1; i < s.size(); ++i) CHECK(s.trades()[i].time > s.trades()[i - 1].time);
  }
  SUBCASE("errors") {
    const std::vector<double> none;
    CHECK(error_of([&] { sample_trades(none, 15, true, 1); }) == ErrorKind::empty_series);
    const std::vector<double> tiny{0.3};
    CHECK(error_of([&] { sample_trades(tiny, 15, true, 1); }) == ErrorKind::nonpositive_price);
    CHECK(error_of([&] { sample_trades(tiny, 0, false, 1); }) == ErrorKind::config);
  }
}

TEST_CASE("simulated pairs") {
  GarchConfig g;
  g.n_steps = 50'000;
  g.seed = 21;
  SimMarketConfig m;

  const auto x = simulate_pair(g, m);
  const auto y = simulate_pair(g, m);
  CHECK(x.a == y.a);
  CHECK(x.b == y.b);
  CHECK(x.a.first_time() == 0);
  CHECK(x.b.first_time() == 0);
  CHECK(x.a.last_time() <= static_cast<Timestamp>(g.n_steps));
  CHECK(x.a.discretized());

  SUBCASE("a seed change moves both streams") {
    g.seed = 22;
    const auto z = simulate_pair(g, m);
    CHECK_FALSE(z.a == x.a);
    CHECK_FALSE(z.b == x.b);
  }
  SUBCASE("swapping the stocks with their seeds swaps the outputs") {
    auto r = generate_correlated_garch(g);
    for (auto* v : {&r.r1, &r.r2})
      for (double& x : *v) x *= m.return_scale;
    const auto p1 = returns_to_prices(r.r1, 1000), p2 = returns_to_prices(r.r2, 1000);
    const auto a = sample_trades(p1, 15, true, 101), b = sample_trades(p2, 25, true, 202);
    const auto b2 = sample_trades(p2, 25, true, 202), a2 = sample_trades(p1, 15, true, 101);
    CHECK(a == a2);
    CHECK(b == b2);
    const auto seeds = GarchSeeds::derive(5);
    const auto fwd = generate_correlated_garch(g, seeds);
    const auto rev = generate_correlated_garch(g, {seeds.common, seeds.idio2, seeds.idio1});
    CHECK(fwd.r1 == rev.r2);
    CHECK(fwd.r2 == rev.r1);
  }
  SUBCASE("market validation") {
    m.mean_waiting_times[1] = 0;
    CHECK(error_of([&] { simulate_pair(g, m); }) == ErrorKind::config);
    m = {};
    m.start_price = -1;
    CHECK(error_of([&] { simulate_pair(g, m); }) == ErrorKind::config);
    m = {};
    m.q_scale = 0;
    CHECK(error_of([&] { simulate_pair(g, m); }) == ErrorKind::config);
  }
  SUBCASE("a crashing seed is redrawn and counted") {
    // Unscaled returns (sigma ~0.15 per step) fall below -100% within a few
    // thousand steps on roughly half of the seeds.
    g.n_steps = 5'000;
    m.return_scale = 1.0;
    m.rounding = false;
    std::size_t redraws = 0;
    for (g.seed = 0; g.seed < 50 && redraws == 0; ++g.seed) redraws = simulate_pair(g, m).redraws;
    REQUIRE(redraws > 0);
    --g.seed;
    m.max_redraws = 0;
    CHECK(error_of([&] { simulate_pair(g, m); }) == ErrorKind::nonpositive_price);
  }

}
