#include <cmath>

#include "doctest.h"
#include "epps/error.hpp"
#include "epps/estimators.hpp"
#include "support.hpp"

using namespace epps;

namespace {

template <class Fn>
ErrorKind error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::io;
}

// Naive reference formulas, written independently of the library.
struct Oracle {
  std::vector<double> r1, r2, w, e1, e2, sq1, sq2;

  static double avg(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
  }
  static double cov(const std::vector<double>& a, const std::vector<double>& b) {
    const double ma = avg(a), mb = avg(b);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / static_cast<double>(a.size());
  }
  double sigma_hat(int i) const {
    const auto& r = i == 1 ? r1 : r2;
    const auto& e = i == 1 ? e1 : e2;
    const auto& sq = i == 1 ? sq1 : sq2;
    return std::sqrt(cov(r, r) + avg(sq) - avg(e) * avg(e) + 2 * cov(r, e));
  }
  double cross() const { return cov(r1, e2) + cov(r2, e1) + cov(e1, e2); }
  double tick() const { return (cov(r1, r2) + cross()) / (sigma_hat(1) * sigma_hat(2)); }
  double weighted_product() const {
    double s = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) s += r1[i] * r2[i] * w[i];
    return s / static_cast<double>(r1.size());
  }
  double combined() const {
    return (weighted_product() + (cross() - avg(r1) * avg(r2)) * avg(w)) /
           (sigma_hat(1) * sigma_hat(2));
  }
  double combined_approx() const { return weighted_product() / (sigma_hat(1) * sigma_hat(2)); }
};

Oracle oracle(const std::vector<ReturnPairSample>& samples, const DiscretizationMoments& m1,
              const DiscretizationMoments& m2) {
  Oracle o;
  const double q1 = m1.tick_size(), q2 = m2.tick_size();
  for (const auto& s : samples) {
    if (!s.included) continue;
    o.r1.push_back(s.r1);
    o.r2.push_back(s.r2);
    o.w.push_back(s.weight);
    const auto b1 = m1.at(static_cast<std::int64_t>(std::llround(s.change1)));
    const auto b2 = m2.at(static_cast<std::int64_t>(std::llround(s.change2)));
    o.e1.push_back(b1.e1 / q1 / s.price1);
    o.e2.push_back(b2.e1 / q2 / s.price2);
    o.sq1.push_back(b1.e2 / (q1 * q1) / (s.price1 * s.price1));
    o.sq2.push_back(b2.e2 / (q2 * q2) / (s.price2 * s.price2));
  }
  return o;
}

// Samples with integral changes, varying prices, random weights and a few
// excluded steps.
std::vector<ReturnPairSample> discretized_samples(gen::Rng& rng, std::size_t n) {
  std::vector<ReturnPairSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    ReturnPairSample s;
    s.t = static_cast<Timestamp>(i) * 60;
    s.dt = 60;
    const double common = rng.normal();
    s.price1 = static_cast<double>(rng.integer(900, 1100));
    s.price2 = static_cast<double>(rng.integer(400, 600));
    s.change1 = std::round(3 * (0.6 * common + 0.8 * rng.normal()));
    s.change2 = std::round(2 * (0.6 * common + 0.8 * rng.normal()));
    s.r1 = s.change1 / s.price1;
    s.r2 = s.change2 / s.price2;
    s.included = !rng.coin(0.1);
    s.dt_o = s.included ? rng.integer(10, 90) : -rng.integer(0, 5);
    s.weight = s.included ? std::min(50.0, 60.0 / static_cast<double>(s.dt_o)) : 0.0;
    out.push_back(s);
  }
  return out;
}

DiscretizationMoments moments_of(const std::vector<ReturnPairSample>& s, int which) {
  std::vector<double> c;
  for (const auto& x : s) c.push_back(which == 1 ? x.change1 : x.change2);
  return estimate_moments(build_histogram(c, 60, 0.01), ErrorPrior::triangular);
}

}  // namespace

TEST_CASE("pearson examples") {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4}, neg{-1, -2, -3};
  CHECK(pearson(gen::synchronous(x, x)).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(gen::synchronous(x, neg)).value == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(pearson(gen::synchronous(x, y)).value == doctest::Approx(3.0 / std::sqrt(2.0 * 42.0 / 9.0)));
  CHECK(pearson(gen::synchronous(x, y)).value == doctest::Approx(0.98198).epsilon(1e-5));
  CHECK(pearson(gen::synchronous(x, y)).n_samples == 3);
  CHECK(pearson(gen::synchronous(x, y)).kind == EstimatorKind::plain);
}

TEST_CASE("pearson errors") {
  const std::vector<double> one{1}, flat{2, 2, 2}, x{1, 2, 3};
  CHECK(error_of([&] { pearson(gen::synchronous(one, one)); }) == ErrorKind::insufficient_data);
  CHECK(error_of([&] { pearson(gen::synchronous(x, flat)); }) == ErrorKind::degenerate_variance);
  CHECK(error_of([&] { pearson({}); }) == ErrorKind::insufficient_data);
  auto s = gen::synchronous(x, x);
  for (auto& v : s) v.included = false;
  CHECK(error_of([&] { pearson(s); }) == ErrorKind::no_overlap);
  CHECK(error_of([&] { corr_async(s); }) == ErrorKind::no_overlap);
  CHECK(pearson(s, true).value == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("excluded samples only enter the textbook estimator") {
  const std::vector<double> x{1, 2, 3, 4}, y{1, 2, 3, -10};
  auto s = gen::synchronous(x, y);
  s[3].included = false;
  CHECK(pearson(s).value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(s).n_samples == 3);
  CHECK(pearson(s, true).n_samples == 4);
  CHECK(pearson(s, true).value < 0.0);
}

TEST_CASE("pearson is invariant under affine maps") {
  gen::Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a, b;
    gen::gaussian_pair(rng, static_cast<std::size_t>(rng.integer(3, 200)), rng.uniform(0, 1), a, b);
    const double base = pearson(gen::synchronous(a, b)).value;
    const double scale = std::exp(rng.uniform(-5, 5)) * (rng.coin() ? 1 : -1);
    const double shift = rng.uniform(-1, 1);
    std::vector<double> c = b;
    for (double& v : c) v = scale * v + shift;
    const double moved = pearson(gen::synchronous(a, c)).value;
    CHECK(std::abs(moved - (scale > 0 ? base : -base)) < 1e-12);
    CHECK(std::abs(base) <= 1.0);
  }
}

TEST_CASE("unit weights: async equals pearson exactly") {
  gen::Rng rng(52);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a, b;
    gen::gaussian_pair(rng, static_cast<std::size_t>(rng.integer(2, 300)), rng.uniform(0, 1), a, b);
    const auto s = gen::synchronous(a, b);
    const auto p = pearson(s);
    const auto q = corr_async(s);
    CHECK(q.value == p.value);
    CHECK(q.n_samples == p.n_samples);
    CHECK(q.kind == EstimatorKind::async);
  }
}

TEST_CASE("async weights each standardized product") {
  const std::vector<double> x{1, 2, 3, 4}, y{2, 1, 4, 3};
  auto s = gen::synchronous(x, y);
  const double w[] = {1.0, 2.0, 0.5, 1.5};
  for (int i = 0; i < 4; ++i) s[i].weight = w[i];
  // Standardized: x -> (x - 2.5)/sqrt(1.25), y likewise.
  double expect = 0;
  for (int i = 0; i < 4; ++i) expect += (x[i] - 2.5) * (y[i] - 2.5) * w[i];
  expect /= 4 * 1.25;
  CHECK(corr_async(s).value == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("tick estimators and the combined forms match naive references") {
  gen::Rng rng(53);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = discretized_samples(rng, 400);
    const auto m1 = moments_of(s, 1), m2 = moments_of(s, 2);
    const Oracle o = oracle(s, m1, m2);
    CHECK(corr_tick(s, m1, m2).value == doctest::Approx(o.tick()).epsilon(1e-11));
    CHECK(corr_combined(s, m1, m2).value == doctest::Approx(o.combined()).epsilon(1e-11));
    CHECK(corr_combined_approx(s, m1, m2).value == doctest::Approx(o.combined_approx()).epsilon(1e-11));
    CHECK(corrected_sigma(s, 1, m1).sigma_hat == doctest::Approx(o.sigma_hat(1)).epsilon(1e-12));
    CHECK(corr_combined(s, m1, m2).n_samples == o.r1.size());
    CHECK(corr_combined(s, m1, m2).kind == EstimatorKind::combined);
    CHECK(corr_combined_approx(s, m1, m2).kind == EstimatorKind::combined_approx);
  }
}

TEST_CASE("combined reductions without discretization") {
  gen::Rng rng(54);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a, b;
    gen::gaussian_pair(rng, 500, 0.4, a, b);
    for (double& v : a) v += 2e-4;  // a visible mean
    const auto s = gen::synchronous(a, b);
    const auto n = DiscretizationMoments::null(0.01);
    const auto u = DiscretizationMoments::uniform_null(0.01);
    const double p = pearson(s).value;
    // The mean correction in the bracket makes the combined form centred.
    CHECK(std::abs(corr_combined(s, n, n).value - p) < 1e-12);
    // The approximation is the uncentred form.
    double s12 = 0, m1 = 0, m2 = 0, v1 = 0, v2 = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      s12 += a[i] * b[i];
      m1 += a[i];
      m2 += b[i];
    }
    s12 /= 500, m1 /= 500, m2 /= 500;
    for (std::size_t i = 0; i < a.size(); ++i) {
      v1 += (a[i] - m1) * (a[i] - m1);
      v2 += (b[i] - m2) * (b[i] - m2);
    }
    const double uncentred = s12 / std::sqrt(v1 / 500 * v2 / 500);
    CHECK(corr_combined_approx(s, n, n).value == doctest::Approx(uncentred).epsilon(1e-12));
    // Symmetric moments at one price level leave every cross term at zero.
    const double shrink = 1.0 / std::sqrt((1 + 1.0 / (6 * 1e4 * v1 / 500)) * (1 + 1.0 / (6 * 1e4 * v2 / 500)));
    CHECK(corr_combined(s, u, u).value == doctest::Approx(p * shrink).epsilon(1e-10));
  }
}

TEST_CASE("zero-mean returns: every form equals pearson") {
  gen::Rng rng(55);
  std::vector<double> a, b;
  gen::gaussian_pair(rng, 1000, 0.5, a, b);
  for (auto* v : {&a, &b}) {
    double m = 0;
    for (double x : *v) m += x;
    m /= static_cast<double>(v->size());
    for (double& x : *v) x -= m;
  }
  const auto s = gen::synchronous(a, b);
  const auto n = DiscretizationMoments::null(0.01);
  const double p = pearson(s).value;
  CHECK(std::abs(corr_combined_approx(s, n, n).value - p) < 1e-10);
  CHECK(std::abs(corr_combined(s, n, n).value - p) < 1e-10);
}

TEST_CASE("compensated values may leave [-1, 1] and say so") {
  CorrelationEstimate e{1.05, 10, EstimatorKind::async};
  CHECK(e.out_of_range());
  e.value = -0.3;
  CHECK_FALSE(e.out_of_range());
  // Heavy weights on the agreeing steps push the async value above one.
  const std::vector<double> x{1, 2, 3, 4, 5}, y{1, 3, 2, 4, 5};
  auto s = gen::synchronous(x, y);
  s[0].weight = s[4].weight = 5;
  CHECK(corr_async(s).out_of_range());
}

TEST_CASE("estimator names") {
  for (EstimatorKind k : kAllEstimators) CHECK(parse_estimator(to_string(k)) == k);
  CHECK(parse_estimator("hy") == EstimatorKind::hayashi_yoshida);
  CHECK_FALSE(parse_estimator("spearman").has_value());
}

TEST_CASE("Hayashi-Yoshida") {
  const TimeWindow all{0, 1'000'000};
  SUBCASE("identical series give one") {
    const TickSeries a("A", 0.01, {{0, 100}, {3, 101}, {9, 99}, {12, 104}});
    const auto e = hayashi_yoshida(a, a, all);
    CHECK(e.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.n_samples == 3);
    CHECK(e.kind == EstimatorKind::hayashi_yoshida);
  }
  SUBCASE("disjoint trading spans") {
    const TickSeries a("A", 0.01, {{0, 100}, {5, 101}});
    const TickSeries b("B", 0.01, {{5, 100}, {9, 102}});
    CHECK(error_of([&] { hayashi_yoshida(a, b, all); }) == ErrorKind::no_overlap);
  }
  SUBCASE("too few trades and bad windows") {
    const TickSeries a("A", 0.01, {{0, 100}, {5, 101}, {8, 102}});
    const TickSeries one("B", 0.01, {{2, 100}, {2, 101}});
    CHECK(error_of([&] { hayashi_yoshida(a, one, all); }) == ErrorKind::insufficient_data);
    CHECK(error_of([&] { hayashi_yoshida(a, a, {5, 5}); }) == ErrorKind::config);
    CHECK(error_of([&] { hayashi_yoshida(a, a, {1, 7}); }) == ErrorKind::insufficient_data);
  }
  SUBCASE("constant prices") {
    const TickSeries a("A", 0.01, {{0, 100}, {5, 101}, {8, 102}});
    const TickSeries flat("B", 0.01, {{0, 100}, {4, 100}, {8, 100}});
    CHECK(error_of([&] { hayashi_yoshida(a, flat, all); }) == ErrorKind::degenerate_variance);
  }
  SUBCASE("hand example") {
    // A: (0,5] r=0.1, (5,10] r=-0.1/1.1.  B: (0,3] r=0.02, (3,8] r=0.01/1.02*..., (8,12].
    const TickSeries a("A", 0.01, {{0, 100}, {5, 110}, {10, 100}});
    const TickSeries b("B", 0.01, {{0, 100}, {3, 102}, {8, 103}, {12, 101}});
    const double ra[] = {0.1, -10.0 / 110};
    const double rb[] = {0.02, 1.0 / 102, -2.0 / 103};
    // Overlapping pairs: a0-b0, a0-b1, a1-b1, a1-b2.
    const double cross = ra[0] * rb[0] + ra[0] * rb[1] + ra[1] * rb[1] + ra[1] * rb[2];
    const double va = ra[0] * ra[0] + ra[1] * ra[1];
    const double vb = rb[0] * rb[0] + rb[1] * rb[1] + rb[2] * rb[2];
    const auto e = hayashi_yoshida(a, b, all);
    CHECK(e.value == doctest::Approx(cross / std::sqrt(va * vb)).epsilon(1e-14));
    CHECK(e.n_samples == 4);
  }
  SUBCASE("equal timestamps collapse to the last trade") {
    const TickSeries a("A", 0.01, {{0, 100}, {5, 90}, {5, 110}, {10, 100}});
    const TickSeries c("A", 0.01, {{0, 100}, {5, 110}, {10, 100}});
    const TickSeries b("B", 0.01, {{0, 100}, {3, 102}, {8, 103}, {12, 101}});
    CHECK(hayashi_yoshida(a, b, all).value == hayashi_yoshida(c, b, all).value);
  }
}

TEST_CASE("Hayashi-Yoshida matches an all-pairs reference") {
  gen::Rng rng(56);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = gen::series(rng, "A", static_cast<int>(rng.integer(2, 25)), 6);
    const auto b = gen::series(rng, "B", static_cast<int>(rng.integer(2, 25)), 6);
    const TimeWindow w{rng.integer(0, 5), rng.integer(20, 200)};
    auto returns = [&](const TickSeries& s) {
      std::vector<Trade> last;
      for (const auto& tr : s.trades()) {
        if (tr.time < w.begin || tr.time > w.end) continue;
        if (!last.empty() && last.back().time == tr.time) last.back() = tr;
        else last.push_back(tr);
      }
      std::vector<std::tuple<Timestamp, Timestamp, double>> r;
      for (std::size_t i = 1; i < last.size(); ++i)
        r.emplace_back(last[i - 1].time, last[i].time, last[i].price / last[i - 1].price - 1);
      return r;
    };
    const auto ra = returns(a), rb = returns(b);
    double cross = 0, va = 0, vb = 0;
    std::size_t pairs = 0;
    for (const auto& [a0, a1, x] : ra) {
      va += x * x;
      for (const auto& [b0, b1, y] : rb)
        if (std::max(a0, b0) < std::min(a1, b1)) {
          cross += x * y;
          ++pairs;
        }
    }
    for (const auto& [b0, b1, y] : rb) vb += y * y;
    if (ra.empty() || rb.empty() || pairs == 0 || va == 0 || vb == 0) {
      CHECK_THROWS_AS(hayashi_yoshida(a, b, w), Error);
      continue;
    }
    const auto e = hayashi_yoshida(a, b, w);
    CHECK(e.value == doctest::Approx(cross / std::sqrt(va * vb)).epsilon(1e-12));
    CHECK(e.n_samples == pairs);
  }
}
