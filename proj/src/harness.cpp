#include "epps/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>
#include <thread>

#include "epps/estimators.hpp"
#include "parallel.hpp"
#include "summation.hpp"
#include "text.hpp"

namespace epps {

const EppsCell* EppsRow::find(EstimatorKind kind) const noexcept {
  for (const auto& c : cells)
    if (c.kind == kind) return &c;
  return nullptr;
}

const EppsRow* EppsCurve::row(Timestamp dt) const noexcept {
  for (const auto& r : rows)
    if (r.dt == dt) return &r;
  return nullptr;
}

std::optional<double> EppsCurve::value(Timestamp dt, EstimatorKind kind) const noexcept {
  const EppsRow* r = row(dt);
  if (!r) return std::nullopt;
  const EppsCell* c = r->find(kind);
  if (!c || !c->ok() || !std::isfinite(c->value)) return std::nullopt;
  return c->value;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("EPPS_THREADS")) {
    std::size_t n = 0;
    if (detail::parse_int(std::string_view(env), n) && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepWindow sweep_window(const TickSeries& a, const TickSeries& b,
                         const SweepConfig& config) {
  SweepWindow w{std::max(a.first_time(), b.first_time()),
                std::min(a.last_time(), b.last_time())};
  if (config.window_begin) w.begin = std::max(w.begin, *config.window_begin);
  if (config.window_end) w.end = std::min(w.end, *config.window_end);
  return w;
}

namespace {

bool is_tick_kind(EstimatorKind k) {
  return k == EstimatorKind::tick || k == EstimatorKind::tick_approx ||
         k == EstimatorKind::combined || k == EstimatorKind::combined_approx;
}

EppsCell failed(EstimatorKind kind, const Error& e) {
  EppsCell c;
  c.kind = kind;
  c.error = CellError{e.kind(), e.what()};
  return c;
}

template <class Fn>
EppsCell evaluate(EstimatorKind kind, Fn&& fn) {
  try {
    const CorrelationEstimate est = fn();
    EppsCell c;
    c.kind = kind;
    c.value = est.value;
    c.n_samples = est.n_samples;
    return c;
  } catch (const Error& e) {
    return failed(kind, e);
  }
}

DiscretizationMoments row_moments(const TickSeries& series, const SampledPath& path,
                                  const SweepConfig& config) {
  MomentsMode mode = config.moments;
  if (mode == MomentsMode::automatic)
    mode = series.discretized() ? MomentsMode::interpolated : MomentsMode::null;
  switch (mode) {
    case MomentsMode::null:
      return DiscretizationMoments::null(series.tick_size());
    case MomentsMode::uniform_null:
      return DiscretizationMoments::uniform_null(series.tick_size());
    default:
      break;
  }
  std::vector<double> changes;
  changes.reserve(path.n_steps());
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k)
    changes.push_back(path.points[k + 1].price - path.points[k].price);
  const auto hist =
      build_histogram(changes, path.dt, series.tick_size(), config.min_histogram);
  return estimate_moments(hist, config.prior);
}

std::optional<EppsCell> hayashi_yoshida_cell(const TickSeries& a, const TickSeries& b,
                                             const SweepConfig& config) {
  if (std::find(config.estimators.begin(), config.estimators.end(),
                EstimatorKind::hayashi_yoshida) == config.estimators.end())
    return std::nullopt;
  const SweepWindow w = sweep_window(a, b, config);
  return evaluate(EstimatorKind::hayashi_yoshida,
                  [&] { return hayashi_yoshida(a, b, {w.begin, w.end}); });
}

std::vector<Timestamp> sorted_dts(const SweepConfig& config) {
  std::set<Timestamp> s(config.dts.begin(), config.dts.end());
  return {s.begin(), s.end()};
}

}  // namespace

EppsRow sweep_row(const TickSeries& a, const TickSeries& b, Timestamp dt,
                  const SweepConfig& config, const std::optional<EppsCell>& hy) {
  EppsRow row;
  row.dt = dt;
  try {
    if (dt <= 0) throw Error(ErrorKind::config, "dt must be positive");
    const SweepWindow w = sweep_window(a, b, config);
    const Timestamp span = w.end - w.begin;
    const auto n_steps = span > 0 ? static_cast<std::size_t>(span / dt) : 0;
    if (n_steps < config.min_points)
      throw Error(ErrorKind::insufficient_data,
                  "dt=" + std::to_string(dt) + " leaves " + std::to_string(n_steps) +
                      " returns in a span of " + std::to_string(span) + " s, need " +
                      std::to_string(config.min_points));

    const SampledPath pa = previous_tick_sample(a, w.begin, dt, n_steps);
    const SampledPath pb = previous_tick_sample(b, w.begin, dt, n_steps);
    const auto samples = compute_overlaps(pa, pb, config.overlap);
    try {
      row.mean_frac_overlap = overlap_stats(samples).mean_fractional_overlap;
    } catch (const Error&) {
    }

    std::optional<DiscretizationMoments> m1, m2;
    std::optional<Error> moments_error;
    try {
      m1 = row_moments(a, pa, config);
      m2 = row_moments(b, pb, config);
    } catch (const Error& e) {
      moments_error = e;
    }

    const DiscretizationMoments none_a = DiscretizationMoments::null(a.tick_size());
    const DiscretizationMoments none_b = DiscretizationMoments::null(b.tick_size());
    for (int i = 0; i < 2; ++i) {
      const auto& none = i == 0 ? none_a : none_b;
      const auto& m = i == 0 ? m1 : m2;
      try {
        row.sigma_raw[i] = corrected_sigma(samples, i + 1, none).sigma_raw;
        if (m) row.sigma_hat[i] = corrected_sigma(samples, i + 1, *m).sigma_hat;
      } catch (const Error&) {
      }
    }

    for (EstimatorKind kind : config.estimators) {
      if (kind == EstimatorKind::hayashi_yoshida) {
        if (hy) row.cells.push_back(*hy);
        continue;
      }
      if (is_tick_kind(kind) && moments_error) {
        row.cells.push_back(failed(kind, *moments_error));
        continue;
      }
      switch (kind) {
        case EstimatorKind::plain:
          row.cells.push_back(evaluate(kind, [&] {
            return pearson(samples, config.textbook_pearson);
          }));
          break;
        case EstimatorKind::async:
          row.cells.push_back(evaluate(kind, [&] { return corr_async(samples); }));
          break;
        case EstimatorKind::tick:
          row.cells.push_back(evaluate(kind, [&] { return corr_tick(samples, *m1, *m2); }));
          break;
        case EstimatorKind::tick_approx:
          row.cells.push_back(
              evaluate(kind, [&] { return corr_tick_approx(samples, *m1, *m2); }));
          break;
        case EstimatorKind::combined:
          row.cells.push_back(
              evaluate(kind, [&] { return corr_combined(samples, *m1, *m2); }));
          break;
        case EstimatorKind::combined_approx:
          row.cells.push_back(
              evaluate(kind, [&] { return corr_combined_approx(samples, *m1, *m2); }));
          break;
        case EstimatorKind::hayashi_yoshida:
          break;
      }
    }
  } catch (const Error& e) {
    row.cells.clear();
    for (EstimatorKind kind : config.estimators) {
      if (kind == EstimatorKind::hayashi_yoshida && hy)
        row.cells.push_back(*hy);
      else
        row.cells.push_back(failed(kind, e));
    }
  }
  return row;
}

std::vector<EppsCurve> epps_sweep_pairs(std::span<const TickPair> pairs,
                                        const SweepConfig& config) {
  const std::vector<Timestamp> dts = sorted_dts(config);
  if (dts.empty()) throw Error(ErrorKind::config, "no return intervals given");
  if (config.estimators.empty()) throw Error(ErrorKind::config, "no estimators given");
  const std::size_t workers = worker_count();

  std::vector<std::optional<EppsCell>> hy(pairs.size());
  detail::parallel_for(pairs.size(), workers, [&](std::size_t p) {
    hy[p] = hayashi_yoshida_cell(pairs[p].first, pairs[p].second, config);
  });

  std::vector<EppsCurve> curves(pairs.size());
  for (auto& c : curves) c.rows.resize(dts.size());
  detail::parallel_for(pairs.size() * dts.size(), workers, [&](std::size_t i) {
    const std::size_t p = i / dts.size();
    const std::size_t d = i % dts.size();
    curves[p].rows[d] = sweep_row(pairs[p].first, pairs[p].second, dts[d], config, hy[p]);
  });
  return curves;
}

EppsCurve epps_sweep(const TickSeries& a, const TickSeries& b, const SweepConfig& config) {
  const TickPair pair{a, b};
  return std::move(epps_sweep_pairs(std::span<const TickPair>(&pair, 1), config).front());
}

void write_curve_csv(std::ostream& out, const EppsCurve& curve) {
  using detail::format_double;
  out << "dt,estimator,value,n_samples,mean_frac_overlap,sigma_raw_1,sigma_hat_1,"
         "sigma_raw_2,sigma_hat_2\n";
  for (const EppsRow& row : curve.rows) {
    for (const EppsCell& cell : row.cells) {
      out << row.dt << ',' << to_string(cell.kind) << ','
          << format_double(cell.ok() ? cell.value : kNaN) << ',' << cell.n_samples << ','
          << format_double(row.mean_frac_overlap) << ','
          << format_double(row.sigma_raw[0]) << ',' << format_double(row.sigma_hat[0])
          << ',' << format_double(row.sigma_raw[1]) << ','
          << format_double(row.sigma_hat[1]) << '\n';
    }
  }
}

EppsCurve read_curve_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  EppsCurve curve;
  bool header = false;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line.rfind("dt,estimator,value", 0) != 0) fail("unexpected header");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 9) fail("expected 9 fields");
    Timestamp dt = 0;
    std::size_t n = 0;
    double v[7];
    if (!detail::parse_int(f[0], dt)) fail("bad dt");
    const auto kind = parse_estimator(f[1]);
    if (!kind) fail("unknown estimator '" + std::string(f[1]) + "'");
    if (!detail::parse_double(f[2], v[0])) fail("bad value");
    if (!detail::parse_int(f[3], n)) fail("bad n_samples");
    for (int i = 4; i < 9; ++i)
      if (!detail::parse_double(f[i], v[i - 3])) fail("bad number");

    if (curve.rows.empty() || curve.rows.back().dt != dt) {
      if (!curve.rows.empty() && dt <= curve.rows.back().dt) fail("dt not increasing");
      EppsRow row;
      row.dt = dt;
      row.mean_frac_overlap = v[1];
      row.sigma_raw = {v[2], v[4]};
      row.sigma_hat = {v[3], v[5]};
      curve.rows.push_back(std::move(row));
    }
    EppsCell cell;
    cell.kind = *kind;
    cell.value = v[0];
    cell.n_samples = n;
    if (std::isnan(v[0]))
      cell.error = CellError{ErrorKind::insufficient_data, "no value recorded"};
    curve.rows.back().cells.push_back(std::move(cell));
  }
  if (!header) throw Error(ErrorKind::parse, "missing header");
  return curve;
}

const EnsembleRow* EnsembleResult::find(Timestamp dt, EstimatorKind kind) const noexcept {
  for (const auto& r : rows)
    if (r.dt == dt && r.kind == kind) return &r;
  return nullptr;
}

EnsembleResult ensemble_average(std::span<const EppsCurve> curves, Timestamp anchor_dt,
                                EstimatorKind anchor_kind) {
  EnsembleResult res;
  res.anchor_dt = anchor_dt;
  res.anchor_kind = anchor_kind;
  res.anchors.assign(curves.size(), kNaN);

  std::set<Timestamp> dts;
  std::set<EstimatorKind> kinds;
  for (std::size_t p = 0; p < curves.size(); ++p) {
    const auto anchor = curves[p].value(anchor_dt, anchor_kind);
    if (!anchor) {
      res.excluded.push_back({p, "no " + std::string(to_string(anchor_kind)) +
                                     " value at dt=" + std::to_string(anchor_dt)});
      continue;
    }
    if (!(*anchor > 0.0)) {
      res.excluded.push_back({p, "non-positive anchor " + detail::format_double(*anchor)});
      continue;
    }
    res.anchors[p] = *anchor;
    for (const auto& row : curves[p].rows) {
      dts.insert(row.dt);
      for (const auto& c : row.cells) kinds.insert(c.kind);
    }
  }

  for (Timestamp dt : dts) {
    for (EstimatorKind kind : kAllEstimators) {
      if (!kinds.count(kind)) continue;
      std::vector<double> values;
      for (std::size_t p = 0; p < curves.size(); ++p) {
        if (std::isnan(res.anchors[p])) continue;
        if (const auto v = curves[p].value(dt, kind)) values.push_back(*v / res.anchors[p]);
      }
      EnsembleRow row;
      row.dt = dt;
      row.kind = kind;
      row.n_pairs = values.size();
      if (!values.empty()) {
        row.mean_norm = detail::mean(values);
        row.two_sigma = 2.0 * std::sqrt(detail::variance(values, row.mean_norm));
      }
      res.rows.push_back(row);
    }
  }
  return res;
}

void write_ensemble_csv(std::ostream& out, const EnsembleResult& result) {
  out << "dt,estimator,mean_norm,two_sigma,n_pairs\n";
  for (const auto& r : result.rows)
    out << r.dt << ',' << to_string(r.kind) << ',' << detail::format_double(r.mean_norm)
        << ',' << detail::format_double(r.two_sigma) << ',' << r.n_pairs << '\n';
}

}  // namespace epps
