#include "epps/epps.h"

#include <cmath>
#include <fstream>
#include <new>
#include <string>
#include <vector>

#include "epps/error.hpp"
#include "epps/harness.hpp"
#include "epps/simulator.hpp"

struct epps_ticks {
  epps::TickSeries series;
};

struct epps_curve {
  epps::EppsCurve curve;
  // Stable C strings for cell errors, indexed like rows/cells.
  std::vector<std::vector<std::string>> kinds;
};

struct epps_ensemble {
  epps::EnsembleResult result;
};

struct epps_moments {
  epps::DiscretizationMoments moments;
  std::vector<std::int64_t> keys;
};

namespace {

thread_local std::string last_error;

epps_status status_of(epps::ErrorKind kind) {
  if (kind == epps::ErrorKind::config) return EPPS_E_USAGE;
  if (epps::is_numerical(kind)) return EPPS_E_NUMERIC;
  return EPPS_E_DATA;
}

epps_status fail(epps_status s, std::string msg) {
  last_error = std::move(msg);
  return s;
}

template <class Fn>
epps_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    fn();
    return EPPS_OK;
  } catch (const epps::Error& e) {
    return fail(status_of(e.kind()),
                std::string(epps::to_string(e.kind())) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    return fail(EPPS_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(EPPS_E_INTERNAL, e.what());
  }
}

bool valid_estimator(epps_estimator e) {
  return static_cast<int>(e) >= 0 && static_cast<int>(e) < EPPS_N_ESTIMATORS;
}

epps::EstimatorKind to_kind(epps_estimator e) { return epps::kAllEstimators[e]; }

epps_estimator from_kind(epps::EstimatorKind k) {
  for (int i = 0; i < EPPS_N_ESTIMATORS; ++i)
    if (epps::kAllEstimators[i] == k) return static_cast<epps_estimator>(i);
  return EPPS_PLAIN;
}

void check(bool ok, const char* what) {
  if (!ok) throw epps::Error(epps::ErrorKind::config, what);
}

epps::SweepConfig to_config(const epps_sweep_options* opt) {
  epps::SweepConfig cfg;
  if (!opt) return cfg;
  if (opt->dts) cfg.dts.assign(opt->dts, opt->dts + opt->n_dts);
  if (opt->estimators) {
    cfg.estimators.clear();
    for (std::size_t i = 0; i < opt->n_estimators; ++i) {
      check(valid_estimator(opt->estimators[i]), "unknown estimator");
      cfg.estimators.push_back(to_kind(opt->estimators[i]));
    }
  }
  check(opt->w_max >= 1.0, "w_max must be at least 1");
  cfg.overlap.w_max = opt->w_max;
  cfg.textbook_pearson = opt->textbook_pearson != 0;
  check(opt->prior == EPPS_PRIOR_TRIANGULAR || opt->prior == EPPS_PRIOR_UNIFORM,
        "unknown prior");
  cfg.prior = opt->prior == EPPS_PRIOR_UNIFORM ? epps::ErrorPrior::uniform
                                               : epps::ErrorPrior::triangular;
  switch (opt->moments) {
    case EPPS_MOMENTS_AUTO: cfg.moments = epps::MomentsMode::automatic; break;
    case EPPS_MOMENTS_NULL: cfg.moments = epps::MomentsMode::null; break;
    case EPPS_MOMENTS_UNIFORM_NULL: cfg.moments = epps::MomentsMode::uniform_null; break;
    case EPPS_MOMENTS_INTERPOLATED: cfg.moments = epps::MomentsMode::interpolated; break;
    default: check(false, "unknown moments mode");
  }
  cfg.min_points = opt->min_points;
  cfg.min_histogram = opt->min_histogram;
  if (opt->has_window_begin) cfg.window_begin = opt->window_begin;
  if (opt->has_window_end) cfg.window_end = opt->window_end;
  return cfg;
}

epps_curve* wrap(epps::EppsCurve curve) {
  auto* c = new epps_curve{std::move(curve), {}};
  for (const auto& row : c->curve.rows) {
    auto& names = c->kinds.emplace_back();
    for (const auto& cell : row.cells)
      names.emplace_back(cell.error ? epps::to_string(cell.error->kind) : "");
  }
  return c;
}

template <class Fn>
void with_output(const char* path, Fn&& fn) {
  check(path != nullptr, "path is null");
  std::ofstream out(path);
  if (!out) throw epps::Error(epps::ErrorKind::io, std::string("cannot write ") + path);
  fn(out);
  out.flush();
  if (!out) throw epps::Error(epps::ErrorKind::io, std::string("write failed: ") + path);
}

}  // namespace

extern "C" {

const char* epps_last_error(void) { return last_error.c_str(); }

const char* epps_estimator_name(epps_estimator e) {
  if (!valid_estimator(e)) return "unknown";
  return epps::to_string(to_kind(e)).data();
}

epps_status epps_estimator_parse(const char* name, epps_estimator* out) {
  if (!name || !out) return fail(EPPS_E_USAGE, "null argument");
  const auto kind = epps::parse_estimator(name);
  if (!kind) return fail(EPPS_E_USAGE, std::string("unknown estimator '") + name + "'");
  *out = from_kind(*kind);
  return EPPS_OK;
}

void epps_csv_options_init(epps_csv_options* opt) {
  if (!opt) return;
  *opt = epps_csv_options{};
  opt->tick_size = epps::CsvTradeFormat{}.tick_size;
}

epps_status epps_ticks_load(const char* path, const epps_csv_options* opt, epps_ticks** out) {
  return guarded([&] {
    check(path && out, "null argument");
    epps::CsvTradeFormat fmt;
    if (opt) {
      fmt.tick_size = opt->tick_size;
      if (opt->symbol) fmt.symbol = opt->symbol;
      if (opt->has_session_begin) fmt.session_begin = opt->session_begin;
      if (opt->has_session_end) fmt.session_end = opt->session_end;
      fmt.allow_off_grid = opt->allow_off_grid != 0;
    }
    *out = new epps_ticks{epps::load_trades_file(path, fmt)};
  });
}

epps_status epps_ticks_write(const epps_ticks* ticks, const char* path) {
  return guarded([&] {
    check(ticks && path, "null argument");
    epps::write_trades_file(path, ticks->series);
  });
}

size_t epps_ticks_size(const epps_ticks* ticks) { return ticks ? ticks->series.size() : 0; }

double epps_ticks_tick_size(const epps_ticks* ticks) {
  return ticks ? ticks->series.tick_size() : 0.0;
}

epps_status epps_ticks_get(const epps_ticks* ticks, size_t i, int64_t* time, double* price) {
  if (!ticks || i >= ticks->series.size()) return fail(EPPS_E_USAGE, "index out of range");
  const auto& tr = ticks->series.trades()[i];
  if (time) *time = tr.time;
  if (price) *price = tr.price * ticks->series.tick_size();
  return EPPS_OK;
}

void epps_ticks_free(epps_ticks* ticks) { delete ticks; }

void epps_sim_options_init(epps_sim_options* opt) {
  if (!opt) return;
  const epps::GarchConfig g;
  const epps::SimMarketConfig m;
  *opt = epps_sim_options{};
  opt->alpha0 = g.alpha0;
  opt->alpha1 = g.alpha1;
  opt->beta1 = g.beta1;
  opt->c = g.c;
  opt->n_steps = g.n_steps;
  opt->seed = g.seed;
  opt->burn_in = g.burn_in;
  opt->per_stock_volatility = g.coupling == epps::VolatilityCoupling::per_stock;
  opt->start_price = m.start_price;
  opt->mean_wait[0] = m.mean_waiting_times[0];
  opt->mean_wait[1] = m.mean_waiting_times[1];
  opt->rounding = m.rounding;
  opt->q_scale = m.q_scale;
  opt->base_tick_size = m.base_tick_size;
  opt->return_scale = m.return_scale;
  opt->max_redraws = m.max_redraws;
}

epps_status epps_simulate_pair(const epps_sim_options* opt, epps_ticks** a, epps_ticks** b) {
  return guarded([&] {
    check(opt && a && b, "null argument");
    epps::GarchConfig g;
    g.alpha0 = opt->alpha0;
    g.alpha1 = opt->alpha1;
    g.beta1 = opt->beta1;
    g.c = opt->c;
    g.n_steps = opt->n_steps;
    g.seed = opt->seed;
    g.burn_in = opt->burn_in;
    g.coupling = opt->per_stock_volatility ? epps::VolatilityCoupling::per_stock
                                           : epps::VolatilityCoupling::shared;
    epps::SimMarketConfig m;
    m.start_price = opt->start_price;
    m.mean_waiting_times = {opt->mean_wait[0], opt->mean_wait[1]};
    m.rounding = opt->rounding != 0;
    m.q_scale = opt->q_scale;
    m.base_tick_size = opt->base_tick_size;
    m.return_scale = opt->return_scale;
    m.max_redraws = opt->max_redraws;
    auto pair = epps::simulate_pair(g, m);
    auto* ta = new epps_ticks{std::move(pair.a)};
    try {
      *b = new epps_ticks{std::move(pair.b)};
    } catch (...) {
      delete ta;
      throw;
    }
    *a = ta;
  });
}

void epps_sweep_options_init(epps_sweep_options* opt) {
  if (!opt) return;
  const epps::SweepConfig cfg;
  *opt = epps_sweep_options{};
  opt->w_max = cfg.overlap.w_max;
  opt->textbook_pearson = cfg.textbook_pearson;
  opt->prior = EPPS_PRIOR_TRIANGULAR;
  opt->moments = EPPS_MOMENTS_AUTO;
  opt->min_points = cfg.min_points;
  opt->min_histogram = cfg.min_histogram;
}

epps_status epps_sweep(const epps_ticks* a, const epps_ticks* b,
                       const epps_sweep_options* opt, epps_curve** out) {
  return guarded([&] {
    check(a && b && out, "null argument");
    *out = wrap(epps::epps_sweep(a->series, b->series, to_config(opt)));
  });
}

epps_status epps_sweep_many(const epps_ticks* const* a, const epps_ticks* const* b,
                            size_t n_pairs, const epps_sweep_options* opt,
                            epps_curve** out) {
  return guarded([&] {
    check(out && (n_pairs == 0 || (a && b)), "null argument");
    std::vector<epps::TickPair> pairs;
    pairs.reserve(n_pairs);
    for (size_t i = 0; i < n_pairs; ++i) {
      check(a[i] && b[i], "null series");
      pairs.emplace_back(a[i]->series, b[i]->series);
    }
    auto curves = epps::epps_sweep_pairs(pairs, to_config(opt));
    std::vector<epps_curve*> wrapped;
    try {
      for (auto& c : curves) wrapped.push_back(wrap(std::move(c)));
    } catch (...) {
      for (auto* w : wrapped) delete w;
      throw;
    }
    for (size_t i = 0; i < n_pairs; ++i) out[i] = wrapped[i];
  });
}

size_t epps_curve_rows(const epps_curve* c) { return c ? c->curve.rows.size() : 0; }

int64_t epps_curve_dt(const epps_curve* c, size_t row) {
  return c && row < c->curve.rows.size() ? c->curve.rows[row].dt : 0;
}

size_t epps_curve_cells(const epps_curve* c, size_t row) {
  return c && row < c->curve.rows.size() ? c->curve.rows[row].cells.size() : 0;
}

epps_status epps_curve_cell(const epps_curve* c, size_t row, size_t cell,
                            epps_cell_info* out) {
  if (!c || !out || row >= c->curve.rows.size() || cell >= c->curve.rows[row].cells.size())
    return fail(EPPS_E_USAGE, "cell index out of range");
  const auto& x = c->curve.rows[row].cells[cell];
  out->estimator = from_kind(x.kind);
  out->value = x.ok() ? x.value : NAN;
  out->n_samples = x.n_samples;
  out->status = x.error ? status_of(x.error->kind) : EPPS_OK;
  out->error_kind = c->kinds[row][cell].c_str();
  out->message = x.error ? x.error->message.c_str() : "";
  return EPPS_OK;
}

epps_status epps_curve_row(const epps_curve* c, size_t row, epps_row_info* out) {
  if (!c || !out || row >= c->curve.rows.size())
    return fail(EPPS_E_USAGE, "row index out of range");
  const auto& r = c->curve.rows[row];
  out->dt = r.dt;
  out->mean_frac_overlap = r.mean_frac_overlap;
  out->sigma_raw[0] = r.sigma_raw[0];
  out->sigma_raw[1] = r.sigma_raw[1];
  out->sigma_hat[0] = r.sigma_hat[0];
  out->sigma_hat[1] = r.sigma_hat[1];
  return EPPS_OK;
}

epps_status epps_curve_value(const epps_curve* c, int64_t dt, epps_estimator e, double* out) {
  if (!c || !out || !valid_estimator(e)) return fail(EPPS_E_USAGE, "bad argument");
  *out = c->curve.value(dt, to_kind(e)).value_or(NAN);
  return EPPS_OK;
}

epps_status epps_curve_write(const epps_curve* c, const char* path) {
  return guarded([&] {
    check(c != nullptr, "null curve");
    with_output(path, [&](std::ostream& out) { epps::write_curve_csv(out, c->curve); });
  });
}

epps_status epps_curve_read(const char* path, epps_curve** out) {
  return guarded([&] {
    check(path && out, "null argument");
    std::ifstream in(path);
    if (!in) throw epps::Error(epps::ErrorKind::io, std::string("cannot open ") + path);
    *out = wrap(epps::read_curve_csv(in));
  });
}

void epps_curve_free(epps_curve* c) { delete c; }

epps_status epps_ensemble_build(const epps_curve* const* curves, size_t n, int64_t anchor_dt,
                                epps_estimator anchor, epps_ensemble** out) {
  return guarded([&] {
    check(out && (n == 0 || curves), "null argument");
    check(valid_estimator(anchor), "unknown anchor estimator");
    std::vector<epps::EppsCurve> cs;
    cs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      check(curves[i] != nullptr, "null curve");
      cs.push_back(curves[i]->curve);
    }
    *out = new epps_ensemble{epps::ensemble_average(cs, anchor_dt, to_kind(anchor))};
  });
}

size_t epps_ensemble_rows(const epps_ensemble* e) { return e ? e->result.rows.size() : 0; }

epps_status epps_ensemble_row_get(const epps_ensemble* e, size_t i, epps_ensemble_row* out) {
  if (!e || !out || i >= e->result.rows.size())
    return fail(EPPS_E_USAGE, "row index out of range");
  const auto& r = e->result.rows[i];
  *out = {r.dt, from_kind(r.kind), r.mean_norm, r.two_sigma, r.n_pairs};
  return EPPS_OK;
}

size_t epps_ensemble_excluded(const epps_ensemble* e) {
  return e ? e->result.excluded.size() : 0;
}

epps_status epps_ensemble_excluded_get(const epps_ensemble* e, size_t i, size_t* pair,
                                       const char** reason) {
  if (!e || i >= e->result.excluded.size()) return fail(EPPS_E_USAGE, "index out of range");
  if (pair) *pair = e->result.excluded[i].pair;
  if (reason) *reason = e->result.excluded[i].reason.c_str();
  return EPPS_OK;
}

epps_status epps_ensemble_write(const epps_ensemble* e, const char* path) {
  return guarded([&] {
    check(e != nullptr, "null ensemble");
    with_output(path, [&](std::ostream& out) { epps::write_ensemble_csv(out, e->result); });
  });
}

void epps_ensemble_free(epps_ensemble* e) { delete e; }

epps_status epps_moments_estimate(const epps_ticks* ticks, int64_t dt, epps_prior prior,
                                  size_t min_count, epps_moments** out) {
  return guarded([&] {
    check(ticks && out, "null argument");
    check(dt > 0, "dt must be positive");
    const auto& s = ticks->series;
    const auto n = static_cast<std::size_t>((s.last_time() - s.first_time()) / dt);
    const auto path = epps::previous_tick_sample(s, s.first_time(), dt, n);
    std::vector<double> changes;
    changes.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
      changes.push_back(path.points[k + 1].price - path.points[k].price);
    const auto hist = epps::build_histogram(changes, dt, s.tick_size(), min_count);
    auto m = epps::estimate_moments(hist, prior == EPPS_PRIOR_UNIFORM
                                              ? epps::ErrorPrior::uniform
                                              : epps::ErrorPrior::triangular);
    std::vector<std::int64_t> keys;
    for (const auto& [k, v] : m.bins()) keys.push_back(k);
    *out = new epps_moments{std::move(m), std::move(keys)};
  });
}

size_t epps_moments_bins(const epps_moments* m) { return m ? m->keys.size() : 0; }

epps_status epps_moments_bin(const epps_moments* m, size_t i, int64_t* k, double* e1,
                             double* e2) {
  if (!m || i >= m->keys.size()) return fail(EPPS_E_USAGE, "bin index out of range");
  const auto& v = m->moments.bins().at(m->keys[i]);
  if (k) *k = m->keys[i];
  if (e1) *e1 = v.e1;
  if (e2) *e2 = v.e2;
  return EPPS_OK;
}

size_t epps_moments_fallback(const epps_moments* m) {
  return m ? m->moments.n_fallback() : 0;
}

epps_status epps_moments_write(const epps_moments* m, const char* path) {
  return guarded([&] {
    check(m != nullptr, "null moments");
    with_output(path, [&](std::ostream& out) { epps::write_moments_csv(out, m->moments); });
  });
}

void epps_moments_free(epps_moments* m) { delete m; }

}  // extern "C"
