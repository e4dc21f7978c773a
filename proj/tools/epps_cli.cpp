// Command-line front end. Links only the C API.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "epps/epps.h"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct CliFailure {
  int code;
  std::string message;
};

void ok_or_throw(epps_status s) {
  if (s == EPPS_OK) return;
  // Internal failures have no code of their own and report as data errors.
  const int code = s == EPPS_E_USAGE     ? kExitUsage
                   : s == EPPS_E_NUMERIC ? kExitNumeric
                                         : kExitData;
  throw CliFailure{code, epps_last_error()};
}

struct TicksDeleter {
  void operator()(epps_ticks* t) const { epps_ticks_free(t); }
};
struct CurveDeleter {
  void operator()(epps_curve* c) const { epps_curve_free(c); }
};
using Ticks = std::unique_ptr<epps_ticks, TicksDeleter>;
using Curve = std::unique_ptr<epps_curve, CurveDeleter>;

struct SimulateArgs {
  epps_sim_options opt{};
  std::vector<double> wait;
  bool rounding = true;
  bool per_stock = false;
  std::string out_a = "sim_a.csv";
  std::string out_b = "sim_b.csv";
};

struct DataArgs {
  double tick_size = 0.01;
  bool off_grid = false;
};

struct SweepArgs {
  std::vector<std::int64_t> dts;
  std::vector<std::string> est;
  double w_max = 50;
  bool textbook = false;
  std::string prior = "triangular";
  std::string moments = "auto";
  std::size_t min_points = 10;
  std::size_t min_histogram = 100;
  std::int64_t window_begin = 0, window_end = 0;
  CLI::Option* begin_opt = nullptr;
  CLI::Option* end_opt = nullptr;
};

struct Args {
  std::string config;
  SimulateArgs sim;
  DataArgs data;
  SweepArgs sweep;
  std::string a, b, symbol_a, symbol_b, out = "-";
  std::string manifest;
  std::int64_t anchor = 1800;
  std::string anchor_est = "combined";
  std::string input;
  std::int64_t moments_dt = 60;
};

void add_data_options(CLI::App* app, DataArgs& d) {
  app->add_option("--tick-size", d.tick_size, "Tick size in currency units")
      ->capture_default_str();
  app->add_flag("--off-grid", d.off_grid, "Accept prices off the tick grid");
}

void add_sweep_options(CLI::App* app, SweepArgs& s) {
  app->add_option("--dt", s.dts, "Return intervals in seconds")->delimiter(',');
  app->add_option("--est", s.est,
                  "Estimators: plain,hayashi_yoshida,async,tick,tick_approx,combined,"
                  "combined_approx")
      ->delimiter(',');
  app->add_option("--w-max", s.w_max, "Cap on dt/dt_o")->capture_default_str();
  app->add_flag("--textbook", s.textbook, "Plain Pearson over every grid step");
  app->add_option("--prior", s.prior, "Error prior")
      ->check(CLI::IsMember({"triangular", "uniform"}))
      ->capture_default_str();
  app->add_option("--moments", s.moments, "Discretization moments")
      ->check(CLI::IsMember({"auto", "null", "uniform_null", "interpolated"}))
      ->capture_default_str();
  app->add_option("--min-points", s.min_points, "Minimum returns per dt")
      ->capture_default_str();
  app->add_option("--min-hist", s.min_histogram, "Minimum price changes per histogram")
      ->capture_default_str();
  s.begin_opt = app->add_option("--window-begin", s.window_begin, "First timestamp used");
  s.end_opt = app->add_option("--window-end", s.window_end, "Last timestamp used");
}

std::unique_ptr<CLI::App> make_app(Args& a) {
  auto app = std::make_unique<CLI::App>(
      "Correlation estimators for asynchronous, tick-discretized trade data");
  app->require_subcommand(1);
  app->fallthrough(false);

  epps_sim_options_init(&a.sim.opt);
  auto* sim = app->add_subcommand("simulate", "Simulate a correlated GARCH pair of trade CSVs");
  sim->add_option("--c", a.sim.opt.c, "Correlation of the returns")->capture_default_str();
  sim->add_option("--n", a.sim.opt.n_steps, "Time steps")->capture_default_str();
  sim->add_option("--wait", a.sim.wait, "Mean waiting times of the two stocks")
      ->delimiter(',')
      ->expected(2);
  sim->add_option("--start", a.sim.opt.start_price, "Start price in ticks")
      ->capture_default_str();
  sim->add_flag("--round,!--no-round", a.sim.rounding, "Round prices to the tick grid");
  sim->add_option("--seed", a.sim.opt.seed, "Seed")->capture_default_str();
  sim->add_option("--alpha0", a.sim.opt.alpha0)->capture_default_str();
  sim->add_option("--alpha1", a.sim.opt.alpha1)->capture_default_str();
  sim->add_option("--beta1", a.sim.opt.beta1)->capture_default_str();
  sim->add_option("--burn-in", a.sim.opt.burn_in)->capture_default_str();
  sim->add_flag("--per-stock-vol", a.sim.per_stock, "One variance process per stock");
  sim->add_option("--q-scale", a.sim.opt.q_scale, "Tick size multiplier")
      ->capture_default_str();
  sim->add_option("--tick-size", a.sim.opt.base_tick_size, "Base tick size")
      ->capture_default_str();
  sim->add_option("--return-scale", a.sim.opt.return_scale, "Factor applied to returns")
      ->capture_default_str();
  sim->add_option("--out-a", a.sim.out_a)->capture_default_str();
  sim->add_option("--out-b", a.sim.out_b)->capture_default_str();
  sim->add_option("--config", a.config, "key=value file");

  auto* sweep = app->add_subcommand("sweep", "Correlation against return interval for a pair");
  sweep->add_option("--a", a.a, "Trades of the first stock")->required();
  sweep->add_option("--b", a.b, "Trades of the second stock")->required();
  sweep->add_option("--symbol-a", a.symbol_a, "Symbol to keep from --a");
  sweep->add_option("--symbol-b", a.symbol_b, "Symbol to keep from --b");
  add_data_options(sweep, a.data);
  add_sweep_options(sweep, a.sweep);
  sweep->add_option("--out", a.out, "Output CSV, - for stdout")->capture_default_str();
  sweep->add_option("--config", a.config, "key=value file");

  auto* ens = app->add_subcommand("ensemble", "Normalized average over a manifest of pairs");
  ens->add_option("--manifest", a.manifest, "Lines of `a.csv b.csv`")->required();
  ens->add_option("--anchor", a.anchor, "Normalization interval")->capture_default_str();
  ens->add_option("--anchor-est", a.anchor_est, "Normalization estimator")
      ->capture_default_str();
  add_data_options(ens, a.data);
  add_sweep_options(ens, a.sweep);
  ens->add_option("--out", a.out, "Output CSV, - for stdout")->capture_default_str();
  ens->add_option("--config", a.config, "key=value file");

  auto* mom = app->add_subcommand("moments", "Discretization error moments of one series");
  mom->add_option("--in", a.input, "Trades CSV")->required();
  mom->add_option("--symbol", a.symbol_a, "Symbol to keep");
  mom->add_option("--dt", a.moments_dt, "Return interval")->capture_default_str();
  mom->add_option("--prior", a.sweep.prior)
      ->check(CLI::IsMember({"triangular", "uniform"}))
      ->capture_default_str();
  mom->add_option("--min-hist", a.sweep.min_histogram)->capture_default_str();
  add_data_options(mom, a.data);
  mom->add_option("--out", a.out, "Output CSV, - for stdout")->capture_default_str();
  mom->add_option("--config", a.config, "key=value file");
  return app;
}

// Flat key=value file; keys are long option names without the dashes.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure{kExitUsage, "cannot open config file " + path};
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int n = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CliFailure{kExitUsage, path + ":" + std::to_string(n) + ": expected key=value"};
    std::string key = trim(line.substr(0, eq));
    for (char& ch : key)
      if (ch == '_') ch = '-';
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

epps_prior to_prior(const std::string& s) {
  return s == "uniform" ? EPPS_PRIOR_UNIFORM : EPPS_PRIOR_TRIANGULAR;
}

epps_csv_options csv_options(const DataArgs& d, const std::string& symbol) {
  epps_csv_options o;
  epps_csv_options_init(&o);
  o.tick_size = d.tick_size;
  o.symbol = symbol.empty() ? nullptr : symbol.c_str();
  o.allow_off_grid = d.off_grid;
  return o;
}

Ticks load(const std::string& path, const DataArgs& d, const std::string& symbol) {
  const epps_csv_options o = csv_options(d, symbol);
  epps_ticks* t = nullptr;
  ok_or_throw(epps_ticks_load(path.c_str(), &o, &t));
  return Ticks(t);
}

struct SweepOptions {
  epps_sweep_options opt{};
  std::vector<epps_estimator> est;
};

SweepOptions sweep_options(const SweepArgs& s) {
  SweepOptions so;
  epps_sweep_options_init(&so.opt);
  if (!s.dts.empty()) {
    so.opt.dts = s.dts.data();
    so.opt.n_dts = s.dts.size();
  }
  for (const auto& name : s.est) {
    epps_estimator e;
    ok_or_throw(epps_estimator_parse(name.c_str(), &e));
    so.est.push_back(e);
  }
  if (!so.est.empty()) {
    so.opt.estimators = so.est.data();
    so.opt.n_estimators = so.est.size();
  }
  so.opt.w_max = s.w_max;
  so.opt.textbook_pearson = s.textbook;
  so.opt.prior = to_prior(s.prior);
  so.opt.moments = s.moments == "null"           ? EPPS_MOMENTS_NULL
                   : s.moments == "uniform_null" ? EPPS_MOMENTS_UNIFORM_NULL
                   : s.moments == "interpolated" ? EPPS_MOMENTS_INTERPOLATED
                                                 : EPPS_MOMENTS_AUTO;
  so.opt.min_points = s.min_points;
  so.opt.min_histogram = s.min_histogram;
  if (s.begin_opt && s.begin_opt->count()) {
    so.opt.has_window_begin = 1;
    so.opt.window_begin = s.window_begin;
  }
  if (s.end_opt && s.end_opt->count()) {
    so.opt.has_window_end = 1;
    so.opt.window_end = s.window_end;
  }
  return so;
}

// "-" means stdout; the library writes to paths only.
template <class Write>
void emit(const std::string& out, Write&& write) {
  std::cout.flush();
  ok_or_throw(write(out == "-" ? "/dev/stdout" : out.c_str()));
}

// Failed cells go to stderr. Returns the exit code the failures call for.
int report_cells(const epps_curve* c, const std::string& label) {
  bool numeric = false;
  std::size_t good = 0;
  for (std::size_t r = 0; r < epps_curve_rows(c); ++r) {
    for (std::size_t k = 0; k < epps_curve_cells(c, r); ++k) {
      epps_cell_info info;
      epps_curve_cell(c, r, k, &info);
      if (info.status == EPPS_OK) {
        ++good;
        continue;
      }
      numeric = numeric || info.status == EPPS_E_NUMERIC;
      std::cerr << label << "dt=" << epps_curve_dt(c, r) << ' '
                << epps_estimator_name(info.estimator) << ": " << info.error_kind << ": "
                << info.message << '\n';
    }
  }
  if (numeric) return kExitNumeric;
  return good == 0 ? kExitData : 0;
}

int run_simulate(Args& a) {
  auto& s = a.sim;
  if (!s.wait.empty()) {
    s.opt.mean_wait[0] = s.wait[0];
    s.opt.mean_wait[1] = s.wait[1];
  }
  s.opt.rounding = s.rounding;
  s.opt.per_stock_volatility = s.per_stock;
  epps_ticks* ta = nullptr;
  epps_ticks* tb = nullptr;
  ok_or_throw(epps_simulate_pair(&s.opt, &ta, &tb));
  Ticks pa(ta), pb(tb);
  ok_or_throw(epps_ticks_write(pa.get(), s.out_a.c_str()));
  ok_or_throw(epps_ticks_write(pb.get(), s.out_b.c_str()));
  std::cerr << "wrote " << s.out_a << " (" << epps_ticks_size(pa.get()) << " trades), "
            << s.out_b << " (" << epps_ticks_size(pb.get()) << " trades)\n";
  return 0;
}

int run_sweep(Args& a) {
  const Ticks ta = load(a.a, a.data, a.symbol_a);
  const Ticks tb = load(a.b, a.data, a.symbol_b);
  const SweepOptions so = sweep_options(a.sweep);
  epps_curve* c = nullptr;
  ok_or_throw(epps_sweep(ta.get(), tb.get(), &so.opt, &c));
  const Curve curve(c);
  emit(a.out, [&](const char* p) { return epps_curve_write(curve.get(), p); });
  return report_cells(curve.get(), "");
}

std::vector<std::pair<std::string, std::string>> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliFailure{kExitData, "cannot open manifest " + path};
  const auto base = std::filesystem::path(path).parent_path();
  const auto resolve = [&](const std::string& p) {
    const std::filesystem::path fp(p);
    return (fp.is_absolute() ? fp : base / fp).string();
  };
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream fields(line);
    std::string x, y, extra;
    if (!(fields >> x)) continue;
    if (!(fields >> y) || (fields >> extra))
      throw CliFailure{kExitData, path + ":" + std::to_string(n) + ": expected two paths"};
    pairs.emplace_back(resolve(x), resolve(y));
  }
  if (pairs.empty()) throw CliFailure{kExitData, path + ": no pairs"};
  return pairs;
}

int run_ensemble(Args& a) {
  epps_estimator anchor;
  ok_or_throw(epps_estimator_parse(a.anchor_est.c_str(), &anchor));
  const auto pairs = read_manifest(a.manifest);
  std::vector<Ticks> ta, tb;
  for (const auto& [x, y] : pairs) {
    ta.push_back(load(x, a.data, ""));
    tb.push_back(load(y, a.data, ""));
  }
  std::vector<const epps_ticks*> pa, pb;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pa.push_back(ta[i].get());
    pb.push_back(tb[i].get());
  }
  SweepOptions so = sweep_options(a.sweep);
  std::vector<epps_curve*> raw(pairs.size(), nullptr);
  ok_or_throw(epps_sweep_many(pa.data(), pb.data(), pairs.size(), &so.opt, raw.data()));
  std::vector<Curve> curves;
  for (auto* c : raw) curves.emplace_back(c);

  int code = 0;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const int rc = report_cells(curves[i].get(), "pair " + std::to_string(i) + ": ");
    if (rc == kExitNumeric) code = kExitNumeric;
  }

  epps_ensemble* e = nullptr;
  ok_or_throw(epps_ensemble_build(raw.data(), raw.size(), a.anchor, anchor, &e));
  const std::unique_ptr<epps_ensemble, void (*)(epps_ensemble*)> ens(e, epps_ensemble_free);
  for (std::size_t i = 0; i < epps_ensemble_excluded(e); ++i) {
    std::size_t pair = 0;
    const char* reason = "";
    epps_ensemble_excluded_get(e, i, &pair, &reason);
    std::cerr << "excluded pair " << pair << " (" << pairs[pair].first << ", "
              << pairs[pair].second << "): " << reason << '\n';
  }
  emit(a.out, [&](const char* p) { return epps_ensemble_write(e, p); });
  if (epps_ensemble_excluded(e) == pairs.size()) {
    std::cerr << "no pair has a usable anchor\n";
    return kExitNumeric;
  }
  return code;
}

int run_moments(Args& a) {
  const Ticks t = load(a.input, a.data, a.symbol_a);
  epps_moments* m = nullptr;
  ok_or_throw(epps_moments_estimate(t.get(), a.moments_dt, to_prior(a.sweep.prior),
                                    a.sweep.min_histogram, &m));
  const std::unique_ptr<epps_moments, void (*)(epps_moments*)> guard(m, epps_moments_free);
  if (const auto n = epps_moments_fallback(m))
    std::cerr << n << " bin(s) fell back to symmetric moments\n";
  emit(a.out, [&](const char* p) { return epps_moments_write(m, p); });
  return 0;
}

int parse(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::Success& e) {
    app.exit(e);
    return -1;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }
  return 0;
}

int run(int argc, char** argv) {
  const std::vector<std::string> given(argv + 1, argv + argc);
  Args args;
  auto app = make_app(args);
  if (const int rc = parse(*app, given)) return rc < 0 ? 0 : rc;

  if (!args.config.empty()) {
    CLI::App* sub = app->get_subcommands().front();
    std::vector<std::string> merged = given;
    for (const auto& [key, value] : read_config(args.config)) {
      CLI::Option* opt = sub->get_option_no_throw("--" + key);
      if (!opt || key == "config")
        throw CliFailure{kExitUsage, "unknown config key '" + key + "'"};
      if (opt->count() == 0) merged.push_back("--" + key + "=" + value);
    }
    args = Args{};
    app = make_app(args);
    if (const int rc = parse(*app, merged)) return rc < 0 ? 0 : rc;
  }

  const std::string name = app->get_subcommands().front()->get_name();
  if (name == "simulate") return run_simulate(args);
  if (name == "sweep") return run_sweep(args);
  if (name == "ensemble") return run_ensemble(args);
  return run_moments(args);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const CliFailure& f) {
    std::cerr << "error: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
}
