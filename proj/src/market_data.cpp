#include "epps/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "epps/error.hpp"
#include "text.hpp"

namespace epps {

TickSeries::TickSeries(std::string symbol, double tick_size,
                       std::vector<Trade> trades)
    : symbol_(std::move(symbol)),
      tick_size_(tick_size),
      trades_(std::move(trades)),
      discretized_(true) {
  if (trades_.empty())
    throw Error(ErrorKind::empty_series, "tick series '" + symbol_ + "' is empty");
  if (!(tick_size_ > 0.0) || !std::isfinite(tick_size_))
    throw Error(ErrorKind::config, "tick size must be positive");
  for (std::size_t i = 0; i < trades_.size(); ++i) {
    const Trade& tr = trades_[i];
    if (!(tr.price > 0.0) || !std::isfinite(tr.price))
      throw Error(ErrorKind::config, "non-positive price at trade " + std::to_string(i));
    if (i > 0 && tr.time < trades_[i - 1].time)
      throw Error(ErrorKind::config, "timestamps decrease at trade " + std::to_string(i));
    if (tr.price != std::floor(tr.price)) discretized_ = false;
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::parse, "line " + std::to_string(line) + ": " + msg);
}

}  // namespace

TickSeries load_trades(std::istream& in, const CsvTradeFormat& format) {
  if (!(format.tick_size > 0.0))
    throw Error(ErrorKind::config, "tick size must be positive");
  const double q = format.tick_size;

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::string symbol = format.symbol;
  std::vector<Trade> trades;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!have_header) {
      if (row != "symbol,timestamp,price")
        parse_error(line_no, "expected header 'symbol,timestamp,price'");
      have_header = true;
      continue;
    }

    std::string_view fields[3];
    std::string_view rest = row;
    for (int f = 0; f < 3; ++f) {
      const auto comma = rest.find(',');
      if (f < 2 && comma == std::string_view::npos)
        parse_error(line_no, "expected 3 fields");
      if (f == 2 && comma != std::string_view::npos)
        parse_error(line_no, "too many fields");
      fields[f] = trim(rest.substr(0, comma));
      if (comma != std::string_view::npos) rest.remove_prefix(comma + 1);
    }

    const std::string_view sym = fields[0];
    if (sym.empty()) parse_error(line_no, "empty symbol");
    if (!format.symbol.empty() && sym != format.symbol) continue;
    if (symbol.empty()) {
      symbol = std::string(sym);
    } else if (sym != symbol) {
      parse_error(line_no, "mixed symbols '" + symbol + "' and '" +
                               std::string(sym) + "'; select one explicitly");
    }

    Timestamp ts = 0;
    if (!detail::parse_int(fields[1], ts))
      parse_error(line_no, "bad timestamp '" + std::string(fields[1]) + "'");
    double price = 0.0;
    if (!detail::parse_double(fields[2], price) || !std::isfinite(price))
      parse_error(line_no, "bad price '" + std::string(fields[2]) + "'");
    if (!(price > 0.0)) parse_error(line_no, "price must be positive");

    if (format.session_begin && ts < *format.session_begin) continue;
    if (format.session_end && ts > *format.session_end) continue;

    const double ticks = price / q;
    const double k = std::round(ticks);
    if (std::abs(price - k * q) > 1e-6 * q) {
      if (!format.allow_off_grid)
        throw Error(ErrorKind::grid_violation,
                    "line " + std::to_string(line_no) + ": price " +
                        std::string(fields[2]) + " is off the tick grid");
      trades.push_back({ts, ticks});
    } else {
      trades.push_back({ts, k});
    }
  }
  if (!have_header && line_no == 0)
    throw Error(ErrorKind::empty_series, "no data");
  if (!have_header) parse_error(line_no, "missing header");
  if (trades.empty())
    throw Error(ErrorKind::empty_series, "no trades after filtering");

  std::stable_sort(trades.begin(), trades.end(),
                   [](const Trade& a, const Trade& b) { return a.time < b.time; });
  return TickSeries(std::move(symbol), q, std::move(trades));
}

TickSeries load_trades_file(const std::string& path, const CsvTradeFormat& format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path + "'");
  return load_trades(in, format);
}

void write_trades(std::ostream& out, const TickSeries& series) {
  const double q = series.tick_size();
  int decimals = -1;
  if (series.discretized()) {
    double scaled = q;
    for (int d = 0; d <= 12; ++d, scaled *= 10.0) {
      if (std::abs(scaled - std::round(scaled)) < 1e-9 * scaled) {
        decimals = d;
        break;
      }
    }
  }
  out << "symbol,timestamp,price\n";
  for (const Trade& tr : series.trades()) {
    out << series.symbol() << ',' << tr.time << ',';
    if (decimals >= 0)
      out << detail::format_fixed(tr.price * q, decimals);
    else
      out << detail::format_double(tr.price * q);
    out << '\n';
  }
}

void write_trades_file(const std::string& path, const TickSeries& series) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io, "cannot write '" + path + "'");
  write_trades(out, series);
  if (!out) throw Error(ErrorKind::io, "write failed for '" + path + "'");
}

SampledPath previous_tick_sample(const TickSeries& series, Timestamp origin,
                                 Timestamp dt, std::size_t n_steps) {
  if (dt <= 0) throw Error(ErrorKind::config, "dt must be positive");
  if (origin < series.first_time())
    throw Error(ErrorKind::no_prior_trade,
                "grid origin " + std::to_string(origin) +
                    " precedes the first trade at " +
                    std::to_string(series.first_time()));

  const auto trades = series.trades();
  SampledPath path{origin, dt, {}};
  path.points.reserve(n_steps + 1);
  std::size_t i = 0;
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const Timestamp t = origin + static_cast<Timestamp>(k) * dt;
    while (i + 1 < trades.size() && trades[i + 1].time <= t) ++i;
    path.points.push_back({t, trades[i].price, trades[i].time});
  }
  return path;
}

std::vector<GridReturn> arithmetic_returns(const SampledPath& path) {
  if (path.points.size() < 2)
    throw Error(ErrorKind::insufficient_data, "need at least 2 grid points");
  std::vector<GridReturn> out;
  out.reserve(path.points.size() - 1);
  for (std::size_t k = 0; k + 1 < path.points.size(); ++k) {
    const SamplePoint& a = path.points[k];
    const SamplePoint& b = path.points[k + 1];
    out.push_back({a.t, (b.price - a.price) / a.price, a.gamma, b.gamma});
  }
  return out;
}

}  // namespace epps
