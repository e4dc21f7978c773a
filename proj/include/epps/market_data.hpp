#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epps {

// Integer seconds from session start.
using Timestamp = std::int64_t;

// One trade. `price` is measured in ticks; loaded or rounded data is integral,
// unrounded simulator output is not.
struct Trade {
  Timestamp time = 0;
  double price = 0.0;

  friend bool operator==(const Trade&, const Trade&) = default;
};

// Time-ordered trades of one instrument within one session.
class TickSeries {
 public:
  // Throws Error{empty_series} on no trades, Error{config} when timestamps
  // decrease, prices are not strictly positive, or tick_size <= 0.
  TickSeries(std::string symbol, double tick_size, std::vector<Trade> trades);

  const std::string& symbol() const noexcept { return symbol_; }
  double tick_size() const noexcept { return tick_size_; }
  std::span<const Trade> trades() const noexcept { return trades_; }
  std::size_t size() const noexcept { return trades_.size(); }
  Timestamp first_time() const noexcept { return trades_.front().time; }
  Timestamp last_time() const noexcept { return trades_.back().time; }

  // True when every price is an integral tick count.
  bool discretized() const noexcept { return discretized_; }

  friend bool operator==(const TickSeries&, const TickSeries&) = default;

 private:
  std::string symbol_;
  double tick_size_;
  std::vector<Trade> trades_;
  bool discretized_;
};

struct SamplePoint {
  Timestamp t = 0;
  double price = 0.0;
  Timestamp gamma = 0;  // time of the last trade at or before t

  friend bool operator==(const SamplePoint&, const SamplePoint&) = default;
};

// Previous-tick prices on the grid origin + k*dt, k = 0..n_steps.
struct SampledPath {
  Timestamp origin = 0;
  Timestamp dt = 0;
  std::vector<SamplePoint> points;

  std::size_t n_steps() const noexcept {
    return points.empty() ? 0 : points.size() - 1;
  }

  friend bool operator==(const SampledPath&, const SampledPath&) = default;
};

struct CsvTradeFormat {
  double tick_size = 0.01;
  // Inclusive session window; rows outside it are dropped.
  std::optional<Timestamp> session_begin;
  std::optional<Timestamp> session_end;
  // Keep only this symbol. When empty, the file must hold a single symbol.
  std::string symbol;
  // Accept prices off the tick grid (unrounded data); they are kept as
  // fractional tick counts.
  bool allow_off_grid = false;
};

// Reads `symbol,timestamp,price` rows (with that header). Rows are stably
// sorted by timestamp so that, for equal timestamps, the later row wins.
TickSeries load_trades(std::istream& in, const CsvTradeFormat& format);
TickSeries load_trades_file(const std::string& path,
                            const CsvTradeFormat& format);

// Writes the same CSV format. Integral series are rendered with exactly as
// many decimals as the tick size needs.
void write_trades(std::ostream& out, const TickSeries& series);
void write_trades_file(const std::string& path, const TickSeries& series);

SampledPath previous_tick_sample(const TickSeries& series, Timestamp origin,
                                 Timestamp dt, std::size_t n_steps);

struct GridReturn {
  Timestamp t = 0;
  double value = 0.0;
  Timestamp gamma_left = 0;
  Timestamp gamma_right = 0;
};

// (S(t+dt) - S(t)) / S(t) for every grid step.
std::vector<GridReturn> arithmetic_returns(const SampledPath& path);

}  // namespace epps
