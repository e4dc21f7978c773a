#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "epps/error.hpp"
#include "epps/estimate.hpp"
#include "epps/market_data.hpp"
#include "epps/overlap.hpp"
#include "epps/tick_correction.hpp"

namespace epps {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum class MomentsMode {
  automatic,  // interpolated for integral (discretized) series, null otherwise
  null,
  uniform_null,
  interpolated,
};

struct SweepConfig {
  std::vector<Timestamp> dts{60, 120, 180, 300, 600, 900, 1800};
  std::vector<EstimatorKind> estimators{std::begin(kAllEstimators),
                                        std::end(kAllEstimators)};
  OverlapConfig overlap;
  // Plain Pearson over every grid step instead of the overlapping ones only.
  bool textbook_pearson = false;
  ErrorPrior prior = ErrorPrior::triangular;
  MomentsMode moments = MomentsMode::automatic;
  std::size_t min_points = 10;
  std::size_t min_histogram = 100;
  std::optional<Timestamp> window_begin;
  std::optional<Timestamp> window_end;
};

struct CellError {
  ErrorKind kind;
  std::string message;
};

struct EppsCell {
  EstimatorKind kind = EstimatorKind::plain;
  double value = kNaN;
  std::size_t n_samples = 0;
  std::optional<CellError> error;

  bool ok() const noexcept { return !error.has_value(); }
};

struct EppsRow {
  Timestamp dt = 0;
  std::vector<EppsCell> cells;
  double mean_frac_overlap = kNaN;
  std::array<double, 2> sigma_raw{kNaN, kNaN};
  std::array<double, 2> sigma_hat{kNaN, kNaN};

  const EppsCell* find(EstimatorKind kind) const noexcept;
};

struct EppsCurve {
  std::vector<EppsRow> rows;  // strictly increasing dt

  const EppsRow* row(Timestamp dt) const noexcept;
  // Value of a successful cell, if any.
  std::optional<double> value(Timestamp dt, EstimatorKind kind) const noexcept;
};

// Common grid: origin = the first time both series have traded, end = the
// earlier of the two last trades (both clipped to the configured window).
struct SweepWindow {
  Timestamp begin = 0;
  Timestamp end = 0;
};
SweepWindow sweep_window(const TickSeries& a, const TickSeries& b,
                         const SweepConfig& config);

// One dt. Errors are recorded per cell, never thrown. `hy` is the precomputed
// Hayashi-Yoshida cell when that estimator is requested.
EppsRow sweep_row(const TickSeries& a, const TickSeries& b, Timestamp dt,
                  const SweepConfig& config, const std::optional<EppsCell>& hy);

// Runs every dt of the config on a worker pool (see worker_count()).
EppsCurve epps_sweep(const TickSeries& a, const TickSeries& b, const SweepConfig& config);

using TickPair = std::pair<TickSeries, TickSeries>;

// Sweeps many pairs; (pair, dt) cells share one pool and are merged by index.
std::vector<EppsCurve> epps_sweep_pairs(std::span<const TickPair> pairs,
                                        const SweepConfig& config);

// Header `dt,estimator,value,n_samples,mean_frac_overlap,sigma_raw_1,
// sigma_hat_1,sigma_raw_2,sigma_hat_2`, one line per (dt, estimator), numbers
// with 17 significant digits, failed cells as `nan`.
void write_curve_csv(std::ostream& out, const EppsCurve& curve);
EppsCurve read_curve_csv(std::istream& in);

struct EnsembleRow {
  Timestamp dt = 0;
  EstimatorKind kind = EstimatorKind::plain;
  double mean_norm = kNaN;
  double two_sigma = kNaN;  // twice the population std across pairs
  std::size_t n_pairs = 0;
};

struct EnsembleExclusion {
  std::size_t pair = 0;
  std::string reason;
};

struct EnsembleResult {
  Timestamp anchor_dt = 0;
  EstimatorKind anchor_kind = EstimatorKind::combined;
  std::vector<EnsembleRow> rows;
  std::vector<double> anchors;  // per input curve, NaN when excluded
  std::vector<EnsembleExclusion> excluded;

  const EnsembleRow* find(Timestamp dt, EstimatorKind kind) const noexcept;
};

// Every estimator of a pair is divided by that pair's `anchor_kind` value at
// `anchor_dt`; pairs without a positive anchor are excluded and reported.
EnsembleResult ensemble_average(std::span<const EppsCurve> curves, Timestamp anchor_dt,
                                EstimatorKind anchor_kind = EstimatorKind::combined);

// Header `dt,estimator,mean_norm,two_sigma,n_pairs`.
void write_ensemble_csv(std::ostream& out, const EnsembleResult& result);

// EPPS_THREADS when set to a positive integer, else the hardware concurrency.
std::size_t worker_count();

}  // namespace epps
