#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "eigenparity/errors.hpp"
#include "eigenparity/linalg.hpp"
#include "eigenparity/panel.hpp"
#include "eigenparity/warnings.hpp"

namespace eigenparity {

/// Unit-variance trend indicators aligned with the source panel's dates.
/// A NaN value means the indicator is unavailable at that date (warm-up or
/// too many gaps); downstream allocation treats unavailable as zero.
class IndicatorPanel {
 public:
  IndicatorPanel(std::vector<std::string> dates, Matrix values, std::size_t lookback, std::size_t norm_window)
      : dates_(std::move(dates)), values_(std::move(values)), lookback_(lookback), norm_window_(norm_window) {
    if (values_.rows() != dates_.size()) throw data_error("IndicatorPanel: date count does not match rows");
  }

  std::size_t days() const { return dates_.size(); }
  std::size_t n_assets() const { return values_.cols(); }
  const std::vector<std::string>& dates() const { return dates_; }
  const Matrix& values() const { return values_; }
  double value(std::size_t t, std::size_t i) const { return values_(t, i); }
  bool available(std::size_t t, std::size_t i) const { return !std::isnan(values_(t, i)); }
  std::size_t lookback() const { return lookback_; }
  std::size_t norm_window() const { return norm_window_; }

  /// Indicator vector for one date with unavailable entries zeroed; the
  /// deliberate bias-variance choice for feeding allocators.
  Vector row_or_zero(std::size_t t) const {
    Vector p(n_assets(), 0.0);
    for (std::size_t i = 0; i < n_assets(); ++i)
      if (available(t, i)) p[i] = values_(t, i);
    return p;
  }

 private:
  std::vector<std::string> dates_;
  Matrix values_;
  std::size_t lookback_;
  std::size_t norm_window_;
};

/// Flat moving-average trend signal: raw value at t is the mean of returns
/// over [t - lookback, t - 1] (strictly before t, so no look-ahead). The raw
/// mean of L returns has standard deviation sigma_r / sqrt(L), so the signal
/// is normalized to unit variance by the trailing return dispersion over
/// norm_window days (also strictly before t) divided by sqrt(L). Estimating
/// the scale from the returns rather than from the heavily overlapping raw
/// series keeps the effective sample size at norm_window instead of
/// norm_window / lookback. Assets with more than 20% of a window missing are
/// marked unavailable for that date.
inline IndicatorPanel trend_indicator(const ReturnsPanel& panel, std::size_t lookback = 252,
                                      std::size_t norm_window = 504) {
  if (lookback < 2) throw data_error("trend_indicator: lookback must be >= 2");
  if (norm_window < 2) throw data_error("trend_indicator: norm_window must be >= 2");
  if (panel.days() <= lookback + norm_window)
    throw data_error("trend_indicator: panel shorter than lookback + normalization warm-up");

  const std::size_t t_rows = panel.days();
  const std::size_t n = panel.n_assets();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Matrix out(t_rows, n, nan);
  std::size_t floored = 0;

  const std::size_t min_look = std::max<std::size_t>(2, (4 * lookback + 4) / 5);   // ceil(0.8 L)
  const std::size_t min_norm = std::max<std::size_t>(2, (4 * norm_window + 4) / 5);
  const std::size_t warmup = std::max(lookback, norm_window);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = warmup; t < t_rows; ++t) {
      double sum = 0.0;
      std::size_t present = 0;
      for (std::size_t s = t - lookback; s < t; ++s) {
        if (panel.is_missing(s, i)) continue;
        sum += panel.value(s, i);
        ++present;
      }
      if (present < min_look) continue;
      const double raw = sum / static_cast<double>(present);

      double mean = 0.0;
      std::size_t count = 0;
      for (std::size_t s = t - norm_window; s < t; ++s) {
        if (panel.is_missing(s, i)) continue;
        mean += panel.value(s, i);
        ++count;
      }
      if (count < min_norm) continue;
      mean /= static_cast<double>(count);
      double ss = 0.0;
      for (std::size_t s = t - norm_window; s < t; ++s) {
        if (panel.is_missing(s, i)) continue;
        ss += (panel.value(s, i) - mean) * (panel.value(s, i) - mean);
      }
      double sd = std::sqrt(ss / static_cast<double>(count - 1)) / std::sqrt(static_cast<double>(present));
      if (sd < 1e-8) {
        sd = 1e-8;
        ++floored;
      }
      out(t, i) = raw / sd;
    }
  }
  if (floored > 0)
    warnings::emit("trend_indicator: trailing dispersion floored at 1e-8 for " + std::to_string(floored) + " cells");
  return IndicatorPanel(panel.dates(), std::move(out), lookback, norm_window);
}

/// Sample second-moment matrix of the indicators over rows where every
/// asset is available. No mean subtraction: the signals are treated as
/// zero-mean by construction.
inline SymMatrix indicator_covariance(const IndicatorPanel& ind) {
  const std::size_t t_rows = ind.days();
  const std::size_t n = ind.n_assets();
  Matrix q(n, n);
  std::size_t used = 0;
  for (std::size_t t = 0; t < t_rows; ++t) {
    bool complete = true;
    for (std::size_t i = 0; i < n; ++i)
      if (!ind.available(t, i)) {
        complete = false;
        break;
      }
    if (!complete) continue;
    ++used;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) q(i, j) += ind.value(t, i) * ind.value(t, j);
  }
  if (used < 2) throw data_error("indicator_covariance: fewer than 2 complete post-warm-up rows");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      q(i, j) /= static_cast<double>(used);
      q(j, i) = q(i, j);
    }
  return SymMatrix(std::move(q));
}

}  // namespace eigenparity
