#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eigenparity/errors.hpp"
#include "eigenparity/estimators.hpp"
#include "eigenparity/linalg.hpp"
#include "eigenparity/panel.hpp"
#include "eigenparity/rng.hpp"

namespace eigenparity {

namespace dates {

// Civil-date arithmetic (Howard Hinnant's algorithms); enough to step a
// synthetic calendar forward one day at a time.

inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u + static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

inline std::int64_t parse_iso(const std::string& s) {
  const int y = std::stoi(s.substr(0, 4));
  const int m = std::stoi(s.substr(5, 2));
  const int d = std::stoi(s.substr(8, 2));
  return days_from_civil(y, m, d);
}

inline std::string to_iso(std::int64_t serial) {
  int y = 0, m = 0, d = 0;
  civil_from_days(serial, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return std::string(buf);
}

/// Weekday sequence starting at (or after) `start`, `count` entries.
inline std::vector<std::string> business_days(const std::string& start, std::size_t count) {
  std::vector<std::string> out;
  out.reserve(count);
  std::int64_t serial = parse_iso(start);
  while (out.size() < count) {
    // days_from_civil epoch 1970-01-01 was a Thursday: weekday = (serial+4) mod 7.
    const int weekday = static_cast<int>(((serial + 4) % 7 + 7) % 7);
    if (weekday != 0 && weekday != 6) out.push_back(to_iso(serial));
    ++serial;
  }
  return out;
}

}  // namespace dates

/// Factor-model market with known ground truth: r_t = drift_t + B f_t + eps_t.
/// The drift part is a per-asset constant plus an AR(1) component whose
/// persistence makes the panel trend-followable; the noise part defines the
/// true correlation returned alongside the panel.
struct SyntheticSpec {
  std::size_t n_assets = 0;
  std::size_t n_days = 0;
  Matrix loadings;                  // N x K; empty = no factors
  std::vector<double> factor_vols;  // K entries; empty with K > 0 = all 1
  double idio_vol = 1.0;
  std::vector<double> drift;        // per-asset constant daily drift (vol units); empty = none
  double drift_ar1_rho = 0.0;       // persistence of the AR(1) drift component
  double drift_ar1_vol = 0.0;       // stationary std of that component (vol units)
  bool unit_variance = true;        // scale the noise part of each asset to std 1
  std::string start_date = "2000-01-03";
  std::uint64_t seed = 1;

  /// Single common factor with uniform loading; the classic one-factor book.
  static SyntheticSpec one_factor(std::size_t n_assets, std::size_t n_days, double loading, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.n_assets = n_assets;
    spec.n_days = n_days;
    spec.loadings = Matrix(n_assets, 1, loading);
    spec.factor_vols = {1.0};
    spec.seed = seed;
    return spec;
  }

  void validate() const {
    if (n_assets < 1 || n_days < 1) throw data_error("SyntheticSpec: n_assets and n_days must be positive");
    if (loadings.rows() != 0 && loadings.rows() != n_assets)
      throw data_error("SyntheticSpec: loadings row count must equal n_assets");
    if (!factor_vols.empty() && factor_vols.size() != loadings.cols())
      throw data_error("SyntheticSpec: factor_vols length must equal the factor count");
    if (!(idio_vol > 0.0)) throw data_error("SyntheticSpec: idio_vol must be positive (implied correlation non-SPD)");
    if (!drift.empty() && drift.size() != n_assets)
      throw data_error("SyntheticSpec: drift length must equal n_assets");
    if (drift_ar1_rho < 0.0 || drift_ar1_rho >= 1.0)
      throw data_error("SyntheticSpec: drift_ar1_rho must lie in [0, 1)");
    if (drift_ar1_vol < 0.0) throw data_error("SyntheticSpec: drift_ar1_vol must be nonnegative");
  }
};

struct SyntheticMarket {
  ReturnsPanel panel;
  CorrelationModel truth;
};

inline SyntheticMarket generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_assets;
  const std::size_t t_rows = spec.n_days;
  const std::size_t k = spec.loadings.rows() == 0 ? 0 : spec.loadings.cols();

  std::vector<double> fvol(k, 1.0);
  for (std::size_t f = 0; f < spec.factor_vols.size(); ++f) fvol[f] = spec.factor_vols[f];

  // Implied noise covariance: B diag(fvol^2) B^T + idio^2 I.
  Matrix cov(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      double s = i == j ? spec.idio_vol * spec.idio_vol : 0.0;
      for (std::size_t f = 0; f < k; ++f) s += spec.loadings(i, f) * fvol[f] * fvol[f] * spec.loadings(j, f);
      cov(i, j) = s;
      cov(j, i) = s;
    }

  std::vector<double> scale(n, 1.0);
  if (spec.unit_variance)
    for (std::size_t i = 0; i < n; ++i) scale[i] = 1.0 / std::sqrt(cov(i, i));

  Matrix corr(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) corr(i, j) = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
  for (std::size_t i = 0; i < n; ++i) corr(i, i) = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) corr(j, i) = corr(i, j);

  Rng rng(spec.seed);
  Matrix values(t_rows, n);
  std::vector<double> ar1(n, 0.0);
  const bool has_ar1 = spec.drift_ar1_vol > 0.0;
  if (has_ar1)
    for (std::size_t i = 0; i < n; ++i) ar1[i] = spec.drift_ar1_vol * rng.gaussian();
  const double innov = has_ar1 ? spec.drift_ar1_vol * std::sqrt(1.0 - spec.drift_ar1_rho * spec.drift_ar1_rho) : 0.0;

  std::vector<double> factors(k, 0.0);
  for (std::size_t t = 0; t < t_rows; ++t) {
    for (std::size_t f = 0; f < k; ++f) factors[f] = fvol[f] * rng.gaussian();
    for (std::size_t i = 0; i < n; ++i) {
      double noise = spec.idio_vol * rng.gaussian();
      for (std::size_t f = 0; f < k; ++f) noise += spec.loadings(i, f) * factors[f];
      double r = scale[i] * noise;
      if (!spec.drift.empty()) r += spec.drift[i];
      if (has_ar1) {
        ar1[i] = spec.drift_ar1_rho * ar1[i] + innov * rng.gaussian();
        r += ar1[i];
      }
      values(t, i) = r;
    }
  }

  std::vector<std::string> assets(n);
  for (std::size_t i = 0; i < n; ++i) assets[i] = "A" + std::to_string(i + 1);

  SyntheticMarket market{
      ReturnsPanel(dates::business_days(spec.start_date, t_rows), std::move(assets), std::move(values),
                   spec.unit_variance),
      CorrelationModel(SymMatrix(std::move(corr)), Provenance::truth, t_rows, n)};
  return market;
}

}  // namespace eigenparity
