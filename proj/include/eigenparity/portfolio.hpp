#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eigenparity/errors.hpp"
#include "eigenparity/estimators.hpp"
#include "eigenparity/linalg.hpp"
#include "eigenparity/warnings.hpp"

namespace eigenparity {

enum class Method { erp, arp, markowitz, equal_weight };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::erp: return "erp";
    case Method::arp: return "arp";
    case Method::markowitz: return "markowitz";
    case Method::equal_weight: return "equal_weight";
  }
  return "unknown";
}

/// Physical positions for one rebalance date. omega is the overall risk
/// scale the positions were built with, kept so cross-method comparisons can
/// rescale consistently.
struct AllocationVector {
  Vector positions;
  double omega = 1.0;
  Method method = Method::equal_weight;
  std::string date;
};

/// Total gain of one day split across the synthetic (whitened) modes; the
/// per-mode entries sum to the total by construction of the basis change.
struct GainRecord {
  double total = 0.0;
  Vector per_mode;
  std::string date;
};

/// Realized risk per principal component of C, aligned with descending
/// eigenvalues.
struct EigenRiskProfile {
  Vector per_mode_risk;
  double omega_sq_reference = 1.0;
};

/// r_hat = C^{-1/2} r: maps unit-variance correlated returns onto
/// uncorrelated unit-variance synthetic assets.
inline Vector whiten_returns(const Vector& r, const CorrelationModel& c) {
  return c.power_apply(-0.5, r);
}

/// p_hat = Q^{-1/2} p: same construction on the indicator side, giving every
/// direction the same scale of predictability.
inline Vector whiten_indicators(const Vector& p, const SymMatrix& q) {
  return spd_power_apply(sym_eigen(q), -0.5, p);
}

/// Eigenrisk-parity allocation: pi = omega C^{-1/2} Q^{-1/2} p.
inline AllocationVector allocate_erp(const Vector& p, const CorrelationModel& c, const SymMatrix& q, double omega,
                                     std::string date = {}) {
  if (p.size() != c.dim() || q.dim() != c.dim()) throw numeric_error("allocate_erp: dimension mismatch");
  Vector positions = c.power_apply(-0.5, whiten_indicators(p, q));
  for (double& v : positions) v *= omega;
  return {std::move(positions), omega, Method::erp, std::move(date)};
}

/// Agnostic risk parity: pi = omega C^{-1/2} p, i.e. ERP with Q = I.
/// Meant for cleaned correlation models; an empirical one is allowed but
/// flagged.
inline AllocationVector allocate_arp(const Vector& p, const CorrelationModel& c, double omega,
                                     std::string date = {}) {
  if (p.size() != c.dim()) throw numeric_error("allocate_arp: dimension mismatch");
  if (c.provenance() == Provenance::empirical)
    warnings::emit("allocate_arp: correlation model is raw empirical, not cleaned");
  Vector positions = c.power_apply(-0.5, p);
  for (double& v : positions) v *= omega;
  return {std::move(positions), omega, Method::arp, std::move(date)};
}

/// Markowitz: pi = omega C^{-1} p.
inline AllocationVector allocate_markowitz(const Vector& p, const CorrelationModel& c, double omega,
                                           std::string date = {}) {
  if (p.size() != c.dim()) throw numeric_error("allocate_markowitz: dimension mismatch");
  Vector positions = c.power_apply(-1.0, p);
  for (double& v : positions) v *= omega;
  return {std::move(positions), omega, Method::markowitz, std::move(date)};
}

/// Equal risk per physical asset: pi = omega p. No cross-asset matrix at
/// all, which is exactly the point of the baseline.
inline AllocationVector allocate_equal(const Vector& p, double omega, std::string date = {}) {
  Vector positions = p;
  for (double& v : positions) v *= omega;
  return {std::move(positions), omega, Method::equal_weight, std::move(date)};
}

/// G = sum_i pi_i r_i.
inline double realized_gain(const AllocationVector& a, const Vector& r) {
  if (a.positions.size() != r.size()) throw numeric_error("realized_gain: dimension mismatch");
  return dot(a.positions, r);
}

/// Gain of the ERP portfolio computed in the synthetic basis:
/// G_alpha = omega p_hat_alpha r_hat_alpha. Summing the modes reproduces the
/// physical-basis gain, which is the change-of-basis identity the tests pin.
inline GainRecord gain_decomposition(const Vector& p, const Vector& r, const CorrelationModel& c, const SymMatrix& q,
                                     double omega = 1.0, std::string date = {}) {
  const Vector p_hat = whiten_indicators(p, q);
  const Vector r_hat = whiten_returns(r, c);
  GainRecord record;
  record.date = std::move(date);
  record.per_mode.resize(p_hat.size());
  for (std::size_t a = 0; a < p_hat.size(); ++a) {
    record.per_mode[a] = omega * p_hat[a] * r_hat[a];
    record.total += record.per_mode[a];
  }
  return record;
}

/// Realized risk along each principal component of c_true over a sample of
/// allocations: R_a = mean[(pi . v_a)^2] lambda_a.
inline EigenRiskProfile eigenrisk_profile(std::span<const AllocationVector> sample, const CorrelationModel& c_true) {
  if (sample.empty()) throw data_error("eigenrisk_profile: empty allocation sample");
  const std::size_t n = c_true.dim();
  const auto& decomp = c_true.decomposition();
  Vector acc(n, 0.0);
  for (const auto& alloc : sample) {
    if (alloc.positions.size() != n) throw numeric_error("eigenrisk_profile: allocation dimension mismatch");
    for (std::size_t a = 0; a < n; ++a) {
      double proj = 0.0;
      for (std::size_t i = 0; i < n; ++i) proj += alloc.positions[i] * decomp.eigenvectors(i, a);
      acc[a] += proj * proj;
    }
  }
  EigenRiskProfile profile;
  profile.per_mode_risk.resize(n);
  for (std::size_t a = 0; a < n; ++a)
    profile.per_mode_risk[a] = acc[a] / static_cast<double>(sample.size()) * decomp.eigenvalues[a];
  profile.omega_sq_reference = sample.front().omega * sample.front().omega;
  return profile;
}

/// Whitened-basis gain before and after rotating both whitened vectors by
/// the same orthogonal matrix; the two must agree for every rotation.
inline std::pair<double, double> rotation_invariance_check(const Vector& p, const CorrelationModel& c,
                                                           const SymMatrix& q, const Vector& r,
                                                           const RotationMatrix& rot) {
  const Vector p_hat = whiten_indicators(p, q);
  const Vector r_hat = whiten_returns(r, c);
  const Vector p_rot = rot.mat() * p_hat;
  const Vector r_rot = rot.mat() * r_hat;
  return {dot(p_hat, r_hat), dot(p_rot, r_rot)};
}

/// Rescales positions so the predicted one-step variance pi^T C pi equals
/// target^2; omega is scaled along. A zero allocation (all indicators
/// unavailable) is returned unchanged.
inline AllocationVector volatility_target(const AllocationVector& a, const CorrelationModel& c, double target) {
  if (!(target > 0.0)) throw numeric_error("volatility_target: target must be positive");
  if (a.positions.size() != c.dim()) throw numeric_error("volatility_target: dimension mismatch");
  const Vector cp = c.matrix().mat() * a.positions;
  const double variance = dot(a.positions, cp);
  if (variance <= 0.0) return a;
  const double scale = target / std::sqrt(variance);
  AllocationVector out = a;
  for (double& v : out.positions) v *= scale;
  out.omega *= scale;
  return out;
}

}  // namespace eigenparity
