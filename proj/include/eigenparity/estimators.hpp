#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "eigenparity/errors.hpp"
#include "eigenparity/linalg.hpp"
#include "eigenparity/panel.hpp"

namespace eigenparity {

enum class Provenance { empirical, rie, shrunk, identity, truth };

inline const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::empirical: return "empirical";
    case Provenance::rie: return "rie";
    case Provenance::shrunk: return "shrunk";
    case Provenance::identity: return "identity";
    case Provenance::truth: return "truth";
  }
  return "unknown";
}

/// Unit-diagonal correlation matrix with its cached eigendecomposition and
/// the history of how it was built. Immutable once constructed; allocators
/// reuse the cached decomposition instead of re-factorizing per rebalance.
class CorrelationModel {
 public:
  CorrelationModel(SymMatrix matrix, Provenance provenance, std::size_t sample_t = 0, std::size_t sample_n = 0)
      : matrix_(std::move(matrix)),
        decomposition_(sym_eigen(matrix_)),
        provenance_(provenance),
        sample_t_(sample_t),
        sample_n_(sample_n) {
    validate_unit_diagonal();
  }

  static CorrelationModel identity(std::size_t n) {
    return CorrelationModel(SymMatrix::identity(n), Provenance::identity);
  }

  /// For transforms whose spectral effect is known analytically (shrinkage,
  /// flooring): skips the eigen-solve and installs the given decomposition.
  static CorrelationModel with_decomposition(SymMatrix matrix, EigenDecomposition decomposition,
                                             Provenance provenance, std::size_t sample_t, std::size_t sample_n) {
    return CorrelationModel(std::move(matrix), std::move(decomposition), provenance, sample_t, sample_n);
  }

  std::size_t dim() const { return matrix_.dim(); }
  const SymMatrix& matrix() const { return matrix_; }
  const EigenDecomposition& decomposition() const { return decomposition_; }
  Provenance provenance() const { return provenance_; }
  double shrinkage_phi() const { return phi_; }
  std::size_t sample_t() const { return sample_t_; }
  std::size_t sample_n() const { return sample_n_; }
  const std::vector<std::string>& notes() const { return notes_; }

  bool is_spd() const {
    const auto& lam = decomposition_.eigenvalues;
    return !lam.empty() && lam.front() > 0.0 && lam.back() > kSpdEpsilonRel * lam.front();
  }

  SymMatrix power(double exponent) const { return spd_power(decomposition_, exponent); }
  Vector power_apply(double exponent, const Vector& x) const { return spd_power_apply(decomposition_, exponent, x); }

  /// Floors eigenvalues at eps_rel * lambda_max, rebuilds, and renormalizes
  /// to a unit diagonal. This is the explicit regularization entry point for
  /// rank-deficient empirical matrices before inversion-type uses.
  CorrelationModel floored(double eps_rel = 1e-8) const {
    const auto& lam = decomposition_.eigenvalues;
    if (lam.empty()) return *this;
    const double lam_max = lam.front();
    if (!(lam_max > 0.0)) throw numeric_error("CorrelationModel::floored: spectrum is not positive");
    const double floor = eps_rel * lam_max;
    if (lam.back() > floor) return *this;

    std::vector<double> lifted = lam;
    std::size_t raised = 0;
    for (double& v : lifted)
      if (v < floor) {
        v = floor;
        ++raised;
      }
    EigenDecomposition lifted_decomp{lifted, decomposition_.eigenvectors};
    Matrix rebuilt = lifted_decomp.reconstruct();
    rescale_to_unit_diagonal(rebuilt);
    CorrelationModel out(SymMatrix(std::move(rebuilt)), provenance_, sample_t_, sample_n_);
    out.phi_ = phi_;
    out.notes_ = notes_;
    out.notes_.push_back("eigenvalue floor applied to " + std::to_string(raised) + " modes at " +
                         csv::format_double(floor));
    return out;
  }

  void add_note(std::string note) { notes_.push_back(std::move(note)); }

  static void rescale_to_unit_diagonal(Matrix& m) {
    const std::size_t n = m.rows();
    std::vector<double> scale(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!(m(i, i) > 0.0)) throw numeric_error("rescale_to_unit_diagonal: non-positive diagonal entry");
      scale[i] = 1.0 / std::sqrt(m(i, i));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) m(i, j) *= scale[i] * scale[j];
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) m(j, i) = m(i, j);
  }

 private:
  CorrelationModel(SymMatrix matrix, EigenDecomposition decomposition, Provenance provenance, std::size_t sample_t,
                   std::size_t sample_n)
      : matrix_(std::move(matrix)),
        decomposition_(std::move(decomposition)),
        provenance_(provenance),
        sample_t_(sample_t),
        sample_n_(sample_n) {
    validate_unit_diagonal();
  }

  void validate_unit_diagonal() const {
    for (std::size_t i = 0; i < matrix_.dim(); ++i)
      if (std::abs(matrix_(i, i) - 1.0) > 1e-10)
        throw numeric_error("CorrelationModel: diagonal entry " + std::to_string(i) + " is not 1");
  }

  SymMatrix matrix_;
  EigenDecomposition decomposition_;
  Provenance provenance_;
  std::size_t sample_t_ = 0;
  std::size_t sample_n_ = 0;
  double phi_ = 1.0;
  std::vector<std::string> notes_;

  friend CorrelationModel shrink_correlation(const CorrelationModel&, double);
};

/// Pearson correlation of the panel. Uses pairwise-complete rows when the
/// panel has gaps. Not guaranteed SPD for T < N; the zero modes are noted,
/// not repaired — flooring is an explicit downstream step.
inline CorrelationModel empirical_correlation(const ReturnsPanel& panel) {
  const std::size_t t_rows = panel.days();
  const std::size_t n = panel.n_assets();
  if (t_rows < 2) throw data_error("empirical_correlation: need at least 2 rows");

  for (std::size_t i = 0; i < n; ++i) {
    double first = 0.0;
    bool have_first = false;
    bool constant = true;
    std::size_t present = 0;
    for (std::size_t t = 0; t < t_rows; ++t) {
      if (panel.is_missing(t, i)) continue;
      ++present;
      if (!have_first) {
        first = panel.value(t, i);
        have_first = true;
      } else if (panel.value(t, i) != first) {
        constant = false;
      }
    }
    if (present < 2 || constant)
      throw data_error("empirical_correlation: asset '" + panel.assets()[i] + "' has zero variance");
  }

  bool any_missing = false;
  for (std::size_t t = 0; t < t_rows && !any_missing; ++t)
    for (std::size_t i = 0; i < n; ++i)
      if (panel.is_missing(t, i)) {
        any_missing = true;
        break;
      }

  Matrix corr(n, n);
  if (!any_missing) {
    std::vector<double> mean(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < t_rows; ++t) mean[i] += panel.value(t, i);
      mean[i] /= static_cast<double>(t_rows);
    }
    Matrix centered(t_rows, n);
    for (std::size_t t = 0; t < t_rows; ++t)
      for (std::size_t i = 0; i < n; ++i) centered(t, i) = panel.value(t, i) - mean[i];
    std::vector<double> norm(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t t = 0; t < t_rows; ++t) norm[i] += centered(t, i) * centered(t, i);
      norm[i] = std::sqrt(norm[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      corr(i, i) = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < t_rows; ++t) s += centered(t, i) * centered(t, j);
        const double c = std::clamp(s / (norm[i] * norm[j]), -1.0, 1.0);
        corr(i, j) = c;
        corr(j, i) = c;
      }
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      corr(i, i) = 1.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
        std::size_t m = 0;
        for (std::size_t t = 0; t < t_rows; ++t) {
          if (panel.is_missing(t, i) || panel.is_missing(t, j)) continue;
          const double x = panel.value(t, i);
          const double y = panel.value(t, j);
          sx += x;
          sy += y;
          sxx += x * x;
          syy += y * y;
          sxy += x * y;
          ++m;
        }
        if (m < 2)
          throw data_error("empirical_correlation: assets '" + panel.assets()[i] + "' and '" + panel.assets()[j] +
                           "' share fewer than 2 observations");
        const double dm = static_cast<double>(m);
        const double vx = sxx - sx * sx / dm;
        const double vy = syy - sy * sy / dm;
        if (vx <= 0.0 || vy <= 0.0)
          throw data_error("empirical_correlation: zero variance on the overlap of '" + panel.assets()[i] +
                           "' and '" + panel.assets()[j] + "'");
        const double c = std::clamp((sxy - sx * sy / dm) / std::sqrt(vx * vy), -1.0, 1.0);
        corr(i, j) = c;
        corr(j, i) = c;
      }
    }
  }

  CorrelationModel model(SymMatrix(std::move(corr)), Provenance::empirical, t_rows, n);
  if (any_missing) model.add_note("pairwise-complete estimation over gaps");
  if (!model.is_spd()) model.add_note("rank deficient: sample too short for the asset count (T < N?)");
  return model;
}

/// Knobs for the rotationally invariant eigenvalue cleaner. q and eta are
/// exposed because the right bandwidth is data-dependent; zero means "derive
/// the default from the sample".
struct RIEConfig {
  double q = 0.0;             // aspect ratio N/T; 0 = take from the model's sample shape
  double eta = 0.0;           // imaginary regularizer; 0 = N^{-1/2} (lambda_max - lambda_min) / 2
  bool isotonic = true;       // restore monotonicity of the cleaned spectrum
  bool allow_degenerate = false;  // permit q >= 1 (floor repairs the null space)
  double floor_rel = 1e-8;    // SPD floor relative to the largest cleaned eigenvalue

  void validate() const {
    if (q < 0.0) throw numeric_error("RIEConfig: q must be positive");
    if (eta < 0.0) throw numeric_error("RIEConfig: eta must be positive");
  }
};

/// Eigenvalue map of the RIE cleaner. Sample eigenvectors are untouched by
/// construction; only the spectrum moves:
///   xi_k = lambda_k / |1 - q + q lambda_k g(z_k)|^2,  z_k = lambda_k - i eta,
/// with g the discrete Stieltjes transform of the sample spectrum. The k-th
/// (self) term is excluded and replaced by a surrogate capped at the locally
/// estimated density mass: inside the bulk that reinstates the missing
/// density, while isolated outliers get no self-interaction. The default
/// bandwidth is the median consecutive eigenvalue spacing, which tracks the
/// bulk resolution and is insensitive to outliers.
inline std::vector<double> rie_clean_spectrum(const std::vector<double>& sample_eigenvalues, double q, double eta,
                                              bool isotonic = true) {
  const std::size_t n = sample_eigenvalues.size();
  if (n == 0) return {};
  if (!(q > 0.0)) throw numeric_error("rie_clean_spectrum: q must be positive");

  const double lam_max = sample_eigenvalues.front();
  const double lam_min = sample_eigenvalues.back();
  // A (near-)degenerate spectrum is a point mass: there is no noise bulk to
  // shrink, and the Stieltjes transform at zero spacing would blow up.
  if (lam_max - lam_min <= 1e-12 * std::max(std::abs(lam_max), 1e-300)) return sample_eigenvalues;

  double bandwidth = eta;
  if (bandwidth <= 0.0) {
    std::vector<double> spacing;
    spacing.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) spacing.push_back(sample_eigenvalues[k - 1] - sample_eigenvalues[k]);
    std::nth_element(spacing.begin(), spacing.begin() + spacing.size() / 2, spacing.end());
    bandwidth = spacing[spacing.size() / 2];
  }
  bandwidth = std::max(bandwidth, 1e-10 * std::max(lam_max, 1e-300));

  const double self_mass = 1.0 / (static_cast<double>(n) * bandwidth);
  std::vector<double> cleaned(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::complex<double> z(sample_eigenvalues[k], -bandwidth);
    std::complex<double> g(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      g += 1.0 / (z - sample_eigenvalues[j]);
    }
    g /= static_cast<double>(n);
    const double local_mass = g.imag() * static_cast<double>(n) / static_cast<double>(n - 1);
    g += std::complex<double>(0.0, std::min(self_mass, std::max(local_mass, 0.0)));
    const std::complex<double> denom = 1.0 - q + q * sample_eigenvalues[k] * g;
    cleaned[k] = sample_eigenvalues[k] / std::norm(denom);
  }

  if (isotonic) {
    // Pool-adjacent-violators: enforce non-increasing order to match the
    // descending sample spectrum.
    std::vector<double> value;
    std::vector<std::size_t> count;
    for (double x : cleaned) {
      value.push_back(x);
      count.push_back(1);
      while (value.size() > 1 && value[value.size() - 2] < value.back()) {
        const double merged = (value[value.size() - 2] * static_cast<double>(count[count.size() - 2]) +
                               value.back() * static_cast<double>(count.back())) /
                              static_cast<double>(count[count.size() - 2] + count.back());
        count[count.size() - 2] += count.back();
        value[value.size() - 2] = merged;
        value.pop_back();
        count.pop_back();
      }
    }
    std::size_t idx = 0;
    for (std::size_t blk = 0; blk < value.size(); ++blk)
      for (std::size_t rep = 0; rep < count[blk]; ++rep) cleaned[idx++] = value[blk];
  }
  return cleaned;
}

/// Cleans an empirical correlation model: eigenvectors kept, eigenvalues
/// replaced by the RIE map, floored to SPD, reassembled, and renormalized to
/// a unit diagonal.
inline CorrelationModel rie_clean(const CorrelationModel& model, const RIEConfig& cfg = {}) {
  cfg.validate();
  if (model.provenance() != Provenance::empirical)
    throw data_error("rie_clean: input must be an empirical model with a known sample shape");
  if (model.sample_t() == 0 || model.sample_n() == 0)
    throw data_error("rie_clean: sample shape (T, N) unknown");

  const double q = cfg.q > 0.0 ? cfg.q : static_cast<double>(model.sample_n()) / static_cast<double>(model.sample_t());
  if (q >= 1.0 && !cfg.allow_degenerate)
    throw numeric_error(
        "rie_clean: aspect ratio q = N/T >= 1; use a longer sample or enable the degenerate floor explicitly");

  std::vector<double> cleaned =
      rie_clean_spectrum(model.decomposition().eigenvalues, q, cfg.eta, cfg.isotonic);

  const double xi_max = *std::max_element(cleaned.begin(), cleaned.end());
  if (!(xi_max > 0.0)) throw numeric_error("rie_clean: cleaned spectrum is not positive");
  for (double& v : cleaned) v = std::max(v, cfg.floor_rel * xi_max);

  EigenDecomposition cleaned_decomp{cleaned, model.decomposition().eigenvectors};
  Matrix rebuilt = cleaned_decomp.reconstruct();
  CorrelationModel::rescale_to_unit_diagonal(rebuilt);
  CorrelationModel out(SymMatrix(std::move(rebuilt)), Provenance::rie, model.sample_t(), model.sample_n());
  if (q >= 1.0) out.add_note("degenerate aspect ratio q >= 1; null space repaired by the floor");
  return out;
}

/// Linear shrinkage toward the identity: phi C + (1 - phi) I. The spectral
/// map is exact (phi lambda + 1 - phi on unchanged eigenvectors), so no
/// re-factorization happens here.
inline CorrelationModel shrink_correlation(const CorrelationModel& model, double phi) {
  if (!(phi >= 0.0 && phi <= 1.0)) throw numeric_error("shrink_correlation: phi must lie in [0, 1]");
  if (phi == 1.0) return model;
  if (phi == 0.0) return CorrelationModel::identity(model.dim());

  const std::size_t n = model.dim();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = phi * model.matrix()(i, j);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  std::vector<double> lam = model.decomposition().eigenvalues;
  for (double& v : lam) v = phi * v + (1.0 - phi);
  CorrelationModel out = CorrelationModel::with_decomposition(
      SymMatrix(std::move(m)), EigenDecomposition{std::move(lam), model.decomposition().eigenvectors},
      Provenance::shrunk, model.sample_t(), model.sample_n());
  out.phi_ = phi;
  return out;
}

/// Indicator-covariance model: how much structure of C the indicators are
/// trusted to inherit. identity is the agnostic choice; proportional_to_c
/// recovers Markowitz; shrunk interpolates.
struct QModel {
  enum class Kind { identity, proportional_to_c, shrunk };

  Kind kind = Kind::identity;
  double phi = 0.0;      // shrinkage weight, only used by Kind::shrunk
  double sigma_p = 1.0;  // overall indicator scale

  void validate() const {
    if (!(phi >= 0.0 && phi <= 1.0)) throw numeric_error("QModel: phi must lie in [0, 1]");
    if (!(sigma_p > 0.0)) throw numeric_error("QModel: sigma_p must be positive");
  }
};

inline SymMatrix materialize_q(const QModel& qm, const CorrelationModel& c) {
  qm.validate();
  const std::size_t n = c.dim();
  Matrix m(n, n);
  switch (qm.kind) {
    case QModel::Kind::identity:
      for (std::size_t i = 0; i < n; ++i) m(i, i) = qm.sigma_p;
      break;
    case QModel::Kind::proportional_to_c:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = qm.sigma_p * c.matrix()(i, j);
      break;
    case QModel::Kind::shrunk: {
      const CorrelationModel shrunk = shrink_correlation(c, qm.phi);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = qm.sigma_p * shrunk.matrix()(i, j);
      break;
    }
  }
  return SymMatrix(std::move(m));
}

}  // namespace eigenparity
