#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spherecov/error.hpp"
#include "spherecov/gegenbauer.hpp"
#include "spherecov/geometry.hpp"
#include "spherecov/gram.hpp"
#include "spherecov/random.hpp"

namespace spherecov {

/// Tolerance on Σ a_n = 1 for sequences that claim unit mass.
inline constexpr double unit_mass_tolerance = 1e-12;

/// Truncated Schoenberg coefficients a_0..a_N with overall scale c; the kernel
/// is c Σ a_n P_n(x). Unit-mass sequences (Σ a_n = 1) are correlation
/// functions times c. Sequences built without normalization whose mass is
/// not 1 are kept as-is ("unnormalized mode") and evaluate to c Σ a_n P_n.
class SchoenbergSequence {
public:
  const std::vector<double> &coefficients() const noexcept { return coeffs_; }
  double scale() const noexcept { return scale_; }
  const GegenbauerBasis &basis() const noexcept { return basis_; }
  std::size_t truncation() const noexcept { return coeffs_.size() - 1; }
  bool unit_mass() const noexcept { return unit_mass_; }

  /// Σ a_n over all stored coefficients.
  double mass() const noexcept {
    double s = 0.0;
    for (double a : coeffs_) s += a;
    return s;
  }

  /// Σ_{n >= from} a_n.
  double tail_mass(std::size_t from) const noexcept {
    double s = 0.0;
    for (std::size_t n = from; n < coeffs_.size(); ++n) s += coeffs_[n];
    return s;
  }

private:
  SchoenbergSequence(std::vector<double> c, double scale, GegenbauerBasis b, bool unit)
      : coeffs_(std::move(c)), scale_(scale), basis_(b), unit_mass_(unit) {}

  friend SchoenbergSequence make_sequence(std::vector<double>, GegenbauerBasis,
                                          bool, double);

  std::vector<double> coeffs_;
  double scale_;
  GegenbauerBasis basis_;
  bool unit_mass_;
};

/// Validates a_n >= 0. With `normalize`, rescales to Σ a_n = 1 and multiplies
/// the scale by the original total (so [2, 2] becomes [0.5, 0.5] with c = 4).
inline SchoenbergSequence make_sequence(std::vector<double> coeffs,
                                        GegenbauerBasis basis, bool normalize,
                                        double scale = 1.0) {
  if (coeffs.empty()) {
    throw error(errc::invalid_argument, "coefficient list is empty");
  }
  detail::require_degree(coeffs.size() - 1);
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw error(errc::invalid_argument, "scale must be positive and finite");
  }
  double total = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    if (!std::isfinite(coeffs[n])) {
      throw error(errc::invalid_argument,
                  "coefficient " + std::to_string(n) + " is not finite");
    }
    if (coeffs[n] < 0.0) throw negative_coefficient({n}, coeffs[n]);
    total += coeffs[n];
  }
  if (total == 0.0) throw error(errc::zero_mass, "all coefficients are zero");
  if (normalize) {
    for (double &a : coeffs) a /= total;
    return SchoenbergSequence(std::move(coeffs), scale * total, basis, true);
  }
  const bool unit = std::abs(total - 1.0) <= unit_mass_tolerance;
  return SchoenbergSequence(std::move(coeffs), scale, basis, unit);
}

namespace detail {

/// Σ a_n P_n(x) in one recurrence pass, no allocation.
inline double synthesize(double lambda, std::span<const double> a, double x) {
  if (a.empty()) return 0.0;
  double sum = a[0];
  if (a.size() == 1) return sum;
  double prev = 1.0;
  double cur = x;
  sum += a[1] * cur;
  for (std::size_t n = 2; n < a.size(); ++n) {
    const double xp = x * cur;
    const double next = xp + recurrence_beta(lambda, n) * (xp - prev);
    prev = cur;
    cur = next;
    sum += a[n] * cur;
  }
  return sum;
}

template <class F>
double evaluate_checked(F &g, double x) {
  double v = 0.0;
  try {
    v = g(x);
  } catch (const std::exception &e) {
    throw evaluation_failure(x, "function evaluation failed at x = " +
                                    std::to_string(x) + ": " + e.what());
  }
  if (!std::isfinite(v)) {
    throw evaluation_failure(x, "function returned a non-finite value at x = " +
                                    std::to_string(x));
  }
  return v;
}

}  // namespace detail

/// c Σ a_n P_n(x).
inline double kernel_eval(const SchoenbergSequence &seq, double x) {
  detail::require_unit_interval(x);
  return seq.scale() *
         detail::synthesize(seq.basis().lambda(), seq.coefficients(), x);
}

/// Quadrature projection onto the normalized basis:
///   a_n ≈ (1/h_n) Σ_i w_i g(x_i) P_n(x_i),  n = 0..n_max.
/// Exact for polynomial g of degree <= 2*quad_order - 1 - n_max.
template <class F>
std::vector<double> recover_coefficients(F &&g, const GegenbauerBasis &basis,
                                         std::size_t n_max, std::size_t quad_order) {
  if (quad_order < n_max + 1) {
    throw error(errc::invalid_argument,
                "quadrature order " + std::to_string(quad_order) +
                    " is below n_max + 1 = " + std::to_string(n_max + 1));
  }
  const double lambda = basis.lambda();
  const QuadratureRule rule = quadrature(lambda, quad_order);
  const auto norms = detail::normalized_norms(lambda, n_max);

  std::vector<double> a(n_max + 1, 0.0);
  std::vector<double> p(n_max + 1);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double wg = rule.weights[i] * detail::evaluate_checked(g, x);
    detail::fill_normalized(lambda, x, p);
    for (std::size_t n = 0; n <= n_max; ++n) a[n] += wg * p[n];
  }
  for (std::size_t n = 0; n <= n_max; ++n) a[n] /= norms[n];
  return a;
}

enum class Verdict { pd, not_pd, inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pd: return "PD";
    case Verdict::not_pd: return "NotPD";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "?";
}

struct CoefficientEvidence {
  std::vector<double> coefficients;
  double min_coefficient = 0.0;
  std::size_t min_index = 0;
  /// Σ |a_n| over n > n_max / 2.
  double tail_mass = 0.0;
};

/// Outcome of the Gram-eigenvalue oracle. The witness point set is
/// `uniform_sphere_points(dimension, size, point_seed)`.
struct GramEvidence {
  Eigen::Index size = 0;
  double min_eigenvalue = 0.0;
  std::uint64_t point_seed = 0;
  std::size_t trial = 0;
};

struct CertifyOptions {
  std::size_t n_max = 30;
  /// 0 selects max(2 (n_max + 1), 64).
  std::size_t quad_order = 0;
  double coeff_tol = 1e-8;
  /// Absolute threshold; unset means 1e-8 times the Gram dimension.
  std::optional<double> eig_tol;
  std::size_t gram_trials = 5;
  Eigen::Index points_per_trial = 25;
  std::uint64_t seed = 0;
};

struct PDCertificate {
  Verdict verdict = Verdict::inconclusive;
  CoefficientEvidence coefficients;
  /// Most negative eigenvalue seen by the Gram oracle (absent when the oracle
  /// did not run because a coefficient witness was already found).
  std::optional<GramEvidence> gram;
  double coeff_tol = 0.0;
  double eig_tol = 0.0;
  std::size_t gram_trials = 0;
  std::string reason;
};

/// Seed of the point set used by Gram trial `trial` of `certify`.
inline std::uint64_t gram_trial_seed(std::uint64_t seed, std::size_t trial) {
  return splitmix64(splitmix64(seed ^ stream::gram_trials) + trial);
}

/// Positive-definiteness check for an isotropic function on S^d given as
/// g(cos θ). NotPD always carries a concrete witness (a coefficient below
/// -coeff_tol, or a Gram matrix with an eigenvalue below -eig_tol). PD
/// additionally needs the recovered tail beyond n_max/2 to be below coeff_tol;
/// anything else is Inconclusive.
template <class F>
PDCertificate certify(F &&g, const GegenbauerBasis &basis,
                      const CertifyOptions &opt = {}) {
  if (!(opt.coeff_tol > 0.0) || (opt.eig_tol && !(*opt.eig_tol > 0.0))) {
    throw error(errc::invalid_argument, "tolerances must be positive");
  }
  if (opt.points_per_trial < 1) {
    throw error(errc::invalid_argument, "points_per_trial must be >= 1");
  }
  const std::size_t quad_order =
      opt.quad_order ? opt.quad_order : std::max<std::size_t>(2 * (opt.n_max + 1), 64);

  PDCertificate cert;
  cert.coeff_tol = opt.coeff_tol;
  cert.eig_tol = opt.eig_tol.value_or(1e-8 * static_cast<double>(opt.points_per_trial));
  cert.gram_trials = opt.gram_trials;

  auto &ev = cert.coefficients;
  ev.coefficients = recover_coefficients(g, basis, opt.n_max, quad_order);
  ev.min_index = static_cast<std::size_t>(
      std::min_element(ev.coefficients.begin(), ev.coefficients.end()) -
      ev.coefficients.begin());
  ev.min_coefficient = ev.coefficients[ev.min_index];
  for (std::size_t n = opt.n_max / 2 + 1; n <= opt.n_max; ++n) {
    ev.tail_mass += std::abs(ev.coefficients[n]);
  }

  if (ev.min_coefficient < -opt.coeff_tol) {
    cert.verdict = Verdict::not_pd;
    cert.reason = "coefficient " + std::to_string(ev.min_index) + " is negative";
    return cert;
  }

  for (std::size_t trial = 0; trial < opt.gram_trials; ++trial) {
    const std::uint64_t point_seed = gram_trial_seed(opt.seed, trial);
    const auto pts =
        uniform_sphere_points(basis.dimension(), opt.points_per_trial, point_seed);
    const auto gm = gram_isotropic(
        [&](double x) { return detail::evaluate_checked(g, x); }, pts, "certify");
    const double lo = min_eigenvalue(gm);
    if (!cert.gram || lo < cert.gram->min_eigenvalue) {
      cert.gram = GramEvidence{gm.size(), lo, point_seed, trial};
    }
  }

  if (cert.gram && cert.gram->min_eigenvalue < -cert.eig_tol) {
    cert.verdict = Verdict::not_pd;
    cert.reason = "Gram matrix of trial " + std::to_string(cert.gram->trial) +
                  " has a negative eigenvalue";
  } else if (ev.tail_mass < opt.coeff_tol) {
    cert.verdict = Verdict::pd;
    cert.reason = "coefficients nonnegative and tail negligible";
  } else {
    cert.verdict = Verdict::inconclusive;
    cert.reason = "coefficients nonnegative but the tail beyond n_max/2 is not negligible";
  }
  return cert;
}

/// Generating-function family: a_n ∝ δ^n C_n^λ(1), truncated at n_max and
/// renormalized. As n_max grows the kernel tends to
/// (1-δ)^{2λ} / (1 - 2δx + δ^2)^λ.
inline SchoenbergSequence multiquadric_sequence(double delta,
                                                const GegenbauerBasis &basis,
                                                std::size_t n_max) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw error(errc::domain, "delta must lie in (0, 1)");
  }
  const double lambda = basis.lambda();
  if (lambda == 0.0) {
    throw error(errc::domain, "multiquadric family needs lambda > 0");
  }
  detail::require_degree(n_max);
  std::vector<double> a(n_max + 1);
  a[0] = 1.0;
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    a[n] = a[n - 1] * delta * (dn + 2.0 * lambda - 1.0) / dn;
  }
  double total = 0.0;
  for (double v : a) total += v;
  for (double &v : a) v /= total;
  return make_sequence(std::move(a), basis, false);
}

/// (1-δ)^{2λ} (1 - 2δx + δ^2)^{-λ}.
inline double multiquadric_closed_form(double delta, double lambda, double x) {
  return std::pow(1.0 - delta, 2.0 * lambda) *
         std::pow(1.0 - 2.0 * delta * x + delta * delta, -lambda);
}

}  // namespace spherecov
