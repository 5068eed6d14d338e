#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spherecov/error.hpp"
#include "spherecov/gegenbauer.hpp"
#include "spherecov/schoenberg.hpp"

namespace spherecov {

enum class CharFnFamily { gaussian, exponential, stable, triangle_sinc, point_mass_at_zero };

inline std::string_view to_string(CharFnFamily f) {
  switch (f) {
    case CharFnFamily::gaussian: return "gaussian";
    case CharFnFamily::exponential: return "exponential";
    case CharFnFamily::stable: return "stable";
    case CharFnFamily::triangle_sinc: return "triangle_sinc";
    case CharFnFamily::point_mass_at_zero: return "point_mass_at_zero";
  }
  return "?";
}

/// Characteristic function of a symmetric law on the line: real, even,
/// φ(0) = 1, |φ| <= 1.
///
///   gaussian(σ)        exp(-σ² t² / 2)
///   exponential(c)     exp(-c |t|)           (Cauchy law)
///   stable(c, α)       exp(-c |t|^α), 0 < α <= 2
///   triangle_sinc(w)   sin(w t) / (w t)      (uniform law on [-w, w])
///   point_mass_at_zero 1
class CharFnSpec {
public:
  static CharFnSpec gaussian(double sigma) {
    require_positive(sigma, "gaussian sigma");
    return CharFnSpec(CharFnFamily::gaussian, sigma, 0.0);
  }
  static CharFnSpec exponential(double rate) {
    require_positive(rate, "exponential rate");
    return CharFnSpec(CharFnFamily::exponential, rate, 0.0);
  }
  static CharFnSpec stable(double scale, double alpha) {
    require_positive(scale, "stable scale");
    if (!(alpha > 0.0 && alpha <= 2.0)) {
      throw error(errc::invalid_argument, "stable exponent alpha must lie in (0, 2]");
    }
    return CharFnSpec(CharFnFamily::stable, scale, alpha);
  }
  static CharFnSpec triangle_sinc(double width) {
    require_positive(width, "triangle_sinc width");
    return CharFnSpec(CharFnFamily::triangle_sinc, width, 0.0);
  }
  static CharFnSpec point_mass_at_zero() {
    return CharFnSpec(CharFnFamily::point_mass_at_zero, 0.0, 0.0);
  }

  CharFnFamily family() const noexcept { return family_; }
  /// σ, c, scale or w depending on the family; 0 for the point mass.
  double first() const noexcept { return p1_; }
  /// α for the stable family, 0 otherwise.
  double second() const noexcept { return p2_; }

  double operator()(double t) const {
    switch (family_) {
      case CharFnFamily::gaussian: return std::exp(-0.5 * p1_ * p1_ * t * t);
      case CharFnFamily::exponential: return std::exp(-p1_ * std::abs(t));
      case CharFnFamily::stable: return std::exp(-p1_ * std::pow(std::abs(t), p2_));
      case CharFnFamily::triangle_sinc: {
        const double u = p1_ * t;
        if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
        return std::sin(u) / u;
      }
      case CharFnFamily::point_mass_at_zero: return 1.0;
    }
    return 1.0;
  }

private:
  CharFnSpec(CharFnFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {}

  static void require_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw error(errc::invalid_argument, std::string(what) + " must be positive");
    }
  }

  CharFnFamily family_;
  double p1_;
  double p2_;
};

inline double charfn_eval(const CharFnSpec &spec, double t) { return spec(t); }

/// Same family and parameters within `tol`.
inline bool same_spec(const CharFnSpec &a, const CharFnSpec &b, double tol) {
  return a.family() == b.family() && std::abs(a.first() - b.first()) <= tol &&
         std::abs(a.second() - b.second()) <= tol;
}

struct SpaceTimeTerm {
  double weight;
  CharFnSpec phi;
};

/// c Σ a_n P_n(x) φ_n(t) on S^d x R.
class SpaceTimeKernel {
public:
  const std::vector<SpaceTimeTerm> &terms() const noexcept { return terms_; }
  double scale() const noexcept { return scale_; }
  const GegenbauerBasis &basis() const noexcept { return basis_; }
  bool unit_mass() const noexcept { return unit_mass_; }

  std::vector<double> weights() const {
    std::vector<double> a;
    a.reserve(terms_.size());
    for (const auto &t : terms_) a.push_back(t.weight);
    return a;
  }

private:
  SpaceTimeKernel(std::vector<SpaceTimeTerm> t, double c, GegenbauerBasis b, bool unit)
      : terms_(std::move(t)), scale_(c), basis_(b), unit_mass_(unit) {}

  friend SpaceTimeKernel make_st_kernel(std::vector<SpaceTimeTerm>, GegenbauerBasis,
                                        bool, double);

  std::vector<SpaceTimeTerm> terms_;
  double scale_;
  GegenbauerBasis basis_;
  bool unit_mass_;
};

/// Weight validation and normalization follow make_sequence.
inline SpaceTimeKernel make_st_kernel(std::vector<SpaceTimeTerm> terms,
                                      GegenbauerBasis basis, bool normalize,
                                      double scale = 1.0) {
  std::vector<double> a;
  a.reserve(terms.size());
  for (const auto &t : terms) a.push_back(t.weight);
  const auto seq = make_sequence(std::move(a), basis, normalize, scale);
  for (std::size_t n = 0; n < terms.size(); ++n) {
    terms[n].weight = seq.coefficients()[n];
  }
  return SpaceTimeKernel(std::move(terms), seq.scale(), basis, seq.unit_mass());
}

/// The purely spatial kernel x -> k(x, 0).
inline SchoenbergSequence spatial_sequence(const SpaceTimeKernel &k) {
  return make_sequence(k.weights(), k.basis(), false, k.scale());
}

/// For fixed t, the spatial Schoenberg coefficients (a_n φ_n(t)) of x -> k(x, t).
inline std::vector<double> schoenberg_functions_at(const SpaceTimeKernel &k, double t) {
  std::vector<double> out;
  out.reserve(k.terms().size());
  for (const auto &term : k.terms()) out.push_back(term.weight * term.phi(t));
  return out;
}

inline double st_kernel_eval(const SpaceTimeKernel &k, double x, double t) {
  detail::require_unit_interval(x);
  const auto coeffs = schoenberg_functions_at(k, t);
  return k.scale() * detail::synthesize(k.basis().lambda(), coeffs, x);
}

struct TemporalSeparability {
  bool separable = true;
  /// Shared φ of all observable terms, when separable and some term is observable.
  std::optional<CharFnSpec> common;
  /// First pair of observable terms with different specifications.
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Compares specifications of the terms with a_n > tol; zero-weight terms
/// cannot be observed in the kernel and are ignored.
inline TemporalSeparability analyze_separability(const SpaceTimeKernel &k, double tol) {
  if (!(tol > 0.0)) throw error(errc::invalid_argument, "tol must be positive");
  TemporalSeparability out;
  std::optional<std::size_t> first;
  const auto &terms = k.terms();
  for (std::size_t n = 0; n < terms.size(); ++n) {
    if (!(terms[n].weight > tol)) continue;
    if (!first) {
      first = n;
      out.common = terms[n].phi;
      continue;
    }
    if (!same_spec(terms[*first].phi, terms[n].phi, tol)) {
      out.separable = false;
      out.common.reset();
      out.witness = std::make_pair(*first, n);
      return out;
    }
  }
  return out;
}

inline bool is_separable(const SpaceTimeKernel &k, double tol) {
  return analyze_separability(k, tol).separable;
}

}  // namespace spherecov
