#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "spherecov/error.hpp"

namespace spherecov {

/// Highest polynomial degree accepted anywhere in the library. Upward
/// recursion in double precision loses accuracy slowly with degree; results
/// beyond roughly n = 2000 should be treated with care.
inline constexpr std::size_t max_degree = 10'000;

/// Index of the Gegenbauer family attached to the sphere S^d,
/// lambda = (d - 1) / 2. d = 1 (lambda = 0) selects Chebyshev polynomials of
/// the first kind; d = 2 (lambda = 1/2) selects Legendre polynomials.
class GegenbauerBasis {
public:
  static GegenbauerBasis from_dimension(int d) {
    if (d < 1) {
      throw error(errc::invalid_argument,
                  "sphere dimension must be >= 1, got " + std::to_string(d));
    }
    return GegenbauerBasis(d);
  }

  /// Accepts only lambda in {0, 1/2, 1, 3/2, ...}, i.e. 2*lambda + 1 integral.
  static GegenbauerBasis from_lambda(double lambda) {
    const double d = 2.0 * lambda + 1.0;
    if (!(lambda >= 0.0) || d != std::floor(d) || d > 1e9) {
      throw error(errc::invalid_argument,
                  "lambda must be a nonnegative half-integer, got " +
                      std::to_string(lambda));
    }
    return GegenbauerBasis(static_cast<int>(d));
  }

  double lambda() const noexcept { return 0.5 * (dimension_ - 1); }
  int dimension() const noexcept { return dimension_; }
  bool is_chebyshev() const noexcept { return dimension_ == 1; }

  friend bool operator==(const GegenbauerBasis &, const GegenbauerBasis &) = default;

private:
  explicit GegenbauerBasis(int d) : dimension_(d) {}
  int dimension_;
};

namespace detail {

inline void require_degree(std::size_t n) {
  if (n > max_degree) {
    throw error(errc::domain, "degree " + std::to_string(n) +
                                  " exceeds the supported maximum " +
                                  std::to_string(max_degree));
  }
}

inline void require_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw error(errc::invalid_argument,
                "lambda must be finite and >= 0, got " + std::to_string(lambda));
  }
}

// Normalized three-term recurrence, P(1) = 1 for every degree:
//   P_n = x P_{n-1} + beta_n (x P_{n-1} - P_{n-2}),  beta_n = (n-1)/(n+2λ-1).
// With P_{n-1}(1) = P_{n-2}(1) = 1 the correction term vanishes exactly, so
// the value at x = 1 is exactly 1 in floating point. For λ = 0, beta_n = 1
// and this is the Chebyshev recurrence T_n = 2x T_{n-1} - T_{n-2}.
inline double recurrence_beta(double lambda, std::size_t n) {
  const double nm1 = static_cast<double>(n - 1);
  if (lambda == 0.0) return 1.0;
  return nm1 / (nm1 + 2.0 * lambda);
}

inline void fill_normalized(double lambda, double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() == 1) return;
  out[1] = x;
  for (std::size_t n = 2; n < out.size(); ++n) {
    const double xp = x * out[n - 1];
    out[n] = xp + recurrence_beta(lambda, n) * (xp - out[n - 2]);
  }
}

// Returns (P_n(x), P_{n-1}(x)) for n >= 1.
inline std::pair<double, double> normalized_pair(double lambda, std::size_t n,
                                                 double x) {
  double prev = 1.0;
  double cur = x;
  for (std::size_t k = 2; k <= n; ++k) {
    const double xp = x * cur;
    const double next = xp + recurrence_beta(lambda, k) * (xp - prev);
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

/// Squared weighted norms of the normalized polynomials, h_0..h_{n_max}, for
/// weight (1-x^2)^(lambda-1/2). h_0 = B(1/2, lambda+1/2) and
///   h_n / h_{n-1} = (n-1+λ)/(n+λ) * n/(n+2λ-1)   (λ > 0),
/// while for λ = 0 the Chebyshev norms are π, π/2, π/2, ...
inline std::vector<double> normalized_norms(double lambda, std::size_t n_max) {
  std::vector<double> h(n_max + 1);
  if (lambda == 0.0) {
    h[0] = std::numbers::pi;
    for (std::size_t n = 1; n <= n_max; ++n) h[n] = 0.5 * std::numbers::pi;
    return h;
  }
  h[0] = std::beta(0.5, lambda + 0.5);
  for (std::size_t n = 1; n <= n_max; ++n) {
    const double dn = static_cast<double>(n);
    h[n] = h[n - 1] * ((dn - 1.0 + lambda) / (dn + lambda)) *
           (dn / (dn + 2.0 * lambda - 1.0));
  }
  return h;
}

}  // namespace detail

/// Normalized Gegenbauer polynomial P_n(x) = C_n^λ(x) / C_n^λ(1), or the
/// Chebyshev polynomial T_n(x) on the circle. P_n(1) == 1 exactly.
inline double eval_normalized(const GegenbauerBasis &basis, std::size_t n,
                              double x) {
  detail::require_unit_interval(x);
  detail::require_degree(n);
  if (n == 0) return 1.0;
  return detail::normalized_pair(basis.lambda(), n, x).first;
}

/// Values P_0(x)..P_{n_max}(x) from a single forward recurrence pass.
inline std::vector<double> eval_sequence(const GegenbauerBasis &basis,
                                         std::size_t n_max, double x) {
  detail::require_unit_interval(x);
  detail::require_degree(n_max);
  std::vector<double> out(n_max + 1);
  detail::fill_normalized(basis.lambda(), x, out);
  return out;
}

/// Same as eval_sequence, writing into caller storage (length = n_max + 1).
inline void eval_sequence_into(const GegenbauerBasis &basis, double x,
                               std::span<double> out) {
  detail::require_unit_interval(x);
  if (!out.empty()) detail::require_degree(out.size() - 1);
  detail::fill_normalized(basis.lambda(), x, out);
}

/// Normalization constant C_n^λ(1) = Γ(n+2λ) / (n! Γ(2λ)) for λ > 0. Grows
/// like n^(2λ-1); callers scaling by δ^n should use the running product form.
inline double gegenbauer_at_one(double lambda, std::size_t n) {
  detail::require_lambda(lambda);
  if (lambda == 0.0) {
    throw error(errc::invalid_argument, "C_n^0(1) is degenerate; use Chebyshev");
  }
  double c = 1.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double dk = static_cast<double>(k);
    c *= (dk + 2.0 * lambda - 1.0) / dk;
  }
  return c;
}

/// h_n = ∫ P_n(x)^2 (1-x^2)^(λ-1/2) dx over [-1, 1].
inline double norm_squared(const GegenbauerBasis &basis, std::size_t n) {
  detail::require_degree(n);
  return detail::normalized_norms(basis.lambda(), n)[n];
}

struct QuadratureRule {
  std::vector<double> nodes;    // strictly increasing, symmetric about 0
  std::vector<double> weights;  // positive
  double lambda = 0.0;
  std::size_t order = 0;

  /// Σ w_i f(x_i).
  template <class F>
  double integrate(F &&f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// Gauss-Gegenbauer rule of the given order for weight (1-x^2)^(λ-1/2):
/// exact for polynomials of degree <= 2*order - 1. λ may be any value >= 0
/// (not only sphere indices). Nodes are found by Newton iteration from
/// Chebyshev starting points, deflating the roots already found.
inline QuadratureRule quadrature(double lambda, std::size_t order) {
  detail::require_lambda(lambda);
  if (order < 1) {
    throw error(errc::invalid_argument, "quadrature order must be >= 1");
  }
  detail::require_degree(order);

  constexpr double tolerance = 1e-14;
  constexpr int max_iterations = 100;

  const std::size_t half = order / 2;
  const bool odd = (order % 2) == 1;
  const double pi = std::numbers::pi;
  const double dn = static_cast<double>(order);

  // Positive roots, largest first.
  std::vector<double> roots;
  roots.reserve(half);
  for (std::size_t k = 1; k <= half; ++k) {
    double x = std::cos((2.0 * static_cast<double>(k) - 1.0) * pi / (2.0 * dn));
    if (lambda != 0.0) {
      int it = 0;
      double dx = 1.0;
      for (; it < max_iterations; ++it) {
        const auto [p, pm1] = detail::normalized_pair(lambda, order, x);
        if (p == 0.0) break;
        // (1-x^2) P_n'(x) = n (P_{n-1}(x) - x P_n(x)), independent of λ.
        const double dp = dn * (pm1 - x * p) / (1.0 - x * x);
        double ratio = dp / p;
        for (double r : roots) ratio -= 2.0 * x / (x * x - r * r);
        if (odd) ratio -= 1.0 / x;
        dx = 1.0 / ratio;
        x -= dx;
        if (std::abs(dx) <= tolerance) break;
      }
      if (it == max_iterations || !(x > 0.0 && x < 1.0)) {
        throw error(errc::convergence_failed,
                    "Gauss-Gegenbauer root " + std::to_string(k) + " of order " +
                        std::to_string(order) + " (lambda = " +
                        std::to_string(lambda) + ") did not converge: x = " +
                        std::to_string(x) + ", last step = " + std::to_string(dx));
      }
    }
    roots.push_back(x);
  }

  QuadratureRule rule;
  rule.lambda = lambda;
  rule.order = order;
  rule.nodes.reserve(order);
  for (double r : roots) rule.nodes.push_back(-r);
  if (odd) rule.nodes.push_back(0.0);
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) rule.nodes.push_back(*it);

  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    if (!(rule.nodes[i] > rule.nodes[i - 1])) {
      throw error(errc::convergence_failed,
                  "Gauss-Gegenbauer nodes collided at index " + std::to_string(i) +
                      " (order " + std::to_string(order) + ", lambda = " +
                      std::to_string(lambda) + ")");
    }
  }

  rule.weights.resize(order);
  if (lambda == 0.0) {
    for (auto &w : rule.weights) w = pi / dn;
    return rule;
  }

  // Christoffel numbers: w_i = 1 / Σ_{k<n} P_k(x_i)^2 / h_k.
  const auto norms = detail::normalized_norms(lambda, order - 1);
  std::vector<double> values(order);
  for (std::size_t i = 0; i < order; ++i) {
    detail::fill_normalized(lambda, rule.nodes[i], values);
    double s = 0.0;
    for (std::size_t k = 0; k < order; ++k) s += values[k] * values[k] / norms[k];
    rule.weights[i] = 1.0 / s;
  }
  // Mirror so the weights are exactly symmetric.
  for (std::size_t i = 0; i < half; ++i) {
    const double w = 0.5 * (rule.weights[i] + rule.weights[order - 1 - i]);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace spherecov
