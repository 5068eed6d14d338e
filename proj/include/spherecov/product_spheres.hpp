#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "spherecov/error.hpp"
#include "spherecov/gegenbauer.hpp"
#include "spherecov/schoenberg.hpp"

namespace spherecov {

/// c Σ_{m,n} a_mn P_m^{λ1}(x1) P_n^{λ2}(x2) on S^d1 x S^d2.
class ProductSphereKernel {
public:
  const Eigen::MatrixXd &coefficients() const noexcept { return a_; }
  double scale() const noexcept { return scale_; }
  const GegenbauerBasis &first_basis() const noexcept { return b1_; }
  const GegenbauerBasis &second_basis() const noexcept { return b2_; }
  bool unit_mass() const noexcept { return unit_mass_; }

private:
  ProductSphereKernel(Eigen::MatrixXd a, double c, GegenbauerBasis b1,
                      GegenbauerBasis b2, bool unit)
      : a_(std::move(a)), scale_(c), b1_(b1), b2_(b2), unit_mass_(unit) {}

  friend ProductSphereKernel make_ps_kernel(Eigen::MatrixXd, GegenbauerBasis,
                                            GegenbauerBasis, bool, double);

  Eigen::MatrixXd a_;
  double scale_;
  GegenbauerBasis b1_;
  GegenbauerBasis b2_;
  bool unit_mass_;
};

inline ProductSphereKernel make_ps_kernel(Eigen::MatrixXd a, GegenbauerBasis b1,
                                          GegenbauerBasis b2, bool normalize,
                                          double scale = 1.0) {
  if (a.size() == 0) throw error(errc::invalid_argument, "coefficient matrix is empty");
  detail::require_degree(static_cast<std::size_t>(a.rows() - 1));
  detail::require_degree(static_cast<std::size_t>(a.cols() - 1));
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw error(errc::invalid_argument, "scale must be positive and finite");
  }
  double total = 0.0;
  for (Eigen::Index m = 0; m < a.rows(); ++m) {
    for (Eigen::Index n = 0; n < a.cols(); ++n) {
      const double v = a(m, n);
      if (!std::isfinite(v)) {
        throw error(errc::invalid_argument, "coefficient matrix has a non-finite entry");
      }
      if (v < 0.0) {
        throw negative_coefficient(
            {static_cast<std::size_t>(m), static_cast<std::size_t>(n)}, v);
      }
      total += v;
    }
  }
  if (total == 0.0) throw error(errc::zero_mass, "all coefficients are zero");
  if (normalize) {
    a /= total;
    return ProductSphereKernel(std::move(a), scale * total, b1, b2, true);
  }
  const bool unit = std::abs(total - 1.0) <= unit_mass_tolerance;
  return ProductSphereKernel(std::move(a), scale, b1, b2, unit);
}

/// Tensor product of two sphere kernels: a_mn = a_m b_n, c = c1 c2.
inline ProductSphereKernel outer_product_kernel(const SchoenbergSequence &s1,
                                                const SchoenbergSequence &s2) {
  const auto &a = s1.coefficients();
  const auto &b = s2.coefficients();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(a.size()),
                    static_cast<Eigen::Index>(b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i] * b[j];
    }
  }
  return make_ps_kernel(std::move(m), s1.basis(), s2.basis(), false,
                        s1.scale() * s2.scale());
}

/// Bilinear form c v1ᵀ A v2 with v_i the basis values at x_i.
inline double ps_kernel_eval(const ProductSphereKernel &k, double x1, double x2) {
  detail::require_unit_interval(x1, "x1");
  detail::require_unit_interval(x2, "x2");
  const auto &a = k.coefficients();
  Eigen::VectorXd v1(a.rows());
  Eigen::VectorXd v2(a.cols());
  detail::fill_normalized(k.first_basis().lambda(), x1,
                          std::span<double>(v1.data(), static_cast<std::size_t>(v1.size())));
  detail::fill_normalized(k.second_basis().lambda(), x2,
                          std::span<double>(v2.data(), static_cast<std::size_t>(v2.size())));
  return k.scale() * v1.dot(a * v2);
}

struct Separable {
  Eigen::VectorXd b;  // a_mn ≈ b_m c_n
  Eigen::VectorXd c;
  double reconstruction_error = 0.0;
};

struct NonSeparable {
  Eigen::Index m = 0;
  Eigen::Index n = 0;
  Eigen::Index m2 = 0;
  Eigen::Index n2 = 0;
  /// a_mn a_m2n2 - a_mn2 a_m2n.
  double minor = 0.0;
};

using SeparabilityResult = std::variant<Separable, NonSeparable>;

/// Rank-one test by exhaustive 2x2 minors: separable iff every
/// |a_mn a_m'n' - a_mn' a_m'n| <= tol * (max entry)^2. The factorization
/// pivots on the largest entry (b = its column, c = its row / pivot), which
/// bounds the reconstruction error by tol * max entry.
inline SeparabilityResult separability_test(const Eigen::MatrixXd &a, double tol) {
  if (!(tol > 0.0)) throw error(errc::invalid_argument, "tol must be positive");
  if (a.size() == 0) throw error(errc::invalid_argument, "coefficient matrix is empty");
  Eigen::Index pm = 0;
  Eigen::Index pn = 0;
  const double peak = a.cwiseAbs().maxCoeff(&pm, &pn);
  if (peak == 0.0) {
    throw error(errc::degenerate_zero, "zero coefficient matrix has no factorization");
  }
  const double bound = tol * peak * peak;
  for (Eigen::Index m = 0; m < a.rows(); ++m) {
    for (Eigen::Index n = 0; n < a.cols(); ++n) {
      for (Eigen::Index m2 = m + 1; m2 < a.rows(); ++m2) {
        for (Eigen::Index n2 = n + 1; n2 < a.cols(); ++n2) {
          const double minor = a(m, n) * a(m2, n2) - a(m, n2) * a(m2, n);
          if (std::abs(minor) > bound) return NonSeparable{m, n, m2, n2, minor};
        }
      }
    }
  }
  Separable s;
  s.b = a.col(pn);
  s.c = a.row(pm).transpose() / a(pm, pn);
  s.reconstruction_error = (a - s.b * s.c.transpose()).cwiseAbs().maxCoeff();
  return s;
}

inline SeparabilityResult separability_test(const ProductSphereKernel &k, double tol) {
  return separability_test(k.coefficients(), tol);
}

}  // namespace spherecov
