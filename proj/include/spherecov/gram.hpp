#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "spherecov/error.hpp"
#include "spherecov/geometry.hpp"

namespace spherecov {

inline constexpr double symmetry_tolerance = 1e-12;

struct GramMatrix {
  Eigen::MatrixXd entries;
  std::string provenance;

  Eigen::Index size() const noexcept { return entries.rows(); }
};

namespace detail {

inline void require_symmetric(const Eigen::MatrixXd &m) {
  if (m.rows() != m.cols()) {
    throw error(errc::not_symmetric, "matrix is not square");
  }
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
      if (!(std::abs(m(i, j) - m(j, i)) <= symmetry_tolerance * scale)) {
        throw error(errc::not_symmetric,
                    "matrix is not symmetric at (" + std::to_string(i) + ", " +
                        std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace detail

/// Assembles the symmetric matrix [entry(i, j)] from its upper triangle.
template <class Entry>
GramMatrix assemble_gram(Eigen::Index n, Entry &&entry, std::string provenance = {}) {
  GramMatrix g{Eigen::MatrixXd(n, n), std::move(provenance)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = entry(i, j);
      g.entries(i, j) = v;
      g.entries(j, i) = v;
    }
  }
  return g;
}

/// Gram matrix [g(<x_i, x_j>)] of an isotropic function given through the
/// cosine of the geodesic angle.
template <class F>
GramMatrix gram_isotropic(F &&g, const SpherePointSet &points,
                          std::string provenance = {}) {
  const auto &x = points.coordinates();
  return assemble_gram(
      points.size(),
      [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return g(1.0);
        return g(std::clamp(x.row(i).dot(x.row(j)), -1.0, 1.0));
      },
      std::move(provenance));
}

/// Smallest eigenvalue from a symmetric (self-adjoint) eigen-solver.
inline double min_eigenvalue(const GramMatrix &m) {
  detail::require_symmetric(m.entries);
  if (m.size() == 0) {
    throw error(errc::invalid_argument, "empty matrix");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.entries,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw error(errc::convergence_failed, "symmetric eigen-solver failed");
  }
  return solver.eigenvalues()(0);
}

/// Spectral norm of a symmetric matrix (largest |eigenvalue|).
inline double spectral_norm(const GramMatrix &m) {
  detail::require_symmetric(m.entries);
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.entries,
                                                        Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Entrywise (Hadamard) product.
inline GramMatrix schur_product(const GramMatrix &a, const GramMatrix &b) {
  if (a.entries.rows() != b.entries.rows() || a.entries.cols() != b.entries.cols()) {
    throw error(errc::dimension_mismatch, "schur_product operands differ in shape");
  }
  return {a.entries.cwiseProduct(b.entries),
          "schur(" + a.provenance + ", " + b.provenance + ")"};
}

}  // namespace spherecov
