#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "spherecov/error.hpp"
#include "spherecov/geometry.hpp"
#include "spherecov/gram.hpp"
#include "spherecov/product_spheres.hpp"
#include "spherecov/random.hpp"
#include "spherecov/schoenberg.hpp"
#include "spherecov/spacetime.hpp"
#include "spherecov/spherical_harmonics.hpp"

namespace spherecov {

// ---------------------------------------------------------------------------
// Kernel descriptions (used as Gram provenance and sample ids)

inline std::string describe(const SchoenbergSequence &k) {
  return "sphere(d=" + std::to_string(k.basis().dimension()) +
         ",N=" + std::to_string(k.truncation()) + ")";
}

inline std::string describe(const SpaceTimeKernel &k) {
  return "sphere_time(d=" + std::to_string(k.basis().dimension()) +
         ",terms=" + std::to_string(k.terms().size()) + ")";
}

inline std::string describe(const ProductSphereKernel &k) {
  return "product_spheres(d1=" + std::to_string(k.first_basis().dimension()) +
         ",d2=" + std::to_string(k.second_basis().dimension()) + ",shape=" +
         std::to_string(k.coefficients().rows()) + "x" +
         std::to_string(k.coefficients().cols()) + ")";
}

// ---------------------------------------------------------------------------
// Gram matrices

inline GramMatrix gram(const SchoenbergSequence &k, const SpherePointSet &points) {
  if (points.dimension() != k.basis().dimension()) {
    throw error(errc::geometry_mismatch,
                "kernel lives on S^" + std::to_string(k.basis().dimension()) +
                    " but points are on S^" + std::to_string(points.dimension()));
  }
  return gram_isotropic([&](double x) { return kernel_eval(k, x); }, points,
                        describe(k) + " on " + std::to_string(points.size()) + " points");
}

inline GramMatrix gram(const SpaceTimeKernel &k, const SpaceTimePointSet &points) {
  if (points.space.dimension() != k.basis().dimension()) {
    throw error(errc::geometry_mismatch, "space-time kernel and points differ in sphere dimension");
  }
  const auto &x = points.space.coordinates();
  return assemble_gram(
      points.size(),
      [&](Eigen::Index i, Eigen::Index j) {
        const double c = i == j ? 1.0 : std::clamp(x.row(i).dot(x.row(j)), -1.0, 1.0);
        return st_kernel_eval(k, c, points.times[static_cast<std::size_t>(i)] -
                                        points.times[static_cast<std::size_t>(j)]);
      },
      describe(k) + " on " + std::to_string(points.size()) + " points");
}

inline GramMatrix gram(const ProductSphereKernel &k, const ProductPointSet &points) {
  if (points.first.dimension() != k.first_basis().dimension() ||
      points.second.dimension() != k.second_basis().dimension()) {
    throw error(errc::geometry_mismatch, "product kernel and points differ in sphere dimensions");
  }
  const auto &x = points.first.coordinates();
  const auto &y = points.second.coordinates();
  return assemble_gram(
      points.size(),
      [&](Eigen::Index i, Eigen::Index j) {
        if (i == j) return ps_kernel_eval(k, 1.0, 1.0);
        return ps_kernel_eval(k, std::clamp(x.row(i).dot(x.row(j)), -1.0, 1.0),
                              std::clamp(y.row(i).dot(y.row(j)), -1.0, 1.0));
      },
      describe(k) + " on " + std::to_string(points.size()) + " points");
}

// ---------------------------------------------------------------------------
// Harmonic dimension

/// Dimension of the degree-n spherical harmonics on S^d:
/// N(d, 0) = 1, N(d, n) = (2n+d-1) (n+d-2)! / (n! (d-1)!).
inline std::uint64_t harmonic_dimension(int d, std::uint64_t n) {
  if (d < 1) throw error(errc::invalid_argument, "harmonic_dimension needs d >= 1");
  if (n == 0) return 1;
  using wide = unsigned __int128;
  const auto du = static_cast<std::uint64_t>(d);
  // C(n+d-1, n) built incrementally; every partial product is an integer.
  wide binom = 1;
  for (std::uint64_t k = 1; k <= n; ++k) {
    binom = binom * (du - 1 + k) / k;
    if (binom > (wide(1) << 100)) {
      throw error(errc::domain, "harmonic dimension overflows 64 bits");
    }
  }
  const wide result = wide(2 * n + du - 1) * binom / wide(n + du - 1);
  if (result > wide(UINT64_MAX)) {
    throw error(errc::domain, "harmonic dimension overflows 64 bits");
  }
  return static_cast<std::uint64_t>(result);
}

// ---------------------------------------------------------------------------
// Samples

struct FieldSample {
  Eigen::MatrixXd values;  // n_samples x n_points
  std::uint64_t seed = 0;
  std::string kernel_id;

  Eigen::Index samples() const noexcept { return values.rows(); }
  Eigen::Index points() const noexcept { return values.cols(); }
};

/// Unbiased sample covariance across realizations (mean removed, divisor
/// n_samples - 1).
inline GramMatrix empirical_covariance(const FieldSample &s) {
  if (s.samples() < 2) {
    throw error(errc::too_few_samples, "empirical covariance needs at least 2 samples");
  }
  const Eigen::RowVectorXd mean = s.values.colwise().mean();
  const Eigen::MatrixXd centered = s.values.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered /
                        static_cast<double>(s.samples() - 1);
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {std::move(cov), "empirical(" + s.kernel_id + ")"};
}

/// How a covariance factor was obtained.
enum class FactorRoute { pivoted_ldlt, jittered_cholesky, clipped_eigen };

struct CovarianceFactor {
  Eigen::MatrixXd factor;  // F with F Fᵀ ≈ G (+ jitter I on the Cholesky route)
  FactorRoute route = FactorRoute::pivoted_ldlt;
  double jitter = 0.0;
};

/// Default jitter 1e-10 * trace(G) / dim.
inline double default_jitter(const Eigen::MatrixXd &g) {
  if (g.rows() == 0) return 0.0;
  return 1e-10 * std::abs(g.trace()) / static_cast<double>(g.rows());
}

/// Symmetric factor of a PSD matrix, tried in order:
///  1. pivoted LDLᵀ of G itself, pivots in [-jitter, 0) clipped to 0 (exact
///     for rank-deficient covariances such as the constant kernel);
///  2. Cholesky of G + jitter I;
///  3. eigen-decomposition with eigenvalues below n·eps·‖G‖ (including every
///     negative one) clipped to 0.
/// Fails with the minimum eigenvalue when G is indefinite beyond
/// jitter + 1e-9 ‖G‖.
inline CovarianceFactor factor_covariance(const Eigen::MatrixXd &g,
                                          std::optional<double> jitter = std::nullopt) {
  detail::require_symmetric(g);
  const Eigen::Index n = g.rows();
  const double jit = jitter.value_or(default_jitter(g));
  if (!(jit >= 0.0)) throw error(errc::invalid_argument, "jitter must be >= 0");
  const double gmax = n ? g.cwiseAbs().maxCoeff() : 0.0;

  {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(g);
    if (ldlt.info() == Eigen::Success) {
      Eigen::VectorXd d = ldlt.vectorD();
      if (n == 0 || d.minCoeff() >= -jit) {
        d = d.cwiseMax(0.0).cwiseSqrt();
        Eigen::MatrixXd lower = ldlt.matrixL();
        Eigen::MatrixXd f = ldlt.transpositionsP().transpose() * (lower * d.asDiagonal());
        const double err = n ? (f * f.transpose() - g).cwiseAbs().maxCoeff() : 0.0;
        if (err <= 1e-10 * std::max(1.0, gmax) + jit) {
          return {std::move(f), FactorRoute::pivoted_ldlt, 0.0};
        }
      }
    }
  }
  {
    Eigen::MatrixXd shifted = g;
    shifted.diagonal().array() += jit;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      return {Eigen::MatrixXd(llt.matrixL()), FactorRoute::jittered_cholesky, jit};
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) {
    throw factorization_failure(std::nan(""), "eigen-decomposition did not converge");
  }
  const Eigen::VectorXd &values = eig.eigenvalues();
  const double norm = values.cwiseAbs().maxCoeff();
  const double lo = values(0);
  if (lo < -(jit + 1e-9 * norm)) {
    throw factorization_failure(
        lo, "covariance is not positive semidefinite: min eigenvalue " + std::to_string(lo));
  }
  const double cutoff = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm;
  Eigen::VectorXd root(n);
  for (Eigen::Index i = 0; i < n; ++i) root(i) = values(i) > cutoff ? std::sqrt(values(i)) : 0.0;
  return {eig.eigenvectors() * root.asDiagonal(), FactorRoute::clipped_eigen, 0.0};
}

/// Exact Gaussian sampling on a finite point set: rows F z with z standard
/// normal from stream `stream::factorized` of `seed`, one substream per
/// realization.
template <class Kernel, class Points>
FieldSample sample_factorized(const Kernel &kernel, const Points &points,
                              Eigen::Index n_samples, std::uint64_t seed,
                              std::optional<double> jitter = std::nullopt) {
  if (n_samples < 1) throw error(errc::invalid_argument, "n_samples must be >= 1");
  const GramMatrix g = gram(kernel, points);
  const CovarianceFactor f = factor_covariance(g.entries, jitter);
  const Eigen::Index n = g.size();
  const Eigen::Index r = f.factor.cols();

  FieldSample out{Eigen::MatrixXd(n_samples, n), seed, describe(kernel)};
  Eigen::VectorXd z(r);
  for (Eigen::Index s = 0; s < n_samples; ++s) {
    auto rng = rng_stream(seed, stream::factorized, static_cast<std::uint64_t>(s));
    for (Eigen::Index k = 0; k < r; ++k) z(k) = rng.normal();
    out.values.row(s) = (f.factor * z).transpose();
  }
  return out;
}

/// Spectral sampler on S^2 from the addition theorem:
///   X(u) = Σ_n sqrt(4π c a_n / (2n+1)) Σ_m z_nm Y_nm(u),
/// covariance c Σ a_n P_n(<u, v>). Realization s draws z_nm from substream s
/// of `stream::spectral`, in order n = 0..degree_cap, m = -n..n.
inline FieldSample sample_spectral_s2(const SchoenbergSequence &seq,
                                      const SpherePointSet &points,
                                      Eigen::Index n_samples, std::uint64_t seed,
                                      std::size_t degree_cap) {
  if (seq.basis().dimension() != 2) {
    throw error(errc::domain, "spectral sampler needs lambda = 1/2 (the 2-sphere)");
  }
  if (points.dimension() != 2) {
    throw error(errc::geometry_mismatch, "spectral sampler needs points on S^2");
  }
  if (degree_cap < seq.truncation()) {
    throw error(errc::invalid_argument,
                "degree_cap " + std::to_string(degree_cap) + " is below the truncation " +
                    std::to_string(seq.truncation()));
  }
  if (n_samples < 1) throw error(errc::invalid_argument, "n_samples must be >= 1");
  detail::require_degree(degree_cap);

  const std::size_t count = (degree_cap + 1) * (degree_cap + 1);
  const Eigen::Index np = points.size();
  Eigen::MatrixXd basis(np, static_cast<Eigen::Index>(count));
  std::vector<double> y(count);
  for (Eigen::Index i = 0; i < np; ++i) {
    const auto p = points.point(i);
    real_spherical_harmonics(degree_cap, p(0), p(1), p(2), y);
    for (std::size_t k = 0; k < count; ++k) basis(i, static_cast<Eigen::Index>(k)) = y[k];
  }

  Eigen::VectorXd amplitude(static_cast<Eigen::Index>(count));
  const auto &a = seq.coefficients();
  for (std::size_t n = 0; n <= degree_cap; ++n) {
    const double an = n < a.size() ? a[n] : 0.0;
    const double s = std::sqrt(4.0 * std::numbers::pi * seq.scale() * an /
                               (2.0 * static_cast<double>(n) + 1.0));
    for (std::size_t k = n * n; k < (n + 1) * (n + 1); ++k) {
      amplitude(static_cast<Eigen::Index>(k)) = s;
    }
  }

  FieldSample out{Eigen::MatrixXd(n_samples, np), seed, describe(seq)};
  Eigen::VectorXd z(static_cast<Eigen::Index>(count));
  for (Eigen::Index s = 0; s < n_samples; ++s) {
    auto rng = rng_stream(seed, stream::spectral, static_cast<std::uint64_t>(s));
    for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = amplitude(k) * rng.normal();
    out.values.row(s) = (basis * z).transpose();
  }
  return out;
}

}  // namespace spherecov
