#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace spherecov {

enum class errc {
  domain,
  invalid_argument,
  negative_coefficient,
  zero_mass,
  degenerate_zero,
  geometry_mismatch,
  dimension_mismatch,
  not_symmetric,
  factorization_failed,
  convergence_failed,
  evaluation_failed,
  too_few_samples,
};

inline std::string_view to_string(errc code) {
  switch (code) {
    case errc::domain: return "DomainError";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::negative_coefficient: return "NegativeCoefficient";
    case errc::zero_mass: return "ZeroMass";
    case errc::degenerate_zero: return "DegenerateZero";
    case errc::geometry_mismatch: return "GeometryMismatch";
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::factorization_failed: return "FactorizationFailed";
    case errc::convergence_failed: return "ConvergenceFailed";
    case errc::evaluation_failed: return "EvaluationFailed";
    case errc::too_few_samples: return "TooFewSamples";
  }
  return "Unknown";
}

/// Base of every exception thrown by the library. `code()` is stable and is
/// what the command-line tool reports in its machine-readable errors.
class error : public std::runtime_error {
public:
  error(errc code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  errc code() const noexcept { return code_; }

private:
  errc code_;
};

/// A coefficient violated a_n >= 0. `index` has one entry for sequences and
/// two (m, n) for coefficient matrices.
class negative_coefficient : public error {
public:
  negative_coefficient(std::vector<std::size_t> index, double value)
      : error(errc::negative_coefficient, describe(index, value)),
        index_(std::move(index)), value_(value) {}

  const std::vector<std::size_t> &index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

private:
  static std::string describe(const std::vector<std::size_t> &index,
                              double value) {
    std::string where;
    for (std::size_t i = 0; i < index.size(); ++i) {
      where += (i ? "," : "") + std::to_string(index[i]);
    }
    return "negative coefficient at (" + where + "): " + std::to_string(value);
  }

  std::vector<std::size_t> index_;
  double value_;
};

/// The factorization sampler could not factor the covariance even after the
/// eigen-decomposition fallback.
class factorization_failure : public error {
public:
  factorization_failure(double min_eigenvalue, const std::string &message)
      : error(errc::factorization_failed, message),
        min_eigenvalue_(min_eigenvalue) {}

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
  double min_eigenvalue_;
};

/// A user-supplied function failed (threw or returned a non-finite value).
class evaluation_failure : public error {
public:
  evaluation_failure(double node, const std::string &message)
      : error(errc::evaluation_failed, message), node_(node) {}

  double node() const noexcept { return node_; }

private:
  double node_;
};

namespace detail {

[[noreturn]] inline void throw_domain(const std::string &what) {
  throw error(errc::domain, what);
}

inline void require_unit_interval(double x, const char *name = "x") {
  if (!(x >= -1.0 && x <= 1.0)) {
    throw_domain(std::string(name) + " = " + std::to_string(x) +
                 " lies outside [-1, 1]");
  }
}

}  // namespace detail
}  // namespace spherecov
