#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "spherecov/error.hpp"

namespace spherecov {

/// Position of Y_nm in the flat array returned below: n^2 + n + m.
inline constexpr std::size_t harmonic_index(std::size_t n, long m) {
  return static_cast<std::size_t>(static_cast<long>(n * n + n) + m);
}

/// Real spherical harmonics Y_nm, 0 <= n <= degree, -n <= m <= n, at the unit
/// vector (x, y, z) on S^2. Orthonormal over the surface measure, no
/// Condon-Shortley phase:
///   Y_n0  = q_n^0(cos θ)
///   Y_nm  = √2 q_n^m(cos θ) cos(m φ)     (m > 0)
///   Y_n,-m = √2 q_n^m(cos θ) sin(m φ)
/// with q_n^m = sqrt((2n+1)/(4π) (n-m)!/(n+m)!) P_n^m. Satisfies the addition
/// theorem Σ_m Y_nm(u) Y_nm(v) = (2n+1)/(4π) P_n(<u, v>).
inline void real_spherical_harmonics(std::size_t degree, double x, double y, double z,
                                     std::span<double> out) {
  const std::size_t count = (degree + 1) * (degree + 1);
  if (out.size() != count) {
    throw error(errc::dimension_mismatch, "harmonic buffer has the wrong length");
  }
  const double ct = std::clamp(z, -1.0, 1.0);
  const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
  const double phi = (x == 0.0 && y == 0.0) ? 0.0 : std::atan2(y, x);
  const double sqrt2 = std::numbers::sqrt2;

  // q_m^m by the diagonal recurrence, then upward in n for fixed m.
  double qmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (std::size_t m = 0; m <= degree; ++m) {
    const double dm = static_cast<double>(m);
    if (m > 0) qmm *= std::sqrt((2.0 * dm + 1.0) / (2.0 * dm)) * st;
    const double cm = std::cos(dm * phi);
    const double sm = std::sin(dm * phi);
    const long lm = static_cast<long>(m);

    auto store = [&](std::size_t n, double q) {
      if (m == 0) {
        out[harmonic_index(n, 0)] = q;
      } else {
        out[harmonic_index(n, lm)] = sqrt2 * q * cm;
        out[harmonic_index(n, -lm)] = sqrt2 * q * sm;
      }
    };

    store(m, qmm);
    if (m == degree) break;
    double q_prev = qmm;
    double q_cur = std::sqrt(2.0 * dm + 3.0) * ct * qmm;
    store(m + 1, q_cur);
    for (std::size_t n = m + 2; n <= degree; ++n) {
      const double dn = static_cast<double>(n);
      const double a = std::sqrt((4.0 * dn * dn - 1.0) / (dn * dn - dm * dm));
      const double b = std::sqrt(((dn - 1.0) * (dn - 1.0) - dm * dm) /
                                 (4.0 * (dn - 1.0) * (dn - 1.0) - 1.0));
      const double q_next = a * (ct * q_cur - b * q_prev);
      q_prev = q_cur;
      q_cur = q_next;
      store(n, q_cur);
    }
  }
}

inline std::vector<double> real_spherical_harmonics(std::size_t degree, double x,
                                                    double y, double z) {
  std::vector<double> out((degree + 1) * (degree + 1));
  real_spherical_harmonics(degree, x, y, z, out);
  return out;
}

}  // namespace spherecov
