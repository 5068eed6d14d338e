// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cli_contract.hpp"
#include "spherecov/spherecov.hpp"

using namespace spherecov;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char *title;
  double time_limit;  // seconds; 0 means no limit
  std::function<Outcome()> body;
};

std::vector<double> random_coefficients(Rng &rng, std::size_t n_max) {
  std::vector<double> a(n_max + 1);
  for (auto &v : a) v = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
  a[rng.next_word() % a.size()] += 0.1;
  return a;
}

GegenbauerBasis random_basis(Rng &rng, int max_d = 3) {
  return GegenbauerBasis::from_dimension(1 + static_cast<int>(rng.next_word() % static_cast<std::uint64_t>(max_d)));
}

CharFnSpec random_charfn(Rng &rng) {
  switch (rng.next_word() % 5) {
    case 0: return CharFnSpec::gaussian(0.2 + 2 * rng.uniform());
    case 1: return CharFnSpec::exponential(0.2 + 2 * rng.uniform());
    case 2: return CharFnSpec::stable(0.2 + 2 * rng.uniform(), 0.1 + 1.9 * rng.uniform());
    case 3: return CharFnSpec::triangle_sinc(0.2 + 3 * rng.uniform());
    default: return CharFnSpec::point_mass_at_zero();
  }
}

SpaceTimeKernel random_st_kernel(Rng &rng, std::size_t max_terms = 40) {
  std::vector<SpaceTimeTerm> terms;
  const auto a = random_coefficients(rng, rng.next_word() % max_terms);
  for (double w : a) terms.push_back({w, random_charfn(rng)});
  return make_st_kernel(std::move(terms), random_basis(rng), true);
}

Eigen::MatrixXd random_nonnegative(Rng &rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
  }
  m(static_cast<Eigen::Index>(rng.next_word() % static_cast<std::uint64_t>(rows)),
    static_cast<Eigen::Index>(rng.next_word() % static_cast<std::uint64_t>(cols))) += 0.1;
  return m;
}

// Relative PSD margin min_eig / ‖G‖.
double relative_min_eig(const GramMatrix &g) { return min_eigenvalue(g) / spectral_norm(g); }

// ∫ (C_n^λ)² w / C_n^λ(1)², from Γ functions.
double norm_closed(double lambda, unsigned n) {
  const double log_h = std::log(std::numbers::pi) + (1 - 2 * lambda) * std::log(2.0) +
                       std::lgamma(n + 2 * lambda) - std::lgamma(n + 1.0) - std::log(n + lambda) -
                       2 * std::lgamma(lambda);
  const double log_c1 = std::lgamma(n + 2 * lambda) - std::lgamma(2 * lambda) - std::lgamma(n + 1.0);
  return std::exp(log_h - 2 * log_c1);
}

std::string fmt(const char *f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome orthogonality() {
  double worst_off = 0.0;
  double worst_rel = 0.0;
  for (double lambda : {0.5, 1.0, 2.5}) {
    const auto b = GegenbauerBasis::from_lambda(lambda);
    const auto q = quadrature(lambda, 41);
    std::vector<std::vector<double>> v;
    for (double x : q.nodes) v.push_back(eval_sequence(b, 40, x));
    for (std::size_t m = 0; m <= 40; ++m) {
      for (std::size_t n = m; n <= 40; ++n) {
        double s = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) s += q.weights[i] * v[i][m] * v[i][n];
        if (m == n) {
          const double h = norm_closed(lambda, static_cast<unsigned>(n));
          worst_rel = std::max({worst_rel, std::abs(s - h) / h, std::abs(norm_squared(b, n) - h) / h});
        } else {
          worst_off = std::max(worst_off, std::abs(s));
        }
      }
    }
  }
  return {worst_off <= 1e-9 && worst_rel <= 1e-9,
          "max |<P_m,P_n>| " + fmt("%.2e", worst_off) + ", max rel norm error " + fmt("%.2e", worst_rel)};
}

Outcome bs_soundness() {
  Rng rng(rng_stream(1001, stream::generic).next_word());
  double worst = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const auto b = random_basis(rng);
    const auto s = make_sequence(random_coefficients(rng, rng.next_word() % 41), b, true);
    const auto pts = uniform_sphere_points(b.dimension(), 25, rng.next_word());
    worst = std::min(worst, relative_min_eig(gram(s, pts)));
  }
  return {worst >= -1e-9, "200 trials, min eig / ||G|| = " + fmt("%.2e", worst)};
}

Outcome round_trip() {
  Rng rng(1002);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_basis(rng, 6);
    const std::size_t n_max = 1 + rng.next_word() % 40;
    const auto s = make_sequence(random_coefficients(rng, n_max), b, true, 0.5 + rng.uniform());
    const auto back = recover_coefficients([&](double x) { return kernel_eval(s, x); }, b, n_max, n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) worst = std::max(worst, std::abs(back[n] - s.scale() * s.coefficients()[n]));
  }
  return {worst <= 1e-8, "100 sequences, max abs error " + fmt("%.2e", worst)};
}

Outcome generating_function() {
  double coeff_err = 0.0;
  double value_err = 0.0;
  for (double delta : {0.3, 0.5, 0.7}) {
    for (double lambda : {0.5, 1.0}) {
      const auto b = GegenbauerBasis::from_lambda(lambda);
      const auto g = [&](double x) { return multiquadric_closed_form(delta, lambda, x); };
      const auto rec = recover_coefficients(g, b, 60, 200);
      for (std::size_t n = 0; n <= 60; ++n) {
        const double law = std::pow(1 - delta, 2 * lambda) * std::pow(delta, static_cast<double>(n)) *
                           gegenbauer_at_one(lambda, n);
        coeff_err = std::max(coeff_err, std::abs(rec[n] - law));
      }
      const auto s = multiquadric_sequence(delta, b, 160);
      for (int i = 0; i < 100; ++i) {
        const double x = -1.0 + 2.0 * i / 99.0;
        value_err = std::max(value_err, std::abs(kernel_eval(s, x) - g(x)));
      }
    }
  }
  return {coeff_err <= 1e-8 && value_err <= 1e-8,
          "coefficient error " + fmt("%.2e", coeff_err) + ", value error " + fmt("%.2e", value_err)};
}

Outcome certification() {
  Rng rng(1005);
  int missed = 0;
  int wrong_index = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_basis(rng, 4);
    auto a = random_coefficients(rng, 20);
    const std::size_t k = rng.next_word() % 21;
    a[k] = -(0.05 + rng.uniform());
    auto g = [&](double x) {
      const auto p = eval_sequence(b, a.size() - 1, x);
      double s = 0.0;
      for (std::size_t n = 0; n < a.size(); ++n) s += a[n] * p[n];
      return s;
    };
    CertifyOptions opt;
    opt.seed = rng.next_word();
    const auto c = certify(g, b, opt);
    if (c.verdict != Verdict::not_pd) ++missed;
    else if (c.coefficients.min_coefficient < -opt.coeff_tol && c.coefficients.min_index != k) ++wrong_index;
    else if (c.coefficients.min_coefficient >= -opt.coeff_tol) ++wrong_index;
  }
  int false_alarms = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_basis(rng, 4);
    CertifyOptions opt;
    opt.seed = rng.next_word();
    PDCertificate c;
    if (trial % 2 == 0) {
      const auto s = make_sequence(random_coefficients(rng, rng.next_word() % 25), b, true);
      c = certify([&](double x) { return kernel_eval(s, x); }, b, opt);
    } else if (b.lambda() > 0.0) {
      const double delta = 0.1 + 0.8 * rng.uniform();
      c = certify([&](double x) { return multiquadric_closed_form(delta, b.lambda(), x); }, b, opt);
    } else {
      const double r = 0.5 + 2 * rng.uniform();
      c = certify([&](double x) { return std::exp(r * (x - 1)); }, b, opt);
    }
    if (c.verdict == Verdict::not_pd) ++false_alarms;
  }
  return {missed == 0 && wrong_index == 0 && false_alarms == 0,
          "planted: " + std::to_string(missed) + " missed, " + std::to_string(wrong_index) +
              " wrong witness; valid: " + std::to_string(false_alarms) + " flagged NotPD"};
}

Outcome space_time_suite() {
  Rng rng(1006);
  double reduction = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto k = random_st_kernel(rng);
    const auto s = spatial_sequence(k);
    for (int i = 0; i < 20; ++i) {
      const double x = 2 * rng.uniform() - 1;
      reduction = std::max(reduction, std::abs(st_kernel_eval(k, x, 0.0) - kernel_eval(s, x)));
    }
  }
  double factor = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto phi = random_charfn(rng);
    std::vector<SpaceTimeTerm> terms;
    for (double w : random_coefficients(rng, 15)) terms.push_back({w, phi});
    const auto k = make_st_kernel(std::move(terms), random_basis(rng), true);
    if (!is_separable(k, 1e-12)) factor = INFINITY;
    const auto s = spatial_sequence(k);
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double x = -1.0 + 2.0 * i / 49.0;
        const double t = -5.0 + 10.0 * j / 49.0;
        factor = std::max(factor, std::abs(st_kernel_eval(k, x, t) - kernel_eval(s, x) * phi(t)));
      }
    }
  }
  double worst = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = random_st_kernel(rng, 41);
    std::vector<double> times;
    for (int i = 0; i < 25; ++i) times.push_back(6 * rng.uniform() - 3);
    const SpaceTimePointSet pts(uniform_sphere_points(k.basis().dimension(), 25, rng.next_word()), times);
    worst = std::min(worst, relative_min_eig(gram(k, pts)));
  }
  return {reduction <= 1e-12 && factor <= 1e-12 && worst >= -1e-9,
          "t=0 reduction " + fmt("%.2e", reduction) + ", factorization " + fmt("%.2e", factor) +
              ", 200 Gram trials min eig / ||G|| = " + fmt("%.2e", worst)};
}

Outcome product_sphere_suite() {
  Rng rng(1007);
  double worst = INFINITY;
  for (int trial = 0; trial < 200; ++trial) {
    const auto b1 = random_basis(rng);
    const auto b2 = random_basis(rng);
    const auto rows = static_cast<Eigen::Index>(1 + rng.next_word() % 15);
    const auto cols = static_cast<Eigen::Index>(1 + rng.next_word() % 15);
    const auto k = make_ps_kernel(random_nonnegative(rng, rows, cols), b1, b2, true);
    const ProductPointSet pts(uniform_sphere_points(b1.dimension(), 25, rng.next_word()),
                              uniform_sphere_points(b2.dimension(), 25, rng.next_word()));
    worst = std::min(worst, relative_min_eig(gram(k, pts)));
  }
  int misclassified = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto rows = static_cast<Eigen::Index>(2 + rng.next_word() % 10);
    const auto cols = static_cast<Eigen::Index>(2 + rng.next_word() % 10);
    const bool rank_one = trial < 50;
    Eigen::MatrixXd a = random_nonnegative(rng, rows, 1) * random_nonnegative(rng, cols, 1).transpose();
    if (!rank_one) {
      // A strictly positive rank-one matrix plus a bump at one entry: every
      // minor through that entry equals bump * b_m' c_n' > 0.
      Eigen::VectorXd b = Eigen::VectorXd::NullaryExpr(rows, [&] { return 0.1 + rng.uniform(); });
      Eigen::VectorXd c = Eigen::VectorXd::NullaryExpr(cols, [&] { return 0.1 + rng.uniform(); });
      a = b * c.transpose();
      a(static_cast<Eigen::Index>(rng.next_word() % static_cast<std::uint64_t>(rows)),
        static_cast<Eigen::Index>(rng.next_word() % static_cast<std::uint64_t>(cols))) += 0.1 + rng.uniform();
    }
    const bool separable = std::holds_alternative<Separable>(separability_test(a, 1e-9));
    if (separable != rank_one) ++misclassified;
  }
  return {worst >= -1e-9 && misclassified == 0,
          "200 Gram trials min eig / ||G|| = " + fmt("%.2e", worst) + ", " + std::to_string(misclassified) +
              " of 100 matrices misclassified"};
}

Outcome schur_closure() {
  Rng rng(1008);
  double worst = INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const auto b = random_basis(rng);
    const auto pts = uniform_sphere_points(b.dimension(), 25, rng.next_word());
    const auto g1 = gram(make_sequence(random_coefficients(rng, rng.next_word() % 41), b, true), pts);
    const auto g2 = gram(make_sequence(random_coefficients(rng, rng.next_word() % 41), b, true), pts);
    worst = std::min(worst, relative_min_eig(schur_product(g1, g2)));
  }
  return {worst >= -1e-10, "100 pairs, min eig / ||G1 o G2|| = " + fmt("%.2e", worst)};
}

Outcome sampler_fidelity() {
  const auto leg = GegenbauerBasis::from_dimension(2);
  struct Config {
    SchoenbergSequence kernel;
    std::uint64_t seed;
  };
  const std::vector<Config> configs = {
      {make_sequence({0.0, 1.0}, leg, false), 1},
      {make_sequence({0.2, 0.3, 0.5}, leg, false), 2},
      {multiquadric_sequence(0.5, leg, 12), 3},
      {make_sequence({0.1, 0.1, 0.1, 0.1, 0.2, 0.2, 0.2}, leg, false), 4},
      {make_sequence({0.5, 0.0, 0.0, 0.5}, leg, false), 5},
  };
  const Eigen::Index n = 10000;
  double factorized_err = 0.0;
  double spectral_gap = 0.0;
  for (const auto &c : configs) {
    const auto pts = uniform_sphere_points(2, 10, rng_stream(c.seed, stream::generic).next_word());
    const auto exact = gram(c.kernel, pts).entries;
    const auto f = empirical_covariance(sample_factorized(c.kernel, pts, n, c.seed)).entries;
    const auto s = empirical_covariance(sample_spectral_s2(c.kernel, pts, n, c.seed, c.kernel.truncation())).entries;
    factorized_err = std::max(factorized_err, (f - exact).cwiseAbs().maxCoeff());
    spectral_gap = std::max(spectral_gap, (f - s).cwiseAbs().maxCoeff());
  }
  return {factorized_err <= 0.04 && spectral_gap <= 0.06,
          "max |emp - G| " + fmt("%.4f", factorized_err) + " (tol 0.04), max |factorized - spectral| " +
              fmt("%.4f", spectral_gap) + " (tol 0.06)"};
}

Outcome cli_contract_suite() {
  int failed = 0;
  std::string first;
  auto checks = cli_contract::examples();
  checks.push_back({"grid_round_trip", cli_contract::grid_round_trip});
  for (const auto &c : checks) {
    const auto r = c.check();
    if (!r.empty()) {
      if (!failed) first = c.name + ": " + r;
      ++failed;
    }
  }
  return {failed == 0, std::to_string(checks.size() - static_cast<std::size_t>(failed)) + "/" +
                           std::to_string(checks.size()) + " command checks" + (failed ? "; first failure " + first : "")};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "orthogonality", 5, orthogonality},
      {2, "isotropic PSD soundness", 30, bs_soundness},
      {3, "coefficient round trip", 10, round_trip},
      {4, "generating-function oracle", 0, generating_function},
      {5, "certification vs planted oracle", 0, certification},
      {6, "space-time reduction, separability, PSD", 0, space_time_suite},
      {7, "product-sphere PSD and separability", 0, product_sphere_suite},
      {8, "Schur closure", 0, schur_closure},
      {9, "sampler fidelity", 60, sampler_fidelity},
      {10, "CLI contract", 0, cli_contract_suite},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      o.pass = false;
      o.detail += "; exceeded " + fmt("%.0f", c.time_limit) + " s";
    }
    std::printf("criterion %2d %-42s %s  %s [%.2f s]\n", c.id, c.title, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
