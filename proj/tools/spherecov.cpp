// spherecov command-line tool.
//
//   spherecov eval SPEC (--x X [--t T] | --x1 X1 --x2 X2 | --grid N)
//   spherecov coeffs --lambda L --nmax N [--quad-order Q] (--table CSV | --expr NAME)
//   spherecov certify ... (as coeffs) [--gram-trials K] [--seed S]
//   spherecov separable SPEC [--tol T]
//   spherecov simulate SPEC (--points CSV | --random N) --samples M
//                      [--method factorized|spectral] [--seed S] [--out PATH]
//
// Exit codes: 0 ok, 1 internal error, 2 invalid input, 3 domain error,
// 4 certificate NotPD, 5 certificate Inconclusive. Errors go to stderr as one
// line of JSON: {"error": CODE, "message": TEXT}. SPHERECOV_SEED supplies the
// default seed.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spherecov/fields.hpp"
#include "spherecov/kernel_spec.hpp"
#include "spherecov/spherecov.hpp"
#include "spherecov/tabular.hpp"

namespace {

using namespace spherecov;
using json = nlohmann::json;
using tabular::format_number;

constexpr int exit_ok = 0;
constexpr int exit_internal = 1;
constexpr int exit_invalid = 2;
constexpr int exit_domain = 3;
constexpr int exit_not_pd = 4;
constexpr int exit_inconclusive = 5;

constexpr double tail_warning_threshold = 1e-6;

/// Raised for argument combinations that CLI11 cannot express.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void report(const std::string &code, const std::string &message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
}

int exit_code_for(errc code) {
  switch (code) {
    case errc::domain:
    case errc::geometry_mismatch:
    case errc::evaluation_failed:
    case errc::factorization_failed:
      return exit_domain;
    case errc::convergence_failed:
      return exit_internal;
    default:
      return exit_invalid;
  }
}

std::uint64_t default_seed() {
  if (const char *env = std::getenv("SPHERECOV_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception &) {
    }
    throw usage_error("SPHERECOV_SEED is not an unsigned integer");
  }
  return 0;
}

double parse_coordinate(const std::string &text, const char *name) {
  double v = 0.0;
  if (!tabular::parse_number(text, v)) {
    throw usage_error(std::string("--") + name + " is not a number: " + text);
  }
  return v;
}

std::vector<double> grid(std::size_t n, double lo, double hi) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string spec;
  std::optional<std::string> x, t, x1, x2;
  std::optional<std::size_t> grid;
  double tmax = 1.0;
};

int run_eval(const EvalArgs &a) {
  const AnyKernel kernel = spec::load(a.spec);
  std::ostringstream out;
  auto row = [&](std::initializer_list<std::string> cells) {
    bool first = true;
    for (const auto &c : cells) {
      out << (first ? "" : ",") << c;
      first = false;
    }
    out << '\n';
  };
  if (a.grid && *a.grid < 2) throw usage_error("--grid needs at least 2 points");

  std::visit(
      [&](const auto &k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SchoenbergSequence>) {
          if (a.t || a.x1 || a.x2) throw usage_error("sphere kernels take --x or --grid only");
          if (a.grid) {
            for (double x : grid(*a.grid, -1.0, 1.0)) {
              row({format_number(x), format_number(kernel_eval(k, x))});
            }
          } else if (a.x) {
            row({*a.x, format_number(kernel_eval(k, parse_coordinate(*a.x, "x")))});
          } else {
            throw usage_error("sphere kernels need --x or --grid");
          }
        } else if constexpr (std::is_same_v<K, SpaceTimeKernel>) {
          if (a.x1 || a.x2) throw usage_error("sphere_time kernels take --x and --t");
          if (a.grid) {
            const auto xs = grid(*a.grid, -1.0, 1.0);
            if (a.t) {
              const double t = parse_coordinate(*a.t, "t");
              for (double x : xs) {
                row({format_number(x), *a.t, format_number(st_kernel_eval(k, x, t))});
              }
            } else {
              for (double x : xs) {
                for (double t : grid(*a.grid, -a.tmax, a.tmax)) {
                  row({format_number(x), format_number(t), format_number(st_kernel_eval(k, x, t))});
                }
              }
            }
          } else if (a.x && a.t) {
            row({*a.x, *a.t,
                 format_number(st_kernel_eval(k, parse_coordinate(*a.x, "x"),
                                              parse_coordinate(*a.t, "t")))});
          } else {
            throw usage_error("sphere_time kernels need --x and --t, or --grid");
          }
        } else {
          if (a.x || a.t) throw usage_error("product_spheres kernels take --x1 and --x2");
          if (a.grid) {
            const auto xs = grid(*a.grid, -1.0, 1.0);
            for (double x1 : xs) {
              for (double x2 : xs) {
                row({format_number(x1), format_number(x2), format_number(ps_kernel_eval(k, x1, x2))});
              }
            }
          } else if (a.x1 && a.x2) {
            row({*a.x1, *a.x2,
                 format_number(ps_kernel_eval(k, parse_coordinate(*a.x1, "x1"),
                                              parse_coordinate(*a.x2, "x2")))});
          } else {
            throw usage_error("product_spheres kernels need --x1 and --x2, or --grid");
          }
        }
      },
      kernel);
  std::cout << out.str();
  return exit_ok;
}

// ---------------------------------------------------------------------------
// coeffs / certify

struct FunctionArgs {
  double lambda = 0.5;
  std::size_t nmax = 20;
  std::size_t quad_order = 0;
  std::optional<std::string> table;
  std::optional<std::string> expr;
  double delta = 0.4;
};

/// Built-in test functions of x = cos θ.
std::function<double(double)> builtin(const std::string &name, double lambda, double delta) {
  if (name == "x") return [](double x) { return x; };
  if (name == "negx") return [](double x) { return -x; };
  if (name == "xsquared") return [](double x) { return x * x; };
  if (name == "legendre3") return [](double x) { return 0.5 * (5.0 * x * x * x - 3.0 * x); };
  if (name == "exp") return [](double x) { return std::exp(x - 1.0); };
  if (name == "multiquadric") {
    if (!(delta > 0.0 && delta < 1.0)) throw error(errc::domain, "--delta must lie in (0, 1)");
    return [=](double x) { return multiquadric_closed_form(delta, lambda, x); };
  }
  throw usage_error("unknown --expr \"" + name +
                    "\" (known: x, negx, xsquared, legendre3, exp, multiquadric)");
}

std::function<double(double)> input_function(const FunctionArgs &a) {
  if (a.table.has_value() == a.expr.has_value()) {
    throw usage_error("give exactly one of --table and --expr");
  }
  if (a.expr) return builtin(*a.expr, a.lambda, a.delta);
  const auto rows = tabular::read_numeric_csv_file(*a.table, 2);
  auto f = tabular::TableFunction::from_rows(rows);
  if (f.nodes() < 2 * a.nmax) {
    throw error(errc::invalid_argument,
                "table has " + std::to_string(f.nodes()) + " nodes; at least 2 * nmax = " +
                    std::to_string(2 * a.nmax) + " are required");
  }
  return [f](double x) { return f(x); };
}

std::size_t quad_order_for(const FunctionArgs &a) {
  if (a.quad_order) return a.quad_order;
  return std::max<std::size_t>(2 * (a.nmax + 1), 128);
}

double tail_mass(const std::vector<double> &coeffs) {
  double s = 0.0;
  for (std::size_t n = (coeffs.size() - 1) / 2 + 1; n < coeffs.size(); ++n) s += std::abs(coeffs[n]);
  return s;
}

int run_coeffs(const FunctionArgs &a) {
  const auto basis = GegenbauerBasis::from_lambda(a.lambda);
  const auto g = input_function(a);
  const auto coeffs = recover_coefficients(g, basis, a.nmax, quad_order_for(a));
  std::ostringstream out;
  out << "n,a_n\n";
  for (std::size_t n = 0; n < coeffs.size(); ++n) out << n << ',' << format_number(coeffs[n]) << '\n';
  std::cout << out.str();
  const double tail = tail_mass(coeffs);
  if (tail > tail_warning_threshold) {
    std::cerr << json{{"warning", "TailMass"},
                      {"message", "coefficient mass beyond nmax/2 exceeds 1e-6"},
                      {"tail_mass", tail}}
                     .dump()
              << '\n';
  }
  return exit_ok;
}

struct CertifyArgs {
  FunctionArgs function;
  std::size_t gram_trials = 5;
  std::optional<std::uint64_t> seed;
  double coeff_tol = 1e-8;
  std::optional<double> eig_tol;
};

int run_certify(const CertifyArgs &a) {
  const auto basis = GegenbauerBasis::from_lambda(a.function.lambda);
  const auto g = input_function(a.function);
  CertifyOptions opt;
  opt.n_max = a.function.nmax;
  opt.quad_order = quad_order_for(a.function);
  opt.coeff_tol = a.coeff_tol;
  opt.eig_tol = a.eig_tol;
  opt.gram_trials = a.gram_trials;
  opt.seed = a.seed ? *a.seed : default_seed();
  const PDCertificate cert = certify(g, basis, opt);

  json doc;
  doc["verdict"] = std::string(to_string(cert.verdict));
  doc["reason"] = cert.reason;
  doc["lambda"] = basis.lambda();
  doc["n_max"] = opt.n_max;
  doc["coeff_tol"] = cert.coeff_tol;
  doc["eig_tol"] = cert.eig_tol;
  doc["gram_trials"] = cert.gram_trials;
  doc["seed"] = opt.seed;
  doc["coefficients"] = cert.coefficients.coefficients;
  doc["min_coefficient"] = {{"index", cert.coefficients.min_index},
                            {"value", cert.coefficients.min_coefficient}};
  doc["tail_mass"] = cert.coefficients.tail_mass;
  if (cert.gram) {
    doc["gram"] = {{"size", cert.gram->size},
                   {"min_eigenvalue", cert.gram->min_eigenvalue},
                   {"trial", cert.gram->trial},
                   {"point_seed", cert.gram->point_seed}};
  } else {
    doc["gram"] = nullptr;
  }
  if (cert.verdict == Verdict::not_pd) {
    if (cert.coefficients.min_coefficient < -cert.coeff_tol) {
      doc["witness"] = {{"type", "coefficient"},
                        {"index", cert.coefficients.min_index},
                        {"value", cert.coefficients.min_coefficient}};
    } else {
      doc["witness"] = {{"type", "gram"},
                        {"size", cert.gram->size},
                        {"min_eigenvalue", cert.gram->min_eigenvalue},
                        {"point_seed", cert.gram->point_seed}};
    }
  }
  std::cout << doc.dump() << '\n';
  switch (cert.verdict) {
    case Verdict::pd: return exit_ok;
    case Verdict::not_pd: return exit_not_pd;
    case Verdict::inconclusive: return exit_inconclusive;
  }
  return exit_internal;
}

// ---------------------------------------------------------------------------
// separable

int run_separable(const std::string &path, double tol) {
  const AnyKernel kernel = spec::load(path);
  json doc;
  std::visit(
      [&](const auto &k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SchoenbergSequence>) {
          throw usage_error("separability applies to sphere_time and product_spheres kernels");
        } else if constexpr (std::is_same_v<K, SpaceTimeKernel>) {
          const auto s = analyze_separability(k, tol);
          doc["kind"] = "sphere_time";
          doc["separable"] = s.separable;
          if (s.separable && s.common) {
            doc["charfn"] = spec::detail::charfn_json(*s.common);
          }
          if (s.witness) doc["witness"] = {{"terms", {s.witness->first, s.witness->second}}};
        } else {
          const auto r = separability_test(k, tol);
          doc["kind"] = "product_spheres";
          if (const auto *s = std::get_if<Separable>(&r)) {
            doc["separable"] = true;
            doc["factors"] = {{"b", std::vector<double>(s->b.data(), s->b.data() + s->b.size())},
                              {"c", std::vector<double>(s->c.data(), s->c.data() + s->c.size())}};
            doc["reconstruction_error"] = s->reconstruction_error;
          } else {
            const auto &w = std::get<NonSeparable>(r);
            doc["separable"] = false;
            doc["witness"] = {{"rows", {w.m, w.m2}}, {"cols", {w.n, w.n2}}, {"minor", w.minor}};
          }
        }
      },
      kernel);
  std::cout << doc.dump() << '\n';
  return exit_ok;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string spec;
  std::optional<std::string> points;
  std::optional<Eigen::Index> random;
  std::optional<std::uint64_t> seed;
  Eigen::Index samples = 1;
  std::string method = "factorized";
  std::optional<std::string> out;
  std::optional<double> jitter;
  std::optional<std::size_t> degree_cap;
};

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>> &rows, std::size_t from,
                          std::size_t count) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][from + j];
    }
  }
  return m;
}

std::string join_coordinates(const Eigen::MatrixXd &m, Eigen::Index i) {
  std::string s;
  for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? " " : "") + format_number(m(i, j));
  return s;
}

int run_simulate(const SimulateArgs &a) {
  const AnyKernel kernel = spec::load(a.spec);
  if (a.points.has_value() == a.random.has_value()) {
    throw usage_error("give exactly one of --points and --random");
  }
  if (a.method != "factorized" && a.method != "spectral") {
    throw usage_error("--method must be factorized or spectral");
  }
  if (a.samples < 1) throw usage_error("--samples must be >= 1");
  if (a.random && *a.random < 1) throw usage_error("--random must be >= 1");
  const std::uint64_t seed = a.seed ? *a.seed : default_seed();

  std::vector<std::vector<double>> rows;
  if (a.points) {
    rows = tabular::read_numeric_csv_file(*a.points, 0);
    if (rows.empty()) throw error(errc::invalid_argument, "points file has no rows");
  }
  const Eigen::Index count = a.random ? *a.random : static_cast<Eigen::Index>(rows.size());

  auto sphere_points = [&](int d, std::size_t from, std::uint64_t point_seed) {
    if (a.random) return uniform_sphere_points(d, count, point_seed);
    if (rows[0].size() < from + static_cast<std::size_t>(d) + 1) {
      throw error(errc::geometry_mismatch, "points file has too few columns for this kernel");
    }
    return SpherePointSet::normalized(d, to_matrix(rows, from, static_cast<std::size_t>(d) + 1));
  };
  auto require_columns = [&](std::size_t want) {
    if (a.points && rows[0].size() != want) {
      throw error(errc::geometry_mismatch, "points file has " + std::to_string(rows[0].size()) +
                                               " columns; this kernel needs " +
                                               std::to_string(want));
    }
  };

  FieldSample sample;
  std::vector<std::string> header;
  std::visit(
      [&](const auto &k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, SchoenbergSequence>) {
          const int d = k.basis().dimension();
          require_columns(static_cast<std::size_t>(d) + 1);
          const auto pts = sphere_points(d, 0, seed);
          for (Eigen::Index i = 0; i < pts.size(); ++i) header.push_back(join_coordinates(pts.coordinates(), i));
          if (a.method == "spectral") {
            sample = sample_spectral_s2(k, pts, a.samples, seed, a.degree_cap.value_or(k.truncation()));
          } else {
            sample = sample_factorized(k, pts, a.samples, seed, a.jitter);
          }
        } else if constexpr (std::is_same_v<K, SpaceTimeKernel>) {
          if (a.method == "spectral") throw error(errc::domain, "spectral sampling needs a sphere kernel on S^2");
          const int d = k.basis().dimension();
          require_columns(static_cast<std::size_t>(d) + 2);
          auto space = sphere_points(d, 0, seed);
          std::vector<double> times;
          if (a.random) {
            auto rng = rng_stream(seed, stream::times);
            for (Eigen::Index i = 0; i < count; ++i) times.push_back(rng.uniform());
          } else {
            for (const auto &r : rows) times.push_back(r.back());
          }
          const SpaceTimePointSet pts(std::move(space), std::move(times));
          for (Eigen::Index i = 0; i < pts.size(); ++i) {
            header.push_back(join_coordinates(pts.space.coordinates(), i) + " " +
                             format_number(pts.times[static_cast<std::size_t>(i)]));
          }
          sample = sample_factorized(k, pts, a.samples, seed, a.jitter);
        } else {
          if (a.method == "spectral") throw error(errc::domain, "spectral sampling needs a sphere kernel on S^2");
          const int d1 = k.first_basis().dimension();
          const int d2 = k.second_basis().dimension();
          require_columns(static_cast<std::size_t>(d1 + d2) + 2);
          auto first = sphere_points(d1, 0, seed);
          auto second = sphere_points(d2, static_cast<std::size_t>(d1) + 1,
                                      splitmix64(seed ^ stream::generic));
          const ProductPointSet pts(std::move(first), std::move(second));
          for (Eigen::Index i = 0; i < pts.size(); ++i) {
            header.push_back(join_coordinates(pts.first.coordinates(), i) + " " +
                             join_coordinates(pts.second.coordinates(), i));
          }
          sample = sample_factorized(k, pts, a.samples, seed, a.jitter);
        }
      },
      kernel);

  auto write = [&](std::ostream &os) {
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (Eigen::Index s = 0; s < sample.values.rows(); ++s) {
      for (Eigen::Index j = 0; j < sample.values.cols(); ++j) {
        os << (j ? "," : "") << format_number(sample.values(s, j));
      }
      os << '\n';
    }
  };
  if (a.out && *a.out != "-") {
    tabular::write_atomically(*a.out, write);
  } else {
    std::ostringstream buffer;
    write(buffer);
    std::cout << buffer.str();
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Isotropic positive definite kernels on spheres: evaluation, "
               "coefficients, certification, separability and simulation"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto *eval_cmd = app.add_subcommand("eval", "Evaluate a kernel spec; CSV rows on stdout");
  eval_cmd->add_option("spec", eval.spec, "Kernel spec (JSON)")->required();
  eval_cmd->add_option("--x", eval.x, "Cosine of the geodesic angle");
  eval_cmd->add_option("--t", eval.t, "Time lag (sphere_time)");
  eval_cmd->add_option("--x1", eval.x1, "First-factor cosine (product_spheres)");
  eval_cmd->add_option("--x2", eval.x2, "Second-factor cosine (product_spheres)");
  eval_cmd->add_option("--grid", eval.grid, "Uniform grid with N points per axis");
  eval_cmd->add_option("--tmax", eval.tmax, "Time-lag range [-T, T] for sphere_time grids");

  auto add_function_options = [](CLI::App *cmd, FunctionArgs &f) {
    cmd->add_option("--lambda", f.lambda, "Gegenbauer index (d - 1) / 2");
    cmd->add_option("--nmax", f.nmax, "Highest coefficient index");
    cmd->add_option("--quad-order", f.quad_order, "Quadrature order (default max(2 (nmax+1), 128))");
    cmd->add_option("--table", f.table, "CSV of (x, g(x)) samples covering [-1, 1]");
    cmd->add_option("--expr", f.expr, "Built-in: x, negx, xsquared, legendre3, exp, multiquadric");
    cmd->add_option("--delta", f.delta, "Parameter of the multiquadric built-in");
  };

  FunctionArgs coeffs;
  auto *coeffs_cmd = app.add_subcommand("coeffs", "Recover Schoenberg coefficients; CSV (n, a_n)");
  add_function_options(coeffs_cmd, coeffs);

  CertifyArgs cert;
  auto *certify_cmd = app.add_subcommand("certify", "Positive-definiteness certificate (JSON)");
  add_function_options(certify_cmd, cert.function);
  certify_cmd->add_option("--gram-trials", cert.gram_trials, "Random Gram-matrix trials");
  certify_cmd->add_option("--seed", cert.seed, "Seed (default $SPHERECOV_SEED or 0)");
  certify_cmd->add_option("--coeff-tol", cert.coeff_tol, "Coefficient tolerance");
  certify_cmd->add_option("--eig-tol", cert.eig_tol, "Eigenvalue tolerance (default 1e-8 * dim)");

  std::string sep_spec;
  double sep_tol = 1e-9;
  auto *sep_cmd = app.add_subcommand("separable", "Separability verdict (JSON)");
  sep_cmd->add_option("spec", sep_spec, "Kernel spec (JSON)")->required();
  sep_cmd->add_option("--tol", sep_tol, "Tolerance");

  SimulateArgs sim;
  auto *sim_cmd = app.add_subcommand("simulate", "Gaussian field realizations; CSV");
  sim_cmd->add_option("spec", sim.spec, "Kernel spec (JSON)")->required();
  sim_cmd->add_option("--points", sim.points, "CSV of point coordinates");
  sim_cmd->add_option("--random", sim.random, "Number of uniformly random points");
  sim_cmd->add_option("--seed", sim.seed, "Seed (default $SPHERECOV_SEED or 0)");
  sim_cmd->add_option("--samples", sim.samples, "Number of realizations")->required();
  sim_cmd->add_option("--method", sim.method, "factorized or spectral");
  sim_cmd->add_option("--out", sim.out, "Output CSV (default stdout)");
  sim_cmd->add_option("--jitter", sim.jitter, "Diagonal jitter (default 1e-10 trace/dim)");
  sim_cmd->add_option("--degree-cap", sim.degree_cap, "Spectral truncation degree");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    report("UsageError", e.what());
    return exit_invalid;
  }

  try {
    if (eval_cmd->parsed()) return run_eval(eval);
    if (coeffs_cmd->parsed()) return run_coeffs(coeffs);
    if (certify_cmd->parsed()) return run_certify(cert);
    if (sep_cmd->parsed()) {
      if (!(sep_tol > 0.0)) throw usage_error("--tol must be positive");
      return run_separable(sep_spec, sep_tol);
    }
    if (sim_cmd->parsed()) return run_simulate(sim);
  } catch (const usage_error &e) {
    report("UsageError", e.what());
    return exit_invalid;
  } catch (const spherecov::error &e) {
    report(std::string(to_string(e.code())), e.what());
    return exit_code_for(e.code());
  } catch (const std::exception &e) {
    report("InternalError", e.what());
    return exit_internal;
  }
  return exit_internal;
}
