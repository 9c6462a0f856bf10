#include "gaussact/cli.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gaussact/bimodule.hpp"
#include "gaussact/cohomology.hpp"
#include "gaussact/fock.hpp"
#include "gaussact/gaussian_dynamics.hpp"
#include "gaussact/group_rep.hpp"
#include "gaussact/wick.hpp"

namespace gaussact::cli {

namespace {

using nlohmann::json;
using fock::Complex;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kPi = 3.14159265358979323846;

/// JSON config with defaults, strict key/type checking and an echo of the
/// effective values.  Every key a suite reads is marked; finish() rejects
/// whatever the user supplied beyond that.
class Config {
 public:
  Config(const std::string& text, std::optional<std::uint64_t> seed_override) {
    json parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded())
      throw DomainError("config: not a valid JSON document");
    if (!parsed.is_object())
      throw DomainError("config: top level must be an object");
    user_ = std::move(parsed);
    if (seed_override) user_["seed"] = *seed_override;
  }

  std::uint64_t seed_value() {
    touched_.insert("seed");
    std::uint64_t value = 0;
    if (auto it = user_.find("seed"); it != user_.end()) {
      if (!it->is_number_integer() || (it->is_number_integer() &&
                                       !it->is_number_unsigned() &&
                                       it->get<long long>() < 0))
        throw DomainError("config: 'seed' must be a nonnegative integer");
      value = it->get<std::uint64_t>();
    }
    effective_["seed"] = value;
    return value;
  }

  int integer(const std::string& key, int def) {
    touched_.insert(key);
    int value = def;
    if (auto it = user_.find(key); it != user_.end()) {
      if (!it->is_number_integer())
        throw DomainError("config: '" + key + "' must be an integer");
      value = it->get<int>();
    }
    effective_[key] = value;
    return value;
  }

  double number(const std::string& key, double def) {
    touched_.insert(key);
    double value = def;
    if (auto it = user_.find(key); it != user_.end()) {
      if (!it->is_number())
        throw DomainError("config: '" + key + "' must be a number");
      value = it->get<double>();
    }
    effective_[key] = value;
    return value;
  }

  std::vector<double> number_list(const std::string& key,
                                  std::vector<double> def) {
    touched_.insert(key);
    std::vector<double> value = std::move(def);
    if (auto it = user_.find(key); it != user_.end()) {
      if (!it->is_array())
        throw DomainError("config: '" + key + "' must be an array of numbers");
      value.clear();
      for (const auto& entry : *it) {
        if (!entry.is_number())
          throw DomainError("config: '" + key +
                            "' must be an array of numbers");
        value.push_back(entry.get<double>());
      }
    }
    effective_[key] = value;
    return value;
  }

  std::vector<int> integer_list(const std::string& key, std::vector<int> def) {
    touched_.insert(key);
    std::vector<int> value = std::move(def);
    if (auto it = user_.find(key); it != user_.end()) {
      if (!it->is_array())
        throw DomainError("config: '" + key + "' must be an array of integers");
      value.clear();
      for (const auto& entry : *it) {
        if (!entry.is_number_integer())
          throw DomainError("config: '" + key +
                            "' must be an array of integers");
        value.push_back(entry.get<int>());
      }
    }
    effective_[key] = value;
    return value;
  }

  /// Reject unconsumed keys and return the effective config as JSON text.
  std::string finish() {
    for (auto it = user_.begin(); it != user_.end(); ++it)
      if (touched_.find(it.key()) == touched_.end())
        throw DomainError("config: unknown key '" + it.key() + "'");
    return effective_.dump(2);
  }

 private:
  json user_;
  json effective_ = json::object();
  std::set<std::string> touched_;
};

void add_check(SuiteReport& rep, std::string name, double residual,
               double tolerance) {
  CheckResult check;
  check.name = std::move(name);
  check.residual = residual;
  check.tolerance = tolerance;
  check.pass = residual <= tolerance;
  rep.checks.push_back(std::move(check));
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DomainError("failed writing " + path.string());
}

void add_table(SuiteReport& rep, const std::string& out_dir,
               const std::string& name, const dyn::DeformationReport& table) {
  const std::filesystem::path path =
      std::filesystem::path(out_dir) / (rep.suite + "_" + name + ".csv");
  write_file(path, dyn::deformation_report_to_csv(table));
  rep.tables[name] = path.string();
}

std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

MatrixXd rotation2(double theta) {
  MatrixXd r(2, 2);
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r;
}

/// Integers acting through a single orthogonal matrix.
grp::OrthogonalRep integer_rep(const MatrixXd& g) {
  return grp::OrthogonalRep{grp::GroupPresentation{1, {}}, {g}};
}

/// Rank-2 free group acting on R^d by commuting-block rotations chosen so
/// that no nonzero vector is fixed by both generators.
grp::OrthogonalRep free2_rep(int d) {
  grp::GroupPresentation free2{2, {}};
  MatrixXd g1 = MatrixXd::Identity(d, d);
  MatrixXd g2 = MatrixXd::Identity(d, d);
  if (d == 1) {
    g1(0, 0) = -1.0;
  } else {
    g1.block(0, 0, 2, 2) = rotation2(0.9);
    g2.block(d - 2, d - 2, 2, 2) = rotation2(0.4);
  }
  return grp::OrthogonalRep{free2, {g1, g2}};
}

/// The cocycle of the coboundary of eta: generator s maps to pi_s eta - eta.
coh::RepCocycle coboundary_of(const grp::OrthogonalRep& rep,
                              const VectorXd& eta) {
  coh::RepCocycle b{rep, {}};
  for (const auto& g : rep.generators) b.gen_values.push_back(g * eta - eta);
  return b;
}

double double_factorial_odd(int n) {
  double result = 1.0;
  for (int k = n - 1; k >= 1; k -= 2) result *= k;
  return result;
}

bim::Polynomial monomial(int n) {
  bim::Polynomial f{VectorXd::Zero(n + 1)};
  f.coeff[n] = 1.0;
  return f;
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

void suite_moments(Config& cfg, SuiteReport& rep, const std::string& out_dir,
                   bool) {
  const std::vector<int> dims = cfg.integer_list("dims", {1, 2, 3});
  const int max_degree = cfg.integer("max_degree", 5);
  const int max_power = cfg.integer("max_power", 8);
  const double tol = cfg.number("tol", 1e-10);

  for (int d : dims) {
    const fock::BasisPtr basis = fock::enumerate_basis(d, max_degree);
    Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(d);
    xi[0] = 1.0;
    dyn::DeformationReport table;
    double worst = 0.0;
    for (int n = 0; n <= max_power; ++n) {
      const double measured = wick::moment(basis, xi, n);
      const double predicted = (n % 2 == 1) ? 0.0 : double_factorial_odd(n);
      worst = std::max(worst, std::abs(measured - predicted));
      table.params.push_back(static_cast<double>(n));
      table.measured.emplace_back(measured, 0.0);
      table.predicted.emplace_back(predicted, 0.0);
    }
    table.max_abs_residual = worst;
    add_check(rep, "moments_d" + std::to_string(d), worst, tol);
    add_table(rep, out_dir, "moments_d" + std::to_string(d), table);
  }

  // Independence: orthogonal directions factorize mixed moments.
  const fock::BasisPtr basis = fock::enumerate_basis(2, max_degree);
  Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(2), e2 = Eigen::VectorXcd::Zero(2);
  e1[0] = 1.0;
  e2[1] = 1.0;
  double worst = 0.0;
  for (int m = 0; m <= max_power; ++m)
    for (int n = 0; m + n <= max_power; ++n) {
      const double mixed = wick::mixed_moment(basis, e1, m, e2, n);
      const double split =
          wick::moment(basis, e1, m) * wick::moment(basis, e2, n);
      worst = std::max(worst, std::abs(mixed - split));
    }
  add_check(rep, "independence_factorization", worst, tol);
}

void suite_cohomology(Config& cfg, SuiteReport& rep, const std::string&, bool) {
  const double sv_tol = cfg.number("sv_tol", 1e-9);
  const double fit_tol = cfg.number("fit_tol", 1e-9);
  const std::vector<int> free_dims = cfg.integer_list("free_dims", {1, 2, 3, 4});

  // Integers on the line with nothing moving: one cocycle, no coboundaries.
  const grp::OrthogonalRep line = integer_rep(MatrixXd::Identity(1, 1));
  add_check(rep, "integers_trivial_h1",
            std::abs(coh::h1(line, sv_tol).dimH1 - 1), 0.0);

  // Finite groups: first cohomology vanishes.
  const grp::OrthogonalRep sign{grp::GroupPresentation{1, {{1, 1}}},
                                {-MatrixXd::Identity(1, 1)}};
  add_check(rep, "cyclic2_sign_h1", std::abs(coh::h1(sign, sv_tol).dimH1), 0.0);

  const grp::OrthogonalRep quarter{grp::GroupPresentation{1, {{1, 1, 1, 1}}},
                                   {rotation2(kPi / 2)}};
  add_check(rep, "cyclic4_rotation_h1",
            std::abs(coh::h1(quarter, sv_tol).dimH1), 0.0);

  MatrixXd p01 = MatrixXd::Zero(3, 3), p12 = MatrixXd::Zero(3, 3);
  p01(0, 1) = p01(1, 0) = p01(2, 2) = 1.0;
  p12(0, 0) = p12(1, 2) = p12(2, 1) = 1.0;
  const grp::OrthogonalRep sym3{
      grp::GroupPresentation{2, {{1, 1}, {2, 2}, {1, 2, 1, 2, 1, 2}}},
      {p01, p12}};
  add_check(rep, "sym3_permutation_h1", std::abs(coh::h1(sym3, sv_tol).dimH1),
            0.0);

  // Free group of rank 2: cocycles are unconstrained generator values.
  int dim_defect = 0;
  for (int d : free_dims)
    dim_defect = std::max(
        dim_defect, std::abs(coh::h1(free2_rep(d), sv_tol).dimZ1 - 2 * d));
  add_check(rep, "free2_z1_dims", dim_defect, 0.0);

  // Planted coboundaries are recovered by the least-squares fit.
  {
    VectorXd eta(2);
    eta << 0.3, -1.1;
    const coh::CoboundaryFit fit =
        coh::coboundary_fit(coboundary_of(integer_rep(rotation2(1.0)), eta));
    add_check(rep, "coboundary_fit_integers",
              std::max(fit.max_residual, (fit.eta - eta).norm()), fit_tol);
  }
  {
    VectorXd eta(4);
    eta << 0.2, -0.7, 1.1, 0.4;
    const coh::CoboundaryFit fit =
        coh::coboundary_fit(coboundary_of(free2_rep(4), eta));
    add_check(rep, "coboundary_fit_free2",
              std::max(fit.max_residual, (fit.eta - eta).norm()), fit_tol);
  }
}

void suite_ps_trace(Config& cfg, SuiteReport& rep, const std::string& out_dir,
                    bool) {
  const std::vector<double> norms = cfg.number_list("norms", {0.5, 1.0, 2.0});
  const double tail_tol = cfg.number("tail_tol", 1e-8);
  const double tol = cfg.number("tol", 1e-6);

  const grp::OrthogonalRep line = integer_rep(MatrixXd::Identity(1, 1));
  dyn::DeformationReport table;
  for (double norm : norms) {
    const int degree = dyn::truncation_budget(norm, tail_tol);
    const dyn::GaussianActionCtx ctx = dyn::make_context(line, degree);
    const coh::RepCocycle b{line, {norm * VectorXd::Ones(1)}};
    const Complex measured =
        dyn::vacuum_expectation(dyn::ps_cocycle(ctx, b, {1}));
    const double predicted = std::exp(-norm * norm / 2.0);
    const double residual = std::abs(measured - Complex(predicted, 0.0));
    table.params.push_back(norm);
    table.measured.push_back(measured);
    table.predicted.emplace_back(predicted, 0.0);
    table.max_abs_residual = std::max(table.max_abs_residual, residual);
    add_check(rep, "ps_trace_norm_" + short_number(norm), residual, tol);
  }
  add_table(rep, out_dir, "trace", table);
}

void suite_deformation_decay(Config& cfg, SuiteReport& rep,
                             const std::string& out_dir, bool parallel) {
  const std::vector<double> norms = cfg.number_list("norms", {0.5, 1.0, 2.0});
  const std::vector<double> t_grid = cfg.number_list(
      "t_grid", {0.0, kPi / 4, kPi / 2, 3 * kPi / 4, kPi});
  const int max_degree = cfg.integer("max_degree", 20);
  const int low_degree = cfg.integer("low_degree", 12);
  const int high_degree = cfg.integer("high_degree", 16);
  const double tol = cfg.number("tol", 1e-5);

  const grp::OrthogonalRep line = integer_rep(MatrixXd::Identity(1, 1));
  const dyn::GaussianActionCtx base = dyn::make_context(line, 4);
  const dyn::DoubledCtx deep = dyn::make_doubled(base, max_degree);
  const dyn::DoubledCtx low = dyn::make_doubled(base, low_degree);
  const dyn::DoubledCtx high = dyn::make_doubled(base, high_degree);

  struct NormOutcome {
    dyn::DeformationReport table;
    double worst = 0.0;
    double monotone_defect = 0.0;
  };
  std::vector<NormOutcome> outcomes(norms.size());

  auto run_norm = [&](std::size_t i) {
    const double norm = norms[i];
    const coh::RepCocycle b{line, {norm * VectorXd::Ones(1)}};
    NormOutcome& out = outcomes[i];
    for (double t : t_grid) {
      const Complex measured = dyn::deformation_correlation(deep, b, {1}, t);
      const double predicted = dyn::deformation_prediction(norm, t);
      const double residual = std::abs(measured - Complex(predicted, 0.0));
      out.worst = std::max(out.worst, residual);
      out.table.params.push_back(t);
      out.table.measured.push_back(measured);
      out.table.predicted.emplace_back(predicted, 0.0);
      out.table.max_abs_residual = std::max(out.table.max_abs_residual,
                                            residual);
      // Truncation-convergence pair, run below the exponential's mass
      // budget on purpose.
      const double r_low = std::abs(
          dyn::deformation_correlation(low, b, {1}, t, false) -
          Complex(predicted, 0.0));
      const double r_high = std::abs(
          dyn::deformation_correlation(high, b, {1}, t, false) -
          Complex(predicted, 0.0));
      out.monotone_defect = std::max(out.monotone_defect, r_high - r_low);
    }
  };

  if (parallel) {
    std::vector<std::thread> pool;
    pool.reserve(norms.size());
    for (std::size_t i = 0; i < norms.size(); ++i)
      pool.emplace_back(run_norm, i);
    for (auto& worker : pool) worker.join();
  } else {
    for (std::size_t i = 0; i < norms.size(); ++i) run_norm(i);
  }

  double worst = 0.0;
  double monotone = 0.0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    worst = std::max(worst, outcomes[i].worst);
    monotone = std::max(monotone, outcomes[i].monotone_defect);
    add_table(rep, out_dir, "norm_" + short_number(norms[i]),
              outcomes[i].table);
  }
  add_check(rep, "decay_matches_prediction", worst, tol);
  add_check(rep, "truncation_monotone", monotone, 1e-14);
}

void suite_semigroup(Config& cfg, SuiteReport& rep, const std::string& out_dir,
                     bool) {
  const int modes = cfg.integer("modes", 4);
  const int max_degree = cfg.integer("max_degree", 5);
  const double t = cfg.number("t", 0.3);
  const double s = cfg.number("s", 0.45);
  const double alpha = cfg.number("alpha", 1.0);
  const double tol_law = cfg.number("tol_law", 1e-12);
  const double tol_formula = cfg.number("tol_formula", 1e-10);

  const fock::BasisPtr basis = fock::enumerate_basis(modes, max_degree);

  // Semigroup law.
  const auto phi_t = dyn::ou_semigroup(basis, t);
  const auto phi_s = dyn::ou_semigroup(basis, s);
  const auto phi_ts = dyn::ou_semigroup(basis, t + s);
  add_check(rep, "semigroup_law", (phi_t.mat * phi_s.mat - phi_ts.mat).norm(),
            tol_law);

  // Resolvent multiplier on each degree block.
  const auto resolvent = dyn::ou_resolvent(basis, alpha);
  double multiplier_defect = 0.0;
  for (int k = 0; k <= max_degree; ++k) {
    const auto i = static_cast<Eigen::Index>(basis->degree_offset(k));
    multiplier_defect = std::max(
        multiplier_defect, std::abs(resolvent.mat(i, i) -
                                    Complex(std::sqrt(alpha / (alpha + k)), 0.0)));
  }
  add_check(rep, "resolvent_multiplier", multiplier_defect, 1e-14);

  // Both multipliers commute with the lifted action entrywise.
  MatrixXd g = MatrixXd::Identity(modes, modes);
  g.block(0, 0, 2, 2) = rotation2(0.7);
  if (modes >= 4) g.block(2, 2, 2, 2) = rotation2(0.4);
  const dyn::GaussianActionCtx ctx = dyn::make_context(integer_rep(g),
                                                       max_degree);
  const auto lift = dyn::gaussian_action(ctx, {1});
  const double commutation = std::max(
      (phi_t.mat * lift.mat - lift.mat * phi_t.mat).norm(),
      (resolvent.mat * lift.mat - lift.mat * resolvent.mat).norm());
  add_check(rep, "action_commutation", commutation, 0.0);

  // Heat flow on products of fields in pairwise-orthogonal directions:
  // pure multiplication by e^{-kt}.
  dyn::DeformationReport table;
  double formula_defect = 0.0;
  const int top = std::min(modes, max_degree - 1);
  for (int k = 1; k <= top; ++k) {
    std::vector<Eigen::VectorXcd> factors;
    for (int i = 0; i < k; ++i) {
      Eigen::VectorXcd e = Eigen::VectorXcd::Zero(modes);
      e[i] = 1.0;
      factors.push_back(e);
    }
    const fock::FockVector v = fock::symmetric_tensor(basis, factors);
    const fock::FockVector heated = phi_t.apply(v);
    const double scale = std::exp(-k * t);
    const fock::FockVector defect{basis, heated.coeff - scale * v.coeff};
    formula_defect = std::max(formula_defect, defect.norm());
    const Complex ratio = fock::inner_product(heated, v) /
                          fock::inner_product(v, v);
    table.params.push_back(static_cast<double>(k));
    table.measured.push_back(ratio);
    table.predicted.emplace_back(scale, 0.0);
    table.max_abs_residual =
        std::max(table.max_abs_residual, std::abs(ratio - Complex(scale, 0.0)));
  }
  add_check(rep, "orthogonal_product_scaling", formula_defect, tol_formula);
  add_table(rep, out_dir, "heat_multipliers", table);
}

void suite_smooth_identity(Config& cfg, SuiteReport& rep, const std::string&,
                           bool) {
  const std::uint64_t seed = cfg.seed_value();
  const int count = cfg.integer("count", 10);
  const int max_dim = cfg.integer("max_dim", 6);
  const std::vector<double> t_grid = cfg.number_list("t_grid", {0.1, 1.0});
  const double tol = cfg.number("tol", 1e-6);
  if (max_dim < 2) throw DomainError("config: 'max_dim' must be at least 2");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double worst_identity = 0.0;
  double worst_derivative = 0.0;
  for (int i = 0; i < count; ++i) {
    const int n = 2 + i % (max_dim - 1);
    MatrixXd a(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) a(r, c) = gauss(rng);
    const MatrixXd skew = 0.5 * (a - a.transpose());
    for (double t : t_grid) {
      const dyn::SmoothingResult result = dyn::smooth_by_kernel(skew, t);
      worst_identity = std::max(worst_identity, result.identity_residual);
      worst_derivative = std::max(worst_derivative, result.derivative_residual);
    }
  }
  add_check(rep, "smoothing_identity", worst_identity, tol);
  add_check(rep, "smoothing_derivative", worst_derivative, tol);
}

void suite_malleable_torus(Config& cfg, SuiteReport& rep, const std::string&,
                           bool) {
  const double t = cfg.number("t", 0.37);
  const int torus_n = cfg.integer("torus_n", 256);
  const std::vector<double> torus_t_grid =
      cfg.number_list("torus_t_grid", {0.37, 1.0, 2.0});
  const double tol = cfg.number("tol", 1e-12);

  const dyn::GaussianActionCtx base =
      dyn::make_context(integer_rep(rotation2(0.7)), 4);
  const dyn::DoubledCtx dctx = dyn::make_doubled(base, 4);
  const dyn::MalleabilityReport axioms = dyn::malleability_axioms(dctx, t);
  add_check(rep, "rotation_axioms",
            std::max({axioms.group_law, axioms.mirror_matrix,
                      axioms.mirror_lifted}),
            tol);
  add_check(rep, "rotation_flip_orthogonality", axioms.flip_orthogonality, 0.0);

  const dyn::TorusGrid grid = dyn::make_torus_grid(torus_n);
  double worst = 0.0;
  for (double tt : torus_t_grid)
    worst = std::max(worst, dyn::torus_deformation(grid, tt).max_residual());
  add_check(rep, "torus_identities", worst, tol);
}

void suite_bimodule(Config& cfg, SuiteReport& rep, const std::string& out_dir,
                    bool) {
  const std::uint64_t seed = cfg.seed_value();
  const int base_dim = cfg.integer("base_dim", 2);
  const int max_degree = cfg.integer("max_degree", 8);
  const int isometry_count = cfg.integer("isometry_count", 100);
  const int mc_samples = cfg.integer("mc_samples", 1'000'000);
  const double commutation_tol = cfg.number("commutation_tol", 1e-10);
  const double isometry_tol = cfg.number("isometry_tol", 1e-12);
  const double rotation_tol = cfg.number("rotation_tol", 1e-8);
  if (mc_samples < 2)
    throw DomainError("config: 'mc_samples' must be at least 2");

  const bim::BimoduleCtx ctx = bim::make_bimodule(base_dim, max_degree);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  auto random_vec = [&](int d) {
    VectorXd v(d);
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    return v;
  };

  // Left and right actions commute below the truncation boundary.
  {
    const VectorXd xi = random_vec(base_dim);
    const VectorXd zeta = random_vec(base_dim);
    const MatrixXd left = bim::left_block(ctx, xi);
    double worst = 0.0;
    for (int n = 0; n < base_dim; ++n) {
      const MatrixXd right = bim::right_block(ctx, zeta, n);
      const MatrixXd comm = left * right - right * left;
      for (std::size_t j = 0; j < ctx.leg->size(); ++j)
        if (ctx.leg->state(j).degree() <= max_degree - 2)
          worst = std::max(
              worst, comm.col(static_cast<Eigen::Index>(j)).norm());
    }
    add_check(rep, "left_right_commutation", worst, commutation_tol);
  }

  // The derivation is isometric on single fields.
  {
    double worst = 0.0;
    for (int i = 0; i < isometry_count; ++i) {
      const VectorXd xi = random_vec(base_dim);
      worst = std::max(worst, std::abs(bim::field_word_derivation(ctx, {xi})
                                           .norm() -
                                       xi.norm()));
    }
    add_check(rep, "derivation_isometry", worst, isometry_tol);
  }

  // Covariance under base rotations: permutations exactly, rotations to
  // rounding at matched truncation.
  {
    std::vector<VectorXd> word = {VectorXd::Unit(base_dim, 0),
                                  VectorXd::Unit(base_dim, 1 % base_dim),
                                  VectorXd::Unit(base_dim, 0)};
    MatrixXd swap = MatrixXd::Identity(base_dim, base_dim);
    if (base_dim >= 2) {
      swap(0, 0) = swap(1, 1) = 0.0;
      swap(0, 1) = swap(1, 0) = 1.0;
    }
    add_check(rep, "covariance_permutation",
              bim::covariance_residual(ctx, swap, word), 0.0);
    MatrixXd rot = MatrixXd::Identity(base_dim, base_dim);
    rot.block(0, 0, 2, 2) = rotation2(0.7);
    add_check(rep, "covariance_rotation",
              bim::covariance_residual(
                  ctx, rot,
                  {VectorXd::Unit(base_dim, 0), VectorXd::Unit(base_dim, 1)}),
              rotation_tol);
  }

  // Divided-difference Leibniz rule, coefficient-exact through degree 8.
  {
    double worst = 0.0;
    for (int a = 0; a <= 8; ++a)
      for (int b = 0; a + b <= 8; ++b) {
        const bim::Bivariate product =
            bim::difference_quotient(bim::multiply(monomial(a), monomial(b)));
        const bim::Bivariate fx =
            bim::mul_x(monomial(a), bim::difference_quotient(monomial(b)));
        const bim::Bivariate gy =
            bim::mul_y(bim::difference_quotient(monomial(a)), monomial(b));
        const auto rows = std::max({product.coeff.rows(), fx.coeff.rows(),
                                    gy.coeff.rows()});
        const auto cols = std::max({product.coeff.cols(), fx.coeff.cols(),
                                    gy.coeff.cols()});
        MatrixXd diff = MatrixXd::Zero(rows, cols);
        diff.topLeftCorner(product.coeff.rows(), product.coeff.cols()) +=
            product.coeff;
        diff.topLeftCorner(fx.coeff.rows(), fx.coeff.cols()) -= fx.coeff;
        diff.topLeftCorner(gy.coeff.rows(), gy.coeff.cols()) -= gy.coeff;
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
      }
    add_check(rep, "divided_difference_leibniz", worst, 0.0);
  }

  // Gaussian energy form: quadrature against Monte Carlo, and the
  // closed-form values for low monomials.
  {
    const double exact = bim::dirichlet_form(monomial(3));
    const bim::MonteCarloEstimate mc = bim::dirichlet_form_mc(
        monomial(3), static_cast<std::size_t>(mc_samples), seed);
    add_check(rep, "dirichlet_quadrature_vs_mc", std::abs(exact - mc.mean),
              3.0 * mc.std_error);

    dyn::DeformationReport table;
    const double predicted[] = {1.0, 2.0, 9.0, 48.0};
    for (int n = 1; n <= 4; ++n) {
      const double measured = bim::dirichlet_form(monomial(n));
      table.params.push_back(static_cast<double>(n));
      table.measured.emplace_back(measured, 0.0);
      table.predicted.emplace_back(predicted[n - 1], 0.0);
      table.max_abs_residual = std::max(table.max_abs_residual,
                                        std::abs(measured - predicted[n - 1]));
    }
    add_table(rep, out_dir, "dirichlet", table);
    add_check(rep, "dirichlet_closed_forms", table.max_abs_residual, 1e-10);
  }
}

void suite_invariant_unitary(Config& cfg, SuiteReport& rep, const std::string&,
                             bool) {
  const int max_degree = cfg.integer("max_degree", 10);
  const double lambda = cfg.number("lambda", 0.5);
  const double tol_invariance = cfg.number("tol_invariance", 1e-6);
  const double tol_unitarity = cfg.number("tol_unitarity", 1e-11);
  const double trace_margin = cfg.number("trace_margin", 1e-3);

  const dyn::GaussianActionCtx ctx =
      dyn::make_context(integer_rep(rotation2(1.0)), max_degree);
  const auto u =
      dyn::invariant_unitary(ctx, MatrixXd::Identity(2, 2), lambda);

  const Eigen::MatrixXcd gram = wick::weighted_adjoint(u).mat * u.mat;
  add_check(rep, "weighted_unitarity",
            (gram - Eigen::MatrixXcd::Identity(
                        static_cast<Eigen::Index>(ctx.basis->size()),
                        static_cast<Eigen::Index>(ctx.basis->size())))
                .norm(),
            tol_unitarity);

  const auto forward = dyn::gaussian_action(ctx, {1});
  const auto backward = dyn::gaussian_action(ctx, {-1});
  const wick::FockOperator moved{
      ctx.basis, forward.mat * u.mat * backward.mat - u.mat};
  add_check(rep, "lifted_invariance", wick::weighted_operator_norm(moved),
            tol_invariance);

  add_check(rep, "trace_nontrivial",
            std::abs(dyn::vacuum_expectation(u)), 1.0 - trace_margin);
}

using SuiteFn = void (*)(Config&, SuiteReport&, const std::string&, bool);

const std::map<std::string, SuiteFn>& suite_table() {
  static const std::map<std::string, SuiteFn> table = {
      {"moments", suite_moments},
      {"cohomology", suite_cohomology},
      {"ps-trace", suite_ps_trace},
      {"deformation-decay", suite_deformation_decay},
      {"semigroup", suite_semigroup},
      {"smooth-identity", suite_smooth_identity},
      {"malleable-torus", suite_malleable_torus},
      {"bimodule", suite_bimodule},
      {"invariant-unitary", suite_invariant_unitary},
  };
  return table;
}

std::string known_suites() {
  std::string names;
  for (const auto& name : suite_names()) {
    if (!names.empty()) names += ", ";
    names += name;
  }
  return names;
}

}  // namespace

bool SuiteReport::all_pass() const {
  for (const auto& check : checks)
    if (!check.pass) return false;
  return true;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "moments",        "cohomology",      "ps-trace",
      "deformation-decay", "semigroup",    "smooth-identity",
      "malleable-torus",   "bimodule",     "invariant-unitary"};
  return names;
}

CliArgs parse_args(const std::vector<std::string>& args) {
  CliArgs parsed;
  std::uint64_t seed_value = 0;
  CLI::App app{"check-suite runner"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "execute one suite, or 'all'");
  run->add_option("suite", parsed.suite, "suite name")->required();
  run->add_option("--config", parsed.config_path, "JSON config file")
      ->required();
  run->add_option("--out", parsed.out_dir, "directory for reports and tables");
  run->add_flag("--parallel", parsed.parallel,
                "evaluate grid points concurrently");
  const CLI::Option* seed_opt =
      run->add_option("--seed", seed_value, "override the config seed");
  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    throw DomainError(
        std::string(e.what()) +
        "; usage: run <suite> --config <path> [--out <dir>] [--parallel] "
        "[--seed <n>]");
  }
  if (seed_opt->count() > 0) parsed.seed = seed_value;
  return parsed;
}

SuiteReport run_suite(const std::string& suite, const std::string& config_text,
                      const std::string& out_dir, bool parallel,
                      std::optional<std::uint64_t> seed_override) {
  const auto it = suite_table().find(suite);
  if (it == suite_table().end())
    throw DomainError("unknown suite '" + suite + "'; expected one of: " +
                      known_suites());
  Config cfg(config_text, seed_override);
  SuiteReport rep;
  rep.suite = suite;
  std::filesystem::create_directories(out_dir.empty() ? "." : out_dir);
  it->second(cfg, rep, out_dir.empty() ? "." : out_dir, parallel);
  rep.config_echo = cfg.finish();
  return rep;
}

std::string report_to_json(const SuiteReport& report) {
  json j;
  j["suite"] = report.suite;
  j["config"] = json::parse(report.config_echo);
  j["checks"] = json::array();
  for (const auto& check : report.checks) {
    json entry;
    entry["name"] = check.name;
    entry["pass"] = check.pass;
    entry["residual"] = check.residual;
    entry["tolerance"] = check.tolerance;
    j["checks"].push_back(entry);
  }
  j["tables"] = json::object();
  for (const auto& [name, path] : report.tables) j["tables"][name] = path;
  return j.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args) {
  try {
    const CliArgs parsed = parse_args(args);

    std::ifstream in(parsed.config_path, std::ios::binary);
    if (!in)
      throw DomainError("cannot read config file '" + parsed.config_path + "'");
    std::string config_text((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());

    std::vector<std::pair<std::string, std::string>> work;
    if (parsed.suite == "all") {
      // Sectioned config: keys are suite names, each mapping to that
      // suite's config object.
      json top = json::parse(config_text, nullptr, false);
      if (top.is_discarded())
        throw DomainError("config: not a valid JSON document");
      if (!top.is_object())
        throw DomainError("config: top level must be an object");
      for (auto it = top.begin(); it != top.end(); ++it) {
        if (suite_table().find(it.key()) == suite_table().end())
          throw DomainError("config: unknown suite section '" + it.key() +
                            "'; expected one of: " + known_suites());
        if (!it.value().is_object())
          throw DomainError("config: section '" + it.key() +
                            "' must be an object");
      }
      for (const auto& name : suite_names()) {
        const json section =
            top.contains(name) ? top[name] : json::object();
        work.emplace_back(name, section.dump());
      }
    } else {
      work.emplace_back(parsed.suite, config_text);
    }

    bool all_pass = true;
    for (const auto& [name, text] : work) {
      const SuiteReport rep =
          run_suite(name, text, parsed.out_dir, parsed.parallel, parsed.seed);
      const std::filesystem::path report_path =
          std::filesystem::path(parsed.out_dir.empty() ? "." : parsed.out_dir) /
          (name + "_report.json");
      write_file(report_path, report_to_json(rep));
      for (const auto& check : rep.checks) {
        char line[160];
        std::snprintf(line, sizeof line, "[%s] %s: %s (residual %.3g, tolerance %.3g)",
                      name.c_str(), check.name.c_str(),
                      check.pass ? "PASS" : "FAIL", check.residual,
                      check.tolerance);
        std::cout << line << "\n";
      }
      std::cout << "[" << name << "] report: " << report_path.string() << "\n";
      all_pass = all_pass && rep.all_pass();
    }
    std::cout << (all_pass ? "all checks passed" : "some checks FAILED")
              << "\n";
    return all_pass ? kExitPass : kExitCheckFailure;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return kExitResourceCap;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace gaussact::cli
