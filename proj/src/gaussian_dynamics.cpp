#include "gaussact/gaussian_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace gaussact::dyn {

namespace {

constexpr double kPi = 3.14159265358979323846;

/// %.17g rendering: shortest-or-full round-trip, byte-stable across runs.
std::string format_double(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", x);
  return buffer;
}

}  // namespace

GaussianActionCtx make_context(const grp::OrthogonalRep& pi, int max_degree,
                               FieldConvention conv, std::size_t cap) {
  grp::RepCheckReport report = grp::rep_check(pi);
  if (!report.pass()) {
    throw DomainError(
        "make_context: representation fails orthogonality/relator check "
        "(orthogonality " +
        std::to_string(report.orthogonality_residual) + ", worst relator " +
        std::to_string(report.max_relator_residual) + ")");
  }
  return GaussianActionCtx{pi, fock::enumerate_basis(pi.dim(), max_degree, cap),
                           conv};
}

FockOperator gaussian_action(const GaussianActionCtx& ctx, const grp::Word& w) {
  return wick::second_quantize(ctx.basis, grp::evaluate(ctx.pi, w));
}

int truncation_budget(double norm, double tail_tol) {
  if (norm < 0.0) throw DomainError("truncation_budget: negative norm");
  if (tail_tol <= 0.0) throw DomainError("truncation_budget: tolerance <= 0");
  double lambda = 0.5 * norm * norm;
  double term = std::exp(-lambda);
  double mass = term;
  int degree = 0;
  while (1.0 - mass > tail_tol) {
    if (++degree > 400) {
      throw ResourceError("truncation_budget: tail does not close by 400");
    }
    term *= lambda / degree;
    mass += term;
  }
  return degree;
}

namespace {

/// exp(-i s(value)) without a budget check (used for derived words, whose
/// truncation error is what the caller is measuring).
FockOperator exp_of_field(const BasisPtr& basis, const Eigen::VectorXd& value,
                          const FieldConvention& conv) {
  FockOperator s = wick::field(basis, fock::to_complex(value), conv);
  return wick::op_exp(s, Complex(0.0, -1.0));
}

}  // namespace

FockOperator ps_cocycle(const GaussianActionCtx& ctx, const coh::RepCocycle& b,
                        const grp::Word& w) {
  if (b.rep.dim() != ctx.pi.dim() ||
      b.rep.presentation.generator_count !=
          ctx.pi.presentation.generator_count) {
    throw DomainError("ps_cocycle: cocycle and context representations differ");
  }
  Eigen::VectorXd value = coh::extend(b, w);
  int required = truncation_budget(value.norm());
  if (ctx.basis->max_degree() < required) {
    throw DomainError("ps_cocycle: truncation degree " +
                      std::to_string(ctx.basis->max_degree()) +
                      " below budget; needs max_degree >= " +
                      std::to_string(required) + " for value norm " +
                      std::to_string(value.norm()));
  }
  return exp_of_field(ctx.basis, value, ctx.conv);
}

Complex vacuum_expectation(const FockOperator& op) { return op.mat(0, 0); }

double cocycle_identity_residual(const GaussianActionCtx& ctx,
                                 const coh::RepCocycle& b, const grp::Word& w1,
                                 const grp::Word& w2) {
  // The budget precondition covers the input words; the concatenation is a
  // derived quantity whose truncation tail is part of the measured residual.
  FockOperator left = ps_cocycle(ctx, b, w1);
  FockOperator joint =
      exp_of_field(ctx.basis, coh::extend(b, grp::concat(w1, w2)), ctx.conv);
  FockOperator right = ps_cocycle(ctx, b, w2);
  FockOperator act = gaussian_action(ctx, w1);
  FockOperator act_inv = gaussian_action(ctx, grp::inverse(w1));

  Eigen::MatrixXcd composed =
      left.mat * (act.mat * right.mat * act_inv.mat);
  Eigen::VectorXcd diff = (joint.mat - composed).col(0);  // applied to vacuum
  int keep = ctx.basis->max_degree() / 2;
  double sum = 0.0;
  std::size_t limit = ctx.basis->degree_offset(keep + 1);
  for (std::size_t i = 0; i < limit; ++i) {
    sum += std::norm(diff(static_cast<Eigen::Index>(i))) * ctx.basis->weight(i);
  }
  return std::sqrt(sum);
}

DoubledCtx make_doubled(const GaussianActionCtx& base, int max_degree,
                        std::size_t cap) {
  int d = base.pi.dim();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * d, 2 * d);
  j.topRightCorner(d, d) = Eigen::MatrixXd::Identity(d, d);
  j.bottomLeftCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd rho = Eigen::MatrixXd::Identity(2 * d, 2 * d);
  rho.bottomRightCorner(d, d) = -Eigen::MatrixXd::Identity(d, d);
  return DoubledCtx{base, fock::enumerate_basis(2 * d, max_degree, cap), j,
                    rho};
}

Eigen::MatrixXd theta(const DoubledCtx& dctx, double t) {
  int n = static_cast<int>(dctx.J.rows());
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  if (t == std::nearbyint(t) && std::abs(t) < 1e15) {
    // Quarter-turn fast path: cos/sin of pi/2 multiples without rounding.
    long long quarter = static_cast<long long>(std::nearbyint(t)) % 4;
    if (quarter < 0) quarter += 4;
    switch (quarter) {
      case 0: return id;
      case 1: return dctx.J;
      case 2: return -id;
      default: return -dctx.J;
    }
  }
  return std::cos(kPi * t / 2.0) * id + std::sin(kPi * t / 2.0) * dctx.J;
}

double MalleabilityReport::max_residual() const {
  return std::max(std::max(group_law, mirror_matrix),
                  std::max(mirror_lifted, flip_orthogonality));
}

MalleabilityReport malleability_axioms(const DoubledCtx& dctx, double t) {
  MalleabilityReport report;
  for (double s : {t, 0.25, 1.0 - t}) {
    report.group_law = std::max(
        report.group_law,
        (theta(dctx, t) * theta(dctx, s) - theta(dctx, t + s)).norm());
  }
  Eigen::MatrixXd lhs = dctx.rho * theta(dctx, -t);
  Eigen::MatrixXd rhs = theta(dctx, t) * dctx.rho;
  report.mirror_matrix = (lhs - rhs).norm();

  FockOperator mirror = wick::second_quantize(dctx.doubled, dctx.rho);
  FockOperator back = wick::second_quantize(dctx.doubled, theta(dctx, -t));
  FockOperator fore = wick::second_quantize(dctx.doubled, theta(dctx, t));
  FockOperator lifted_diff{dctx.doubled,
                           mirror.mat * back.mat - fore.mat * mirror.mat};
  report.mirror_lifted = wick::weighted_operator_norm(lifted_diff);

  // theta_1 carries the first leg onto the second: every lifted image of a
  // positive-degree first-leg state is orthogonal to all first-leg states.
  FockOperator flip = wick::second_quantize(dctx.doubled, theta(dctx, 1.0));
  int d = dctx.base.pi.dim();
  int probe_degree = std::min(dctx.doubled->max_degree(), 3);
  std::vector<std::size_t> first_leg;
  std::size_t limit = dctx.doubled->degree_offset(probe_degree + 1);
  for (std::size_t i = dctx.doubled->degree_offset(1); i < limit; ++i) {
    const auto& counts = dctx.doubled->state(i).counts;
    bool first_only = true;
    for (int mode = d; mode < 2 * d; ++mode) {
      if (counts[mode] != 0) first_only = false;
    }
    if (first_only) first_leg.push_back(i);
  }
  for (std::size_t col : first_leg) {
    for (std::size_t row : first_leg) {
      double overlap =
          std::abs(flip.mat(static_cast<Eigen::Index>(row),
                            static_cast<Eigen::Index>(col))) *
          dctx.doubled->weight(row);
      report.flip_orthogonality = std::max(report.flip_orthogonality, overlap);
    }
  }
  return report;
}

Complex deformation_correlation(const DoubledCtx& dctx, const coh::RepCocycle& b,
                                const grp::Word& w, double t,
                                bool enforce_budget) {
  Eigen::VectorXd value = coh::extend(b, w);
  int required = truncation_budget(value.norm());
  if (enforce_budget && dctx.doubled->max_degree() < required) {
    throw DomainError("deformation_correlation: needs max_degree >= " +
                      std::to_string(required) + " for value norm " +
                      std::to_string(value.norm()));
  }
  int d = dctx.base.pi.dim();
  Eigen::VectorXd embedded = Eigen::VectorXd::Zero(2 * d);
  embedded.head(d) = value;
  FockOperator s =
      wick::field(dctx.doubled, fock::to_complex(embedded), dctx.base.conv);
  FockOperator omega = wick::op_exp(s, Complex(0.0, -1.0));
  FockVector state = omega.apply(fock::vacuum(dctx.doubled));

  // exp(tJ) in closed form: J^2 = -I.
  Eigen::MatrixXd rot = std::cos(t) * Eigen::MatrixXd::Identity(2 * d, 2 * d) +
                        std::sin(t) * dctx.J;
  FockOperator lift = wick::second_quantize(dctx.doubled, rot);
  return fock::inner_product(lift.apply(state), state);
}

double deformation_prediction(double norm, double t) {
  return std::exp(-(1.0 - std::cos(t)) * norm * norm);
}

FockOperator ou_semigroup(const BasisPtr& basis, double t) {
  if (t < 0.0) throw DomainError("ou_semigroup: negative time");
  FockOperator op{basis, Eigen::MatrixXcd::Zero(basis->size(), basis->size())};
  for (std::size_t i = 0; i < basis->size(); ++i) {
    op.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        std::exp(-static_cast<double>(basis->state(i).degree()) * t);
  }
  return op;
}

FockOperator ou_resolvent(const BasisPtr& basis, double alpha) {
  if (alpha <= 0.0) throw DomainError("ou_resolvent: alpha must be positive");
  FockOperator op{basis, Eigen::MatrixXcd::Zero(basis->size(), basis->size())};
  for (std::size_t i = 0; i < basis->size(); ++i) {
    int k = basis->state(i).degree();
    op.mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        std::sqrt(alpha / (alpha + k));
  }
  return op;
}

SmoothingResult smooth_by_kernel(const Eigen::MatrixXd& g, double t) {
  if (g.rows() != g.cols()) throw DomainError("smooth_by_kernel: non-square");
  if ((g + g.transpose()).norm() > 1e-12 * (1.0 + g.norm())) {
    throw DomainError("smooth_by_kernel: matrix is not skew-symmetric");
  }
  if (t <= 0.0) throw DomainError("smooth_by_kernel: time must be positive");

  // Skew matrices are normal: diagonalize once, integrate per eigenvalue.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(
      g.cast<Complex>(), /*computeEigenvectors=*/true);
  const Eigen::VectorXcd& lambda = es.eigenvalues();
  const Eigen::MatrixXcd& v = es.eigenvectors();
  Eigen::MatrixXcd v_inv = v.inverse();

  double window = 8.0 * std::sqrt(2.0 * t);
  int steps = static_cast<int>(std::ceil(2.0 * window / (1e-2 * std::sqrt(t))));
  double dx = 2.0 * window / steps;
  double norm_const = 1.0 / std::sqrt(4.0 * kPi * t);

  Eigen::VectorXcd smooth_diag = Eigen::VectorXcd::Zero(lambda.size());
  Eigen::VectorXcd deriv_diag = Eigen::VectorXcd::Zero(lambda.size());
  for (int j = 0; j <= steps; ++j) {
    double s = -window + j * dx;
    double f = norm_const * std::exp(-s * s / (4.0 * t));
    double fprime = -s / (2.0 * t) * f;
    double w = (j == 0 || j == steps) ? 0.5 * dx : dx;  // trapezoid
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      Complex group = std::exp(s * lambda(i));
      smooth_diag(i) += w * f * group;
      deriv_diag(i) += w * fprime * group;
    }
  }

  SmoothingResult result;
  result.smoothed =
      (v * smooth_diag.asDiagonal() * v_inv).real();
  Eigen::VectorXcd heat(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    heat(i) = std::exp(t * lambda(i) * lambda(i));
  }
  result.predicted = (v * heat.asDiagonal() * v_inv).real();
  result.identity_residual = (result.smoothed - result.predicted).norm();
  Eigen::MatrixXd smoothed_deriv =
      (v * deriv_diag.asDiagonal() * v_inv).real();
  result.derivative_residual = (g * result.smoothed + smoothed_deriv).norm();
  return result;
}

FockOperator invariant_unitary(const GaussianActionCtx& ctx,
                               const Eigen::MatrixXd& xi, double lambda) {
  int d = ctx.pi.dim();
  if (xi.rows() != d || xi.cols() != d) {
    throw DomainError("invariant_unitary: fixed vector must be d x d");
  }
  // |xi| = (xi xi^T)^{1/2}, then the spectral part above the cut.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xi * xi.transpose());
  std::vector<std::pair<double, Eigen::VectorXd>> kept;
  for (int i = 0; i < d; ++i) {
    double mu = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
    if (mu >= lambda) kept.push_back({mu, es.eigenvectors().col(i)});
  }
  if (kept.empty()) {
    throw DomainError(
        "invariant_unitary: spectral cut is empty (lambda above the spectral "
        "radius)");
  }
  Eigen::MatrixXcd generator =
      Eigen::MatrixXcd::Zero(ctx.basis->size(), ctx.basis->size());
  for (const auto& [mu, vec] : kept) {
    FockOperator s = wick::field(ctx.basis, fock::to_complex(vec), ctx.conv);
    generator += mu * (s.mat * s.mat);
  }
  return wick::op_exp(FockOperator{ctx.basis, std::move(generator)},
                      Complex(0.0, kPi));
}

TorusGrid make_torus_grid(int n) {
  if (n < 64 || (n & (n - 1)) != 0) {
    throw DomainError("make_torus_grid: n must be a power of two >= 64");
  }
  TorusGrid grid;
  grid.n = n;
  grid.u.resize(n, n);
  grid.v.resize(n, n);
  for (int j = 0; j < n; ++j) {
    Complex uj = std::polar(1.0, 2.0 * kPi * j / n);
    for (int k = 0; k < n; ++k) {
      grid.u(j, k) = uj;
      grid.v(j, k) = std::polar(1.0, 2.0 * kPi * (k + 0.5) / n);
    }
  }
  grid.w = grid.u.conjugate() * grid.v;
  grid.h.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      // Half-step offset keeps w off the branch cut at -1.
      grid.h(j, k) = std::arg(grid.w(j, k)) / kPi;
    }
  }
  return grid;
}

Eigen::ArrayXXcd apply_beta(const TorusGrid& grid, const Eigen::ArrayXXcd& f) {
  int n = grid.n;
  if (f.rows() != n || f.cols() != n) {
    throw DomainError("apply_beta: grid size mismatch");
  }
  Eigen::ArrayXXcd out(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      out(j, k) = f(j, ((2 * j - k - 1) % n + n) % n);
    }
  }
  return out;
}

namespace {

Eigen::ArrayXXcd w_power(const TorusGrid& grid, double t) {
  Eigen::ArrayXXcd out(grid.n, grid.n);
  for (int j = 0; j < grid.n; ++j) {
    for (int k = 0; k < grid.n; ++k) {
      out(j, k) = std::polar(1.0, kPi * t * grid.h(j, k));
    }
  }
  return out;
}

double mean_abs(const Eigen::ArrayXXcd& f) {
  return std::abs(f.sum()) / static_cast<double>(f.size());
}

}  // namespace

double TorusReport::max_residual() const {
  double worst = std::max(beta_involution, alpha_beta_u);
  worst = std::max(worst, alpha_beta_v);
  worst = std::max(worst, alpha1_u_is_v);
  worst = std::max(worst, fourier_orthogonality);
  return std::max(worst, haar_mean);
}

TorusReport torus_deformation(const TorusGrid& grid, double t) {
  TorusReport report;
  report.beta_involution =
      std::max((apply_beta(grid, apply_beta(grid, grid.u)) - grid.u)
                   .abs()
                   .maxCoeff(),
               (apply_beta(grid, apply_beta(grid, grid.v)) - grid.v)
                   .abs()
                   .maxCoeff());

  Eigen::ArrayXXcd wt = w_power(grid, t);
  Eigen::ArrayXXcd wmt = w_power(grid, -t);
  // alpha_t(beta(u)) = w^t u versus beta(alpha_{-t}(u)) = beta(w^{-t} u).
  report.alpha_beta_u =
      (wt * grid.u - apply_beta(grid, wmt * grid.u)).abs().maxCoeff();
  // alpha_t(beta(v)) = w^t u^2 conj(v) versus beta(w^{-t} v).
  report.alpha_beta_v =
      (wt * grid.u.square() * grid.v.conjugate() -
       apply_beta(grid, wmt * grid.v))
          .abs()
          .maxCoeff();

  Eigen::ArrayXXcd w1 = w_power(grid, 1.0);
  report.alpha1_u_is_v = (w1 * grid.u - grid.v).abs().maxCoeff();

  Eigen::ArrayXXcd ubar_power = Eigen::ArrayXXcd::Constant(grid.n, grid.n, 1.0);
  for (int m = 0; m <= 7; ++m) {
    report.fourier_orthogonality = std::max(
        report.fourier_orthogonality, mean_abs(w1 * grid.u * ubar_power));
    ubar_power *= grid.u.conjugate();
  }

  Eigen::ArrayXXcd wtu = wt * grid.u;
  Eigen::ArrayXXcd power = wtu;
  for (int m = 1; m <= 3; ++m) {
    report.haar_mean = std::max(report.haar_mean, mean_abs(power));
    power *= wtu;
  }
  return report;
}

std::string deformation_report_to_json(const DeformationReport& report) {
  nlohmann::json j;
  j["params"] = report.params;
  auto complex_parts = [](const std::vector<Complex>& zs) {
    nlohmann::json arr = nlohmann::json::array();
    for (Complex z : zs) {
      arr.push_back({{"re", z.real()}, {"im", z.imag()}});
    }
    return arr;
  };
  j["measured"] = complex_parts(report.measured);
  j["predicted"] = complex_parts(report.predicted);
  j["max_abs_residual"] = report.max_abs_residual;
  return j.dump(2);
}

std::string deformation_report_to_csv(const DeformationReport& report) {
  if (report.measured.size() != report.params.size() ||
      report.predicted.size() != report.params.size()) {
    throw DomainError("deformation report: misaligned columns");
  }
  std::ostringstream out;
  out << "param,measured_re,measured_im,predicted_re,predicted_im,"
         "abs_residual\n";
  for (std::size_t i = 0; i < report.params.size(); ++i) {
    Complex m = report.measured[i], p = report.predicted[i];
    out << format_double(report.params[i]) << ',' << format_double(m.real())
        << ',' << format_double(m.imag()) << ',' << format_double(p.real())
        << ',' << format_double(p.imag()) << ',' << format_double(std::abs(m - p))
        << '\n';
  }
  return out.str();
}

}  // namespace gaussact::dyn
