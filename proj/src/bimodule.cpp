#include "gaussact/bimodule.hpp"

#include <cmath>
#include <random>
#include <string>

#include "gaussact/wick.hpp"

namespace gaussact::bim {

namespace {

/// Field matrix of an extended-space vector u in R^{d+1}: sum of the cached
/// per-mode field matrices weighted by u.
Eigen::MatrixXd field_of(const BimoduleCtx& ctx, const Eigen::VectorXd& u) {
  const auto n = static_cast<Eigen::Index>(ctx.leg->size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < ctx.base_dim + 1; ++j) {
    if (u[j] != 0.0) out += u[j] * ctx.mode_field[static_cast<std::size_t>(j)];
  }
  return out;
}

void check_base_vector(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                       const char* who) {
  if (xi.size() != ctx.base_dim)
    throw DomainError(std::string(who) + ": vector has dimension " +
                      std::to_string(xi.size()) + ", base dimension is " +
                      std::to_string(ctx.base_dim));
}

void check_element(const BimoduleCtx& ctx, const BimoduleVector& v,
                   const char* who) {
  if (v.comp.size() != static_cast<std::size_t>(ctx.base_dim) || !v.leg ||
      !v.leg->compatible(*ctx.leg))
    throw DomainError(std::string(who) + ": element does not match context");
}

Eigen::VectorXd kron(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

}  // namespace

BimoduleCtx make_bimodule(int base_dim, int max_degree,
                          const Eigen::MatrixXd& frame, std::size_t cap) {
  if (base_dim < 1)
    throw DomainError("make_bimodule: base dimension must be positive");
  if (max_degree < 1)
    throw DomainError("make_bimodule: max degree must be positive");
  BimoduleCtx ctx;
  ctx.base_dim = base_dim;
  ctx.frame = frame.size() == 0
                  ? Eigen::MatrixXd::Identity(base_dim, base_dim).eval()
                  : frame;
  if (ctx.frame.rows() != base_dim || ctx.frame.cols() != base_dim)
    throw DomainError("make_bimodule: frame must be square of base dimension");
  const double defect =
      (ctx.frame.transpose() * ctx.frame -
       Eigen::MatrixXd::Identity(base_dim, base_dim))
          .cwiseAbs()
          .maxCoeff();
  if (defect > 1e-10)
    throw DomainError("make_bimodule: frame is not orthogonal (defect " +
                      std::to_string(defect) + ")");
  ctx.leg = fock::enumerate_basis(base_dim + 1, max_degree, cap);
  ctx.mode_field.reserve(static_cast<std::size_t>(base_dim) + 1);
  for (int j = 0; j < base_dim + 1; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(base_dim + 1);
    e[j] = 1.0;
    ctx.mode_field.push_back(wick::field(ctx.leg, e).mat.real());
  }
  return ctx;
}

double BimoduleVector::norm() const {
  double sq = 0.0;
  for (const auto& c : comp) sq += c.dot(leg->weights().asDiagonal() * c);
  return std::sqrt(sq);
}

BimoduleVector zero_element(const BimoduleCtx& ctx) {
  BimoduleVector v;
  v.leg = ctx.leg;
  v.comp.assign(static_cast<std::size_t>(ctx.base_dim),
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(
                    ctx.leg->size())));
  return v;
}

BimoduleVector vacuum_tensor(const BimoduleCtx& ctx,
                             const Eigen::VectorXd& xi) {
  check_base_vector(ctx, xi, "vacuum_tensor");
  BimoduleVector v = zero_element(ctx);
  for (int n = 0; n < ctx.base_dim; ++n)
    v.comp[static_cast<std::size_t>(n)][0] = xi[n];
  return v;
}

double inner_product(const BimoduleVector& v, const BimoduleVector& w) {
  if (!v.leg || !w.leg || !v.leg->compatible(*w.leg) ||
      v.comp.size() != w.comp.size())
    throw DomainError("inner_product: mismatched elements");
  double sum = 0.0;
  for (std::size_t n = 0; n < v.comp.size(); ++n)
    sum += v.comp[n].dot(v.leg->weights().asDiagonal() * w.comp[n]);
  return sum;
}

BimoduleVector operator+(const BimoduleVector& a, const BimoduleVector& b) {
  if (!a.leg || !b.leg || !a.leg->compatible(*b.leg) ||
      a.comp.size() != b.comp.size())
    throw DomainError("operator+: mismatched elements");
  BimoduleVector out = a;
  for (std::size_t n = 0; n < out.comp.size(); ++n) out.comp[n] += b.comp[n];
  return out;
}

BimoduleVector operator-(const BimoduleVector& a, const BimoduleVector& b) {
  if (!a.leg || !b.leg || !a.leg->compatible(*b.leg) ||
      a.comp.size() != b.comp.size())
    throw DomainError("operator-: mismatched elements");
  BimoduleVector out = a;
  for (std::size_t n = 0; n < out.comp.size(); ++n) out.comp[n] -= b.comp[n];
  return out;
}

Eigen::MatrixXd left_block(const BimoduleCtx& ctx, const Eigen::VectorXd& xi) {
  check_base_vector(ctx, xi, "left_block");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(ctx.base_dim + 1);
  u.tail(ctx.base_dim) = xi;
  return field_of(ctx, u);
}

Eigen::MatrixXd right_block(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                            int n) {
  check_base_vector(ctx, xi, "right_block");
  if (n < 0 || n >= ctx.base_dim)
    throw DomainError("right_block: component index out of range");
  const double c = ctx.frame.col(n).dot(xi);
  Eigen::VectorXd u(ctx.base_dim + 1);
  u[0] = c;
  u.tail(ctx.base_dim) = xi - c * ctx.frame.col(n);
  return field_of(ctx, u);
}

BimoduleVector apply_left(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                          const BimoduleVector& v) {
  check_element(ctx, v, "apply_left");
  const Eigen::MatrixXd block = left_block(ctx, xi);
  BimoduleVector out = v;
  for (auto& c : out.comp) c = block * c;
  return out;
}

BimoduleVector apply_right(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                           const BimoduleVector& v) {
  check_element(ctx, v, "apply_right");
  const int d = ctx.base_dim;
  const auto size = static_cast<Eigen::Index>(ctx.leg->size());
  // Rotate components into frame coordinates, apply the per-component
  // blocks, rotate back (the frame is orthogonal).
  std::vector<Eigen::VectorXd> tilde(
      static_cast<std::size_t>(d), Eigen::VectorXd::Zero(size));
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      tilde[static_cast<std::size_t>(m)] +=
          ctx.frame(n, m) * v.comp[static_cast<std::size_t>(n)];
  for (int m = 0; m < d; ++m)
    tilde[static_cast<std::size_t>(m)] =
        right_block(ctx, xi, m) * tilde[static_cast<std::size_t>(m)];
  BimoduleVector out = zero_element(ctx);
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m)
      out.comp[static_cast<std::size_t>(n)] +=
          ctx.frame(n, m) * tilde[static_cast<std::size_t>(m)];
  return out;
}

BimoduleVector field_word_derivation(
    const BimoduleCtx& ctx, const std::vector<Eigen::VectorXd>& word) {
  const int k = static_cast<int>(word.size());
  if (k > ctx.leg->max_degree() - 1)
    throw DomainError(
        "field_word_derivation: word length " + std::to_string(k) +
        " overflows the truncation; needs max_degree >= " +
        std::to_string(k + 1));
  for (const auto& xi : word) check_base_vector(ctx, xi, "field_word_derivation");
  BimoduleVector acc = zero_element(ctx);
  for (int i = 0; i < k; ++i) {
    BimoduleVector v = vacuum_tensor(ctx, word[static_cast<std::size_t>(i)]);
    // Right multiplication by the suffix product applies its leftmost factor
    // first; left multiplication by the prefix applies its rightmost first.
    for (int j = i + 1; j < k; ++j)
      v = apply_right(ctx, word[static_cast<std::size_t>(j)], v);
    for (int j = i - 1; j >= 0; --j)
      v = apply_left(ctx, word[static_cast<std::size_t>(j)], v);
    acc = acc + v;
  }
  return acc;
}

BimoduleVector rotate_element(const BimoduleCtx& ctx, const Eigen::MatrixXd& T,
                              const BimoduleVector& v) {
  check_element(ctx, v, "rotate_element");
  const int d = ctx.base_dim;
  if (T.rows() != d || T.cols() != d)
    throw DomainError("rotate_element: matrix must be square of base dimension");
  Eigen::MatrixXd ext = Eigen::MatrixXd::Identity(d + 1, d + 1);
  ext.block(1, 1, d, d) = T;
  const Eigen::MatrixXd lift = wick::second_quantize(ctx.leg, ext).mat.real();
  BimoduleVector out = zero_element(ctx);
  for (int n = 0; n < d; ++n) {
    for (int m = 0; m < d; ++m)
      if (T(n, m) != 0.0)
        out.comp[static_cast<std::size_t>(n)] +=
            T(n, m) * v.comp[static_cast<std::size_t>(m)];
    out.comp[static_cast<std::size_t>(n)] =
        lift * out.comp[static_cast<std::size_t>(n)];
  }
  return out;
}

double covariance_residual(const BimoduleCtx& ctx, const Eigen::MatrixXd& T,
                           const std::vector<Eigen::VectorXd>& word) {
  const BimoduleCtx rotated =
      make_bimodule(ctx.base_dim, ctx.leg->max_degree(), T * ctx.frame);
  std::vector<Eigen::VectorXd> moved;
  moved.reserve(word.size());
  for (const auto& xi : word) moved.push_back(T * xi);
  const BimoduleVector lhs = field_word_derivation(rotated, moved);
  const BimoduleVector rhs =
      rotate_element(ctx, T, field_word_derivation(ctx, word));
  return (lhs - rhs).norm();
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (Eigen::Index i = coeff.size() - 1; i >= 0; --i) acc = acc * x + coeff[i];
  return acc;
}

double Bivariate::operator()(double x, double y) const {
  double acc = 0.0;
  for (Eigen::Index a = coeff.rows() - 1; a >= 0; --a) {
    double row = 0.0;
    for (Eigen::Index b = coeff.cols() - 1; b >= 0; --b)
      row = row * y + coeff(a, b);
    acc = acc * x + row;
  }
  return acc;
}

Polynomial multiply(const Polynomial& f, const Polynomial& g) {
  if (f.coeff.size() == 0 || g.coeff.size() == 0) return {Eigen::VectorXd()};
  Polynomial out{Eigen::VectorXd::Zero(f.coeff.size() + g.coeff.size() - 1)};
  for (Eigen::Index i = 0; i < f.coeff.size(); ++i)
    for (Eigen::Index j = 0; j < g.coeff.size(); ++j)
      out.coeff[i + j] += f.coeff[i] * g.coeff[j];
  return out;
}

Bivariate mul_x(const Polynomial& f, const Bivariate& q) {
  if (f.coeff.size() == 0 || q.coeff.size() == 0)
    return {Eigen::MatrixXd::Zero(1, 1)};
  Bivariate out{Eigen::MatrixXd::Zero(f.coeff.size() + q.coeff.rows() - 1,
                                      q.coeff.cols())};
  for (Eigen::Index i = 0; i < f.coeff.size(); ++i)
    for (Eigen::Index a = 0; a < q.coeff.rows(); ++a)
      for (Eigen::Index b = 0; b < q.coeff.cols(); ++b)
        out.coeff(i + a, b) += f.coeff[i] * q.coeff(a, b);
  return out;
}

Bivariate mul_y(const Bivariate& q, const Polynomial& g) {
  if (g.coeff.size() == 0 || q.coeff.size() == 0)
    return {Eigen::MatrixXd::Zero(1, 1)};
  Bivariate out{Eigen::MatrixXd::Zero(q.coeff.rows(),
                                      q.coeff.cols() + g.coeff.size() - 1)};
  for (Eigen::Index j = 0; j < g.coeff.size(); ++j)
    for (Eigen::Index a = 0; a < q.coeff.rows(); ++a)
      for (Eigen::Index b = 0; b < q.coeff.cols(); ++b)
        out.coeff(a, b + j) += q.coeff(a, b) * g.coeff[j];
  return out;
}

Bivariate difference_quotient(const Polynomial& f) {
  const int n = f.degree();
  if (n < 1) return {Eigen::MatrixXd::Zero(1, 1)};
  Bivariate q{Eigen::MatrixXd::Zero(n, n)};
  for (int k = 1; k <= n; ++k)
    for (int a = 0; a < k; ++a) q.coeff(a, k - 1 - a) += f.coeff[k];
  return q;
}

Quadrature gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: need at least one node");
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
    jacobi(k + 1, k) = jacobi(k, k + 1);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  Quadrature rule;
  rule.nodes = es.eigenvalues();
  rule.weights = es.eigenvectors().row(0).transpose().cwiseAbs2();
  return rule;
}

double dirichlet_form(const Polynomial& f, int nodes) {
  const int deg = f.degree();
  if (deg > 12)
    throw DomainError("dirichlet_form: degree " + std::to_string(deg) +
                      " exceeds the quadrature cap 12");
  const int needed = std::max(deg + 2, 3);
  if (nodes < 0) nodes = needed;
  if (nodes < needed)
    throw DomainError("dirichlet_form: needs at least " +
                      std::to_string(needed) + " nodes per axis");
  const Bivariate q = difference_quotient(f);
  const Quadrature rule = gauss_hermite(nodes);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i)
    for (int j = 0; j < nodes; ++j) {
      const double v = q(rule.nodes[i], rule.nodes[j]);
      sum += rule.weights[i] * rule.weights[j] * v * v;
    }
  return sum;
}

MonteCarloEstimate dirichlet_form_mc(const Polynomial& f, std::size_t samples,
                                     std::uint64_t seed) {
  if (samples < 2)
    throw DomainError("dirichlet_form_mc: need at least two samples");
  const Bivariate q = difference_quotient(f);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = gauss(rng);
    const double y = gauss(rng);
    const double v = q(x, y);
    sum += v * v;
    sum_sq += v * v * v * v;
  }
  const auto n = static_cast<double>(samples);
  MonteCarloEstimate est;
  est.samples = samples;
  est.mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * est.mean * est.mean) / (n - 1.0));
  est.std_error = std::sqrt(var / n);
  return est;
}

std::vector<Eigen::VectorXd> tensor_derivation(
    const std::vector<TensorSlot>& slots, std::size_t cap) {
  for (const auto& slot : slots)
    if (slot.derivation.cols() != slot.element.size() ||
        slot.element.size() == 0 || slot.derivation.rows() == 0)
      throw DomainError("tensor_derivation: slot shapes do not match");
  std::vector<Eigen::VectorXd> out;
  out.reserve(slots.size());
  for (std::size_t j = 0; j < slots.size(); ++j) {
    long double total = static_cast<long double>(slots[j].derivation.rows());
    for (std::size_t i = 0; i < slots.size(); ++i)
      if (i != j) total *= static_cast<long double>(slots[i].element.size());
    if (total > static_cast<long double>(cap))
      throw ResourceError("tensor_derivation: component would exceed " +
                          std::to_string(cap) + " entries");
    Eigen::VectorXd acc = Eigen::VectorXd::Ones(1);
    for (std::size_t i = 0; i < slots.size(); ++i)
      acc = kron(acc, i == j ? (slots[j].derivation * slots[j].element).eval()
                             : slots[i].element);
    out.push_back(std::move(acc));
  }
  return out;
}

}  // namespace gaussact::bim
