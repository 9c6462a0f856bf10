#include "gaussact/wick.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "gaussact/fock.hpp"

namespace gaussact::wick {

using fock::Occupation;

FockVector FockOperator::apply(const FockVector& v) const {
  if (!basis->compatible(*v.basis)) {
    throw DomainError("FockOperator::apply: incompatible bases");
  }
  return FockVector{basis, mat * v.coeff};
}

FockOperator identity_op(const BasisPtr& basis) {
  return FockOperator{
      basis, Eigen::MatrixXcd::Identity(basis->size(), basis->size())};
}

namespace {

void check_mode_vector(const BasisPtr& basis, const Eigen::VectorXcd& xi,
                       const char* who) {
  if (xi.size() != basis->modes()) {
    throw DomainError(std::string(who) + ": mode vector has wrong dimension");
  }
}

}  // namespace

FockOperator creation(const BasisPtr& basis, const Eigen::VectorXcd& xi) {
  check_mode_vector(basis, xi, "creation");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
  for (std::size_t j = 0; j < basis->size(); ++j) {
    Occupation occ = basis->state(j);
    for (int i = 0; i < basis->modes(); ++i) {
      if (xi[i] == Complex(0.0)) continue;
      ++occ.counts[i];
      std::ptrdiff_t target = basis->index_of(occ);
      --occ.counts[i];
      if (target >= 0) m(target, j) += xi[i];
    }
  }
  return FockOperator{basis, std::move(m)};
}

FockOperator annihilation(const BasisPtr& basis, const Eigen::VectorXcd& xi) {
  check_mode_vector(basis, xi, "annihilation");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
  for (std::size_t j = 0; j < basis->size(); ++j) {
    const Occupation& state = basis->state(j);
    Occupation occ = state;
    for (int i = 0; i < basis->modes(); ++i) {
      if (state.counts[i] == 0 || xi[i] == Complex(0.0)) continue;
      --occ.counts[i];
      std::ptrdiff_t target = basis->index_of(occ);
      ++occ.counts[i];
      m(target, j) += std::conj(xi[i]) * static_cast<double>(state.counts[i]);
    }
  }
  return FockOperator{basis, std::move(m)};
}

FockOperator field(const BasisPtr& basis, const Eigen::VectorXcd& xi,
                   FieldConvention conv) {
  FockOperator x = creation(basis, xi);
  FockOperator d = annihilation(basis, xi);
  return FockOperator{basis, conv.kappa * (x.mat + d.mat)};
}

double moment(const BasisPtr& basis, const Eigen::VectorXcd& xi, int n) {
  if (n < 0) throw DomainError("moment: negative power");
  int needed = (n + 1) / 2;
  if (basis->max_degree() < needed) {
    throw DomainError("moment: truncation degree " +
                      std::to_string(basis->max_degree()) +
                      " too small for power " + std::to_string(n) +
                      " (need >= " + std::to_string(needed) + ")");
  }
  FockOperator s = field(basis, xi);
  FockVector v = fock::vacuum(basis);
  for (int k = 0; k < n; ++k) v = s.apply(v);
  return fock::inner_product(v, fock::vacuum(basis)).real();
}

double mixed_moment(const BasisPtr& basis, const Eigen::VectorXcd& xi, int m,
                    const Eigen::VectorXcd& eta, int n) {
  if (m < 0 || n < 0) throw DomainError("mixed_moment: negative power");
  Complex overlap = (eta.conjugate().transpose() * xi)(0, 0);
  double scale = std::max(xi.norm() * eta.norm(), 1.0);
  if (std::abs(overlap) > 1e-12 * scale) {
    throw DomainError("mixed_moment: vectors are not orthogonal");
  }
  int needed = (m + n + 1) / 2;
  if (basis->max_degree() < needed) {
    throw DomainError("mixed_moment: truncation degree too small (need >= " +
                      std::to_string(needed) + ")");
  }
  FockVector v = fock::vacuum(basis);
  FockOperator se = field(basis, eta);
  for (int k = 0; k < n; ++k) v = se.apply(v);
  FockOperator sx = field(basis, xi);
  for (int k = 0; k < m; ++k) v = sx.apply(v);
  return fock::inner_product(v, fock::vacuum(basis)).real();
}

FockOperator second_quantize(const BasisPtr& basis, const Eigen::MatrixXcd& T) {
  if (T.rows() != basis->modes() || T.cols() != basis->modes()) {
    throw DomainError("second_quantize: matrix has wrong dimension");
  }
  int d = basis->modes();
  std::vector<Eigen::MatrixXcd> lifted_columns;
  lifted_columns.reserve(d);
  for (int i = 0; i < d; ++i) {
    lifted_columns.push_back(creation(basis, T.col(i)).mat);
  }
  // Column for state m equals x_{T e_i} applied to the column for m - delta_i
  // (graded-lex order lists m - delta_i first; no compression can occur while
  // climbing inside the truncation, so the assembly is exact).
  Eigen::MatrixXcd m =
      Eigen::MatrixXcd::Zero(basis->size(), basis->size());
  m(0, 0) = 1.0;
  for (std::size_t j = 1; j < basis->size(); ++j) {
    Occupation occ = basis->state(j);
    int i = 0;
    while (occ.counts[i] == 0) ++i;
    --occ.counts[i];
    std::ptrdiff_t parent = basis->index_of(occ);
    m.col(j) = lifted_columns[i] * m.col(parent);
  }
  return FockOperator{basis, std::move(m)};
}

FockOperator second_quantize(const BasisPtr& basis, const Eigen::MatrixXd& T) {
  return second_quantize(basis, Eigen::MatrixXcd(T.cast<Complex>()));
}

FockOperator differential_second_quantize(const BasisPtr& basis,
                                          const Eigen::MatrixXcd& T) {
  if (T.rows() != basis->modes() || T.cols() != basis->modes()) {
    throw DomainError(
        "differential_second_quantize: matrix has wrong dimension");
  }
  // dG(T) = sum_{i,j} T_{ji} x_{e_j} d_{e_i}: replace one occupied mode i by
  // mode j with multiplicity m_i.  Degree-preserving, hence truncation-exact.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis->size(), basis->size());
  for (std::size_t col = 0; col < basis->size(); ++col) {
    const Occupation& state = basis->state(col);
    Occupation occ = state;
    for (int i = 0; i < basis->modes(); ++i) {
      if (state.counts[i] == 0) continue;
      --occ.counts[i];
      for (int j = 0; j < basis->modes(); ++j) {
        if (T(j, i) == Complex(0.0)) continue;
        ++occ.counts[j];
        m(basis->index_of(occ), col) +=
            T(j, i) * static_cast<double>(state.counts[i]);
        --occ.counts[j];
      }
      ++occ.counts[i];
    }
  }
  return FockOperator{basis, std::move(m)};
}

FockOperator differential_second_quantize(const BasisPtr& basis,
                                          const Eigen::MatrixXd& T) {
  return differential_second_quantize(basis,
                                      Eigen::MatrixXcd(T.cast<Complex>()));
}

Eigen::MatrixXcd weighted_conjugate(const FockOperator& a) {
  Eigen::ArrayXd root = a.basis->weights().array().sqrt();
  Eigen::MatrixXcd m = a.mat;
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) *= root[i];
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) /= root[j];
  return m;
}

namespace {

Eigen::MatrixXcd unweight(const BasisPtr& basis, Eigen::MatrixXcd m) {
  Eigen::ArrayXd root = basis->weights().array().sqrt();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= root[i];
  for (Eigen::Index j = 0; j < m.cols(); ++j) m.col(j) *= root[j];
  return m;
}

}  // namespace

FockOperator weighted_adjoint(const FockOperator& a) {
  const Eigen::VectorXd& w = a.basis->weights();
  Eigen::MatrixXcd adj = a.mat.adjoint();
  for (Eigen::Index i = 0; i < adj.rows(); ++i) adj.row(i) /= w[i];
  for (Eigen::Index j = 0; j < adj.cols(); ++j) adj.col(j) *= w[j];
  return FockOperator{a.basis, std::move(adj)};
}

double weighted_operator_norm(const FockOperator& a) {
  return weighted_conjugate(a).operatorNorm();
}

bool weighted_self_adjoint(const FockOperator& a, double tol) {
  Eigen::MatrixXcd m = weighted_conjugate(a);
  double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() <= tol * scale;
}

FockOperator op_exp(const FockOperator& a, Complex z) {
  if (weighted_self_adjoint(a)) {
    Eigen::MatrixXcd m = weighted_conjugate(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (m + m.adjoint()));
    Eigen::VectorXcd phase =
        (z * es.eigenvalues().cast<Complex>().array()).exp();
    Eigen::MatrixXcd e = es.eigenvectors() * phase.asDiagonal() *
                         es.eigenvectors().adjoint();
    return FockOperator{a.basis, unweight(a.basis, std::move(e))};
  }
  Eigen::MatrixXcd scaled = z * a.mat;
  return FockOperator{a.basis, scaled.exp()};
}

}  // namespace gaussact::wick
