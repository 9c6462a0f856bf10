#pragma once

// Creation, annihilation and field operators on the truncated symmetric Fock
// space, Gaussian moments, second quantization and operator exponentials.
//
// In occupation coordinates: creation x_{e_i} |m> = |m + delta_i| and
// annihilation d_{e_i} |m> = m_i |m - delta_i|; the two are mutual adjoints
// for the weighted metric.  The field s(xi) = kappa (x_xi + d_xi) is
// self-adjoint for real xi; with kappa = 1 its vacuum moments are the
// standard Gaussian moments (n-1)!!.

#include <complex>

#include <Eigen/Dense>

#include "gaussact/fock.hpp"

namespace gaussact::wick {

using fock::BasisPtr;
using fock::Complex;
using fock::DomainError;
using fock::FockVector;

/// Normalization dial for the field operator s(xi) = kappa (x_xi + d_xi).
struct FieldConvention {
  double kappa = 1.0;
};

/// Dense operator over a fixed truncated basis (column j = image of state j).
struct FockOperator {
  BasisPtr basis;
  Eigen::MatrixXcd mat;

  FockVector apply(const FockVector& v) const;
};

FockOperator identity_op(const BasisPtr& basis);

/// Creation operator x_xi (linear in xi).  Components that would exceed the
/// truncation degree are compressed away.
FockOperator creation(const BasisPtr& basis, const Eigen::VectorXcd& xi);

/// Annihilation operator d_xi (conjugate-linear in xi); adjoint of creation
/// for the weighted metric.
FockOperator annihilation(const BasisPtr& basis, const Eigen::VectorXcd& xi);

/// Field operator s(xi) = kappa (x_xi + d_xi).
FockOperator field(const BasisPtr& basis, const Eigen::VectorXcd& xi,
                   FieldConvention conv = {});

/// Vacuum moment <s(xi)^n Omega, Omega> with kappa = 1.  Exact provided
/// max_degree >= ceil(n / 2); otherwise throws DomainError.
double moment(const BasisPtr& basis, const Eigen::VectorXcd& xi, int n);

/// Mixed vacuum moment <s(xi)^m s(eta)^n Omega, Omega> for orthogonal xi,
/// eta (checked).  Requires max_degree >= ceil((m + n) / 2).
double mixed_moment(const BasisPtr& basis, const Eigen::VectorXcd& xi, int m,
                    const Eigen::VectorXcd& eta, int n);

/// Second quantization T^S = 1 (+) T (+) T tensor T (+) ...: acts on degree-n
/// states by applying T to every tensor factor.  Degree-diagonal; functorial;
/// unitary for the weighted metric when T is orthogonal/unitary.
FockOperator second_quantize(const BasisPtr& basis, const Eigen::MatrixXcd& T);
FockOperator second_quantize(const BasisPtr& basis, const Eigen::MatrixXd& T);

/// Differential second quantization dG(T): derivation-like generator acting
/// as sum over tensor slots of T in one slot.  dG(I) is the number operator;
/// (exp(tT))^S = I + t dG(T) + O(t^2).
FockOperator differential_second_quantize(const BasisPtr& basis,
                                          const Eigen::MatrixXcd& T);
FockOperator differential_second_quantize(const BasisPtr& basis,
                                          const Eigen::MatrixXd& T);

/// exp(z A).  Operators that are self-adjoint for the weighted metric go
/// through an eigendecomposition (so exp(i t A) is exactly weighted-unitary);
/// the general case uses Pade scaling-and-squaring.
FockOperator op_exp(const FockOperator& a, Complex z);

/// W^(1/2) A W^(-1/2): similarity taking the weighted metric to the plain one.
Eigen::MatrixXcd weighted_conjugate(const FockOperator& a);

/// Adjoint of A for the weighted metric.
FockOperator weighted_adjoint(const FockOperator& a);

/// Operator norm of A as an operator on the weighted space.
double weighted_operator_norm(const FockOperator& a);

/// Whether A is self-adjoint for the weighted metric within tol.
bool weighted_self_adjoint(const FockOperator& a, double tol = 1e-12);

}  // namespace gaussact::wick
