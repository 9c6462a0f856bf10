#pragma once

// Derivation bimodule over the Gaussian field algebra.
//
// The carrier is R^d tensor S(H') where H' = R Omega0 (+) R^d is the base
// space extended by one distinguished mode (index 0) and S(H') is its
// degree-truncated symmetric Fock space.  Field operators act on the left
// through the embedding of R^d as modes 1..d, and on the right through a
// frame-adapted twist that routes the frame-parallel part of the vector to
// the distinguished mode.  The two actions commute on the safe degree range,
// and the Leibniz derivation they induce sends s(xi) to xi tensor vacuum
// isometrically.  Also here: divided-difference derivations of one-variable
// polynomials with their Gaussian energy (Dirichlet) form, and elementary
// tensor-product derivations.

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "gaussact/fock.hpp"

namespace gaussact::bim {

using fock::BasisPtr;
using fock::DomainError;
using fock::FockBasis;
using fock::ResourceError;

/// Fixed data for one bimodule: base dimension d, the Fock leg on d + 1
/// modes (mode 0 distinguished), the orthonormal frame of R^d steering the
/// right action (columns), and cached per-mode field matrices.
struct BimoduleCtx {
  int base_dim = 0;
  BasisPtr leg;
  Eigen::MatrixXd frame;
  std::vector<Eigen::MatrixXd> mode_field;  // s(e'_j), j = 0..d
};

/// Build a bimodule context.  The frame must be orthogonal (default:
/// standard basis).  Throws DomainError on bad dimensions or a non-orthogonal
/// frame, ResourceError if the Fock leg would exceed `cap` states.
BimoduleCtx make_bimodule(int base_dim, int max_degree,
                          const Eigen::MatrixXd& frame = Eigen::MatrixXd(),
                          std::size_t cap = FockBasis::default_cap);

/// Element of R^d tensor S(H'): one Fock-leg coefficient vector per base
/// coordinate.  Norm and inner product carry the weighted Fock metric,
/// summed over coordinates.
struct BimoduleVector {
  BasisPtr leg;
  std::vector<Eigen::VectorXd> comp;

  double norm() const;
};

BimoduleVector zero_element(const BimoduleCtx& ctx);

/// xi tensor Omega: component n equals xi_n times the vacuum.
BimoduleVector vacuum_tensor(const BimoduleCtx& ctx, const Eigen::VectorXd& xi);

/// Sum over coordinates of the weighted Fock-leg inner products.
double inner_product(const BimoduleVector& v, const BimoduleVector& w);

BimoduleVector operator+(const BimoduleVector& a, const BimoduleVector& b);
BimoduleVector operator-(const BimoduleVector& a, const BimoduleVector& b);

/// Fock-leg matrix of the left action of s(xi): the field operator of xi
/// embedded as modes 1..d.  Acts identically on every component; symmetric
/// for the weighted metric.
Eigen::MatrixXd left_block(const BimoduleCtx& ctx, const Eigen::VectorXd& xi);

/// Fock-leg matrix of the right action of s(xi) on frame component n: the
/// frame-parallel part <xi, f_n> is routed to the distinguished mode 0 and
/// the rest enters as a plain field operator.
Eigen::MatrixXd right_block(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                            int n);

/// Left multiplication by s(xi).
BimoduleVector apply_left(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                          const BimoduleVector& v);

/// Right multiplication by s(xi): components are rotated into frame
/// coordinates, the per-component blocks applied, and rotated back.
/// Commutes with every apply_left on degrees <= max_degree - 2.
BimoduleVector apply_right(const BimoduleCtx& ctx, const Eigen::VectorXd& xi,
                           const BimoduleVector& v);

/// Leibniz derivation of the field word s(xi_1) ... s(xi_k): the sum over i
/// of left multiplication by the prefix and right multiplication by the
/// suffix applied to xi_i tensor Omega.  The empty word gives 0; a single
/// letter gives xi tensor Omega (an isometry).  Throws DomainError when
/// k > max_degree - 1 (degree overflow) or on dimension mismatch.
BimoduleVector field_word_derivation(const BimoduleCtx& ctx,
                                     const std::vector<Eigen::VectorXd>& word);

/// T tensor (1 (+) T)^S: rotate the base leg by T and the Fock leg by the
/// second quantization of T extended to fix the distinguished mode.
BimoduleVector rotate_element(const BimoduleCtx& ctx, const Eigen::MatrixXd& T,
                              const BimoduleVector& v);

/// Norm of the covariance defect: the derivation taken in the T-rotated
/// frame of the T-rotated word, minus the rotation of the derivation taken
/// in the original frame.  Zero exactly for permutation T; small (truncation
/// rounding only) for general rotations.
double covariance_residual(const BimoduleCtx& ctx, const Eigen::MatrixXd& T,
                           const std::vector<Eigen::VectorXd>& word);

/// One-variable real polynomial, coeff[i] multiplying x^i.
struct Polynomial {
  Eigen::VectorXd coeff;

  int degree() const { return static_cast<int>(coeff.size()) - 1; }
  double operator()(double x) const;
};

/// Two-variable real polynomial, coeff(a, b) multiplying x^a y^b.
struct Bivariate {
  Eigen::MatrixXd coeff;

  double operator()(double x, double y) const;
};

Polynomial multiply(const Polynomial& f, const Polynomial& g);

/// f(x) q(x, y), exact on coefficients.
Bivariate mul_x(const Polynomial& f, const Bivariate& q);

/// q(x, y) g(y), exact on coefficients.
Bivariate mul_y(const Bivariate& q, const Polynomial& g);

/// Divided difference (f(x) - f(y)) / (x - y): x^n maps to the sum of
/// x^a y^b over a + b = n - 1, exactly on coefficients.  Satisfies the
/// Leibniz rule dq(fg) = f(x) dq(g) + dq(f) g(y).
Bivariate difference_quotient(const Polynomial& f);

/// Nodes and weights of a Gaussian quadrature rule.
struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// n-point Gauss-Hermite rule for the standard normal density (weights sum
/// to 1), from the eigendecomposition of the Jacobi matrix with off-diagonal
/// entries sqrt(k).
Quadrature gauss_hermite(int n);

/// Energy form E[((f(x) - f(y)) / (x - y))^2] for independent standard
/// Gaussians x, y, by tensorized Gauss-Hermite quadrature with at least
/// degree + 2 nodes per axis (exact for polynomials).  Degree capped at 12.
double dirichlet_form(const Polynomial& f, int nodes = -1);

/// Sample mean with its standard error.
struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of the same energy form from iid standard normal
/// pairs; deterministic for a fixed seed.
MonteCarloEstimate dirichlet_form_mc(const Polynomial& f,
                                     std::size_t samples = 1'000'000,
                                     std::uint64_t seed = 0);

/// One factor of an elementary tensor together with the derivation acting on
/// its slot.
struct TensorSlot {
  Eigen::MatrixXd derivation;
  Eigen::VectorXd element;
};

/// Derivation of an elementary tensor: component j is the Kronecker product
/// of the elements with slot j replaced by derivation applied to element.
/// Slots whose element is annihilated contribute zero; the single-slot case
/// reduces to the plain matrix-vector product.  Throws DomainError on shape
/// mismatch, ResourceError if any component would exceed `cap` entries.
std::vector<Eigen::VectorXd> tensor_derivation(
    const std::vector<TensorSlot>& slots, std::size_t cap = 2'000'000);

}  // namespace gaussact::bim
