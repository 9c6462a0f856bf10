#pragma once

// Gaussian dynamics on truncated Fock spaces: lifted group actions,
// exponential unitaries attached to representation cocycles and their
// vacuum traces, the rotation deformation on a doubled space with its
// correlation decay, Ornstein-Uhlenbeck multipliers, Gaussian-kernel
// smoothing of one-parameter orthogonal groups, invariant unitaries built
// from fixed vectors of tensor squares, and a sampled two-torus
// deformation with its mirror automorphism.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaussact/cohomology.hpp"
#include "gaussact/fock.hpp"
#include "gaussact/group_rep.hpp"
#include "gaussact/wick.hpp"

namespace gaussact::dyn {

using fock::BasisPtr;
using fock::Complex;
using fock::DomainError;
using fock::FockVector;
using fock::ResourceError;
using wick::FieldConvention;
using wick::FockOperator;

/// A countable group acting on the truncated Fock space over its
/// representation space: basis modes equal the representation dimension.
struct GaussianActionCtx {
  grp::OrthogonalRep pi;
  BasisPtr basis;
  FieldConvention conv;
};

/// Validates the representation (orthogonality and relators) and
/// enumerates the truncated basis.
GaussianActionCtx make_context(
    const grp::OrthogonalRep& pi, int max_degree, FieldConvention conv = {},
    std::size_t cap = fock::FockBasis::default_cap);

/// Lift pi_w^S of the word's matrix.  Vectors transform by direct
/// application; operators by conjugation with this lift.
FockOperator gaussian_action(const GaussianActionCtx& ctx, const grp::Word& w);

/// Smallest truncation degree whose Poisson(norm^2 / 2) tail mass is at
/// most tail_tol: the mass profile of the exponential vector exp(-i s(b))
/// applied to the vacuum, which makes truncation of the exponential
/// auditable.
int truncation_budget(double norm, double tail_tol = 1e-8);

/// omega_w = exp(-i s(b(w))): the exponential unitary of the cocycle value.
/// Throws when the context degree is below the truncation budget of
/// ||b(w)|| (the message names the required degree).
FockOperator ps_cocycle(const GaussianActionCtx& ctx, const coh::RepCocycle& b,
                        const grp::Word& w);

/// <T Omega, Omega>: the vacuum state of the operator.
Complex vacuum_expectation(const FockOperator& op);

/// || (omega_{w1 w2} - omega_{w1} sigma_{w1}(omega_{w2})) Omega ||
/// compressed to degrees <= max_degree / 2.  High degrees are dominated by
/// truncation error, so the residual is read on the protected low-degree
/// range; it decreases as the degree grows.
double cocycle_identity_residual(const GaussianActionCtx& ctx,
                                 const coh::RepCocycle& b, const grp::Word& w1,
                                 const grp::Word& w2);

/// Doubled space H (+) H carrying the rotation generator
/// J(xi (+) eta) = (eta (+) -xi) and the mirror rho(xi (+) eta) =
/// (xi (+) -eta): J^T = -J, J^2 = -I, rho J = -J rho.
struct DoubledCtx {
  GaussianActionCtx base;
  BasisPtr doubled;
  Eigen::MatrixXd J;
  Eigen::MatrixXd rho;
};

DoubledCtx make_doubled(const GaussianActionCtx& base, int max_degree,
                        std::size_t cap = fock::FockBasis::default_cap);

/// theta_t = exp(pi t/2 J) = cos(pi t/2) I + sin(pi t/2) J.  Integer t
/// takes an exact quarter-turn fast path, so theta_1 = J maps H (+) 0 onto
/// 0 (+) H without rounding.
Eigen::MatrixXd theta(const DoubledCtx& dctx, double t);

struct MalleabilityReport {
  double group_law = 0.0;      // max_s ||theta_t theta_s - theta_{t+s}||
  double mirror_matrix = 0.0;  // ||rho theta_{-t} - theta_t rho||
  double mirror_lifted = 0.0;  // same identity after lifting to the space
  double flip_orthogonality = 0.0;  // |<theta_1^S v, w>|, v,w first-leg
  double max_residual() const;
};
MalleabilityReport malleability_axioms(const DoubledCtx& dctx, double t);

/// <exp(tJ)^S omega Omega, omega Omega> for omega = exp(-i s(b(w) (+) 0)):
/// the overlap between the deformed and undeformed exponential states.
/// Passing enforce_budget = false permits degrees below the Poisson budget,
/// for deliberate truncation-convergence studies.
Complex deformation_correlation(const DoubledCtx& dctx, const coh::RepCocycle& b,
                                const grp::Word& w, double t,
                                bool enforce_budget = true);

/// Closed form exp(-(1 - cos t) norm^2) the correlation converges to.
double deformation_prediction(double norm, double t);

/// Degree-diagonal heat multiplier e^{-kt} on degree k.
FockOperator ou_semigroup(const BasisPtr& basis, double t);

/// Degree-diagonal resolvent multiplier (alpha / (alpha + k))^{1/2}.
FockOperator ou_resolvent(const BasisPtr& basis, double alpha);

struct SmoothingResult {
  Eigen::MatrixXd smoothed;    // integral f_t(s) exp(sG) ds
  Eigen::MatrixXd predicted;   // exp(t G^2)
  double identity_residual = 0.0;    // ||smoothed - predicted||
  double derivative_residual = 0.0;  // ||G smoothed + integral f_t' e^{sG}||
};

/// Smooth the orthogonal one-parameter group exp(sG) against the heat
/// kernel f_t(s) = exp(-s^2/4t)/sqrt(4 pi t) by trapezoid quadrature over
/// |s| <= 8 sqrt(2t) with step <= sqrt(t)/100.  The smoothed group element
/// equals exp(tG^2), and differentiating the group hits the kernel:
/// G integral f = -integral f'.
SmoothingResult smooth_by_kernel(const Eigen::MatrixXd& g, double t);

/// Invariant unitary from a fixed vector xi of pi tensor pi (given as a
/// d x d matrix): forms |xi| = (xi xi^T)^{1/2}, keeps the spectral part
/// with eigenvalue >= lambda as eta = sum mu_i v_i (x) v_i, and returns
/// u = exp(pi i sum_i mu_i s(v_i)^2).  Throws when the cut is empty.
FockOperator invariant_unitary(const GaussianActionCtx& ctx,
                               const Eigen::MatrixXd& xi, double lambda);

/// n x n samples of the flat two-torus with the second coordinate offset
/// by half a step so the angle function h, exp(pi i h) = w = conj(u) v,
/// of values in (-1, 1), never touches its branch cut.
struct TorusGrid {
  int n = 0;
  Eigen::ArrayXXcd u, v, w;  // u(j,k) = e^{2 pi i j/n}, v(j,k) = e^{2 pi i (k+1/2)/n}
  Eigen::ArrayXXd h;
};

/// Requires n a power of two, n >= 64 (exact discrete Fourier sums).
TorusGrid make_torus_grid(int n);

/// Mirror automorphism beta(u) = u, beta(v) = u^2 conj(v): precomposition
/// with the grid-exact point map (j, k) -> (j, 2j - k - 1 mod n).
Eigen::ArrayXXcd apply_beta(const TorusGrid& grid, const Eigen::ArrayXXcd& f);

struct TorusReport {
  double beta_involution = 0.0;     // beta^2 = id on u and v
  double alpha_beta_u = 0.0;        // alpha_t beta = beta alpha_{-t} on u
  double alpha_beta_v = 0.0;        // same on v
  double alpha1_u_is_v = 0.0;       // w u = v pointwise
  double fourier_orthogonality = 0.0;  // mean(alpha_1(u) conj(u)^m), m <= 7
  double haar_mean = 0.0;              // mean((w^t u)^m), m in {1,2,3}
  double max_residual() const;
};
TorusReport torus_deformation(const TorusGrid& grid, double t);

/// Measured-versus-predicted values over a parameter grid.
struct DeformationReport {
  std::vector<double> params;
  std::vector<Complex> measured;
  std::vector<Complex> predicted;
  double max_abs_residual = 0.0;
};

std::string deformation_report_to_json(const DeformationReport& report);

/// CSV with header param,measured_re,measured_im,predicted_re,predicted_im,
/// abs_residual; values printed with %.17g so output is byte-stable.
std::string deformation_report_to_csv(const DeformationReport& report);

}  // namespace gaussact::dyn
