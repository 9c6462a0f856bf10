#pragma once

// First cohomology of orthogonal representations: one-cocycles given by
// their generator values and extended through b(gh) = b(g) + pi_g b(h),
// the cocycle space cut out by relator constraints, the coboundary space,
// least-squares coboundary fitting, and growth probes over word balls.

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaussact/group_rep.hpp"

namespace gaussact::coh {

using fock::DomainError;
using fock::ResourceError;
using grp::FiniteGroup;
using grp::OrthogonalRep;
using grp::Word;

/// One-cocycle for an orthogonal representation: a value b_s per generator.
/// The representation is stored by value so cocycles are self-contained.
struct RepCocycle {
  OrthogonalRep rep;
  std::vector<Eigen::VectorXd> gen_values;
};

/// Validate shape: one value per generator, all of the representation dim.
void check_cocycle(const RepCocycle& b);

/// Value on a word by the left-to-right fold of the cocycle identity;
/// inverse letters use b(s^-1) = -pi_s^T b_s.  The empty word gives 0.
Eigen::VectorXd extend(const RepCocycle& b, const Word& w);

/// Max over relators of ||extend(b, r)||: zero (to tolerance) iff the
/// generator values define a genuine cocycle of the presented group.
double relator_residual(const RepCocycle& b);

struct CohomologyReport {
  int dimZ1 = 0;
  int dimB1 = 0;
  int dimH1 = 0;
  std::vector<RepCocycle> basisZ1;
  /// Singular values of the stacked relator-constraint matrix (empty when
  /// there are no relators); rank decisions are auditable from these.
  std::vector<double> singular_values;
};

/// Cocycle space: null space of the relator constraints over the stacked
/// generator values (k*d unknowns).  Also fills the coboundary dimension
/// and dimH1 = dimZ1 - dimB1.
CohomologyReport cocycle_space(const OrthogonalRep& rep, double sv_tol = 1e-9);

/// Orthonormal basis (columns, in R^{k*d}) of the span of the coboundary
/// tuples (pi_s eta - eta)_s over eta; dimB1 = d - dim Fix(pi).
Eigen::MatrixXd coboundary_space(const OrthogonalRep& rep,
                                 double sv_tol = 1e-9);

/// Full report combining the two spaces.
CohomologyReport h1(const OrthogonalRep& rep, double sv_tol = 1e-9);

/// JSON rendering: {dimZ1, dimB1, dimH1, singular_values, basis} where basis
/// lists each Z1 basis cocycle as its per-generator value vectors.
std::string report_to_json(const CohomologyReport& report);

struct CoboundaryFit {
  Eigen::VectorXd eta;
  std::vector<double> word_residuals;  // ||(pi_w - I) eta - b(w)|| per word
  double max_residual = 0.0;
  /// True when the stacked (pi_w - I) system has rank < d (fixed vectors
  /// survive in every sample); eta is then the minimum-norm solution.
  bool rank_deficient = false;
};

/// Least-squares eta minimizing sum_w ||extend(b,w) - (pi_w eta - eta)||^2
/// over the given sample of words.
CoboundaryFit coboundary_fit(const RepCocycle& b,
                             const std::vector<Word>& words,
                             double sv_tol = 1e-9);

/// Same, sampled on the free-group ball of radius 4.
CoboundaryFit coboundary_fit(const RepCocycle& b, double sv_tol = 1e-9);

struct GrowthPoint {
  int radius = 0;
  double max_norm = 0.0;  // max ||b(w)|| over the ball of this radius
};

/// Max cocycle norm over reduced-word balls of radius 0..radius, treating
/// the generators as free; values grow along a breadth-first recursion so
/// each word costs one matrix-vector product.
std::vector<GrowthPoint> growth_probe(
    const RepCocycle& b, int radius,
    std::size_t cap = fock::FockBasis::default_cap);

/// Same over a finite group: ball radius measured by shortest word length.
std::vector<GrowthPoint> growth_probe(const RepCocycle& b,
                                      const FiniteGroup& table, int radius);

}  // namespace gaussact::coh
