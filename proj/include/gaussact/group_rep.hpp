#pragma once

// Finitely presented groups and their finite-dimensional orthogonal
// representations: word reduction and evaluation, presentation checking,
// sums/tensors, invariant vectors, weak mixing, spectral gap estimates, and
// truncated regular representations on free-group balls.
//
// Words are sequences of nonzero integers: letter +(i+1) is generator i,
// letter -(i+1) its inverse.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaussact/fock.hpp"  // ResourceError / DomainError

namespace gaussact::grp {

using fock::DomainError;
using fock::ResourceError;

using Word = std::vector<int>;

/// Generators-and-relators description; relators are words equal to the
/// identity.
struct GroupPresentation {
  int generator_count = 0;
  std::vector<Word> relators;
};

/// Orthogonal representation: one matrix per generator, all the same size.
/// Orthogonality and relator satisfaction are not enforced on construction;
/// rep_check reports the residuals (ball truncations of regular
/// representations are deliberately only partial isometries).
struct OrthogonalRep {
  GroupPresentation presentation;
  std::vector<Eigen::MatrixXd> generators;

  int dim() const {
    return generators.empty() ? 0 : static_cast<int>(generators[0].rows());
  }
};

/// Free reduction: cancel adjacent inverse pairs until none remain.
Word reduce(const Word& w);

/// Inverse word (reverse order, flipped letters).
Word inverse(const Word& w);

/// Concatenate and reduce.
Word concat(const Word& a, const Word& b);

/// Validate that each letter indexes a generator of the presentation.
void check_word(const GroupPresentation& p, const Word& w);

/// Product of generator matrices along the word; inverse letters use the
/// transpose (exact inverse once orthogonality holds).
Eigen::MatrixXd evaluate(const OrthogonalRep& rep, const Word& w);

struct RepCheckReport {
  double orthogonality_residual = 0.0;        // max_s ||pi_s^T pi_s - I||
  std::vector<double> relator_residuals;      // ||pi(r) - I|| per relator
  double max_relator_residual = 0.0;

  bool pass(double tol = 1e-10) const {
    return orthogonality_residual <= tol && max_relator_residual <= tol;
  }
};

RepCheckReport rep_check(const OrthogonalRep& rep);

/// Block-diagonal sum; presentations must agree.
OrthogonalRep direct_sum(const OrthogonalRep& a, const OrthogonalRep& b);

/// Kronecker product per generator; presentations must agree.
OrthogonalRep tensor(const OrthogonalRep& a, const OrthogonalRep& b);

/// Orthonormal basis (columns) of the joint fixed space {v : pi_s v = v}.
/// Computed as the null space of C = sum_s (pi_s - I)^T (pi_s - I); columns
/// are eigenvectors of C below the eigenvalue threshold.
Eigen::MatrixXd invariant_vectors(const OrthogonalRep& rep,
                                  double eig_tol = 1e-8);

/// True when pi tensor pi has no invariant vector (eigenvalue threshold
/// 1e-8).  Any genuinely orthogonal finite-dimensional rep returns false:
/// sum_i e_i tensor e_i is always fixed.
bool weak_mixing_check(const OrthogonalRep& rep, double eig_tol = 1e-8);

/// Smallest eigenvalue of sum_s (I - pi_s)^T (I - pi_s) on the orthogonal
/// complement of the fixed space; empty complement (trivial rep) reports
/// nullopt.
std::optional<double> spectral_gap_estimate(const OrthogonalRep& rep,
                                            double eig_tol = 1e-8);

/// Reduced words of the free group on `rank` generators with length <= radius,
/// ordered by length then lexicographically by letters; the empty word first.
std::vector<Word> free_ball(int rank, int radius,
                            std::size_t cap = fock::FockBasis::default_cap);

/// Left-translation representation of the free group on the span of its ball:
/// generator s maps basis word w to s.w when that stays in the ball, to 0
/// otherwise (partial isometry).  Orthogonality holds exactly on the sub-ball
/// of radius - 1.
OrthogonalRep regular_rep_ball(int rank, int radius,
                               std::size_t cap = fock::FockBasis::default_cap);

/// Finite group as an explicit multiplication table.  Element 0 is the
/// identity; element_words expresses every element in presentation
/// generators (shortest-first, found by breadth-first search).
struct FiniteGroup {
  int order = 0;
  std::vector<std::vector<int>> table;  // table[a][b] = a * b
  std::vector<int> inverse;
  std::vector<Word> element_words;
  std::vector<int> generator_elements;

  static FiniteGroup cyclic(int n);
  /// Closure of permutation generators (each a vector image of 0..n-1).
  static FiniteGroup from_permutations(
      const std::vector<std::vector<int>>& perms);
};

/// (1/|G|) sum_g pi_g: the averaging projector onto the fixed space.
Eigen::MatrixXd averaging_projector(const OrthogonalRep& rep,
                                    const FiniteGroup& table);

/// JSON serialization: {"generators": n, "relators": [[int]],
/// "matrices": [[[real]]]}.
std::string representation_to_json(const OrthogonalRep& rep);
OrthogonalRep representation_from_json(const std::string& text);
void save_representation(const OrthogonalRep& rep, const std::string& path);
OrthogonalRep load_representation(const std::string& path);

}  // namespace gaussact::grp
