#pragma once

// Degree-truncated symmetric Fock space over C^d in occupation coordinates.
//
// States are indexed by occupation multi-indices m = (m_1, ..., m_d) with
// |m| = sum_i m_i <= max_degree, listed in graded lexicographic order (vacuum
// first).  The inner product carries the renormalized symmetric-tensor metric:
// basis states are mutually orthogonal with <e^m, e^m> = prod_i m_i!.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gaussact::fock {

using Complex = std::complex<double>;

/// Requested object exceeds a configured resource cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (wrong basis, degree overflow, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Occupation multi-index: counts per mode, all nonnegative.
struct Occupation {
  std::vector<int> counts;

  int degree() const;
  bool operator==(const Occupation&) const = default;
};

/// C(d + k - 1, k): number of degree-k occupation states on d modes.
/// Saturates at `cap + 1` instead of overflowing.
std::size_t multichoose(int d, int k, std::size_t cap = SIZE_MAX);

/// Total number of states of degree <= D on d modes (saturating at cap + 1).
std::size_t truncated_dimension(int d, int D, std::size_t cap = SIZE_MAX);

class FockBasis;
using BasisPtr = std::shared_ptr<const FockBasis>;

/// Enumerated basis of the truncated symmetric Fock space.  Immutable; shared
/// by vectors and operators built over it.
class FockBasis {
 public:
  static constexpr std::size_t default_cap = 2'000'000;

  int modes() const { return modes_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return states_.size(); }

  const Occupation& state(std::size_t i) const { return states_[i]; }
  const std::vector<Occupation>& states() const { return states_; }

  /// Index of an occupation in basis order, or -1 if it lies outside the
  /// truncation (degree too high or negative count).
  std::ptrdiff_t index_of(const Occupation& m) const;

  /// Diagonal metric weight prod_i m_i! of state i.
  double weight(std::size_t i) const { return weights_[i]; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// First basis index of the given degree block (blocks are contiguous).
  std::size_t degree_offset(int degree) const { return offsets_[degree]; }
  /// Number of states of exactly the given degree.
  std::size_t degree_count(int degree) const {
    return offsets_[degree + 1] - offsets_[degree];
  }

  /// Structural compatibility: same mode count and truncation degree.
  bool compatible(const FockBasis& other) const {
    return modes_ == other.modes_ && max_degree_ == other.max_degree_;
  }

  friend BasisPtr enumerate_basis(int modes, int max_degree, std::size_t cap);

 private:
  FockBasis(int modes, int max_degree);

  int modes_;
  int max_degree_;
  std::vector<Occupation> states_;
  std::vector<std::size_t> offsets_;  // size max_degree + 2
  Eigen::VectorXd weights_;
};

/// Enumerate all occupations of degree <= max_degree on `modes` modes in
/// graded lexicographic order.  Throws ResourceError if the state count would
/// exceed `cap` (checked arithmetically before any allocation).
BasisPtr enumerate_basis(int modes, int max_degree,
                         std::size_t cap = FockBasis::default_cap);

/// Vector over a fixed truncated basis.
struct FockVector {
  BasisPtr basis;
  Eigen::VectorXcd coeff;

  /// Norm in the weighted metric.
  double norm() const;
};

/// The vacuum unit vector Omega.
FockVector vacuum(const BasisPtr& basis);

/// Weighted inner product <v, w> = sum_m w(m) v_m conj(w_m); linear in the
/// first argument.  Throws DomainError on incompatible bases.
Complex inner_product(const FockVector& v, const FockVector& w);

/// Symmetric tensor product of the given mode vectors (each of dimension
/// modes()), expanded in occupation coordinates.  Empty factor list gives the
/// vacuum.  Throws DomainError if more factors than max_degree are supplied.
FockVector symmetric_tensor(const BasisPtr& basis,
                            const std::vector<Eigen::VectorXcd>& factors);

/// Convenience lift of a real mode vector to complex coordinates.
Eigen::VectorXcd to_complex(const Eigen::VectorXd& v);

}  // namespace gaussact::fock
