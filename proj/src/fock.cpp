#include "gaussact/fock.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace gaussact::fock {

int Occupation::degree() const {
  int sum = 0;
  for (int c : counts) sum += c;
  return sum;
}

std::size_t multichoose(int d, int k, std::size_t cap) {
  if (d <= 0) return k == 0 ? 1 : 0;
  if (k < 0) return 0;
  // C(d + k - 1, k), multiplying in increasing-factor order; saturate early.
  std::size_t limit = (cap == SIZE_MAX) ? SIZE_MAX - 1 : cap;
  unsigned long long result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (d - 1 + i) / i is always integral at each step.
    unsigned long long numer = static_cast<unsigned long long>(d - 1 + i);
    if (result > (ULLONG_MAX / numer)) return limit + 1;
    result = result * numer / static_cast<unsigned long long>(i);
    if (result > limit) return limit + 1;
  }
  return static_cast<std::size_t>(result);
}

std::size_t truncated_dimension(int d, int D, std::size_t cap) {
  std::size_t limit = (cap == SIZE_MAX) ? SIZE_MAX - 1 : cap;
  std::size_t total = 0;
  for (int k = 0; k <= D; ++k) {
    std::size_t layer = multichoose(d, k, limit);
    if (layer > limit || total > limit - layer) return limit + 1;
    total += layer;
  }
  return total;
}

FockBasis::FockBasis(int modes, int max_degree)
    : modes_(modes), max_degree_(max_degree) {}

namespace {

void enumerate_degree(int modes, int degree, std::vector<int>& prefix,
                      std::vector<Occupation>& out) {
  if (static_cast<int>(prefix.size()) == modes - 1) {
    prefix.push_back(degree);
    out.push_back(Occupation{prefix});
    prefix.pop_back();
    return;
  }
  for (int k = 0; k <= degree; ++k) {
    prefix.push_back(k);
    enumerate_degree(modes, degree - k, prefix, out);
    prefix.pop_back();
  }
}

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

}  // namespace

BasisPtr enumerate_basis(int modes, int max_degree, std::size_t cap) {
  if (modes < 1) throw DomainError("enumerate_basis: need at least one mode");
  if (max_degree < 0) throw DomainError("enumerate_basis: negative degree cap");
  std::size_t dim = truncated_dimension(modes, max_degree, cap);
  if (dim > cap) {
    throw ResourceError("enumerate_basis: truncated dimension exceeds cap " +
                        std::to_string(cap) + " for d=" + std::to_string(modes) +
                        ", D=" + std::to_string(max_degree));
  }

  auto basis = std::shared_ptr<FockBasis>(new FockBasis(modes, max_degree));
  basis->states_.reserve(dim);
  basis->offsets_.resize(max_degree + 2);
  std::vector<int> prefix;
  prefix.reserve(modes);
  for (int degree = 0; degree <= max_degree; ++degree) {
    basis->offsets_[degree] = basis->states_.size();
    enumerate_degree(modes, degree, prefix, basis->states_);
  }
  basis->offsets_[max_degree + 1] = basis->states_.size();

  basis->weights_.resize(basis->states_.size());
  for (std::size_t i = 0; i < basis->states_.size(); ++i) {
    double logw = 0.0;
    for (int c : basis->states_[i].counts) logw += log_factorial(c);
    basis->weights_[i] = std::exp(logw);
  }
  return basis;
}

std::ptrdiff_t FockBasis::index_of(const Occupation& m) const {
  if (static_cast<int>(m.counts.size()) != modes_) return -1;
  int degree = 0;
  for (int c : m.counts) {
    if (c < 0) return -1;
    degree += c;
  }
  if (degree > max_degree_) return -1;

  // Rank within the degree block of the ascending-lex enumeration: states
  // preceding m in coordinate i carry a smaller count there.
  std::size_t rank = 0;
  int remaining = degree;
  for (int i = 0; i < modes_ - 1; ++i) {
    for (int k = 0; k < m.counts[i]; ++k) {
      rank += multichoose(modes_ - 1 - i, remaining - k);
    }
    remaining -= m.counts[i];
  }
  return static_cast<std::ptrdiff_t>(offsets_[degree] + rank);
}

double FockVector::norm() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < basis->size(); ++i) {
    sum += basis->weight(i) * std::norm(coeff[static_cast<Eigen::Index>(i)]);
  }
  return std::sqrt(sum);
}

FockVector vacuum(const BasisPtr& basis) {
  FockVector v{basis, Eigen::VectorXcd::Zero(basis->size())};
  v.coeff[0] = 1.0;
  return v;
}

Complex inner_product(const FockVector& v, const FockVector& w) {
  if (!v.basis || !w.basis || !v.basis->compatible(*w.basis)) {
    throw DomainError("inner_product: incompatible bases");
  }
  Complex sum = 0.0;
  for (Eigen::Index i = 0; i < v.coeff.size(); ++i) {
    sum += v.basis->weight(i) * v.coeff[i] * std::conj(w.coeff[i]);
  }
  return sum;
}

FockVector symmetric_tensor(const BasisPtr& basis,
                            const std::vector<Eigen::VectorXcd>& factors) {
  if (static_cast<int>(factors.size()) > basis->max_degree()) {
    throw DomainError("symmetric_tensor: degree exceeds truncation");
  }
  // Multiply factors into the vacuum one at a time; appending a mode vector
  // xi sends e^m to sum_i xi_i e^(m + delta_i), which never leaves the
  // truncation while the total degree stays <= max_degree.
  FockVector v = vacuum(basis);
  int degree = 0;
  for (const auto& xi : factors) {
    if (xi.size() != basis->modes()) {
      throw DomainError("symmetric_tensor: factor has wrong mode count");
    }
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(basis->size());
    std::size_t lo = basis->degree_offset(degree);
    std::size_t hi = lo + basis->degree_count(degree);
    for (std::size_t j = lo; j < hi; ++j) {
      Complex c = v.coeff[static_cast<Eigen::Index>(j)];
      if (c == Complex(0.0)) continue;
      Occupation m = basis->state(j);
      for (int i = 0; i < basis->modes(); ++i) {
        if (xi[i] == Complex(0.0)) continue;
        ++m.counts[i];
        next[basis->index_of(m)] += c * xi[i];
        --m.counts[i];
      }
    }
    v.coeff.swap(next);
    ++degree;
  }
  return v;
}

Eigen::VectorXcd to_complex(const Eigen::VectorXd& v) {
  return v.cast<Complex>();
}

}  // namespace gaussact::fock
