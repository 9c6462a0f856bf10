#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "gaussact/fock.hpp"
#include "gaussact/wick.hpp"

using namespace gaussact::fock;
using namespace gaussact::wick;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

double double_factorial_odd(int n) {
  // (n - 1)!! for even n >= 0.
  double result = 1.0;
  for (int k = n - 1; k >= 1; k -= 2) result *= k;
  return result;
}

VectorXcd unit_vec(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> gauss;
  VectorXcd v(d);
  for (int i = 0; i < d; ++i) v[i] = Complex(gauss(rng), 0.0);
  return v / v.norm();
}

MatrixXd rotation2(double t) {
  MatrixXd r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

// Projection of an operator matrix onto rows and columns of degree <= cut.
MatrixXcd degree_block(const FockOperator& a, int cut) {
  std::size_t n = a.basis->degree_offset(cut) + a.basis->degree_count(cut);
  return a.mat.topLeftCorner(n, n);
}

}  // namespace

TEST_CASE("creation and annihilation act by shift and weighted shift") {
  auto basis = enumerate_basis(1, 4);
  VectorXcd e1 = VectorXcd::Ones(1);
  FockOperator x = creation(basis, e1);
  FockOperator d = annihilation(basis, e1);
  for (int n = 0; n < 4; ++n) {
    CHECK(x.mat(n + 1, n) == Complex(1.0));
    CHECK(d.mat(n, n + 1) == Complex(n + 1.0));
  }
  CHECK(d.mat.col(0).norm() == 0.0);        // annihilation kills the vacuum
  CHECK(x.mat.col(4).norm() == 0.0);        // creation compressed at the top
}

TEST_CASE("annihilation is the weighted adjoint of creation") {
  auto basis = enumerate_basis(2, 4);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss;
  VectorXcd xi(2);
  xi << Complex(gauss(rng), gauss(rng)), Complex(gauss(rng), gauss(rng));
  FockOperator x = creation(basis, xi);
  FockOperator d = annihilation(basis, xi);
  CHECK((weighted_adjoint(x).mat - d.mat).norm() < 1e-13);
  CHECK((weighted_adjoint(d).mat - x.mat).norm() < 1e-13);
  // Adjoint pairing through the public inner product on random vectors.
  FockVector v{basis, VectorXcd::Random(basis->size())};
  FockVector w{basis, VectorXcd::Random(basis->size())};
  Complex lhs = inner_product(x.apply(v), w);
  Complex rhs = inner_product(v, d.apply(w));
  CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
}

TEST_CASE("fields of real vectors commute below the truncation edge") {
  auto basis = enumerate_basis(2, 6);
  VectorXcd xi(2), eta(2);
  xi << 0.8, -0.6;
  eta << 0.3, 1.1;
  FockOperator sx = field(basis, xi);
  FockOperator se = field(basis, eta);
  FockOperator comm{basis, sx.mat * se.mat - se.mat * sx.mat};
  CHECK(degree_block(comm, 4).norm() < 1e-13);
}

TEST_CASE("field is weighted self-adjoint for real vectors") {
  auto basis = enumerate_basis(3, 4);
  VectorXcd xi(3);
  xi << 0.2, -1.3, 0.7;
  CHECK(weighted_self_adjoint(field(basis, xi)));
}

TEST_CASE("vacuum moments are the Gaussian moments (n-1)!!") {
  std::mt19937_64 rng(17);
  for (int d : {1, 2, 3}) {
    auto basis = enumerate_basis(d, 5);
    VectorXcd xi = unit_vec(rng, d);
    for (int n = 0; n <= 8; ++n) {
      double expect = (n % 2 == 0) ? double_factorial_odd(n) : 0.0;
      CHECK(std::abs(moment(basis, xi, n) - expect) <= 1e-10);
    }
  }
}

TEST_CASE("moment demands enough truncation headroom") {
  auto basis = enumerate_basis(1, 3);
  VectorXcd xi = VectorXcd::Ones(1);
  CHECK_THROWS_AS(moment(basis, xi, 8), DomainError);
  CHECK(moment(basis, xi, 6) == doctest::Approx(15.0));  // ceil(6/2) = 3 fits
}

TEST_CASE("kappa rescales the field and its moments") {
  auto basis = enumerate_basis(1, 3);
  VectorXcd xi = VectorXcd::Ones(1);
  FockOperator s_half = field(basis, xi, FieldConvention{0.5});
  FockVector v = s_half.apply(s_half.apply(vacuum(basis)));
  // <s(xi)^2 Omega, Omega> scales with kappa^2.
  CHECK(inner_product(v, vacuum(basis)).real() == doctest::Approx(0.25));
}

TEST_CASE("mixed moments of orthogonal vectors factorize") {
  auto basis = enumerate_basis(2, 5);
  VectorXcd xi(2), eta(2);
  xi << 1.0, 0.0;
  eta << 0.0, 1.0;
  for (int m = 0; m <= 8; ++m) {
    for (int n = 0; n + m <= 8; ++n) {
      double expect = ((m % 2 == 0) ? double_factorial_odd(m) : 0.0) *
                      ((n % 2 == 0) ? double_factorial_odd(n) : 0.0);
      CHECK(std::abs(mixed_moment(basis, xi, m, eta, n) - expect) <= 1e-10);
    }
  }
  // A rotated orthogonal pair factorizes the same way.
  VectorXcd a(2), b(2);
  a << 0.6, 0.8;
  b << -0.8, 0.6;
  CHECK(std::abs(mixed_moment(basis, a, 2, b, 4) - 3.0) <= 1e-10);
  CHECK_THROWS_AS(mixed_moment(basis, a, 2, a, 2), DomainError);
}

TEST_CASE("second quantization of a diagonal map scales by occupation powers") {
  auto basis = enumerate_basis(2, 3);
  MatrixXcd t = MatrixXcd::Zero(2, 2);
  t(0, 0) = 2.0;
  t(1, 1) = 3.0;
  FockOperator lift = second_quantize(basis, t);
  for (std::size_t j = 0; j < basis->size(); ++j) {
    const auto& m = basis->state(j).counts;
    double expect = std::pow(2.0, m[0]) * std::pow(3.0, m[1]);
    CHECK(std::abs(lift.mat(j, j) - Complex(expect)) < 1e-12);
    lift.mat(j, j) = 0.0;
  }
  CHECK(lift.mat.norm() < 1e-12);  // nothing off the diagonal
}

TEST_CASE("second quantization is functorial and weighted-unitary") {
  auto basis = enumerate_basis(2, 6);
  MatrixXd a = rotation2(0.7), b = rotation2(-1.3);
  FockOperator la = second_quantize(basis, a);
  FockOperator lb = second_quantize(basis, b);
  FockOperator lab = second_quantize(basis, MatrixXd(a * b));
  CHECK((lab.mat - la.mat * lb.mat).norm() < 1e-12);
  CHECK((second_quantize(basis, MatrixXd(MatrixXd::Identity(2, 2))).mat -
         identity_op(basis).mat)
            .norm() < 1e-14);
  // Unitarity for the weighted metric.
  FockOperator prod{basis, weighted_adjoint(la).mat * la.mat};
  CHECK((prod.mat - identity_op(basis).mat).norm() < 1e-12);
  // Degree-diagonal: no coupling between degree blocks.
  for (std::size_t i = 0; i < basis->size(); ++i) {
    for (std::size_t j = 0; j < basis->size(); ++j) {
      if (basis->state(i).degree() != basis->state(j).degree()) {
        CHECK(std::abs(la.mat(i, j)) < 1e-14);
      }
    }
  }
}

TEST_CASE("second quantization intertwines creation and fields") {
  auto basis = enumerate_basis(2, 5);
  MatrixXd t = rotation2(0.9);
  FockOperator lift = second_quantize(basis, t);
  FockOperator inv = second_quantize(basis, MatrixXd(t.transpose()));
  VectorXcd xi(2);
  xi << 0.4, -1.1;
  VectorXcd txi = t.cast<Complex>() * xi;
  MatrixXcd lhs = lift.mat * creation(basis, xi).mat * inv.mat;
  CHECK((lhs - creation(basis, txi).mat).norm() < 1e-12);
  MatrixXcd lhs_f = lift.mat * field(basis, xi).mat * inv.mat;
  CHECK((lhs_f - field(basis, txi).mat).norm() < 1e-12);
}

TEST_CASE("differential second quantization of the identity counts degree") {
  auto basis = enumerate_basis(3, 4);
  FockOperator n_op = differential_second_quantize(
      basis, MatrixXcd(MatrixXcd::Identity(3, 3)));
  for (std::size_t j = 0; j < basis->size(); ++j) {
    CHECK(std::abs(n_op.mat(j, j) -
                   Complex(static_cast<double>(basis->state(j).degree()))) <
          1e-14);
  }
}

TEST_CASE("differential second quantization obeys the Leibniz rule on tensors") {
  auto basis = enumerate_basis(2, 4);
  MatrixXcd t(2, 2);
  t << 0.3, -0.8, 1.2, 0.5;
  FockOperator dg = differential_second_quantize(basis, t);
  VectorXcd xi(2), eta(2);
  xi << 1.0, 2.0;
  eta << -0.5, 0.7;
  FockVector lhs = dg.apply(symmetric_tensor(basis, {xi, eta}));
  FockVector rhs1 = symmetric_tensor(basis, {VectorXcd(t * xi), eta});
  FockVector rhs2 = symmetric_tensor(basis, {xi, VectorXcd(t * eta)});
  CHECK((lhs.coeff - rhs1.coeff - rhs2.coeff).norm() < 1e-13);
}

TEST_CASE("differential second quantization is the lift's derivative at zero") {
  auto basis = enumerate_basis(2, 5);
  MatrixXd skew(2, 2);
  skew << 0.0, -1.0, 1.0, 0.0;
  FockOperator dg = differential_second_quantize(basis, MatrixXd(skew));
  auto residual = [&](double t) {
    MatrixXd flow = (t * skew).exp();
    FockOperator lift = second_quantize(basis, flow);
    return (lift.mat - identity_op(basis).mat - t * dg.mat).norm() / t;
  };
  double r1 = residual(1e-3), r2 = residual(5e-4);
  CHECK(r1 < 0.1);  // remainder norm ~ t ||dG(skew)^2|| / 2
  CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.05));  // O(t^2) remainder
  // Skew generator lifts to a weighted skew-adjoint operator.
  CHECK((weighted_adjoint(dg).mat + dg.mat).norm() < 1e-12);
}

TEST_CASE("op_exp inverts cleanly on both code paths") {
  auto basis = enumerate_basis(2, 5);
  VectorXcd xi(2);
  xi << 0.6, -0.2;
  // Self-adjoint path: field operator.
  FockOperator s = field(basis, xi);
  FockOperator u = op_exp(s, Complex(0, 1));
  FockOperator uinv = op_exp(s, Complex(0, -1));
  CHECK((u.mat * uinv.mat - identity_op(basis).mat).norm() <= 1e-10);
  // exp(i s) is exactly unitary for the weighted metric.
  CHECK((weighted_adjoint(u).mat * u.mat - identity_op(basis).mat).norm() <
        1e-12);
  // General path: creation alone is nilpotent, not self-adjoint.
  FockOperator x = creation(basis, xi);
  CHECK(!weighted_self_adjoint(x));
  FockOperator ex = op_exp(x, Complex(1.0));
  FockOperator exm = op_exp(x, Complex(-1.0));
  CHECK((ex.mat * exm.mat - identity_op(basis).mat).norm() <= 1e-10);
}

TEST_CASE("exponential of creation reproduces the tensor-power expansion") {
  auto basis = enumerate_basis(2, 6);
  VectorXcd xi(2);
  xi << Complex(0.5, 0.0), Complex(-0.3, 0.4);
  FockVector col{basis, op_exp(creation(basis, xi), Complex(1.0)).mat.col(0)};
  double fact = 1.0;
  VectorXcd expect = VectorXcd::Zero(basis->size());
  for (int n = 0; n <= 6; ++n) {
    if (n > 0) fact *= n;
    std::vector<VectorXcd> factors(n, xi);
    expect += symmetric_tensor(basis, factors).coeff / fact;
  }
  CHECK((col.coeff - expect).norm() < 1e-12);
}

TEST_CASE("coherent vacuum column matches the closed form") {
  // exp(-i s(xi)) Omega = e^(-|xi|^2/2) sum_n (-i)^n xi tensor^n / n!
  auto basis = enumerate_basis(1, 14);
  VectorXcd xi(1);
  xi << 0.9;
  FockOperator omega = op_exp(field(basis, xi), Complex(0, -1));
  double amp = std::exp(-0.81 / 2.0);
  Complex phase = 1.0;
  double fact = 1.0;
  for (int n = 0; n <= 7; ++n) {
    if (n > 0) {
      fact *= n;
      phase *= Complex(0, -1);
    }
    Complex expect = amp * phase * std::pow(0.9, n) / fact;
    CHECK(std::abs(omega.mat(n, 0) - expect) < 1e-9);
  }
}

TEST_CASE("truncation refinement leaves low-degree exponentials unchanged") {
  VectorXcd xi(1);
  xi << 1.0;
  auto coarse = enumerate_basis(1, 12);
  auto fine = enumerate_basis(1, 16);
  VectorXcd a = op_exp(field(coarse, xi), Complex(0, -1)).mat.col(0);
  VectorXcd b = op_exp(field(fine, xi), Complex(0, -1)).mat.col(0);
  CHECK((a.head(7) - b.head(7)).norm() < 1e-10);
}
