#include <doctest.h>

#include "esmv/exact_linalg.hpp"

#include <random>

using namespace esmv;

namespace {

MatZ mat2z(std::initializer_list<std::initializer_list<long>> rows) {
  MatZ m(static_cast<Eigen::Index>(rows.size()),
         static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (long v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Random unimodular matrix as a product of elementary operations.
MatZ random_unimodular(int n, std::mt19937_64& rng) {
  MatZ u = MatZ::Identity(n, n);
  std::uniform_int_distribution<int> idx(0, n - 1), coef(-2, 2), op(0, 2);
  for (int step = 0; step < 4 * n; ++step) {
    int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    switch (op(rng)) {
      case 0: u.row(i) += Integer(coef(rng)) * u.row(j); break;
      case 1: u.row(i).swap(u.row(j)); break;
      default: u.row(i) = -u.row(i); break;
    }
  }
  return u;
}

}  // namespace

TEST_CASE("rref rank and nullspace") {
  MatQ a(2, 3);
  a << 1, 2, 3, 2, 4, 6;
  CHECK(rank_exact(a) == 1);
  MatQ ker = nullspace_exact(a);
  CHECK(ker.cols() == 2);
  CHECK(MatQ(a * ker) == MatQ(MatQ::Zero(2, 2)));
}

TEST_CASE("exact determinant and inverse") {
  MatQ m(2, 2);
  m << Rational(1), Rational(1, 2), Rational(0), Rational(2);
  CHECK(det_exact(m) == Rational(2));
  CHECK(MatQ(m * inverse_exact(m)) == MatQ(MatQ::Identity(2, 2)));
  MatQ sing(2, 2);
  sing << 1, 2, 2, 4;
  CHECK_THROWS_AS(inverse_exact(sing), SingularMatrix);
}

TEST_CASE("solve_exact consistency") {
  MatQ a(2, 2), b(2, 1), x;
  a << 1, 1, 0, 1;
  b << 3, 2;
  REQUIRE(solve_exact(a, b, x));
  CHECK(MatQ(a * x) == b);

  MatQ bad_a(2, 1), bad_b(2, 1);
  bad_a << 1, 1;
  bad_b << 1, 2;
  CHECK_FALSE(solve_exact(bad_a, bad_b, x));
}

TEST_CASE("hermite form identifies lattices up to right GL(n,Z)") {
  std::mt19937_64 rng(11);
  MatZ b = mat2z({{2, 1}, {0, 3}});
  for (int trial = 0; trial < 20; ++trial) {
    MatZ u = random_unimodular(2, rng);
    CHECK(hermite_colspan(MatZ(b * u)) == hermite_colspan(b));
  }
  MatZ other = mat2z({{1, 0}, {0, 6}});
  CHECK(hermite_colspan(b) != hermite_colspan(other));
}

TEST_CASE("smith normal form") {
  MatZ a = mat2z({{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}});
  SmithResult s = smith_normal_form(a);
  CHECK(MatZ(s.u * a * s.v) == s.d);
  auto div = s.divisors();
  REQUIRE(div.size() == 3);
  CHECK(div[0] == 2);
  CHECK(div[1] == 6);
  CHECK(div[2] == 12);
  // unimodular transforms
  CHECK(abs(numerator(det_exact(to_rational(s.u)))) == 1);
  CHECK(abs(numerator(det_exact(to_rational(s.v)))) == 1);
}

TEST_CASE("smith divisors invariant under unimodular pre/post composition") {
  std::mt19937_64 rng(23);
  MatZ a = mat2z({{0, 2, 1}, {3, 0, 0}, {1, 1, 4}});
  const auto base = smith_normal_form(a).divisors();
  for (int trial = 0; trial < 15; ++trial) {
    MatZ u = random_unimodular(3, rng), v = random_unimodular(3, rng);
    CHECK(smith_normal_form(MatZ(u * a * v)).divisors() == base);
  }
}

TEST_CASE("integer kernel") {
  MatZ a = mat2z({{1, 2, 3}});
  MatZ k = integer_kernel(a);
  CHECK(k.cols() == 2);
  CHECK(MatZ(a * k) == MatZ(MatZ::Zero(1, 2)));
  // saturated: (1,1,-1) lies in the kernel and must be an integer combination
  MatQ x;
  MatQ target(3, 1);
  target << 1, 1, -1;
  REQUIRE(solve_exact(to_rational(k), target, x));
  for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(denominator(x(i, 0)) == 1);
}

TEST_CASE("symplectic divisors: normal forms") {
  CHECK(symplectic_divisors(mat2z({{0, 1}, {-1, 0}})) == std::vector<Integer>{1});
  CHECK(symplectic_divisors(mat2z({{0, 2}, {-2, 0}})) == std::vector<Integer>{2});
  MatZ g16 = mat2z({{0, 0, 1, 0}, {0, 0, 0, 6}, {-1, 0, 0, 0}, {0, -6, 0, 0}});
  CHECK(symplectic_divisors(g16) == std::vector<Integer>({1, 6}));
}

TEST_CASE("symplectic divisors invariant under congruence by GL(2n,Z)") {
  std::mt19937_64 rng(37);
  MatZ g16 = mat2z({{0, 0, 1, 0}, {0, 0, 0, 6}, {-1, 0, 0, 0}, {0, -6, 0, 0}});
  for (int trial = 0; trial < 25; ++trial) {
    MatZ u = random_unimodular(4, rng);
    CHECK(symplectic_divisors(MatZ(u.transpose() * g16 * u)) ==
          std::vector<Integer>({1, 6}));
  }
}

TEST_CASE("symplectic divisors reject degenerate and non-antisymmetric input") {
  CHECK_THROWS_AS(symplectic_divisors(MatZ(MatZ::Zero(2, 2))), DegenerateLattice);
  CHECK_THROWS_AS(symplectic_divisors(mat2z({{1, 0}, {0, 1}})), NotIntegral);
}
