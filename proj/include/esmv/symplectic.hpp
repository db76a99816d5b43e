#pragma once

#include "esmv/exact_linalg.hpp"

#include <map>
#include <optional>
#include <string>

namespace esmv {

// A symplectic vector space in a fixed basis: the pairing matrix is exact,
// antisymmetric and nondegenerate. The standard fiber uses the block form
// [[0, I], [-I, 0]], which every report echoes.
struct SymplecticSpace {
  int dim = 0;  // 2n
  MatQ omega;

  explicit SymplecticSpace(MatQ om);
  static SymplecticSpace standard(int n);
  int half_dim() const { return dim / 2; }
  Eigen::MatrixXd omega_dense() const { return to_dense(omega); }
};

// A taming J of (S, omega) together with the Euclidean metric it induces,
// Q(x, y) = omega(x, J y), i.e. q = omega * j as matrices.
template <class Scalar>
struct Taming {
  Mat<Scalar> j;
  Mat<Scalar> q;
};

bool is_symplectic(const MatQ& m, const SymplecticSpace& sp);
bool is_symplectic(const Eigen::MatrixXd& m, const SymplecticSpace& sp, double tol);

Taming<Rational> validate_taming(const MatQ& j, const SymplecticSpace& sp);
Taming<double> validate_taming(const Eigen::MatrixXd& j, const SymplecticSpace& sp, double tol);

// A full lattice in the ambient fiber, spanned by the columns of `basis`.
struct IntegralLattice {
  MatZ basis;

  explicit IntegralLattice(MatZ b);
  MatQ basis_q() const { return to_rational(basis); }
};

// Elementary-divisor type (t_1 | ... | t_n) of the Gram matrix B^T omega B.
std::vector<Integer> lattice_type(const IntegralLattice& lat, const SymplecticSpace& sp);

// Membership in the modified Siegel modular group of the lattice: m is
// symplectic and maps the lattice onto itself.
bool siegel_membership(const MatZ& m, const IntegralLattice& lat, const SymplecticSpace& sp);

bool lattice_contains(const IntegralLattice& lat, const VecQ& v);
bool same_lattice(const MatZ& a, const MatZ& b);

struct EsmParameters {
  double kappa = 1.0;
  std::map<std::string, double> tolerances = default_tolerances();

  static std::map<std::string, double> default_tolerances();
  double tol(const std::string& name) const;
  void validate() const;
};

}  // namespace esmv
