#pragma once

#include "esmv/types.hpp"

namespace esmv {

// Row-reduction over the rationals. Returns the rank; `a` is replaced by its
// reduced row echelon form and `pivot_cols`, when non-null, receives the
// pivot column indices in order.
int rref(MatQ& a, std::vector<int>* pivot_cols = nullptr);

int rank_exact(MatQ a);
Rational det_exact(MatQ a);
MatQ inverse_exact(const MatQ& a);

// Canonical kernel basis (one column per free variable of the RREF, in
// column order, with the free variable set to 1).
MatQ nullspace_exact(const MatQ& a);

// Solves a x = b. Returns false if the system is inconsistent.
bool solve_exact(const MatQ& a, const MatQ& b, MatQ& x);

// Canonical Hermite normal form of the column span of `a` (full column
// rank). Two integer matrices generate the same lattice iff their forms
// agree.
MatZ hermite_colspan(const MatZ& a);

struct SmithResult {
  MatZ d;  // u * a * v = d, diagonal with divisibility chain
  MatZ u;
  MatZ v;
  int rank = 0;
  std::vector<Integer> divisors() const;  // nonzero diagonal entries
};

SmithResult smith_normal_form(const MatZ& a);

// Basis of the integer kernel lattice of `a` (columns).
MatZ integer_kernel(const MatZ& a);

// Elementary divisors (t_1 | t_2 | ... | t_m) of a nondegenerate integer
// antisymmetric Gram matrix, by integer symplectic reduction: repeatedly
// select the minimal nonzero pairing (ties broken by the lexicographically
// smallest index pair), clear its row and column by integer basis
// operations, and recurse on the complement.
std::vector<Integer> symplectic_divisors(MatZ gram);

Integer floor_div(const Integer& a, const Integer& b);

}  // namespace esmv
