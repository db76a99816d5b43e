#include "esmv/exact_linalg.hpp"

#include <algorithm>
#include <numeric>

namespace esmv {

double pairwise_sum(const std::vector<double>& xs) {
  // Recursive halving with a small base case.
  struct Rec {
    static double run(const double* p, std::size_t n) {
      if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += p[i];
        return s;
      }
      const std::size_t h = n / 2;
      return run(p, h) + run(p + h, n - h);
    }
  };
  return xs.empty() ? 0.0 : Rec::run(xs.data(), xs.size());
}


int rref(MatQ& a, std::vector<int>* pivot_cols) {
  const Eigen::Index rows = a.rows(), cols = a.cols();
  int r = 0;
  if (pivot_cols) pivot_cols->clear();
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i)
      if (a(i, c) != 0) { piv = i; break; }
    if (piv < 0) continue;
    if (piv != r) a.row(piv).swap(a.row(r));
    const Rational inv = Rational(1) / a(r, c);
    a.row(r) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || a(i, c) == 0) continue;
      a.row(i) -= a(i, c) * a.row(r);
    }
    if (pivot_cols) pivot_cols->push_back(static_cast<int>(c));
    ++r;
  }
  return r;
}

int rank_exact(MatQ a) { return rref(a); }

Rational det_exact(MatQ a) {
  if (a.rows() != a.cols()) throw DimensionError("det of non-square matrix");
  const Eigen::Index n = a.rows();
  Rational det = 1;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = c; i < n; ++i)
      if (a(i, c) != 0) { piv = i; break; }
    if (piv < 0) return Rational(0);
    if (piv != c) {
      a.row(piv).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    const Rational inv = Rational(1) / a(c, c);
    for (Eigen::Index i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      const Rational f = a(i, c) * inv;
      for (Eigen::Index j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return det;
}

MatQ inverse_exact(const MatQ& a) {
  if (a.rows() != a.cols()) throw DimensionError("inverse of non-square matrix");
  const Eigen::Index n = a.rows();
  MatQ aug(n, 2 * n);
  aug.leftCols(n) = a;
  aug.rightCols(n) = MatQ::Identity(n, n);
  std::vector<int> pivots;
  rref(aug, &pivots);
  if (pivots.empty() || pivots.back() >= n)
    throw SingularMatrix("matrix not invertible");
  return aug.rightCols(n);
}

MatQ nullspace_exact(const MatQ& a) {
  MatQ r = a;
  std::vector<int> pivots;
  const int rank = rref(r, &pivots);
  const Eigen::Index cols = a.cols();
  std::vector<int> free_cols;
  {
    std::size_t pi = 0;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (pi < pivots.size() && pivots[pi] == c) { ++pi; continue; }
      free_cols.push_back(static_cast<int>(c));
    }
  }
  MatQ basis = MatQ::Zero(cols, static_cast<Eigen::Index>(free_cols.size()));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    const int f = free_cols[k];
    basis(f, static_cast<Eigen::Index>(k)) = 1;
    for (int i = 0; i < rank; ++i) basis(pivots[i], static_cast<Eigen::Index>(k)) = -r(i, f);
  }
  return basis;
}

bool solve_exact(const MatQ& a, const MatQ& b, MatQ& x) {
  if (a.rows() != b.rows()) throw DimensionError("solve: row mismatch");
  const Eigen::Index n = a.cols(), s = b.cols();
  MatQ aug(a.rows(), n + s);
  aug.leftCols(n) = a;
  aug.rightCols(s) = b;
  std::vector<int> pivots;
  rref(aug, &pivots);
  // Inconsistent iff a pivot lands in the right-hand block.
  for (int p : pivots)
    if (p >= n) return false;
  x = MatQ::Zero(n, s);
  for (std::size_t i = 0; i < pivots.size(); ++i)
    x.row(pivots[i]) = aug.block(static_cast<Eigen::Index>(i), n, 1, s);
  return true;
}

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

MatZ hermite_colspan(const MatZ& a) {
  // Row-style HNF of the transpose; the result is the canonical
  // representative of the column span.
  MatZ m = a.transpose();
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    // Euclidean elimination below row r in column c.
    while (true) {
      Eigen::Index piv = -1;
      Integer best = 0;
      for (Eigen::Index i = r; i < rows; ++i) {
        if (m(i, c) == 0) continue;
        Integer v = abs(m(i, c));
        if (piv < 0 || v < best) { piv = i; best = v; }
      }
      if (piv < 0) break;
      if (piv != r) m.row(piv).swap(m.row(r));
      bool clean = true;
      for (Eigen::Index i = r + 1; i < rows; ++i) {
        if (m(i, c) == 0) continue;
        const Integer q = floor_div(m(i, c), m(r, c));
        m.row(i) -= q * m.row(r);
        if (m(i, c) != 0) clean = false;
      }
      if (clean) break;
    }
    if (m(r, c) == 0) continue;
    if (m(r, c) < 0) m.row(r) = -m.row(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const Integer q = floor_div(m(i, c), m(r, c));
      if (q != 0) m.row(i) -= q * m.row(r);
    }
    ++r;
  }
  return m.topRows(r).transpose();
}

SmithResult smith_normal_form(const MatZ& a) {
  SmithResult res;
  const Eigen::Index rows = a.rows(), cols = a.cols();
  res.d = a;
  res.u = MatZ::Identity(rows, rows);
  res.v = MatZ::Identity(cols, cols);
  MatZ& d = res.d;

  Eigen::Index t = 0;
  while (t < rows && t < cols) {
    // Pivot: minimal nonzero absolute value in the trailing block,
    // lexicographically first.
    Eigen::Index pi = -1, pj = -1;
    Integer best = 0;
    for (Eigen::Index i = t; i < rows; ++i)
      for (Eigen::Index j = t; j < cols; ++j) {
        if (d(i, j) == 0) continue;
        Integer v = abs(d(i, j));
        if (pi < 0 || v < best) { pi = i; pj = j; best = v; }
      }
    if (pi < 0) break;
    if (pi != t) { d.row(pi).swap(d.row(t)); res.u.row(pi).swap(res.u.row(t)); }
    if (pj != t) { d.col(pj).swap(d.col(t)); res.v.col(pj).swap(res.v.col(t)); }
    if (d(t, t) < 0) { d.row(t) = -d.row(t); res.u.row(t) = -res.u.row(t); }

    bool dirty = false;
    for (Eigen::Index i = t + 1; i < rows; ++i) {
      if (d(i, t) == 0) continue;
      const Integer q = floor_div(d(i, t), d(t, t));
      d.row(i) -= q * d.row(t);
      res.u.row(i) -= q * res.u.row(t);
      if (d(i, t) != 0) dirty = true;
    }
    for (Eigen::Index j = t + 1; j < cols; ++j) {
      if (d(t, j) == 0) continue;
      const Integer q = floor_div(d(t, j), d(t, t));
      d.col(j) -= q * d.col(t);
      res.v.col(j) -= q * res.v.col(t);
      if (d(t, j) != 0) dirty = true;
    }
    if (dirty) continue;  // smaller remainders appeared; reselect pivot

    // Divisibility: fold in any trailing entry the pivot does not divide.
    bool fixed = false;
    for (Eigen::Index i = t + 1; i < rows && !fixed; ++i)
      for (Eigen::Index j = t + 1; j < cols && !fixed; ++j)
        if (d(i, j) % d(t, t) != 0) {
          d.row(t) += d.row(i);
          res.u.row(t) += res.u.row(i);
          fixed = true;
        }
    if (fixed) continue;
    ++t;
  }
  res.rank = static_cast<int>(t);
  return res;
}

std::vector<Integer> SmithResult::divisors() const {
  std::vector<Integer> out;
  for (int i = 0; i < rank; ++i) out.push_back(d(i, i));
  return out;
}

MatZ integer_kernel(const MatZ& a) {
  const SmithResult s = smith_normal_form(a);
  const Eigen::Index cols = a.cols();
  return s.v.rightCols(cols - s.rank);
}

std::vector<Integer> symplectic_divisors(MatZ g) {
  const Eigen::Index n = g.rows();
  if (g.cols() != n) throw DimensionError("gram matrix not square");
  if (n % 2 != 0) throw DegenerateLattice("odd-dimensional gram matrix");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (g(i, j) != -g(j, i)) throw NotIntegral("gram matrix not antisymmetric");

  std::vector<int> active(n);
  std::iota(active.begin(), active.end(), 0);
  std::vector<Integer> divisors;

  auto add_basis = [&](int k, int l, const Integer& c) {
    // b_k <- b_k + c * b_l
    g.row(k) += c * g.row(l);
    g.col(k) += c * g.col(l);
  };

  while (!active.empty()) {
    // Pivot: minimal nonzero |g(i,j)| over active i<j, lexicographic ties.
    int pi = -1, pj = -1;
    Integer best = 0;
    for (std::size_t x = 0; x < active.size(); ++x)
      for (std::size_t y = x + 1; y < active.size(); ++y) {
        const int i = active[x], j = active[y];
        if (g(i, j) == 0) continue;
        Integer v = abs(g(i, j));
        if (pi < 0 || v < best) { pi = i; pj = j; best = v; }
      }
    if (pi < 0) throw DegenerateLattice("gram matrix is singular");
    int i = pi, j = pj;
    if (g(i, j) < 0) std::swap(i, j);
    const Integer p = g(i, j);

    bool dirty = false;
    for (int k : active) {
      if (k == i || k == j) continue;
      if (g(k, i) != 0) {
        add_basis(k, j, floor_div(g(k, i), p));  // g(k,i) -> g(k,i) mod p
        if (g(k, i) != 0) dirty = true;
      }
      if (g(k, j) != 0) {
        add_basis(k, i, -floor_div(g(k, j), p));  // g(k,j) -> g(k,j) mod p
        if (g(k, j) != 0) dirty = true;
      }
    }
    if (dirty) continue;

    bool fixed = false;
    for (std::size_t x = 0; x < active.size() && !fixed; ++x)
      for (std::size_t y = x + 1; y < active.size() && !fixed; ++y) {
        const int k = active[x], l = active[y];
        if (k == i || k == j || l == i || l == j) continue;
        if (g(k, l) % p != 0) {
          add_basis(i, k, Integer(1));
          fixed = true;
        }
      }
    if (fixed) continue;

    divisors.push_back(p);
    active.erase(std::remove_if(active.begin(), active.end(),
                                [&](int k) { return k == i || k == j; }),
                 active.end());
  }
  for (std::size_t k = 0; k + 1 < divisors.size(); ++k)
    if (divisors[k + 1] % divisors[k] != 0)
      throw Error("symplectic reduction produced a broken divisor chain");
  return divisors;
}

}  // namespace esmv
