#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace esmv {

// Exact scalars. The algebraic layer (symplectic forms, monodromy, lattices)
// is computed over these; floating point appears only where fields are sampled.
using Integer  = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatQ = Mat<Rational>;
using VecQ = Vec<Rational>;
using MatZ = Mat<Integer>;
using VecZ = Vec<Integer>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error { using Error::Error; };
struct SingularMatrix : Error { using Error::Error; };

// symplectic_core
struct NotAlmostComplex : Error { using Error::Error; };
struct NotCompatible : Error { using Error::Error; };
struct NotPositive : Error { using Error::Error; };
struct DegenerateLattice : Error { using Error::Error; };
struct NotIntegral : Error { using Error::Error; };

// local_system
struct SizeLimit : Error { using Error::Error; };
struct PresentationMismatch : Error { using Error::Error; };

// target / fields
struct GridTooCoarse : Error { using Error::Error; };
struct SingularMetric : Error { using Error::Error; };
struct SignatureError : Error { using Error::Error; };
struct NonGlobalSection : Error { using Error::Error; };

// duality
struct EquivarianceViolation : Error { using Error::Error; };
struct IsometryViolation : Error { using Error::Error; };

// quantization
struct InvalidComplex : Error { using Error::Error; };
struct LatticeNotPreserved : Error { using Error::Error; };
struct ComplexMismatch : Error { using Error::Error; };

// cli / scenarios
struct ParseError : Error { using Error::Error; };
struct MissingSection : Error { using Error::Error; };

inline double to_double(const Rational& q) {
  return q.convert_to<double>();
}

inline Eigen::MatrixXd to_dense(const MatQ& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

inline MatQ to_rational(const MatZ& m) {
  MatQ out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = Rational(m(i, j));
  return out;
}

// Deterministic pairwise summation: reductions must not depend on platform
// accumulation quirks, so every norm in the library funnels through here.
double pairwise_sum(const std::vector<double>& xs);

template <class Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  S best(0);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      S a = m(i, j) < S(0) ? S(-m(i, j)) : S(m(i, j));
      if (best < a) best = a;
    }
  return best;
}

}  // namespace esmv
