#include "esmv/symplectic.hpp"

namespace esmv {

SymplecticSpace::SymplecticSpace(MatQ om) : dim(static_cast<int>(om.rows())), omega(std::move(om)) {
  if (omega.rows() != omega.cols() || dim == 0 || dim % 2 != 0)
    throw DimensionError("symplectic form must be square of even dimension");
  if (MatQ(omega.transpose()) != MatQ(-omega))
    throw Error("symplectic form must be antisymmetric");
  if (det_exact(omega) == 0)
    throw Error("symplectic form must be nondegenerate");
}

SymplecticSpace SymplecticSpace::standard(int n) {
  MatQ om = MatQ::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    om(i, n + i) = 1;
    om(n + i, i) = -1;
  }
  return SymplecticSpace(om);
}

bool is_symplectic(const MatQ& m, const SymplecticSpace& sp) {
  if (m.rows() != sp.dim || m.cols() != sp.dim)
    throw DimensionError("is_symplectic: size mismatch");
  return MatQ(m.transpose() * sp.omega * m) == sp.omega;
}

bool is_symplectic(const Eigen::MatrixXd& m, const SymplecticSpace& sp, double tol) {
  if (m.rows() != sp.dim || m.cols() != sp.dim)
    throw DimensionError("is_symplectic: size mismatch");
  const Eigen::MatrixXd om = sp.omega_dense();
  return max_abs(m.transpose() * om * m - om) <= tol;
}

namespace {

// Exact positive definiteness via Sylvester's leading minors.
bool positive_definite_exact(const MatQ& q) {
  const Eigen::Index n = q.rows();
  for (Eigen::Index k = 1; k <= n; ++k)
    if (det_exact(q.topLeftCorner(k, k)) <= 0) return false;
  return true;
}

}  // namespace

Taming<Rational> validate_taming(const MatQ& j, const SymplecticSpace& sp) {
  if (j.rows() != sp.dim || j.cols() != sp.dim)
    throw DimensionError("taming: size mismatch");
  if (MatQ(j * j) != MatQ(-MatQ::Identity(sp.dim, sp.dim)))
    throw NotAlmostComplex("J^2 != -I");
  if (!is_symplectic(j, sp))
    throw NotCompatible("omega(J., J.) != omega");
  Taming<Rational> t;
  t.j = j;
  t.q = sp.omega * j;
  if (MatQ(t.q.transpose()) != t.q) throw NotCompatible("induced metric not symmetric");
  if (!positive_definite_exact(t.q)) throw NotPositive("induced metric not positive definite");
  return t;
}

Taming<double> validate_taming(const Eigen::MatrixXd& j, const SymplecticSpace& sp, double tol) {
  if (j.rows() != sp.dim || j.cols() != sp.dim)
    throw DimensionError("taming: size mismatch");
  const Eigen::Index n = sp.dim;
  if (max_abs(j * j + Eigen::MatrixXd::Identity(n, n)) > tol)
    throw NotAlmostComplex("J^2 != -I");
  const Eigen::MatrixXd om = sp.omega_dense();
  if (max_abs(j.transpose() * om * j - om) > tol)
    throw NotCompatible("omega(J., J.) != omega");
  Taming<double> t;
  t.j = j;
  t.q = om * j;
  if (max_abs(t.q - t.q.transpose()) > tol)
    throw NotCompatible("induced metric not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (t.q + t.q.transpose()));
  if (es.eigenvalues().minCoeff() <= tol)
    throw NotPositive("induced metric not positive definite");
  return t;
}

IntegralLattice::IntegralLattice(MatZ b) : basis(std::move(b)) {
  if (basis.rows() != basis.cols() || basis.rows() == 0)
    throw DimensionError("lattice basis must be square");
  if (det_exact(to_rational(basis)) == 0)
    throw DegenerateLattice("lattice basis is singular");
}

std::vector<Integer> lattice_type(const IntegralLattice& lat, const SymplecticSpace& sp) {
  if (lat.basis.rows() != sp.dim) throw DimensionError("lattice_type: size mismatch");
  const MatQ gram_q = lat.basis_q().transpose() * sp.omega * lat.basis_q();
  MatZ gram(sp.dim, sp.dim);
  for (int i = 0; i < sp.dim; ++i)
    for (int j = 0; j < sp.dim; ++j) {
      const Rational& e = gram_q(i, j);
      if (denominator(e) != 1)
        throw NotIntegral("lattice pairing is not integral");
      gram(i, j) = numerator(e);
    }
  return symplectic_divisors(gram);
}

bool same_lattice(const MatZ& a, const MatZ& b) {
  return hermite_colspan(a) == hermite_colspan(b);
}

bool lattice_contains(const IntegralLattice& lat, const VecQ& v) {
  MatQ x;
  if (!solve_exact(lat.basis_q(), v, x)) return false;
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    if (denominator(x(i, 0)) != 1) return false;
  return true;
}

bool siegel_membership(const MatZ& m, const IntegralLattice& lat, const SymplecticSpace& sp) {
  if (m.rows() != sp.dim || m.cols() != sp.dim)
    throw DimensionError("siegel_membership: size mismatch");
  if (!is_symplectic(to_rational(m), sp)) return false;
  return same_lattice(MatZ(m * lat.basis), lat.basis);
}

std::map<std::string, double> EsmParameters::default_tolerances() {
  return {
      {"alg_tol", 1e-10},    // floating-point algebra identities
      {"field_tol", 1e-8},   // sampled-field identities (periodicity, cuts, polarization)
      {"rank_tol", 1e-9},    // relative threshold for numerical rank decisions
      {"quad_tol", 1e-6},    // quantization closedness and lattice rounding
      {"duality_tol", 1e-9}, // covariance discrepancy bound
  };
}

double EsmParameters::tol(const std::string& name) const {
  auto it = tolerances.find(name);
  if (it == tolerances.end()) throw Error("unknown tolerance: " + name);
  return it->second;
}

void EsmParameters::validate() const {
  if (!(kappa > 0)) throw Error("kappa must be positive");
  for (const auto& [name, value] : tolerances)
    if (!(value > 0)) throw Error("tolerance must be positive: " + name);
}

}  // namespace esmv
