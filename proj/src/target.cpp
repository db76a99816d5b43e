#include "esmv/target.hpp"

namespace esmv {

std::size_t TargetGrid::nodes() const {
  std::size_t n = 1;
  for (int c : counts) n *= static_cast<std::size_t>(c);
  return n;
}

Eigen::VectorXd TargetGrid::point(const std::vector<int>& c) const {
  Eigen::VectorXd y(dim());
  for (int d = 0; d < dim(); ++d) y(d) = origin[d] + spacing[d] * c[d];
  return y;
}

void TargetGrid::for_each(const std::function<void(const Eigen::VectorXd&)>& fn) const {
  std::vector<int> c(static_cast<std::size_t>(dim()), 0);
  while (true) {
    fn(point(c));
    int d = dim() - 1;
    while (d >= 0 && ++c[static_cast<std::size_t>(d)] == counts[static_cast<std::size_t>(d)]) {
      c[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
}

ScalarTarget::ScalarTarget(int d, std::vector<double> per, MonodromyRep rep)
    : dim(d), periods(std::move(per)), monodromy(std::move(rep)) {
  if (dim <= 0) throw DimensionError("target dimension must be positive");
  if (static_cast<int>(periods.size()) != dim)
    throw DimensionError("one period entry per target coordinate");
  for (int i = 0; i < dim; ++i)
    if (periods[static_cast<std::size_t>(i)] > 0)
      periodic_dims.push_back(i);
  if (periodic_dims.size() != monodromy.images.size())
    throw Error("monodromy needs one generator per periodic coordinate");
}

void ScalarTarget::validate_shape() const {
  if (!metric) throw Error("target metric not set");
  if (!potential) throw Error("target potential not set");
}

int ScalarTarget::generator_of_dim(int chart_dim) const {
  for (std::size_t g = 0; g < periodic_dims.size(); ++g)
    if (periodic_dims[g] == chart_dim) return static_cast<int>(g);
  return -1;
}

Eigen::MatrixXd ScalarTarget::metric_at(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd g = metric(y);
  if (g.rows() != dim || g.cols() != dim)
    throw DimensionError("target metric has wrong shape");
  return g;
}

Eigen::MatrixXd ScalarTarget::metric_inv_at(const Eigen::VectorXd& y) const {
  const Eigen::MatrixXd g = metric_at(y);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
  if (!lu.isInvertible()) throw SingularMetric("target metric singular");
  return lu.inverse();
}

double ScalarTarget::potential_at(const Eigen::VectorXd& y) const { return potential(y); }

Eigen::VectorXd ScalarTarget::grad_potential(const Eigen::VectorXd& y) const {
  if (potential_gradient) return potential_gradient(y);
  Eigen::VectorXd g(dim);
  const double h = fd_step;
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd yp = y, ypp = y, ym = y, ymm = y;
    yp(i) += h;
    ypp(i) += 2 * h;
    ym(i) -= h;
    ymm(i) -= 2 * h;
    g(i) = (-potential(ypp) + 8 * potential(yp) - 8 * potential(ym) + potential(ymm)) /
           (12 * h);
  }
  return g;
}

std::vector<Eigen::MatrixXd> ScalarTarget::christoffel(const Eigen::VectorXd& y) const {
  std::vector<Eigen::MatrixXd> gamma(static_cast<std::size_t>(dim),
                                     Eigen::MatrixXd::Zero(dim, dim));
  if (metric_constant) return gamma;
  const double h = fd_step;
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    Eigen::VectorXd yp = y, ym = y;
    yp(i) += h;
    ym(i) -= h;
    dg[static_cast<std::size_t>(i)] = (metric_at(yp) - metric_at(ym)) / (2 * h);
  }
  const Eigen::MatrixXd ginv = metric_inv_at(y);
  for (int k = 0; k < dim; ++k)
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        double s = 0;
        for (int l = 0; l < dim; ++l)
          s += ginv(k, l) * (dg[static_cast<std::size_t>(i)](l, j) +
                             dg[static_cast<std::size_t>(j)](l, i) -
                             dg[static_cast<std::size_t>(l)](i, j));
        gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
      }
  return gamma;
}

FundamentalFormField fundamental_form(const ScalarTarget& target, const TamingField& jf) {
  if (jf.sample_grid.dim() != target.dim)
    throw DimensionError("sample grid dimension mismatch");
  for (int c : jf.sample_grid.counts)
    if (c < 3) throw GridTooCoarse("need at least 3 samples per direction");

  FundamentalFormField ff;
  ff.target_dim = target.dim;
  ff.grid = jf.sample_grid;
  const MatrixField j_at = jf.j_at;
  const std::vector<double> h = jf.sample_grid.spacing;
  const int d = target.dim;
  ff.theta_at = [j_at, h, d](const Eigen::VectorXd& y) {
    std::vector<Eigen::MatrixXd> theta(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd yp = y, ym = y;
      yp(i) += h[static_cast<std::size_t>(i)];
      ym(i) -= h[static_cast<std::size_t>(i)];
      theta[static_cast<std::size_t>(i)] =
          (j_at(yp) - j_at(ym)) / (2 * h[static_cast<std::size_t>(i)]);
    }
    return theta;
  };
  ff.fiber_dim = static_cast<int>(j_at(ff.grid.point(std::vector<int>(d, 0))).rows());
  ff.samples.reserve(ff.grid.nodes());
  ff.grid.for_each([&](const Eigen::VectorXd& y) { ff.samples.push_back(ff.theta_at(y)); });
  return ff;
}

bool is_unitary(const FundamentalFormField& ff, double tol) {
  double worst = 0;
  for (const auto& theta : ff.samples)
    for (const auto& m : theta) worst = std::max(worst, max_abs(m));
  return worst <= tol;
}

std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> fundamental_field(
    const ScalarTarget& target, const FundamentalFormField& ff) {
  const auto theta_at = ff.theta_at;
  const ScalarTarget* t = &target;
  return [t, theta_at](const Eigen::VectorXd& y) {
    const Eigen::MatrixXd ginv = t->metric_inv_at(y);
    const std::vector<Eigen::MatrixXd> theta = theta_at(y);
    std::vector<Eigen::MatrixXd> psi(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(theta[i].rows(), theta[i].cols());
      for (std::size_t j = 0; j < theta.size(); ++j)
        acc += ginv(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * theta[j];
      psi[i] = std::move(acc);
    }
    return psi;
  };
}

PeriodicityReport measure_twisted_periodicity(const ScalarTarget& target,
                                              const TamingField& jf) {
  PeriodicityReport rep;
  for (std::size_t g = 0; g < target.periodic_dims.size(); ++g) {
    const int i = target.periodic_dims[g];
    const double L = target.periods[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd rho = to_dense(target.monodromy.images[g]);
    const Eigen::MatrixXd rho_inv = to_dense(target.monodromy.inverse_images[g]);
    jf.sample_grid.for_each([&](const Eigen::VectorXd& y) {
      Eigen::VectorXd yl = y;
      yl(i) += L;
      const double viol = max_abs(jf.j_at(yl) - rho * jf.j_at(y) * rho_inv);
      if (viol > rep.max_violation) {
        rep.max_violation = viol;
        rep.worst_dim = i;
      }
    });
  }
  return rep;
}

PeriodicityReport check_twisted_periodicity(const ScalarTarget& target,
                                            const TamingField& jf, double tol) {
  PeriodicityReport rep = measure_twisted_periodicity(target, jf);
  if (rep.max_violation > tol)
    throw NonGlobalSection("taming violates twisted periodicity in direction " +
                           std::to_string(rep.worst_dim));
  return rep;
}

void validate_taming_field(const ScalarTarget& target, const TamingField& jf,
                           const SymplecticSpace& sp, double tol) {
  (void)target;
  jf.sample_grid.for_each(
      [&](const Eigen::VectorXd& y) { validate_taming(jf.j_at(y), sp, tol); });
}

}  // namespace esmv
