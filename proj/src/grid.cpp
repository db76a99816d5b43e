#include "esmv/grid.hpp"

namespace esmv {

void SpacetimeGrid::validate() const {
  for (int d = 0; d < 4; ++d) {
    if (shape[static_cast<std::size_t>(d)] < 3)
      throw GridTooCoarse("need at least 3 nodes per direction");
    if (!(spacing[static_cast<std::size_t>(d)] > 0))
      throw Error("grid spacing must be positive");
    if (!periodic[static_cast<std::size_t>(d)] && !winding[static_cast<std::size_t>(d)].empty())
      throw Error("winding on a non-periodic direction");
  }
}

std::int64_t SpacetimeGrid::nodes() const {
  std::int64_t n = 1;
  for (int d = 0; d < 4; ++d) n *= shape[static_cast<std::size_t>(d)];
  return n;
}

std::int64_t SpacetimeGrid::index(const std::array<int, 4>& c) const {
  std::int64_t idx = 0;
  for (int d = 0; d < 4; ++d) idx = idx * shape[static_cast<std::size_t>(d)] + c[static_cast<std::size_t>(d)];
  return idx;
}

std::array<int, 4> SpacetimeGrid::coords(std::int64_t idx) const {
  std::array<int, 4> c{};
  for (int d = 3; d >= 0; --d) {
    c[static_cast<std::size_t>(d)] = static_cast<int>(idx % shape[static_cast<std::size_t>(d)]);
    idx /= shape[static_cast<std::size_t>(d)];
  }
  return c;
}

Eigen::Vector4d SpacetimeGrid::position(const std::array<int, 4>& c) const {
  Eigen::Vector4d x;
  for (int d = 0; d < 4; ++d)
    x(d) = spacing[static_cast<std::size_t>(d)] * c[static_cast<std::size_t>(d)];
  return x;
}

double SpacetimeGrid::extent(int d) const {
  const auto du = static_cast<std::size_t>(d);
  return periodic[du] ? spacing[du] * shape[du] : spacing[du] * (shape[du] - 1);
}

bool SpacetimeGrid::interior(const std::array<int, 4>& c) const {
  for (int d = 0; d < 4; ++d) {
    const int m = margin(d);
    if (c[static_cast<std::size_t>(d)] < m ||
        c[static_cast<std::size_t>(d)] >= shape[static_cast<std::size_t>(d)] - m)
      return false;
  }
  return true;
}

std::int64_t SpacetimeGrid::interior_count() const {
  std::int64_t n = 1;
  for (int d = 0; d < 4; ++d)
    n *= shape[static_cast<std::size_t>(d)] - 2 * margin(d);
  return n;
}

SpacetimeGrid SpacetimeGrid::refined(int factor) const {
  if (factor < 1) throw Error("refinement factor must be >= 1");
  SpacetimeGrid g = *this;
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    g.shape[du] = periodic[du] ? shape[du] * factor : (shape[du] - 1) * factor + 1;
    g.spacing[du] = spacing[du] / factor;
  }
  return g;
}

std::optional<SpacetimeGrid::Neighbor> SpacetimeGrid::neighbor(std::array<int, 4> c, int dir,
                                                               int step) const {
  const auto du = static_cast<std::size_t>(dir);
  int v = c[du] + step;
  int wrap = 0;
  const int n = shape[du];
  if (periodic[du]) {
    while (v >= n) { v -= n; ++wrap; }
    while (v < 0) { v += n; --wrap; }
  } else if (v < 0 || v >= n) {
    return std::nullopt;
  }
  c[du] = v;
  return Neighbor{index(c), wrap};
}

Eigen::VectorXd winding_shift(const Word& w, const ScalarTarget& target) {
  Eigen::VectorXd shift = Eigen::VectorXd::Zero(target.dim);
  for (const auto& [g, e] : w.letters) {
    if (g < 0 || g >= static_cast<int>(target.periodic_dims.size()))
      throw Error("winding word references undeclared generator");
    const int d = target.periodic_dims[static_cast<std::size_t>(g)];
    shift(d) += e * target.periods[static_cast<std::size_t>(d)];
  }
  return shift;
}

CutData make_cut_data(const SpacetimeGrid& grid, const ScalarTarget& target) {
  CutData cd;
  const int f = target.monodromy.sp.dim;
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (grid.periodic[du] && !grid.winding[du].empty()) {
      const MatQ t = transport(target.monodromy, grid.winding[du]);
      cd.rho[du] = to_dense(t);
      cd.rho_inv[du] = to_dense(inverse_exact(t));
      cd.shift[du] = winding_shift(grid.winding[du], target);
    } else {
      cd.rho[du] = Eigen::MatrixXd::Identity(f, f);
      cd.rho_inv[du] = Eigen::MatrixXd::Identity(f, f);
      cd.shift[du] = Eigen::VectorXd::Zero(target.dim);
    }
  }
  return cd;
}

}  // namespace esmv
