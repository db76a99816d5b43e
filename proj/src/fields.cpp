#include "esmv/fields.hpp"

#include <cmath>

namespace esmv {

int pair_index(int mu, int nu) {
  for (int p = 0; p < 6; ++p)
    if ((kPair2[static_cast<std::size_t>(p)].first == mu &&
         kPair2[static_cast<std::size_t>(p)].second == nu) ||
        (kPair2[static_cast<std::size_t>(p)].first == nu &&
         kPair2[static_cast<std::size_t>(p)].second == mu))
      return p;
  throw DimensionError("invalid 2-form index pair");
}

int levi_civita(int a, int b, int c, int d) {
  const int idx[4] = {a, b, c, d};
  int sign = 1;
  int v[4] = {idx[0], idx[1], idx[2], idx[3]};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      if (v[i] == v[j]) return 0;
      if (v[i] > v[j]) {
        std::swap(v[i], v[j]);
        sign = -sign;
      }
    }
  return sign;
}

namespace {

// For each component pair p, its complementary pair and the sign
// eps_{c1 c2 mu nu} entering the metric dual.
struct DualEntry {
  int comp;
  int sign;
};

const std::array<DualEntry, 6>& dual_table() {
  static const std::array<DualEntry, 6> table = [] {
    std::array<DualEntry, 6> t{};
    for (int p = 0; p < 6; ++p) {
      const auto [mu, nu] = kPair2[static_cast<std::size_t>(p)];
      for (int q = 0; q < 6; ++q) {
        const auto [a, b] = kPair2[static_cast<std::size_t>(q)];
        const int s = levi_civita(a, b, mu, nu);
        if (s != 0) {
          t[static_cast<std::size_t>(p)] = DualEntry{q, s};
          break;
        }
      }
    }
    return t;
  }();
  return table;
}

Eigen::Matrix4d full_antisym(const Eigen::MatrixXd& block, int a) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int p = 0; p < 6; ++p) {
    const auto [mu, nu] = kPair2[static_cast<std::size_t>(p)];
    m(mu, nu) = block(a, p);
    m(nu, mu) = -block(a, p);
  }
  return m;
}

}  // namespace

LorentzMetricField LorentzMetricField::sample(
    const SpacetimeGrid& grid, const std::function<Eigen::Matrix4d(const Eigen::Vector4d&)>& fn) {
  grid.validate();
  LorentzMetricField f;
  f.grid = grid;
  f.g.resize(static_cast<std::size_t>(grid.nodes()));
  grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    Eigen::Matrix4d m = fn(grid.position(c));
    m = 0.5 * (m + m.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
    int negatives = 0;
    for (int i = 0; i < 4; ++i) {
      if (es.eigenvalues()(i) == 0.0) throw SingularMetric("metric degenerate at a node");
      if (es.eigenvalues()(i) < 0.0) ++negatives;
    }
    if (negatives != 1) throw SignatureError("metric signature is not (3,1)");
    f.g[static_cast<std::size_t>(idx)] = m;
  });
  return f;
}

Eigen::Matrix4d LorentzMetricField::inv(std::int64_t node) const {
  return g[static_cast<std::size_t>(node)].inverse();
}

double LorentzMetricField::sqrt_abs_det(std::int64_t node) const {
  return std::sqrt(std::abs(g[static_cast<std::size_t>(node)].determinant()));
}

ScalarMapField ScalarMapField::sample(
    const SpacetimeGrid& grid, int target_dim,
    const std::function<Eigen::VectorXd(const Eigen::Vector4d&)>& fn) {
  ScalarMapField f;
  f.target_dim = target_dim;
  f.phi.resize(static_cast<std::size_t>(grid.nodes()));
  grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    Eigen::VectorXd y = fn(grid.position(c));
    if (y.size() != target_dim) throw DimensionError("scalar map has wrong target dimension");
    f.phi[static_cast<std::size_t>(idx)] = std::move(y);
  });
  return f;
}

TwistedTwoForm TwistedTwoForm::zero(const SpacetimeGrid& grid, int fiber_dim) {
  TwistedTwoForm v;
  v.fiber_dim = fiber_dim;
  v.comp.assign(static_cast<std::size_t>(grid.nodes()),
                Eigen::MatrixXd::Zero(fiber_dim, 6));
  return v;
}

double TwistedTwoForm::component(std::int64_t node, int a, int mu, int nu) const {
  if (mu == nu) return 0.0;
  const int p = pair_index(mu, nu);
  const double s = (mu < nu) ? 1.0 : -1.0;
  return s * comp[static_cast<std::size_t>(node)](a, p);
}

Eigen::MatrixXd neighbor_value(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                               const CutData& cuts, const std::array<int, 4>& c, int dir,
                               int step) {
  const auto nb = grid.neighbor(c, dir, step);
  if (!nb) throw GridTooCoarse("neighbor out of range");
  const Eigen::MatrixXd& val = v.comp[static_cast<std::size_t>(nb->node)];
  if (nb->wrap == 0) return val;
  if (nb->wrap == 1) return cuts.rho[static_cast<std::size_t>(dir)] * val;
  if (nb->wrap == -1) return cuts.rho_inv[static_cast<std::size_t>(dir)] * val;
  throw Error("multiple cut crossings in one stencil step");
}

Eigen::MatrixXd hodge_dual_block(const Eigen::Matrix4d& g_inv, double sqrt_det,
                                 const Eigen::MatrixXd& block) {
  const auto& table = dual_table();
  Eigen::MatrixXd up(block.rows(), 6);
  for (int a = 0; a < block.rows(); ++a) {
    const Eigen::Matrix4d full = full_antisym(block, a);
    const Eigen::Matrix4d raised = g_inv * full * g_inv;
    for (int p = 0; p < 6; ++p) {
      const auto [mu, nu] = kPair2[static_cast<std::size_t>(p)];
      up(a, p) = raised(mu, nu);
    }
  }
  Eigen::MatrixXd out(block.rows(), 6);
  for (int p = 0; p < 6; ++p)
    out.col(p) = sqrt_det * table[static_cast<std::size_t>(p)].sign *
                 up.col(table[static_cast<std::size_t>(p)].comp);
  return out;
}

TwistedTwoForm twisted_hodge(const LorentzMetricField& g,
                             const std::vector<Eigen::MatrixXd>& j_phi,
                             const TwistedTwoForm& v) {
  if (v.comp.size() != g.g.size() || j_phi.size() != g.g.size())
    throw DimensionError("twisted_hodge: field sizes disagree");
  TwistedTwoForm out;
  out.fiber_dim = v.fiber_dim;
  out.comp.resize(v.comp.size());
  for (std::size_t i = 0; i < v.comp.size(); ++i) {
    const auto node = static_cast<std::int64_t>(i);
    out.comp[i] = j_phi[i] * hodge_dual_block(g.inv(node), g.sqrt_abs_det(node), v.comp[i]);
  }
  return out;
}

TwistedTwoForm polarize(const LorentzMetricField& g,
                        const std::vector<Eigen::MatrixXd>& j_phi, const TwistedTwoForm& v) {
  TwistedTwoForm star = twisted_hodge(g, j_phi, v);
  TwistedTwoForm out;
  out.fiber_dim = v.fiber_dim;
  out.comp.resize(v.comp.size());
  for (std::size_t i = 0; i < v.comp.size(); ++i)
    out.comp[i] = 0.5 * (v.comp[i] + star.comp[i]);
  return out;
}

namespace {

// Derivative of the component block in one direction: central where both
// neighbors exist, one-sided second order at non-periodic boundaries.
Eigen::MatrixXd block_derivative(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                                 const CutData& cuts, const std::array<int, 4>& c, int dir) {
  const double h = grid.spacing[static_cast<std::size_t>(dir)];
  const bool has_m = grid.neighbor(c, dir, -1).has_value();
  const bool has_p = grid.neighbor(c, dir, 1).has_value();
  if (has_m && has_p) {
    return (neighbor_value(v, grid, cuts, c, dir, 1) -
            neighbor_value(v, grid, cuts, c, dir, -1)) /
           (2 * h);
  }
  const Eigen::MatrixXd& v0 = v.comp[static_cast<std::size_t>(grid.index(c))];
  if (has_p) {
    return (-3.0 * v0 + 4.0 * neighbor_value(v, grid, cuts, c, dir, 1) -
            neighbor_value(v, grid, cuts, c, dir, 2)) /
           (2 * h);
  }
  return (3.0 * v0 - 4.0 * neighbor_value(v, grid, cuts, c, dir, -1) +
          neighbor_value(v, grid, cuts, c, dir, -2)) /
         (2 * h);
}

}  // namespace

TwistedThreeForm twisted_d(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                           const CutData& cuts) {
  for (int d = 0; d < 4; ++d)
    if (grid.shape[static_cast<std::size_t>(d)] < 3)
      throw GridTooCoarse("twisted_d needs 3 nodes per direction");
  TwistedThreeForm out;
  out.fiber_dim = v.fiber_dim;
  out.comp.resize(v.comp.size());
  grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    std::array<Eigen::MatrixXd, 4> dv;
    for (int d = 0; d < 4; ++d) dv[static_cast<std::size_t>(d)] = block_derivative(v, grid, cuts, c, d);
    Eigen::MatrixXd res(v.fiber_dim, 4);
    for (int t = 0; t < 4; ++t) {
      const auto [l, m, n] = kTriple3[static_cast<std::size_t>(t)];
      res.col(t) = dv[static_cast<std::size_t>(l)].col(pair_index(m, n)) -
                   dv[static_cast<std::size_t>(m)].col(pair_index(l, n)) +
                   dv[static_cast<std::size_t>(n)].col(pair_index(l, m));
    }
    out.comp[static_cast<std::size_t>(idx)] = std::move(res);
  });
  return out;
}

std::vector<Eigen::Matrix4d> inner_contraction(const TwistedTwoForm& v1,
                                               const TwistedTwoForm& v2,
                                               const LorentzMetricField& g,
                                               const std::vector<Eigen::MatrixXd>& q_phi) {
  if (v1.comp.size() != v2.comp.size() || v1.fiber_dim != v2.fiber_dim)
    throw DimensionError("inner_contraction: shape mismatch");
  std::vector<Eigen::Matrix4d> out(v1.comp.size());
  for (std::size_t i = 0; i < v1.comp.size(); ++i) {
    const Eigen::Matrix4d ginv = g.inv(static_cast<std::int64_t>(i));
    const Eigen::MatrixXd& q = q_phi[i];
    Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
    for (int a = 0; a < v1.fiber_dim; ++a) {
      const Eigen::Matrix4d va = full_antisym(v1.comp[i], a);
      for (int b = 0; b < v1.fiber_dim; ++b) {
        if (q(a, b) == 0.0) continue;
        const Eigen::Matrix4d vb = full_antisym(v2.comp[i], b);
        acc += q(a, b) * (va * ginv * vb);
      }
    }
    out[i] = acc;
  }
  return out;
}

std::vector<Eigen::VectorXd> scalar_pairing(const TwistedTwoForm& v,
                                            const TwistedTwoForm& star_v,
                                            const std::vector<std::vector<Eigen::MatrixXd>>& psi_phi,
                                            const LorentzMetricField& g,
                                            const std::vector<Eigen::MatrixXd>& q_phi) {
  std::vector<Eigen::VectorXd> out(v.comp.size());
  const int d = psi_phi.empty() ? 0 : static_cast<int>(psi_phi[0].size());
  for (std::size_t i = 0; i < v.comp.size(); ++i) {
    const Eigen::Matrix4d ginv = g.inv(static_cast<std::int64_t>(i));
    const Eigen::MatrixXd& q = q_phi[i];
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < d; ++k) {
      const Eigen::MatrixXd pv = psi_phi[i][static_cast<std::size_t>(k)] * v.comp[i];
      double acc = 0.0;
      for (int a = 0; a < v.fiber_dim; ++a) {
        const Eigen::Matrix4d sa = full_antisym(star_v.comp[i], a);
        for (int b = 0; b < v.fiber_dim; ++b) {
          if (q(a, b) == 0.0) continue;
          const Eigen::Matrix4d pb = full_antisym(pv, b);
          acc += q(a, b) * (sa.cwiseProduct(ginv * pb * ginv)).sum();
        }
      }
      s(k) = 0.25 * acc;
    }
    out[i] = std::move(s);
  }
  return out;
}

Eigen::MatrixXd star_matrix(const Eigen::Matrix4d& g, const Eigen::MatrixXd& j) {
  const int f = static_cast<int>(j.rows());
  const Eigen::Matrix4d ginv = g.inverse();
  const double s = std::sqrt(std::abs(g.determinant()));
  Eigen::MatrixXd out(6 * f, 6 * f);
  for (int a = 0; a < f; ++a)
    for (int p = 0; p < 6; ++p) {
      Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(f, 6);
      basis(a, p) = 1.0;
      const Eigen::MatrixXd img = j * hodge_dual_block(ginv, s, basis);
      for (int b = 0; b < f; ++b)
        for (int q = 0; q < 6; ++q) out(b * 6 + q, a * 6 + p) = img(b, q);
    }
  return out;
}

}  // namespace esmv
