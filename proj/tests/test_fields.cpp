#include <doctest.h>

#include "esmv/fields.hpp"

#include <random>

using namespace esmv;

namespace {

Eigen::Matrix4d minkowski() {
  Eigen::Matrix4d eta = Eigen::Matrix4d::Identity();
  eta(0, 0) = -1.0;
  return eta;
}

Eigen::MatrixXd j_standard(int n = 1) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j(i, n + i) = -1.0;
    j(n + i, i) = 1.0;
  }
  return j;
}

// Independent oracle: (*V)_{mn} = (1/2) sqrt|g| eps_{abmn} g^{ac} g^{bd} V_{cd},
// written as explicit four-index loops with the permutation-sign epsilon.
Eigen::Matrix4d hodge_oracle(const Eigen::Matrix4d& g, const Eigen::Matrix4d& v) {
  const Eigen::Matrix4d ginv = g.inverse();
  const double s = std::sqrt(std::abs(g.determinant()));
  Eigen::Matrix4d out = Eigen::Matrix4d::Zero();
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) {
      double acc = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const int eps = levi_civita(a, b, m, n);
          if (eps == 0) continue;
          double up = 0.0;
          for (int c = 0; c < 4; ++c)
            for (int d = 0; d < 4; ++d) up += ginv(a, c) * ginv(b, d) * v(c, d);
          acc += eps * up;
        }
      out(m, n) = 0.5 * s * acc;
    }
  return out;
}

Eigen::Matrix4d full_from_block(const Eigen::MatrixXd& block, int a) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int p = 0; p < 6; ++p) {
    const auto [mu, nu] = kPair2[static_cast<std::size_t>(p)];
    m(mu, nu) = block(a, p);
    m(nu, mu) = -block(a, p);
  }
  return m;
}

Eigen::Matrix4d random_lorentz_metric(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  Eigen::Matrix4d l = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) l(i, j) += u(rng);
  return l.transpose() * minkowski() * l;
}

SpacetimeGrid plain_grid(int n, double len) {
  SpacetimeGrid g;
  g.shape = {n, n, n, n};
  const double h = len / (n - 1);
  g.spacing = {h, h, h, h};
  g.periodic = {false, false, false, false};
  return g;
}

ScalarTarget trivial_point_target(int fiber_half_dim) {
  ScalarTarget t(1, {0.0},
                 MonodromyRep(GroupPresentation::free_abelian({}),
                              SymplecticSpace::standard(fiber_half_dim), {}));
  t.metric = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  t.metric_constant = true;
  t.potential = [](const Eigen::VectorXd&) { return 0.0; };
  return t;
}

}  // namespace

TEST_CASE("metric dual agrees with the explicit epsilon-tensor oracle") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Matrix4d g = random_lorentz_metric(rng);
    Eigen::MatrixXd block(1, 6);
    for (int p = 0; p < 6; ++p) block(0, p) = u(rng);
    const Eigen::MatrixXd dual =
        hodge_dual_block(g.inverse(), std::sqrt(std::abs(g.determinant())), block);
    const Eigen::Matrix4d expect = hodge_oracle(g, full_from_block(block, 0));
    CHECK(max_abs(full_from_block(dual, 0) - expect) < 1e-12);
  }
}

TEST_CASE("frozen value: dual of dt^dx in Minkowski") {
  Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2, 6);
  block(0, pair_index(0, 1)) = 1.0;  // V = dt^dx (x) e1
  const Eigen::MatrixXd dual = hodge_dual_block(minkowski().inverse(), 1.0, block);
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(2, 6);
  expect(0, pair_index(2, 3)) = -1.0;  // *(dt^dx) = -dy^dz
  CHECK(max_abs(dual - expect) == 0.0);
}

TEST_CASE("twisted hodge squares to the identity on 2-forms") {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {1, 2}) {
    SpacetimeGrid grid;
    grid.shape = {3, 3, 3, 3};
    grid.spacing = {0.1, 0.1, 0.1, 0.1};
    grid.periodic = {false, false, false, false};
    const LorentzMetricField g = LorentzMetricField::sample(
        grid, [&](const Eigen::Vector4d&) { return random_lorentz_metric(rng); });
    // Random constant taming: conjugate of J0 by a random invertible-near-identity
    // symplectic-ish map obtained by polar-like correction is unnecessary;
    // a conjugate of J0 by any invertible map is almost complex, and the
    // involution identity needs only J^2 = -I.
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) p(i, j) += 0.2 * u(rng);
    const Eigen::MatrixXd j = p * j_standard(n) * p.inverse();
    std::vector<Eigen::MatrixXd> j_phi(static_cast<std::size_t>(grid.nodes()), j);

    TwistedTwoForm v = TwistedTwoForm::zero(grid, 2 * n);
    for (auto& c : v.comp)
      for (int a = 0; a < 2 * n; ++a)
        for (int q = 0; q < 6; ++q) c(a, q) = u(rng);

    const TwistedTwoForm vv = twisted_hodge(g, j_phi, twisted_hodge(g, j_phi, v));
    double worst = 0.0;
    for (std::size_t i = 0; i < v.comp.size(); ++i)
      worst = std::max(worst, max_abs(vv.comp[i] - v.comp[i]));
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("frozen value: twisted dual of dt^dx (x) e1 with the standard taming") {
  SpacetimeGrid grid;
  grid.shape = {3, 3, 3, 3};
  grid.spacing = {0.1, 0.1, 0.1, 0.1};
  grid.periodic = {false, false, false, false};
  const LorentzMetricField g =
      LorentzMetricField::sample(grid, [](const Eigen::Vector4d&) { return minkowski(); });
  std::vector<Eigen::MatrixXd> j_phi(static_cast<std::size_t>(grid.nodes()), j_standard());
  TwistedTwoForm v = TwistedTwoForm::zero(grid, 2);
  for (auto& c : v.comp) c(0, pair_index(0, 1)) = 1.0;
  const TwistedTwoForm sv = twisted_hodge(g, j_phi, v);
  // J0 maps e1 to e2, so the result is -dy^dz (x) e2.
  for (const auto& c : sv.comp) {
    CHECK(c(1, pair_index(2, 3)) == -1.0);
    CHECK(std::abs(c(0, pair_index(2, 3))) == 0.0);
    CHECK(c.cwiseAbs().sum() == 1.0);
  }
  CHECK(sv.comp[0](1, pair_index(2, 3)) == doctest::Approx(-1.0));
  // V = 0 maps to 0.
  const TwistedTwoForm z = twisted_hodge(g, j_phi, TwistedTwoForm::zero(grid, 2));
  for (const auto& c : z.comp) CHECK(max_abs(c) == 0.0);
}

TEST_CASE("polarization projector: idempotent, fixed points, eigenspace split") {
  std::mt19937_64 rng(107);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpacetimeGrid grid;
  grid.shape = {3, 3, 3, 3};
  grid.spacing = {0.1, 0.1, 0.1, 0.1};
  grid.periodic = {false, false, false, false};
  const LorentzMetricField g = LorentzMetricField::sample(
      grid, [&](const Eigen::Vector4d&) { return random_lorentz_metric(rng); });
  std::vector<Eigen::MatrixXd> j_phi(static_cast<std::size_t>(grid.nodes()), j_standard());

  TwistedTwoForm v = TwistedTwoForm::zero(grid, 2);
  for (auto& c : v.comp)
    for (int a = 0; a < 2; ++a)
      for (int q = 0; q < 6; ++q) c(a, q) = u(rng);

  const TwistedTwoForm p1 = polarize(g, j_phi, v);
  const TwistedTwoForm p2 = polarize(g, j_phi, p1);
  const TwistedTwoForm sp1 = twisted_hodge(g, j_phi, p1);
  double worst_idem = 0.0, worst_fix = 0.0, worst_split = 0.0;
  for (std::size_t i = 0; i < v.comp.size(); ++i) {
    worst_idem = std::max(worst_idem, max_abs(p2.comp[i] - p1.comp[i]));
    worst_fix = std::max(worst_fix, max_abs(sp1.comp[i] - p1.comp[i]));
  }
  // V = P+V + P-V with star P-V = -P-V.
  TwistedTwoForm minus = v;
  for (std::size_t i = 0; i < v.comp.size(); ++i) minus.comp[i] -= p1.comp[i];
  const TwistedTwoForm sminus = twisted_hodge(g, j_phi, minus);
  for (std::size_t i = 0; i < v.comp.size(); ++i)
    worst_split = std::max(worst_split, max_abs(sminus.comp[i] + minus.comp[i]));
  CHECK(worst_idem < 1e-12);
  CHECK(worst_fix < 1e-12);
  CHECK(worst_split < 1e-12);
}

TEST_CASE("pointwise rank of the polarization projector is 6n") {
  std::mt19937_64 rng(109);
  for (int n : {1, 2}) {
    const Eigen::Matrix4d g = random_lorentz_metric(rng);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
      for (int j = 0; j < 2 * n; ++j) p(i, j) += u(rng);
    const Eigen::MatrixXd jm = p * j_standard(n) * p.inverse();
    const Eigen::MatrixXd star = star_matrix(g, jm);
    const Eigen::MatrixXd proj =
        0.5 * (Eigen::MatrixXd::Identity(12 * n, 12 * n) + star);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-8 * svd.singularValues()(0)) ++rank;
    CHECK(rank == 6 * n);
    // Idempotents have rank equal to trace.
    CHECK(std::abs(proj.trace() - 6.0 * n) < 1e-10);
  }
}

TEST_CASE("twisted_d: quadratic component with vanishing exterior derivative") {
  SpacetimeGrid grid = plain_grid(6, 1.0);
  const ScalarTarget t = trivial_point_target(1);
  const CutData cuts = make_cut_data(grid, t);
  TwistedTwoForm v = TwistedTwoForm::zero(grid, 2);
  grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const Eigen::Vector4d x = grid.position(c);
    v.comp[static_cast<std::size_t>(idx)](0, pair_index(0, 1)) = x(1) * x(1);
  });
  const TwistedThreeForm dv = twisted_d(v, grid, cuts);
  for (const auto& c : dv.comp) CHECK(max_abs(c) == 0.0);
}

TEST_CASE("twisted_d converges at second order on an analytic form") {
  const ScalarTarget t = trivial_point_target(1);
  auto worst_error = [&](int n) {
    SpacetimeGrid grid = plain_grid(n, 1.0);
    const CutData cuts = make_cut_data(grid, t);
    TwistedTwoForm v = TwistedTwoForm::zero(grid, 2);
    grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
      const Eigen::Vector4d x = grid.position(c);
      v.comp[static_cast<std::size_t>(idx)](0, pair_index(0, 1)) = std::sin(3.0 * x(2));
    });
    const TwistedThreeForm dv = twisted_d(v, grid, cuts);
    // Analytic: (dV)_{012} = d_2 V_{01} = 3 cos(3 x2); all other entries 0.
    // Errors are compared over a common sub-domain so that the two
    // resolutions sample the same truncation profile.
    double worst = 0.0;
    grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
      const Eigen::Vector4d x = grid.position(c);
      if (x.minCoeff() < 0.249 || x.maxCoeff() > 0.751) return;
      Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(2, 4);
      expect(0, 0) = 3.0 * std::cos(3.0 * x(2));  // triple (0,1,2)
      worst = std::max(worst, max_abs(dv.comp[static_cast<std::size_t>(idx)] - expect));
    });
    return worst;
  };
  const double e1 = worst_error(9), e2 = worst_error(17);
  CHECK(e1 / e2 > 3.4);
  CHECK(e1 / e2 < 4.6);
}

TEST_CASE("twisted_d annihilates exact forms to second order") {
  // V = d(f dx0) for f = sin(x1 + 2 x3): V_{m 0} = d_m f.
  const ScalarTarget t = trivial_point_target(1);
  auto worst_dv = [&](int n) {
    SpacetimeGrid grid = plain_grid(n, 1.0);
    const CutData cuts = make_cut_data(grid, t);
    TwistedTwoForm v = TwistedTwoForm::zero(grid, 2);
    grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
      const Eigen::Vector4d x = grid.position(c);
      const double df1 = std::cos(x(1) + 2.0 * x(3));
      const double df3 = 2.0 * std::cos(x(1) + 2.0 * x(3));
      auto& blk = v.comp[static_cast<std::size_t>(idx)];
      blk(0, pair_index(0, 1)) = -df1;  // V_{01} = -d_1 f
      blk(0, pair_index(0, 3)) = -df3;
    });
    const TwistedThreeForm dv = twisted_d(v, grid, cuts);
    double worst = 0.0;
    grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
      if (!grid.interior(c)) return;
      worst = std::max(worst, max_abs(dv.comp[static_cast<std::size_t>(idx)]));
    });
    return worst;
  };
  const double e1 = worst_dv(9), e2 = worst_dv(17);
  CHECK(e1 / e2 > 3.4);
  CHECK(e1 / e2 < 4.6);
}

TEST_CASE("twisted_d respects cut transitions") {
  // One periodic direction with a parabolic transition. A flat section
  // times a closed form stays closed across the cut; breaking the cut rule
  // by using a non-invariant constant section shows up immediately.
  SpacetimeGrid grid;
  grid.shape = {4, 4, 4, 8};
  grid.spacing = {0.25, 0.25, 0.25, 0.125};
  grid.periodic = {false, false, false, true};
  MatQ rho(2, 2);
  rho << 1, 1, 0, 1;
  ScalarTarget t(1, {1.0},
                 MonodromyRep(GroupPresentation::free_abelian({"a"}),
                              SymplecticSpace::standard(1), {rho}));
  t.metric = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  t.metric_constant = true;
  t.potential = [](const Eigen::VectorXd&) { return 0.0; };
  grid.winding[3] = Word({{0, 1}});
  const CutData cuts = make_cut_data(grid, t);

  // Constant e1 lies in ker(rho - I): closed exactly, including at the cut.
  TwistedTwoForm flat = TwistedTwoForm::zero(grid, 2);
  for (auto& c : flat.comp) c(0, pair_index(1, 2)) = 1.0;
  const TwistedThreeForm d_flat = twisted_d(flat, grid, cuts);
  for (const auto& c : d_flat.comp) CHECK(max_abs(c) == 0.0);

  // Constant e2 is not invariant: the cut stencil sees the jump.
  TwistedTwoForm off = TwistedTwoForm::zero(grid, 2);
  for (auto& c : off.comp) c(1, pair_index(1, 2)) = 1.0;
  const TwistedThreeForm d_off = twisted_d(off, grid, cuts);
  double worst = 0.0;
  for (const auto& c : d_off.comp) worst = std::max(worst, max_abs(c));
  CHECK(worst > 0.5);
}

TEST_CASE("inner contraction: defining identity on decomposable inputs") {
  std::mt19937_64 rng(113);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpacetimeGrid grid;
  grid.shape = {3, 3, 3, 3};
  grid.spacing = {0.1, 0.1, 0.1, 0.1};
  grid.periodic = {false, false, false, false};
  const LorentzMetricField g = LorentzMetricField::sample(
      grid, [&](const Eigen::Vector4d&) { return random_lorentz_metric(rng); });
  const Eigen::MatrixXd q = (Eigen::MatrixXd(2, 2) << 1.25, 0.25, 0.25, 2.0).finished();
  std::vector<Eigen::MatrixXd> q_phi(static_cast<std::size_t>(grid.nodes()), q);

  // rho (x) xi with rho a 2-form and xi a fiber vector.
  Eigen::VectorXd rho1(6), rho2(6), xi1(2), xi2(2);
  for (int i = 0; i < 6; ++i) {
    rho1(i) = u(rng);
    rho2(i) = u(rng);
  }
  for (int i = 0; i < 2; ++i) {
    xi1(i) = u(rng);
    xi2(i) = u(rng);
  }
  TwistedTwoForm v1 = TwistedTwoForm::zero(grid, 2), v2 = TwistedTwoForm::zero(grid, 2);
  for (auto& c : v1.comp) c = xi1 * rho1.transpose();
  for (auto& c : v2.comp) c = xi2 * rho2.transpose();

  const auto result = inner_contraction(v1, v2, g, q_phi);

  grid.for_each([&](std::int64_t idx, const std::array<int, 4>&) {
    const Eigen::Matrix4d ginv = g.inv(idx);
    const Eigen::Matrix4d r1 = full_from_block(Eigen::MatrixXd(xi1 * rho1.transpose()), 0) /
                               (xi1(0) == 0.0 ? 1.0 : xi1(0));
    (void)r1;
    // Oracle: Q(xi1, xi2) * rho1 (.)g rho2 with the g-contraction written out.
    Eigen::Matrix4d rho1_full = Eigen::Matrix4d::Zero(), rho2_full = Eigen::Matrix4d::Zero();
    for (int p = 0; p < 6; ++p) {
      const auto [mu, nu] = kPair2[static_cast<std::size_t>(p)];
      rho1_full(mu, nu) = rho1(p);
      rho1_full(nu, mu) = -rho1(p);
      rho2_full(mu, nu) = rho2(p);
      rho2_full(nu, mu) = -rho2(p);
    }
    const double qval = xi1.dot(q * xi2);
    Eigen::Matrix4d oracle = Eigen::Matrix4d::Zero();
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        double acc = 0.0;
        for (int l = 0; l < 4; ++l)
          for (int s = 0; s < 4; ++s) acc += rho1_full(m, l) * ginv(l, s) * rho2_full(s, n);
        oracle(m, n) = qval * acc;
      }
    CHECK(max_abs(result[static_cast<std::size_t>(idx)] - oracle) < 1e-12);
  });
}

TEST_CASE("inner contraction: frozen Minkowski block, zero input, transpose rule") {
  SpacetimeGrid grid;
  grid.shape = {3, 3, 3, 3};
  grid.spacing = {0.1, 0.1, 0.1, 0.1};
  grid.periodic = {false, false, false, false};
  const LorentzMetricField g =
      LorentzMetricField::sample(grid, [](const Eigen::Vector4d&) { return minkowski(); });
  std::vector<Eigen::MatrixXd> q_phi(static_cast<std::size_t>(grid.nodes()),
                                     Eigen::MatrixXd::Identity(2, 2));
  TwistedTwoForm v = TwistedTwoForm::zero(grid, 2);
  for (auto& c : v.comp) c(0, pair_index(0, 1)) = 1.0;

  const auto vv = inner_contraction(v, v, g, q_phi);
  Eigen::Matrix4d expect = Eigen::Matrix4d::Zero();
  expect(0, 0) = -1.0;
  expect(1, 1) = 1.0;
  for (const auto& m : vv) CHECK(max_abs(m - expect) == 0.0);

  const auto zz = inner_contraction(v, TwistedTwoForm::zero(grid, 2), g, q_phi);
  for (const auto& m : zz) CHECK(max_abs(m) == 0.0);

  // (V1 (.) V2)^T = V2 (.) V1 for symmetric q.
  std::mt19937_64 rng(127);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TwistedTwoForm v1 = TwistedTwoForm::zero(grid, 2), v2 = TwistedTwoForm::zero(grid, 2);
  for (auto& c : v1.comp)
    for (int a = 0; a < 2; ++a)
      for (int p = 0; p < 6; ++p) c(a, p) = u(rng);
  for (auto& c : v2.comp)
    for (int a = 0; a < 2; ++a)
      for (int p = 0; p < 6; ++p) c(a, p) = u(rng);
  const auto a12 = inner_contraction(v1, v2, g, q_phi);
  const auto a21 = inner_contraction(v2, v1, g, q_phi);
  for (std::size_t i = 0; i < a12.size(); ++i)
    CHECK(max_abs(Eigen::Matrix4d(a12[i].transpose()) - a21[i]) < 1e-13);
}

TEST_CASE("scalar pairing agrees with a brute-force index-loop oracle") {
  std::mt19937_64 rng(131);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SpacetimeGrid grid;
  grid.shape = {3, 3, 3, 3};
  grid.spacing = {0.1, 0.1, 0.1, 0.1};
  grid.periodic = {false, false, false, false};
  const LorentzMetricField g = LorentzMetricField::sample(
      grid, [&](const Eigen::Vector4d&) { return random_lorentz_metric(rng); });
  const int d = 2, f = 2;
  std::vector<Eigen::MatrixXd> q_phi(static_cast<std::size_t>(grid.nodes()));
  std::vector<std::vector<Eigen::MatrixXd>> psi_phi(static_cast<std::size_t>(grid.nodes()));
  TwistedTwoForm v = TwistedTwoForm::zero(grid, f);
  for (std::size_t i = 0; i < v.comp.size(); ++i) {
    Eigen::MatrixXd q(f, f);
    q << 1.5, 0.3, 0.3, 0.9;
    q_phi[i] = q;
    psi_phi[i].resize(d);
    for (int k = 0; k < d; ++k) {
      Eigen::MatrixXd psi(f, f);
      for (int a = 0; a < f; ++a)
        for (int b = 0; b < f; ++b) psi(a, b) = u(rng);
      psi_phi[i][static_cast<std::size_t>(k)] = psi;
    }
    for (int a = 0; a < f; ++a)
      for (int p = 0; p < 6; ++p) v.comp[i](a, p) = u(rng);
  }
  std::vector<Eigen::MatrixXd> j_phi(static_cast<std::size_t>(grid.nodes()), j_standard());
  const TwistedTwoForm star_v = twisted_hodge(g, j_phi, v);
  const auto pairing = scalar_pairing(v, star_v, psi_phi, g, q_phi);

  grid.for_each([&](std::int64_t idx, const std::array<int, 4>&) {
    const auto i = static_cast<std::size_t>(idx);
    const Eigen::Matrix4d ginv = g.inv(idx);
    for (int k = 0; k < d; ++k) {
      double oracle = 0.0;
      for (int a = 0; a < f; ++a)
        for (int b = 0; b < f; ++b)
          for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n)
              for (int al = 0; al < 4; ++al)
                for (int be = 0; be < 4; ++be) {
                  double pv = 0.0;
                  for (int cdx = 0; cdx < f; ++cdx)
                    pv += psi_phi[i][static_cast<std::size_t>(k)](b, cdx) *
                          v.component(idx, cdx, al, be);
                  oracle += 0.5 * 0.5 * q_phi[i](a, b) * star_v.component(idx, a, m, n) *
                            ginv(m, al) * ginv(n, be) * pv;
                }
      CHECK(std::abs(pairing[i](k) - oracle) < 1e-11);
    }
  });
}

TEST_CASE("metric field construction rejects wrong signatures") {
  SpacetimeGrid grid;
  grid.shape = {3, 3, 3, 3};
  grid.spacing = {0.1, 0.1, 0.1, 0.1};
  grid.periodic = {false, false, false, false};
  CHECK_THROWS_AS(LorentzMetricField::sample(
                      grid, [](const Eigen::Vector4d&) { return Eigen::Matrix4d::Identity(); }),
                  SignatureError);
  Eigen::Matrix4d two_minus = Eigen::Matrix4d::Identity();
  two_minus(0, 0) = -1.0;
  two_minus(1, 1) = -1.0;
  CHECK_THROWS_AS(LorentzMetricField::sample(
                      grid, [&](const Eigen::Vector4d&) { return two_minus; }),
                  SignatureError);
}
