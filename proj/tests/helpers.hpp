#pragma once

#include "esmv/residuals.hpp"

namespace esmv::testing {

inline Eigen::Matrix4d minkowski() {
  Eigen::Matrix4d eta = Eigen::Matrix4d::Identity();
  eta(0, 0) = -1.0;
  return eta;
}

inline Eigen::MatrixXd j_standard(int n = 1) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j(i, n + i) = -1.0;
    j(n + i, i) = 1.0;
  }
  return j;
}

inline MatQ parabolic() {
  MatQ rho(2, 2);
  rho << 1, 1, 0, 1;
  return rho;
}

// Non-periodic flat line target with trivial bundle: G = (1), Phi = 0.
inline ScalarTarget flat_line_target(int fiber_half_dim = 1) {
  ScalarTarget t(1, {0.0},
                 MonodromyRep(GroupPresentation::free_abelian({}),
                              SymplecticSpace::standard(fiber_half_dim), {}));
  t.metric = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  t.metric_constant = true;
  t.potential = [](const Eigen::VectorXd&) { return 0.0; };
  return t;
}

// Circle target of circumference L with one monodromy generator.
inline ScalarTarget circle_target(double L, const MatQ& rho,
                                  std::optional<IntegralLattice> lat = std::nullopt) {
  ScalarTarget t(1, {L},
                 MonodromyRep(GroupPresentation::free_abelian({"a"}),
                              SymplecticSpace::standard(static_cast<int>(rho.rows()) / 2),
                              {rho}, std::move(lat)));
  t.metric = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(1, 1); };
  t.metric_constant = true;
  t.potential = [](const Eigen::VectorXd&) { return 0.0; };
  return t;
}

inline TamingField constant_taming(int fiber_half_dim, int samples = 8, double L = 1.0) {
  TamingField jf;
  jf.sample_grid = TargetGrid{{samples}, {L / samples}, {0.0}};
  const Eigen::MatrixXd j = j_standard(fiber_half_dim);
  jf.j_at = [j](const Eigen::VectorXd&) { return j; };
  return jf;
}

// Shear-frame taming over the circle: J(y) = E(y) J0 E(y)^{-1} with
// E(y) = I + (y/L)(rho - I), twisted-periodic for unipotent rho.
inline TamingField shear_taming(double L, const Eigen::MatrixXd& rho, int samples = 16) {
  const Eigen::MatrixXd n = rho - Eigen::MatrixXd::Identity(2, 2);
  TamingField jf;
  jf.sample_grid = TargetGrid{{samples}, {L / samples}, {0.0}};
  const Eigen::MatrixXd j0 = j_standard(1);
  jf.j_at = [n, L, j0](const Eigen::VectorXd& y) {
    const Eigen::MatrixXd e = Eigen::MatrixXd::Identity(2, 2) + (y(0) / L) * n;
    const Eigen::MatrixXd einv = Eigen::MatrixXd::Identity(2, 2) - (y(0) / L) * n;
    return Eigen::MatrixXd(e * j0 * einv);
  };
  return jf;
}

inline SpacetimeGrid box_grid(int n, double len) {
  SpacetimeGrid g;
  g.shape = {n, n, n, n};
  const double h = len / (n - 1);
  g.spacing = {h, h, h, h};
  g.periodic = {false, false, false, false};
  return g;
}

inline SpacetimeGrid torus_grid(int n, double len) {
  SpacetimeGrid g;
  g.shape = {n, n, n, n};
  const double h = len / n;
  g.spacing = {h, h, h, h};
  g.periodic = {true, true, true, true};
  return g;
}

inline LorentzMetricField minkowski_field(const SpacetimeGrid& grid) {
  return LorentzMetricField::sample(grid,
                                    [](const Eigen::Vector4d&) { return minkowski(); });
}

inline ScalarMapField constant_phi(const SpacetimeGrid& grid, const Eigen::VectorXd& y0) {
  return ScalarMapField::sample(grid, static_cast<int>(y0.size()),
                                [y0](const Eigen::Vector4d&) { return y0; });
}

// Schwarzschild patch in static coordinates (t, r, theta, phi), M = 1.
inline LorentzMetricField schwarzschild_field(const SpacetimeGrid& grid,
                                              double r0 = 4.0, double th0 = M_PI / 3.0) {
  return LorentzMetricField::sample(grid, [r0, th0](const Eigen::Vector4d& x) {
    const double r = r0 + x(1);
    const double th = th0 + x(2);
    const double f = 1.0 - 2.0 / r;
    Eigen::Matrix4d g = Eigen::Matrix4d::Zero();
    g(0, 0) = -f;
    g(1, 1) = 1.0 / f;
    g(2, 2) = r * r;
    g(3, 3) = r * r * std::sin(th) * std::sin(th);
    return g;
  });
}

// The bundled U-fold setup, parameterized by resolution. Circle target with
// parabolic monodromy, shear-frame taming, phi winding once around the
// target along the periodic x3 direction, and a positively polarized
// twisted plane wave.
struct UfoldParts {
  SpacetimeGrid grid;
  ScalarTarget target;
  TamingField taming;
  LorentzMetricField g;
  ScalarMapField phi;
  TwistedTwoForm v;
};

inline UfoldParts ufold_parts(int n, bool with_lattice = false) {
  const double L = 1.0;
  SpacetimeGrid grid;
  grid.shape = {n, n, n, n};
  grid.spacing = {1.0 / (n - 1), 1.0 / (n - 1), 1.0 / n, 1.0 / n};
  grid.periodic = {false, false, true, true};
  grid.winding[3] = Word({{0, 1}});

  std::optional<IntegralLattice> lat;
  if (with_lattice) lat = IntegralLattice(MatZ(MatZ::Identity(2, 2)));
  ScalarTarget target = circle_target(L, parabolic(), std::move(lat));
  TamingField taming = shear_taming(L, to_dense(parabolic()), 16);

  LorentzMetricField g = minkowski_field(grid);
  ScalarMapField phi = ScalarMapField::sample(grid, 1, [](const Eigen::Vector4d& x) {
    Eigen::VectorXd y(1);
    y << x(3);
    return y;
  });

  // Twisted section u(y) = E(y) e2 satisfies u(y + L) = rho u(y).
  const Eigen::MatrixXd nmat = to_dense(parabolic()) - Eigen::MatrixXd::Identity(2, 2);
  auto section = [nmat, L](double y) {
    Eigen::VectorXd u(2);
    u << y / L, 1.0;
    return u;
  };
  TwistedTwoForm raw = TwistedTwoForm::zero(grid, 2);
  grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const Eigen::Vector4d x = grid.position(c);
    const double amp = std::cos(2.0 * M_PI * x(3));
    raw.comp[static_cast<std::size_t>(idx)] =
        section(x(3)) * amp * Eigen::RowVectorXd::Unit(6, pair_index(0, 2));
  });
  // Positive polarization with the pulled-back taming.
  std::vector<Eigen::MatrixXd> j_phi(static_cast<std::size_t>(grid.nodes()));
  for (std::size_t i = 0; i < j_phi.size(); ++i)
    j_phi[i] = taming.j_at(phi.phi[i]);
  TwistedTwoForm v = polarize(g, j_phi, raw);

  return UfoldParts{std::move(grid), std::move(target), std::move(taming),
                    std::move(g),    std::move(phi),    std::move(v)};
}

inline EsmConfiguration ufold_config(int n, bool with_lattice = false) {
  UfoldParts p = ufold_parts(n, with_lattice);
  return EsmConfiguration::make(p.grid, p.target, p.taming, p.g, p.phi, p.v,
                                EsmParameters{});
}

}  // namespace esmv::testing
