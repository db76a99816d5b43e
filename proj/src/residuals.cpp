#include "esmv/residuals.hpp"

#include <cmath>

namespace esmv {

EsmConfiguration EsmConfiguration::make(SpacetimeGrid grid, ScalarTarget target,
                                        TamingField taming, LorentzMetricField g,
                                        ScalarMapField phi, TwistedTwoForm v,
                                        EsmParameters params) {
  grid.validate();
  params.validate();
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    for (const auto& [gen, exp] : grid.winding[du].letters)
      if (gen < 0 || gen >= static_cast<int>(target.monodromy.images.size()))
        throw Error("phi winding references undeclared generator");
  }
  CutData cuts = make_cut_data(grid, target);
  return EsmConfiguration{std::move(grid), std::move(target), std::move(taming),
                          std::move(g),    std::move(phi),    std::move(v),
                          std::move(params), std::move(cuts)};
}

DerivedFields derive_fields(const EsmConfiguration& cfg) {
  DerivedFields der;
  const std::size_t n = cfg.phi.phi.size();
  der.j_phi.resize(n);
  der.q_phi.resize(n);
  der.psi_phi.resize(n);
  const Eigen::MatrixXd omega = cfg.target.monodromy.sp.omega_dense();
  const FundamentalFormField ff = fundamental_form(cfg.target, cfg.taming);
  const auto psi_at = fundamental_field(cfg.target, ff);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd& y = cfg.phi.phi[i];
    der.j_phi[i] = cfg.taming.j_at(y);
    der.q_phi[i] = omega * der.j_phi[i];
    der.psi_phi[i] = psi_at(y);
  }
  return der;
}

namespace {

Eigen::VectorXd phi_neighbor(const EsmConfiguration& cfg, const std::array<int, 4>& c,
                             int dir, int step) {
  const auto nb = cfg.grid.neighbor(c, dir, step);
  if (!nb) throw GridTooCoarse("phi neighbor out of range");
  Eigen::VectorXd val = cfg.phi.phi[static_cast<std::size_t>(nb->node)];
  if (nb->wrap != 0) val += static_cast<double>(nb->wrap) * cfg.cuts.shift[static_cast<std::size_t>(dir)];
  return val;
}

Eigen::Matrix4d metric_neighbor(const LorentzMetricField& g, const std::array<int, 4>& c,
                                int dir, int step) {
  const auto nb = g.grid.neighbor(c, dir, step);
  if (!nb) throw GridTooCoarse("metric neighbor out of range");
  return g.g[static_cast<std::size_t>(nb->node)];
}

Eigen::Matrix4d metric_derivative(const LorentzMetricField& g, const std::array<int, 4>& c,
                                  int dir) {
  const double h = g.grid.spacing[static_cast<std::size_t>(dir)];
  const bool has_m = g.grid.neighbor(c, dir, -1).has_value();
  const bool has_p = g.grid.neighbor(c, dir, 1).has_value();
  if (has_m && has_p)
    return (metric_neighbor(g, c, dir, 1) - metric_neighbor(g, c, dir, -1)) / (2 * h);
  const Eigen::Matrix4d g0 = g.g[static_cast<std::size_t>(g.grid.index(c))];
  if (has_p)
    return (-3.0 * g0 + 4.0 * metric_neighbor(g, c, dir, 1) - metric_neighbor(g, c, dir, 2)) /
           (2 * h);
  return (3.0 * g0 - 4.0 * metric_neighbor(g, c, dir, -1) + metric_neighbor(g, c, dir, -2)) /
         (2 * h);
}

}  // namespace

Eigen::VectorXd phi_derivative(const EsmConfiguration& cfg, const std::array<int, 4>& c,
                               int dir) {
  const double h = cfg.grid.spacing[static_cast<std::size_t>(dir)];
  const bool has_m = cfg.grid.neighbor(c, dir, -1).has_value();
  const bool has_p = cfg.grid.neighbor(c, dir, 1).has_value();
  if (has_m && has_p)
    return (phi_neighbor(cfg, c, dir, 1) - phi_neighbor(cfg, c, dir, -1)) / (2 * h);
  const Eigen::VectorXd& p0 = cfg.phi.phi[static_cast<std::size_t>(cfg.grid.index(c))];
  if (has_p)
    return (-3.0 * p0 + 4.0 * phi_neighbor(cfg, c, dir, 1) - phi_neighbor(cfg, c, dir, 2)) /
           (2 * h);
  return (3.0 * p0 - 4.0 * phi_neighbor(cfg, c, dir, -1) + phi_neighbor(cfg, c, dir, -2)) /
         (2 * h);
}

namespace {

// Second derivative of phi: compact central stencils inside, nested
// one-sided fallbacks at non-periodic boundaries.
Eigen::VectorXd phi_second(const EsmConfiguration& cfg, const std::array<int, 4>& c, int d1,
                           int d2) {
  const double h1 = cfg.grid.spacing[static_cast<std::size_t>(d1)];
  const double h2 = cfg.grid.spacing[static_cast<std::size_t>(d2)];
  if (d1 == d2) {
    const bool has_m = cfg.grid.neighbor(c, d1, -1).has_value();
    const bool has_p = cfg.grid.neighbor(c, d1, 1).has_value();
    const Eigen::VectorXd& p0 = cfg.phi.phi[static_cast<std::size_t>(cfg.grid.index(c))];
    if (has_m && has_p)
      return (phi_neighbor(cfg, c, d1, 1) - 2.0 * p0 + phi_neighbor(cfg, c, d1, -1)) /
             (h1 * h1);
    if (cfg.grid.shape[static_cast<std::size_t>(d1)] < 4)
      throw GridTooCoarse("one-sided second derivative needs 4 nodes");
    if (has_p)
      return (2.0 * p0 - 5.0 * phi_neighbor(cfg, c, d1, 1) +
              4.0 * phi_neighbor(cfg, c, d1, 2) - phi_neighbor(cfg, c, d1, 3)) /
             (h1 * h1);
    return (2.0 * p0 - 5.0 * phi_neighbor(cfg, c, d1, -1) +
            4.0 * phi_neighbor(cfg, c, d1, -2) - phi_neighbor(cfg, c, d1, -3)) /
           (h1 * h1);
  }
  // Mixed derivative: apply the d1 stencil to the d2 first derivative. The
  // first-derivative field is strictly periodic (lift shifts cancel), so the
  // outer stencil wraps without shift corrections.
  auto dphi2 = [&](int step1) {
    std::array<int, 4> cc = c;
    const auto nb = cfg.grid.neighbor(cc, d1, step1);
    if (!nb) throw GridTooCoarse("mixed derivative out of range");
    return phi_derivative(cfg, cfg.grid.coords(nb->node), d2);
  };
  const bool has_m = cfg.grid.neighbor(c, d1, -1).has_value();
  const bool has_p = cfg.grid.neighbor(c, d1, 1).has_value();
  if (has_m && has_p) return (dphi2(1) - dphi2(-1)) / (2 * h1);
  (void)h2;
  if (has_p) return (-3.0 * dphi2(0) + 4.0 * dphi2(1) - dphi2(2)) / (2 * h1);
  return (3.0 * dphi2(0) - 4.0 * dphi2(-1) + dphi2(-2)) / (2 * h1);
}

}  // namespace

std::array<Eigen::Matrix4d, 4> christoffel_at(const LorentzMetricField& g,
                                              const std::array<int, 4>& c) {
  std::array<Eigen::Matrix4d, 4> dg;
  for (int d = 0; d < 4; ++d) dg[static_cast<std::size_t>(d)] = metric_derivative(g, c, d);
  const Eigen::Matrix4d ginv = g.g[static_cast<std::size_t>(g.grid.index(c))].inverse();
  std::array<Eigen::Matrix4d, 4> gamma;
  for (int l = 0; l < 4; ++l) {
    Eigen::Matrix4d out;
    for (int m = 0; m < 4; ++m)
      for (int n = m; n < 4; ++n) {
        double s = 0;
        for (int k = 0; k < 4; ++k)
          s += ginv(l, k) * (dg[static_cast<std::size_t>(m)](k, n) +
                             dg[static_cast<std::size_t>(n)](k, m) -
                             dg[static_cast<std::size_t>(k)](m, n));
        out(m, n) = 0.5 * s;
        out(n, m) = out(m, n);
      }
    gamma[static_cast<std::size_t>(l)] = out;
  }
  return gamma;
}

namespace {

std::array<Eigen::Matrix4d, 4> christoffel_neighbor(const LorentzMetricField& g,
                                                    const std::array<int, 4>& c, int dir,
                                                    int step) {
  const auto nb = g.grid.neighbor(c, dir, step);
  if (!nb) throw GridTooCoarse("christoffel neighbor out of range");
  return christoffel_at(g, g.grid.coords(nb->node));
}

}  // namespace

std::vector<Eigen::Matrix4d> einstein_tensor(const LorentzMetricField& g) {
  for (int d = 0; d < 4; ++d)
    if (g.grid.shape[static_cast<std::size_t>(d)] < 5)
      throw GridTooCoarse("einstein_tensor needs 5 nodes per direction");
  std::vector<Eigen::Matrix4d> out(g.g.size(), Eigen::Matrix4d::Zero());
  g.grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const std::array<Eigen::Matrix4d, 4> gamma = christoffel_at(g, c);
    // dgamma[d][l](m,n) = d_d Gamma^l_{mn}
    std::array<std::array<Eigen::Matrix4d, 4>, 4> dgamma;
    for (int d = 0; d < 4; ++d) {
      const double h = g.grid.spacing[static_cast<std::size_t>(d)];
      const bool has_m = g.grid.neighbor(c, d, -1).has_value();
      const bool has_p = g.grid.neighbor(c, d, 1).has_value();
      std::array<Eigen::Matrix4d, 4> der;
      if (has_m && has_p) {
        const auto gp = christoffel_neighbor(g, c, d, 1);
        const auto gm = christoffel_neighbor(g, c, d, -1);
        for (int l = 0; l < 4; ++l)
          der[static_cast<std::size_t>(l)] =
              (gp[static_cast<std::size_t>(l)] - gm[static_cast<std::size_t>(l)]) / (2 * h);
      } else if (has_p) {
        const auto g1 = christoffel_neighbor(g, c, d, 1);
        const auto g2 = christoffel_neighbor(g, c, d, 2);
        for (int l = 0; l < 4; ++l)
          der[static_cast<std::size_t>(l)] =
              (-3.0 * gamma[static_cast<std::size_t>(l)] + 4.0 * g1[static_cast<std::size_t>(l)] -
               g2[static_cast<std::size_t>(l)]) /
              (2 * h);
      } else {
        const auto g1 = christoffel_neighbor(g, c, d, -1);
        const auto g2 = christoffel_neighbor(g, c, d, -2);
        for (int l = 0; l < 4; ++l)
          der[static_cast<std::size_t>(l)] =
              (3.0 * gamma[static_cast<std::size_t>(l)] - 4.0 * g1[static_cast<std::size_t>(l)] +
               g2[static_cast<std::size_t>(l)]) /
              (2 * h);
      }
      dgamma[static_cast<std::size_t>(d)] = der;
    }

    // Ric_{sn} = d_m Gamma^m_{ns} - d_n Gamma^m_{ms}
    //            + Gamma^m_{ml} Gamma^l_{ns} - Gamma^m_{nl} Gamma^l_{ms}
    Eigen::Vector4d trace_gamma;  // c_l = Gamma^m_{ml}
    for (int l = 0; l < 4; ++l) {
      double s = 0;
      for (int m = 0; m < 4; ++m) s += gamma[static_cast<std::size_t>(m)](m, l);
      trace_gamma(l) = s;
    }
    Eigen::Matrix4d ric;
    for (int sdx = 0; sdx < 4; ++sdx)
      for (int n = 0; n < 4; ++n) {
        double t1 = 0, t2 = 0, t3 = 0, t4 = 0;
        for (int m = 0; m < 4; ++m) {
          t1 += dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>(m)](n, sdx);
          t2 += dgamma[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)](m, sdx);
        }
        for (int l = 0; l < 4; ++l) {
          t3 += trace_gamma(l) * gamma[static_cast<std::size_t>(l)](n, sdx);
          for (int m = 0; m < 4; ++m)
            t4 += gamma[static_cast<std::size_t>(m)](n, l) * gamma[static_cast<std::size_t>(l)](m, sdx);
        }
        ric(sdx, n) = t1 - t2 + t3 - t4;
      }
    ric = 0.5 * (ric + ric.transpose().eval());
    const Eigen::Matrix4d& gm = g.g[static_cast<std::size_t>(idx)];
    const Eigen::Matrix4d ginv = gm.inverse();
    const double scal = (ginv * ric).trace();
    out[static_cast<std::size_t>(idx)] = ric - 0.5 * scal * gm;
  });
  return out;
}

std::vector<double> modified_density(const EsmConfiguration& cfg) {
  std::vector<double> out(cfg.phi.phi.size(), 0.0);
  cfg.grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const Eigen::VectorXd& y = cfg.phi.phi[static_cast<std::size_t>(idx)];
    const Eigen::MatrixXd gt = cfg.target.metric_at(y);
    const Eigen::Matrix4d ginv = cfg.g.inv(idx);
    std::array<Eigen::VectorXd, 4> dphi;
    for (int d = 0; d < 4; ++d) dphi[static_cast<std::size_t>(d)] = phi_derivative(cfg, c, d);
    double e = 0;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        if (ginv(m, n) == 0.0) continue;
        e += 0.5 * ginv(m, n) *
             dphi[static_cast<std::size_t>(m)].dot(gt * dphi[static_cast<std::size_t>(n)]);
      }
    out[static_cast<std::size_t>(idx)] = e + cfg.target.potential_at(y);
  });
  return out;
}

std::vector<Eigen::VectorXd> tension_field(const EsmConfiguration& cfg) {
  const int d = cfg.target.dim;
  std::vector<Eigen::VectorXd> out(cfg.phi.phi.size(), Eigen::VectorXd::Zero(d));
  cfg.grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const Eigen::Matrix4d ginv = cfg.g.inv(idx);
    const std::array<Eigen::Matrix4d, 4> gamma = christoffel_at(cfg.g, c);
    std::array<Eigen::VectorXd, 4> dphi;
    for (int dd = 0; dd < 4; ++dd) dphi[static_cast<std::size_t>(dd)] = phi_derivative(cfg, c, dd);
    const std::vector<Eigen::MatrixXd> tgamma =
        cfg.target.christoffel(cfg.phi.phi[static_cast<std::size_t>(idx)]);

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n) {
        if (ginv(m, n) == 0.0) continue;
        Eigen::VectorXd term = phi_second(cfg, c, std::min(m, n), std::max(m, n));
        for (int l = 0; l < 4; ++l)
          term -= gamma[static_cast<std::size_t>(l)](m, n) * dphi[static_cast<std::size_t>(l)];
        for (int k = 0; k < d; ++k)
          term(k) += dphi[static_cast<std::size_t>(m)].dot(
              tgamma[static_cast<std::size_t>(k)] * dphi[static_cast<std::size_t>(n)]);
        theta += ginv(m, n) * term;
      }
    out[static_cast<std::size_t>(idx)] = theta;
  });
  return out;
}

std::vector<Eigen::VectorXd> modified_tension(const EsmConfiguration& cfg) {
  std::vector<Eigen::VectorXd> out = tension_field(cfg);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Eigen::VectorXd& y = cfg.phi.phi[i];
    out[i] -= cfg.target.metric_inv_at(y) * cfg.target.grad_potential(y);
  }
  return out;
}

std::vector<Eigen::Matrix4d> stress_tensor(const EsmConfiguration& cfg) {
  return stress_tensor(cfg, derive_fields(cfg));
}

std::vector<Eigen::Matrix4d> stress_tensor(const EsmConfiguration& cfg,
                                           const DerivedFields& der) {
  const std::vector<double> density = modified_density(cfg);
  const std::vector<Eigen::Matrix4d> vv =
      inner_contraction(cfg.v, cfg.v, cfg.g, der.q_phi);
  std::vector<Eigen::Matrix4d> out(cfg.phi.phi.size());
  cfg.grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const auto i = static_cast<std::size_t>(idx);
    const Eigen::VectorXd& y = cfg.phi.phi[i];
    const Eigen::MatrixXd gt = cfg.target.metric_at(y);
    std::array<Eigen::VectorXd, 4> dphi;
    for (int dd = 0; dd < 4; ++dd) dphi[static_cast<std::size_t>(dd)] = phi_derivative(cfg, c, dd);
    Eigen::Matrix4d pullback;
    for (int m = 0; m < 4; ++m)
      for (int n = m; n < 4; ++n) {
        pullback(m, n) = dphi[static_cast<std::size_t>(m)].dot(gt * dphi[static_cast<std::size_t>(n)]);
        pullback(n, m) = pullback(m, n);
      }
    out[i] = cfg.g.at(idx) * density[i] + 2.0 * vv[i] - pullback;
  });
  return out;
}

namespace {

struct NormAccumulator {
  std::vector<double> squares;
  double peak = 0.0;

  void add(double pointwise_norm_sq) {
    squares.push_back(pointwise_norm_sq);
    const double n = std::sqrt(pointwise_norm_sq);
    if (n > peak) peak = n;
  }
  NormPair finish() const {
    NormPair p;
    p.max = peak;
    p.rms = squares.empty() ? 0.0 : std::sqrt(pairwise_sum(squares) / static_cast<double>(squares.size()));
    return p;
  }
};

}  // namespace

ResidualReport residual_report(const EsmConfiguration& cfg, bool dump_fields) {
  const DerivedFields der = derive_fields(cfg);

  const std::vector<Eigen::Matrix4d> einstein = einstein_tensor(cfg.g);
  const std::vector<Eigen::Matrix4d> stress = stress_tensor(cfg, der);
  const std::vector<Eigen::VectorXd> tension = modified_tension(cfg);
  const TwistedTwoForm star_v = twisted_hodge(cfg.g, der.j_phi, cfg.v);
  const std::vector<Eigen::VectorXd> pairing =
      scalar_pairing(cfg.v, star_v, der.psi_phi, cfg.g, der.q_phi);
  const TwistedThreeForm dv = twisted_d(cfg.v, cfg.grid, cfg.cuts);

  ResidualReport rep;
  rep.kappa = cfg.params.kappa;
  rep.dumped = dump_fields;
  NormAccumulator acc_e, acc_s, acc_m, acc_p;

  cfg.grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    if (!cfg.grid.interior(c)) return;
    const auto i = static_cast<std::size_t>(idx);

    const Eigen::Matrix4d res_e = einstein[i] - cfg.params.kappa * stress[i];
    const double e2 = res_e.squaredNorm();

    const Eigen::VectorXd res_s = tension[i] - 0.5 * pairing[i];
    const Eigen::MatrixXd gt = cfg.target.metric_at(cfg.phi.phi[i]);
    const double s2 = res_s.dot(gt * res_s);

    double m2 = 0.0;
    for (int t = 0; t < 4; ++t) {
      const Eigen::VectorXd col = dv.comp[i].col(t);
      m2 += col.dot(der.q_phi[i] * col);
    }

    double p2 = 0.0;
    const Eigen::MatrixXd dev = star_v.comp[i] - cfg.v.comp[i];
    for (int p = 0; p < 6; ++p) {
      const Eigen::VectorXd col = dev.col(p);
      p2 += col.dot(der.q_phi[i] * col);
    }

    acc_e.add(e2);
    acc_s.add(s2);
    acc_m.add(m2);
    acc_p.add(p2);
    if (dump_fields) {
      rep.einstein_field.push_back(std::sqrt(e2));
      rep.scalar_field.push_back(std::sqrt(s2));
      rep.em_field.push_back(std::sqrt(m2));
      rep.polarization_field.push_back(std::sqrt(p2));
    }
  });

  rep.einstein = acc_e.finish();
  rep.scalar = acc_s.finish();
  rep.em = acc_m.finish();
  rep.polarization = acc_p.finish();
  rep.interior_nodes = static_cast<std::int64_t>(acc_e.squares.size());
  return rep;
}

std::vector<CheckResult> validate_configuration(const EsmConfiguration& cfg) {
  std::vector<CheckResult> checks;
  const double field_tol = cfg.params.tol("field_tol");
  const double alg_tol = cfg.params.tol("alg_tol");

  {
    CheckResult r{"taming_pointwise_valid", true, 0.0, ""};
    try {
      validate_taming_field(cfg.target, cfg.taming, cfg.target.monodromy.sp, alg_tol);
    } catch (const Error& e) {
      r.pass = false;
      r.detail = e.what();
    }
    checks.push_back(r);
  }
  {
    CheckResult r{"taming_twisted_periodicity", true, 0.0, ""};
    const PeriodicityReport pr = measure_twisted_periodicity(cfg.target, cfg.taming);
    r.value = pr.max_violation;
    if (pr.max_violation > field_tol) {
      r.pass = false;
      r.detail = "violation in target direction " + std::to_string(pr.worst_dim);
    }
    checks.push_back(r);
  }
  {
    CheckResult r{"monodromy_relations", true, 0.0, ""};
    for (const Word& rel : cfg.target.monodromy.presentation.relations)
      if (transport(cfg.target.monodromy, rel) !=
          MatQ(MatQ::Identity(cfg.target.monodromy.sp.dim, cfg.target.monodromy.sp.dim))) {
        r.pass = false;
        r.detail = "relation fails: " + rel.display(cfg.target.monodromy.presentation.generators);
      }
    checks.push_back(r);
  }
  {
    CheckResult r{"lattice_preserved", true, 0.0, ""};
    if (cfg.target.monodromy.lattice) {
      r.pass = preserves_lattice(cfg.target.monodromy, *cfg.target.monodromy.lattice);
      if (!r.pass) r.detail = "a generator image moves the lattice";
    } else {
      r.detail = "no lattice attached";
    }
    checks.push_back(r);
  }
  {
    // Positive polarization as a fixed point of the projector.
    CheckResult r{"positive_polarization", true, 0.0, ""};
    const DerivedFields der = derive_fields(cfg);
    const TwistedTwoForm star_v = twisted_hodge(cfg.g, der.j_phi, cfg.v);
    double worst = 0.0;
    for (std::size_t i = 0; i < cfg.v.comp.size(); ++i)
      worst = std::max(worst, max_abs(star_v.comp[i] - cfg.v.comp[i]));
    r.value = worst;
    if (worst > field_tol) {
      r.pass = false;
      r.detail = "star V != V";
    }
    checks.push_back(r);
  }
  {
    // Cut compatibility of the pulled-back taming: J(phi + shift) rho =
    // rho J(phi), sampled over nodes on the cut faces.
    CheckResult r{"cut_compatibility", true, 0.0, ""};
    double worst = 0.0;
    for (int dmu = 0; dmu < 4; ++dmu) {
      const auto du = static_cast<std::size_t>(dmu);
      if (!cfg.grid.periodic[du] || cfg.grid.winding[du].empty()) continue;
      cfg.grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
        if (c[du] != cfg.grid.shape[du] - 1) return;
        const Eigen::VectorXd& y = cfg.phi.phi[static_cast<std::size_t>(idx)];
        const Eigen::VectorXd shifted = y + cfg.cuts.shift[du];
        const Eigen::MatrixXd lhs = cfg.taming.j_at(shifted) * cfg.cuts.rho[du];
        const Eigen::MatrixXd rhs = cfg.cuts.rho[du] * cfg.taming.j_at(y);
        worst = std::max(worst, max_abs(lhs - rhs));
      });
    }
    r.value = worst;
    if (worst > field_tol) {
      r.pass = false;
      r.detail = "pulled-back taming incompatible with the cut transition";
    }
    checks.push_back(r);
  }
  return checks;
}

}  // namespace esmv
