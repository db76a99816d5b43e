#include "esmv/duality.hpp"

namespace esmv {

TargetIsometry TargetIsometry::identity(int dim) {
  return TargetIsometry{Eigen::MatrixXd::Identity(dim, dim), Eigen::VectorXd::Zero(dim)};
}

TargetIsometry TargetIsometry::translate(const Eigen::VectorXd& t) {
  return TargetIsometry{Eigen::MatrixXd::Identity(t.size(), t.size()), t};
}

TargetIsometry TargetIsometry::linear_map(const Eigen::MatrixXd& a) {
  return TargetIsometry{a, Eigen::VectorXd::Zero(a.rows())};
}

bool TargetIsometry::is_identity() const {
  return max_abs(linear - Eigen::MatrixXd::Identity(linear.rows(), linear.cols())) == 0.0 &&
         max_abs(translation) == 0.0;
}

Eigen::VectorXd TargetIsometry::apply(const Eigen::VectorXd& y) const {
  return linear * y + translation;
}

Eigen::VectorXd TargetIsometry::apply_inverse(const Eigen::VectorXd& y) const {
  return linear.inverse() * (y - translation);
}

TargetIsometry TargetIsometry::after(const TargetIsometry& first) const {
  return TargetIsometry{linear * first.linear, linear * first.translation + translation};
}

DualityTransformation make_identity_transformation(const ScalarTarget& target) {
  DualityTransformation f;
  f.f0 = TargetIsometry::identity(target.dim);
  f.lift = MatQ::Identity(target.monodromy.sp.dim, target.monodromy.sp.dim);
  f.generator_action.resize(target.monodromy.images.size());
  for (std::size_t g = 0; g < f.generator_action.size(); ++g)
    f.generator_action[g] = Word({{static_cast<int>(g), 1}});
  return f;
}

void validate_transformation(const DualityTransformation& f, const ScalarTarget& target,
                             const TargetGrid& samples, double tol) {
  if (f.lift.rows() != target.monodromy.sp.dim)
    throw DimensionError("lift dimension mismatch");
  if (f.generator_action.size() != target.monodromy.images.size())
    throw Error("generator action must cover every monodromy generator");
  if (!is_symplectic(f.lift, target.monodromy.sp))
    throw EquivarianceViolation("lift is not symplectic");

  // Isometry of the scalar structure, sampled: metric and potential pullback.
  double worst_metric = 0.0, worst_potential = 0.0;
  const Eigen::MatrixXd& a = f.f0.linear;
  samples.for_each([&](const Eigen::VectorXd& y) {
    const Eigen::VectorXd fy = f.f0.apply(y);
    worst_metric = std::max(worst_metric,
                            max_abs(Eigen::MatrixXd(a.transpose() * target.metric_at(fy) * a) -
                                    target.metric_at(y)));
    worst_potential =
        std::max(worst_potential, std::abs(target.potential_at(fy) - target.potential_at(y)));
  });
  if (worst_metric > tol)
    throw IsometryViolation("map does not preserve the target metric");
  if (worst_potential > tol)
    throw IsometryViolation("map does not preserve the potential");

  // A linear part must map the period lattice onto itself.
  for (int i = 0; i < target.dim; ++i) {
    const double li = target.periods[static_cast<std::size_t>(i)];
    Eigen::VectorXd img = a.col(i) * (li > 0 ? li : 1.0);
    for (int j = 0; j < target.dim; ++j) {
      const double c = img(j);
      if (c == 0.0) continue;
      const double lj = target.periods[static_cast<std::size_t>(j)];
      if (li > 0 && (lj == 0.0 || std::abs(std::abs(c) - lj) > tol))
        throw IsometryViolation("linear part does not permute the periodic lattice");
      if (li == 0.0 && lj > 0 && std::abs(a(j, i)) > tol)
        throw IsometryViolation("linear part mixes periodic and open directions");
    }
  }

  // Flatness of the unbased automorphism: F rho_i = rho(action_i) F, exact.
  for (std::size_t g = 0; g < target.monodromy.images.size(); ++g) {
    const MatQ lhs = f.lift * target.monodromy.images[g];
    const MatQ rhs = transport(target.monodromy, f.generator_action[g]) * f.lift;
    if (lhs != rhs)
      throw EquivarianceViolation("lift is not covariantly constant over generator " +
                                  target.monodromy.presentation.generators[g]);
  }
}

TamingField transform_taming(const DualityTransformation& f, const TamingField& jf) {
  TamingField out;
  out.sample_grid = jf.sample_grid;
  const Eigen::MatrixXd fd = f.lift_dense();
  const Eigen::MatrixXd fd_inv = fd.inverse();
  const TargetIsometry f0 = f.f0;
  const MatrixField j_at = jf.j_at;
  out.j_at = [fd, fd_inv, f0, j_at](const Eigen::VectorXd& y) {
    return Eigen::MatrixXd(fd * j_at(f0.apply_inverse(y)) * fd_inv);
  };
  return out;
}

namespace {

Word map_word(const Word& w, const std::vector<Word>& action) {
  Word out;
  for (const auto& [g, e] : w.letters) {
    const Word& img = action.at(static_cast<std::size_t>(g));
    const Word piece = e > 0 ? img : img.inverse();
    out.letters.insert(out.letters.end(), piece.letters.begin(), piece.letters.end());
  }
  return out.reduced();
}

}  // namespace

EsmConfiguration apply_duality(const DualityTransformation& f, const EsmConfiguration& cfg) {
  validate_transformation(f, cfg.target, cfg.taming.sample_grid, cfg.params.tol("field_tol"));

  SpacetimeGrid grid = cfg.grid;
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (!grid.winding[du].empty())
      grid.winding[du] = map_word(grid.winding[du], f.generator_action);
  }

  ScalarMapField phi;
  phi.target_dim = cfg.phi.target_dim;
  phi.phi.resize(cfg.phi.phi.size());
  for (std::size_t i = 0; i < phi.phi.size(); ++i) phi.phi[i] = f.f0.apply(cfg.phi.phi[i]);

  const Eigen::MatrixXd fd = f.lift_dense();
  TwistedTwoForm v;
  v.fiber_dim = cfg.v.fiber_dim;
  v.comp.resize(cfg.v.comp.size());
  for (std::size_t i = 0; i < v.comp.size(); ++i) v.comp[i] = fd * cfg.v.comp[i];

  return EsmConfiguration::make(grid, cfg.target, transform_taming(f, cfg.taming), cfg.g,
                                std::move(phi), std::move(v), cfg.params);
}

DualityTransformation compose(const DualityTransformation& second,
                              const DualityTransformation& first) {
  DualityTransformation out;
  out.f0 = second.f0.after(first.f0);
  out.lift = second.lift * first.lift;
  out.generator_action.resize(first.generator_action.size());
  for (std::size_t g = 0; g < first.generator_action.size(); ++g)
    out.generator_action[g] = map_word(first.generator_action[g], second.generator_action);
  return out;
}

CovarianceReport covariance_check(const DualityTransformation& f, const EsmConfiguration& cfg,
                                  double tol) {
  CovarianceReport rep;
  rep.original = residual_report(cfg);
  const EsmConfiguration transformed = apply_duality(f, cfg);
  rep.transformed = residual_report(transformed);
  rep.discrepancy = std::max({std::abs(rep.original.scalar.max - rep.transformed.scalar.max),
                              std::abs(rep.original.scalar.rms - rep.transformed.scalar.rms),
                              std::abs(rep.original.em.max - rep.transformed.em.max),
                              std::abs(rep.original.em.rms - rep.transformed.em.rms)});
  rep.einstein_diff =
      std::max(std::abs(rep.original.einstein.max - rep.transformed.einstein.max),
               std::abs(rep.original.einstein.rms - rep.transformed.einstein.rms));
  rep.pass = rep.discrepancy <= tol;
  return rep;
}

bool is_symmetry(const DualityTransformation& f, const TamingField& jf, double tol) {
  const TamingField moved = transform_taming(f, jf);
  double worst = 0.0;
  jf.sample_grid.for_each([&](const Eigen::VectorXd& y) {
    worst = std::max(worst, max_abs(moved.j_at(y) - jf.j_at(y)));
  });
  return worst <= tol;
}

bool is_integral_duality(const DualityTransformation& f, const IntegralLattice& lat,
                         const SymplecticSpace& sp) {
  if (f.lift.rows() != sp.dim) throw DimensionError("lift dimension mismatch");
  if (!is_symplectic(f.lift, sp)) return false;
  const MatQ b = lat.basis_q();
  const MatQ conj = inverse_exact(b) * f.lift * b;
  for (Eigen::Index i = 0; i < conj.rows(); ++i)
    for (Eigen::Index j = 0; j < conj.cols(); ++j)
      if (denominator(conj(i, j)) != 1) return false;
  const Rational det = det_exact(conj);
  return det == 1 || det == -1;
}

SequenceProbeReport exact_sequence_probe(const MonodromyRep& rep,
                                         const std::vector<DualityTransformation>& sample,
                                         const ScalarTarget& target,
                                         const TargetGrid& samples, double tol) {
  SequenceProbeReport out;

  // (a) Kernel of the projection to isometries = symplectic commutant.
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const DualityTransformation& f = sample[i];
    try {
      validate_transformation(f, target, samples, tol);
    } catch (const Error& e) {
      out.violations.push_back("sample " + std::to_string(i) + " invalid: " + e.what());
      continue;
    }
    if (!f.f0.is_identity()) continue;
    ++out.kernel_checked;
    if (!commutes_with_monodromy(rep, f.lift))
      out.violations.push_back("kernel sample " + std::to_string(i) +
                               " does not commute with the monodromy");
    if (!in_commutant_span(rep, f.lift))
      out.violations.push_back("kernel sample " + std::to_string(i) +
                               " lies outside the commutant span");
  }

  // Conversely, symplectic elements sampled from the commutant give valid
  // kernel transformations.
  for (const MatQ& c : commutant_basis(rep)) {
    for (int s : {1, -1}) {
      const MatQ cand = Rational(s) * c;
      if (!is_symplectic(cand, rep.sp)) continue;
      ++out.commutant_samples;
      DualityTransformation f = make_identity_transformation(target);
      f.lift = cand;
      try {
        validate_transformation(f, target, samples, tol);
      } catch (const Error& e) {
        out.violations.push_back(std::string("commutant element rejected: ") + e.what());
      }
    }
  }

  // (b) Composition projects to composition of the isometry parts.
  for (std::size_t i = 0; i + 1 < sample.size(); ++i) {
    const DualityTransformation comp = compose(sample[i + 1], sample[i]);
    const TargetIsometry expect = sample[i + 1].f0.after(sample[i].f0);
    ++out.compositions_checked;
    if (max_abs(comp.f0.linear - expect.linear) > 0.0 ||
        max_abs(comp.f0.translation - expect.translation) > 0.0) {
      out.violations.push_back("composition " + std::to_string(i) +
                               " does not project to the composed isometry");
    }
    try {
      validate_transformation(comp, target, samples, tol);
    } catch (const Error& e) {
      out.violations.push_back(std::string("composition invalid: ") + e.what());
    }
  }
  return out;
}

}  // namespace esmv
