#pragma once

#include "esmv/residuals.hpp"

namespace esmv {

// Affine isometry of the flat target chart: y -> A y + t. Identity and pure
// translations are the common cases; linear parts must permute the periodic
// coordinate lattice.
struct TargetIsometry {
  Eigen::MatrixXd linear;       // A
  Eigen::VectorXd translation;  // t

  static TargetIsometry identity(int dim);
  static TargetIsometry translate(const Eigen::VectorXd& t);
  static TargetIsometry linear_map(const Eigen::MatrixXd& a);

  bool is_identity() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& y) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& y) const;
  TargetIsometry after(const TargetIsometry& first) const;  // this o first
};

// A scalar-electromagnetic duality transformation: an isometry of the scalar
// structure together with a constant symplectic lift of the bundle
// automorphism in the cut trivialization, plus the induced action on the
// fundamental-group generators.
struct DualityTransformation {
  TargetIsometry f0;
  MatQ lift;
  std::vector<Word> generator_action;  // image of each target pi1 generator

  Eigen::MatrixXd lift_dense() const { return to_dense(lift); }
};

DualityTransformation make_identity_transformation(const ScalarTarget& target);

// Checks the isometry condition on the sampled chart, the potential
// invariance, the symplectic condition on the lift, and the flatness
// (equivariance) condition F rho_i = rho_{f0(i)} F, exactly.
void validate_transformation(const DualityTransformation& f, const ScalarTarget& target,
                             const TargetGrid& samples, double tol);

// J_f(y) = F J(f0^{-1} y) F^{-1}.
TamingField transform_taming(const DualityTransformation& f, const TamingField& jf);

// The duality action at fixed metric: phi -> f0 o phi, V -> F V, winding
// words mapped through the generator action; the carried taming is
// transformed alongside so the result is a configuration of the transformed
// scalar-electromagnetic structure.
EsmConfiguration apply_duality(const DualityTransformation& f, const EsmConfiguration& cfg);

DualityTransformation compose(const DualityTransformation& second,
                              const DualityTransformation& first);

struct CovarianceReport {
  ResidualReport original;
  ResidualReport transformed;
  double discrepancy = 0.0;      // scalar + EM norm disagreement
  double einstein_diff = 0.0;    // diagnostic only
  bool pass = false;
};

// Numerical check of duality covariance: the residual norms of the
// transformed configuration under the transformed structure match the
// originals.
CovarianceReport covariance_check(const DualityTransformation& f, const EsmConfiguration& cfg,
                                  double tol);

// A duality is a symmetry when the adjoint action fixes the taming.
bool is_symmetry(const DualityTransformation& f, const TamingField& jf, double tol);

// Lattice-preserving dualities (integral duality group membership).
bool is_integral_duality(const DualityTransformation& f, const IntegralLattice& lat,
                         const SymplecticSpace& sp);

struct SequenceProbeReport {
  int kernel_checked = 0;
  int commutant_samples = 0;
  int compositions_checked = 0;
  std::vector<std::string> violations;
  bool pass() const { return violations.empty(); }
};

// Samples the short exact sequence structure: transformations covering the
// identity are exactly the symplectic commutant of the monodromy, and
// composition is compatible with projection to the isometry part.
SequenceProbeReport exact_sequence_probe(const MonodromyRep& rep,
                                         const std::vector<DualityTransformation>& sample,
                                         const ScalarTarget& target,
                                         const TargetGrid& samples, double tol);

}  // namespace esmv
