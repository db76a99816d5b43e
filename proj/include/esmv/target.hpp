#pragma once

#include "esmv/local_system.hpp"

#include <functional>

namespace esmv {

using MatrixField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;
using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Sampling lattice on the flat target chart.
struct TargetGrid {
  std::vector<int> counts;
  std::vector<double> spacing;
  std::vector<double> origin;

  int dim() const { return static_cast<int>(counts.size()); }
  std::size_t nodes() const;
  Eigen::VectorXd point(const std::vector<int>& c) const;
  void for_each(const std::function<void(const Eigen::VectorXd&)>& fn) const;
};

// Flat-chart model of the scalar sector: a chart R^d with optional periodic
// coordinates, carrying the target metric, the potential and the monodromy
// of the flat symplectic bundle living over it (one generator per periodic
// coordinate; the generators commute).
struct ScalarTarget {
  int dim = 0;
  std::vector<double> periods;  // 0 marks a non-periodic coordinate
  double fd_step = 1.0 / 64.0;  // step for target-side finite differences
  MatrixField metric;
  bool metric_constant = false;
  ScalarField potential;
  VectorField potential_gradient;  // optional; empty falls back to differences
  MonodromyRep monodromy;
  std::vector<int> periodic_dims;  // chart coordinate per generator

  ScalarTarget(int d, std::vector<double> per, MonodromyRep rep);
  void validate_shape() const;

  int generator_of_dim(int chart_dim) const;  // -1 if non-periodic
  Eigen::MatrixXd metric_at(const Eigen::VectorXd& y) const;
  Eigen::MatrixXd metric_inv_at(const Eigen::VectorXd& y) const;
  double potential_at(const Eigen::VectorXd& y) const;
  // Analytic gradient when supplied, otherwise the 4-point central stencil.
  Eigen::VectorXd grad_potential(const Eigen::VectorXd& y) const;
  // Christoffel symbols of the target metric: d matrices (one per upper
  // index), each d x d in the lower pair.
  std::vector<Eigen::MatrixXd> christoffel(const Eigen::VectorXd& y) const;
};

// The taming as a field over the chart. `j_at` must be defined on all of R^d
// via the twisted extension J(y + L_i e_i) = rho_i J(y) rho_i^{-1}.
struct TamingField {
  MatrixField j_at;
  TargetGrid sample_grid;
};

struct FundamentalFormField {
  int target_dim = 0;
  int fiber_dim = 0;
  // Covariant derivative of J in each chart direction, as a callable.
  std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> theta_at;
  TargetGrid grid;
  std::vector<std::vector<Eigen::MatrixXd>> samples;  // per grid node
};

// Theta_i = dJ/dy^i by central differences at the sample-grid spacing.
FundamentalFormField fundamental_form(const ScalarTarget& target, const TamingField& jf);

bool is_unitary(const FundamentalFormField& ff, double tol);

// Psi^i = G^{ij} Theta_j: the index-raised derivative of the taming.
std::function<std::vector<Eigen::MatrixXd>(const Eigen::VectorXd&)> fundamental_field(
    const ScalarTarget& target, const FundamentalFormField& ff);

struct PeriodicityReport {
  double max_violation = 0.0;
  int worst_dim = -1;
};

// Max violation of J(y + L_i e_i) = rho_i J(y) rho_i^{-1} over the sample
// grid; throws NonGlobalSection above tol.
PeriodicityReport check_twisted_periodicity(const ScalarTarget& target,
                                            const TamingField& jf, double tol);
PeriodicityReport measure_twisted_periodicity(const ScalarTarget& target,
                                              const TamingField& jf);

// Validates the taming pointwise over the sample grid.
void validate_taming_field(const ScalarTarget& target, const TamingField& jf,
                           const SymplecticSpace& sp, double tol);

}  // namespace esmv
