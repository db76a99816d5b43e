#pragma once

#include "esmv/fields.hpp"

namespace esmv {

// A discretized configuration (g, phi, V) over a fixed scalar-electromagnetic
// background. `cuts` is derived from the grid winding and the target.
struct EsmConfiguration {
  SpacetimeGrid grid;
  ScalarTarget target;
  TamingField taming;
  LorentzMetricField g;
  ScalarMapField phi;
  TwistedTwoForm v;
  EsmParameters params;
  CutData cuts;

  static EsmConfiguration make(SpacetimeGrid grid, ScalarTarget target, TamingField taming,
                               LorentzMetricField g, ScalarMapField phi, TwistedTwoForm v,
                               EsmParameters params);
};

// Pointwise pullbacks along the scalar map, shared by the residual pieces.
struct DerivedFields {
  std::vector<Eigen::MatrixXd> j_phi;
  std::vector<Eigen::MatrixXd> q_phi;
  std::vector<std::vector<Eigen::MatrixXd>> psi_phi;
};

DerivedFields derive_fields(const EsmConfiguration& cfg);

// First derivative of the lifted scalar map (winding-aware) in direction d.
Eigen::VectorXd phi_derivative(const EsmConfiguration& cfg, const std::array<int, 4>& c,
                               int dir);

// Christoffel symbols of the sampled metric at a node, one 4x4 block per
// upper index; derivatives are central with one-sided second-order fallback
// at non-periodic boundaries.
std::array<Eigen::Matrix4d, 4> christoffel_at(const LorentzMetricField& g,
                                              const std::array<int, 4>& c);

// G = Ric - (1/2) R g by nested central differences of the metric samples.
std::vector<Eigen::Matrix4d> einstein_tensor(const LorentzMetricField& g);

// e = (1/2) Tr_g phi^*(G_target) + Phi(phi).
std::vector<double> modified_density(const EsmConfiguration& cfg);

// theta^k = g^{mn} (d_m d_n phi^k - Gamma^l_{mn} d_l phi^k
//                   + Gamma^k_{ij}(target) d_m phi^i d_n phi^j).
std::vector<Eigen::VectorXd> tension_field(const EsmConfiguration& cfg);

// tension minus the target-gradient of the potential along phi.
std::vector<Eigen::VectorXd> modified_tension(const EsmConfiguration& cfg);

// T = g e + 2 V (.) V - phi^*(G_target).
std::vector<Eigen::Matrix4d> stress_tensor(const EsmConfiguration& cfg);
std::vector<Eigen::Matrix4d> stress_tensor(const EsmConfiguration& cfg,
                                           const DerivedFields& der);

struct NormPair {
  double max = 0.0;
  double rms = 0.0;
};

struct ResidualReport {
  NormPair einstein, scalar, em, polarization;
  std::int64_t interior_nodes = 0;
  double kappa = 1.0;
  bool dumped = false;
  std::vector<double> einstein_field, scalar_field, em_field, polarization_field;
};

// Pointwise residual norms of the three field equations plus the
// polarization diagnostic, aggregated over the 2-node interior margin.
// Fiber directions are measured with the pulled-back taming metric and
// target directions with the target metric, so the norms are invariant
// under the duality action.
ResidualReport residual_report(const EsmConfiguration& cfg, bool dump_fields = false);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

// Constructor-style invariants of a configuration, re-run on demand.
std::vector<CheckResult> validate_configuration(const EsmConfiguration& cfg);

}  // namespace esmv
