#pragma once

#include "esmv/grid.hpp"

namespace esmv {

// Index maps for antisymmetric components.
inline constexpr std::array<std::pair<int, int>, 6> kPair2 = {
    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
inline constexpr std::array<std::array<int, 3>, 4> kTriple3 = {
    {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

int pair_index(int mu, int nu);       // unordered lookup into kPair2
int levi_civita(int a, int b, int c, int d);

// Sampled Lorentzian metric. Construction enforces signature (3,1) in the
// (-,+,+,+) convention and nondegeneracy at every node.
struct LorentzMetricField {
  SpacetimeGrid grid;
  std::vector<Eigen::Matrix4d> g;

  static LorentzMetricField sample(const SpacetimeGrid& grid,
                                   const std::function<Eigen::Matrix4d(const Eigen::Vector4d&)>& fn);
  const Eigen::Matrix4d& at(std::int64_t node) const { return g[static_cast<std::size_t>(node)]; }
  Eigen::Matrix4d inv(std::int64_t node) const;
  double sqrt_abs_det(std::int64_t node) const;
};

// Lifted scalar map values on the fundamental domain; crossing a periodic
// cut adds the winding shift.
struct ScalarMapField {
  int target_dim = 0;
  std::vector<Eigen::VectorXd> phi;

  static ScalarMapField sample(const SpacetimeGrid& grid, int target_dim,
                               const std::function<Eigen::VectorXd(const Eigen::Vector4d&)>& fn);
  const Eigen::VectorXd& at(std::int64_t node) const { return phi[static_cast<std::size_t>(node)]; }
};

// Bundle-valued 2-form in the cut trivialization: per node a fiber_dim x 6
// block of components, columns ordered as kPair2. Crossing the cut in
// direction mu multiplies the fiber by the winding transition.
struct TwistedTwoForm {
  int fiber_dim = 0;
  std::vector<Eigen::MatrixXd> comp;

  static TwistedTwoForm zero(const SpacetimeGrid& grid, int fiber_dim);
  const Eigen::MatrixXd& at(std::int64_t node) const { return comp[static_cast<std::size_t>(node)]; }
  double component(std::int64_t node, int a, int mu, int nu) const;
};

struct TwistedThreeForm {
  int fiber_dim = 0;
  std::vector<Eigen::MatrixXd> comp;  // per node fiber_dim x 4, columns kTriple3
};

// Fiberwise value of the 2-form's neighbor in `dir` at distance `step`,
// transported into the frame of the base node.
Eigen::MatrixXd neighbor_value(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                               const CutData& cuts, const std::array<int, 4>& c, int dir,
                               int step);

// Pointwise metric dual of a fiber x 6 component block.
Eigen::MatrixXd hodge_dual_block(const Eigen::Matrix4d& g_inv, double sqrt_det,
                                 const Eigen::MatrixXd& block);

// Twisted Hodge operator: metric dual followed by the pulled-back taming on
// the fiber index. Squares to the identity on 2-forms.
TwistedTwoForm twisted_hodge(const LorentzMetricField& g,
                             const std::vector<Eigen::MatrixXd>& j_phi,
                             const TwistedTwoForm& v);

// Projector onto the +1 eigenspace of the twisted Hodge operator.
TwistedTwoForm polarize(const LorentzMetricField& g,
                        const std::vector<Eigen::MatrixXd>& j_phi, const TwistedTwoForm& v);

// Componentwise exterior derivative with conjugated wrap-around: the cut
// trivialization of the twisted differential.
TwistedThreeForm twisted_d(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                           const CutData& cuts);

// (V1 (.) V2)_{mu nu} = Q_{ab} V1^a_{mu l} g^{l s} V2^b_{s nu}.
std::vector<Eigen::Matrix4d> inner_contraction(const TwistedTwoForm& v1,
                                               const TwistedTwoForm& v2,
                                               const LorentzMetricField& g,
                                               const std::vector<Eigen::MatrixXd>& q_phi);

// Pairing sourcing the scalar equation: component k is
// 1/2 * (1/2!) g^{ma} g^{nb} Q_{cd} (star V)^c_{mn} (Psi^k V)^d_{ab}.
std::vector<Eigen::VectorXd> scalar_pairing(const TwistedTwoForm& v,
                                            const TwistedTwoForm& star_v,
                                            const std::vector<std::vector<Eigen::MatrixXd>>& psi_phi,
                                            const LorentzMetricField& g,
                                            const std::vector<Eigen::MatrixXd>& q_phi);

// Matrix of the twisted Hodge operator on the pointwise fiber of 2-forms
// (dimension 6 * fiber_dim), for spectral checks.
Eigen::MatrixXd star_matrix(const Eigen::Matrix4d& g, const Eigen::MatrixXd& j);

}  // namespace esmv
