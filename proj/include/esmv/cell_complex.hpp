#pragma once

#include "esmv/residuals.hpp"

namespace esmv {

// Cellular complex with local coefficients: per cell a fiber copy, per
// incidence a sign and a transition (identity away from cuts). When a
// lattice is attached the fiber is expressed in the lattice basis, so the
// integer complex is literally the real one read over Z.
struct CellComplex {
  struct Incidence {
    int face = 0;
    int sign = 1;
    int transition = 0;  // index into `transitions`; 0 is the identity
  };

  // Quadrature metadata for grid-built complexes.
  struct GridCell {
    std::vector<int> edge_dims;
    std::array<int, 4> base{};
  };

  int fiber_dim = 0;
  std::vector<int> cells;  // count per dimension
  // boundary[k][cell] lists the (k-1)-faces of each k-cell (k >= 1).
  std::vector<std::vector<std::vector<Incidence>>> boundary;
  std::vector<MatQ> transitions;  // [0] = identity
  std::optional<IntegralLattice> lattice;
  std::vector<std::vector<GridCell>> grid_cells;  // parallel to `cells` when grid-built
  std::string grid_signature;

  int max_dim() const { return static_cast<int>(cells.size()) - 1; }
  int cell_count(int k) const {
    return (k < 0 || k > max_dim()) ? 0 : cells[static_cast<std::size_t>(k)];
  }
  // delta_k : C^k -> C^{k+1}; zero-sized matrix outside the range.
  MatQ coboundary(int k) const;
  MatZ coboundary_int(int k) const;  // requires integral transitions
  void validate() const;             // throws InvalidComplex unless delta^2 = 0
};

enum class CoefficientRing { Real, Int };

struct CohomologyResult {
  int rank = 0;
  std::vector<Integer> torsion;     // integer ring only
  Eigen::MatrixXd representatives;  // real ring: columns are cocycles
};

CohomologyResult twisted_cohomology(const CellComplex& complex, int k, CoefficientRing ring,
                                    double rank_tol = 1e-9);

struct IntegralImage {
  Eigen::MatrixXd representatives;               // real representative basis
  Eigen::MatrixXd coords;                        // generator coordinates, betti x betti
  std::vector<Eigen::VectorXd> integral_cocycles;
};

// Image of integral cohomology inside real cohomology, expressed in the real
// representative basis. Torsion classes map to zero.
IntegralImage integral_image_basis(const CellComplex& complex, int k,
                                   double rank_tol = 1e-9);

struct QuantizationVerdict {
  enum Kind { Integral, NonIntegral, NotClosed } kind = NotClosed;
  Eigen::VectorXd coefficients;   // exact class coordinates in the integral basis
  Eigen::VectorXd lattice_point;  // nearest integer point
  double residual = 0.0;
  double closedness = 0.0;
};

// Twisted Dirac quantization: integrate the 2-form over the 2-cells, check
// twisted closedness, and decide whether the class lies in the image of
// integral cohomology.
QuantizationVerdict quantization_check(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                                       const CellComplex& complex, double tol,
                                       double rank_tol = 1e-9);

// Same decision on an already-integrated 2-cochain (fiber basis of the
// complex, one block per 2-cell).
QuantizationVerdict quantization_check_cochain(const Eigen::VectorXd& cochain,
                                               const CellComplex& complex, double tol,
                                               double rank_tol = 1e-9);

// Quotient of the grid's cubical complex along the cuts: one vertex and one
// edge per periodic direction (the edge wrapping through the winding
// transition), two vertices and one edge per open direction.
CellComplex grid_quotient_complex(const SpacetimeGrid& grid, const ScalarTarget& target,
                                  bool use_lattice);

std::string grid_signature(const SpacetimeGrid& grid);

// Second-order quadrature of the 2-form over every 2-cell; components in the
// complex's fiber basis.
Eigen::VectorXd integrate_two_form(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                                   const CellComplex& complex);

}  // namespace esmv
