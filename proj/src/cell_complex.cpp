#include "esmv/cell_complex.hpp"

#include <sstream>

namespace esmv {

MatQ CellComplex::coboundary(int k) const {
  const int f = fiber_dim;
  const Eigen::Index rows = static_cast<Eigen::Index>(cell_count(k + 1)) * f;
  const Eigen::Index cols = static_cast<Eigen::Index>(cell_count(k)) * f;
  MatQ d = MatQ::Zero(rows, cols);
  if (k + 1 > max_dim() || k < 0) return d;
  const auto& inc = boundary[static_cast<std::size_t>(k + 1)];
  for (int cell = 0; cell < cell_count(k + 1); ++cell)
    for (const Incidence& e : inc[static_cast<std::size_t>(cell)]) {
      const MatQ& t = transitions[static_cast<std::size_t>(e.transition)];
      d.block(static_cast<Eigen::Index>(cell) * f, static_cast<Eigen::Index>(e.face) * f, f,
              f) += Rational(e.sign) * t;
    }
  return d;
}

MatZ CellComplex::coboundary_int(int k) const {
  const MatQ d = coboundary(k);
  MatZ out(d.rows(), d.cols());
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (denominator(d(i, j)) != 1)
        throw LatticeNotPreserved("coboundary is not integral in the lattice basis");
      out(i, j) = numerator(d(i, j));
    }
  return out;
}

void CellComplex::validate() const {
  if (transitions.empty() || transitions[0] != MatQ(MatQ::Identity(fiber_dim, fiber_dim)))
    throw InvalidComplex("transition 0 must be the identity");
  for (int k = 0; k + 2 <= max_dim(); ++k) {
    const MatQ a = coboundary(k + 1) * coboundary(k);
    if (max_abs(a) != 0) throw InvalidComplex("twisted coboundary does not square to zero");
  }
}

namespace {

Eigen::MatrixXd dense_nullspace(const Eigen::MatrixXd& m, Eigen::Index cols, double rank_tol) {
  if (m.rows() == 0) return Eigen::MatrixXd::Identity(cols, cols);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? sv(0) * rank_tol : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(cols - rank);
}


struct IntCohomology {
  int free_rank = 0;
  std::vector<Integer> torsion;
  std::vector<VecZ> free_generators;  // integer cocycles
};

IntCohomology integer_cohomology(const CellComplex& complex, int k) {
  const MatZ dk = complex.coboundary_int(k);
  const MatZ dkm1 = complex.coboundary_int(k - 1);
  const Eigen::Index dim_ck = static_cast<Eigen::Index>(complex.cell_count(k)) *
                              complex.fiber_dim;

  MatZ kernel;
  if (dk.rows() == 0) {
    kernel = MatZ::Identity(dim_ck, dim_ck);
  } else {
    kernel = integer_kernel(dk);
  }
  const Eigen::Index m = kernel.cols();

  IntCohomology out;
  if (m == 0) return out;

  // Express the image of the lower coboundary in kernel coordinates; the
  // solution is integral because the kernel basis is saturated.
  MatZ x = MatZ::Zero(m, dkm1.cols());
  if (dkm1.cols() > 0 && dkm1.rows() > 0) {
    MatQ sol;
    if (!solve_exact(to_rational(kernel), to_rational(dkm1), sol))
      throw InvalidComplex("image of the coboundary does not lie in the kernel");
    for (Eigen::Index i = 0; i < sol.rows(); ++i)
      for (Eigen::Index j = 0; j < sol.cols(); ++j) {
        if (denominator(sol(i, j)) != 1)
          throw InvalidComplex("kernel basis is not saturated");
        x(i, j) = numerator(sol(i, j));
      }
  }

  const SmithResult snf = smith_normal_form(x);
  for (int i = 0; i < snf.rank; ++i)
    if (snf.d(i, i) > 1) out.torsion.push_back(snf.d(i, i));
  out.free_rank = static_cast<int>(m) - snf.rank;

  // Quotient generators: columns of U^{-1} beyond the image block.
  const MatQ uinv = inverse_exact(to_rational(snf.u));
  for (Eigen::Index j = snf.rank; j < m; ++j) {
    VecZ gen = VecZ::Zero(dim_ck);
    MatQ col = to_rational(kernel) * uinv.col(j);
    for (Eigen::Index i = 0; i < col.rows(); ++i) {
      if (denominator(col(i, 0)) != 1) throw InvalidComplex("non-integer quotient generator");
      gen(i) = numerator(col(i, 0));
    }
    out.free_generators.push_back(std::move(gen));
  }
  return out;
}

}  // namespace

CohomologyResult twisted_cohomology(const CellComplex& complex, int k, CoefficientRing ring,
                                    double rank_tol) {
  complex.validate();
  if (k < 0 || k > complex.max_dim()) {
    return CohomologyResult{};
  }
  if (ring == CoefficientRing::Int) {
    const IntCohomology ic = integer_cohomology(complex, k);
    CohomologyResult out;
    out.rank = ic.free_rank;
    out.torsion = ic.torsion;
    return out;
  }

  const Eigen::MatrixXd dk = to_dense(complex.coboundary(k));
  const Eigen::MatrixXd dkm1 = to_dense(complex.coboundary(k - 1));
  const Eigen::Index dim_ck = static_cast<Eigen::Index>(complex.cell_count(k)) *
                              complex.fiber_dim;
  const Eigen::MatrixXd kernel = dense_nullspace(dk, dim_ck, rank_tol);

  CohomologyResult out;
  if (kernel.cols() == 0) return out;
  if (dkm1.cols() == 0) {
    out.rank = static_cast<int>(kernel.cols());
    out.representatives = kernel;
    return out;
  }
  const Eigen::MatrixXd image_coords = kernel.transpose() * dkm1;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(image_coords, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() ? sv(0) * rank_tol : 0.0;
  int rank_im = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank_im;
  out.rank = static_cast<int>(kernel.cols()) - rank_im;
  out.representatives = kernel * svd.matrixU().rightCols(out.rank);
  return out;
}

IntegralImage integral_image_basis(const CellComplex& complex, int k, double rank_tol) {
  complex.validate();
  const CohomologyResult real = twisted_cohomology(complex, k, CoefficientRing::Real, rank_tol);
  const IntCohomology ic = integer_cohomology(complex, k);
  if (ic.free_rank != real.rank)
    throw InvalidComplex("free rank disagrees with the real Betti number");

  IntegralImage out;
  out.representatives = real.representatives;
  out.coords = Eigen::MatrixXd::Zero(real.rank, real.rank);
  const Eigen::MatrixXd dkm1 = to_dense(complex.coboundary(k - 1));
  const Eigen::Index nb = out.representatives.cols();
  Eigen::MatrixXd system(out.representatives.rows(), nb + dkm1.cols());
  system.leftCols(nb) = out.representatives;
  if (dkm1.cols() > 0) system.rightCols(dkm1.cols()) = dkm1;
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(system);

  for (std::size_t j = 0; j < ic.free_generators.size(); ++j) {
    Eigen::VectorXd z(ic.free_generators[j].rows());
    for (Eigen::Index i = 0; i < z.size(); ++i)
      z(i) = ic.free_generators[j](i).convert_to<double>();
    const Eigen::VectorXd sol = cod.solve(z);
    const double resid = (system * sol - z).cwiseAbs().maxCoeff();
    if (resid > 1e-8 * std::max(1.0, z.cwiseAbs().maxCoeff()))
      throw InvalidComplex("integral generator is not a real cocycle");
    out.coords.col(static_cast<Eigen::Index>(j)) = sol.head(nb);
    out.integral_cocycles.push_back(z);
  }
  return out;
}

std::string grid_signature(const SpacetimeGrid& grid) {
  std::ostringstream os;
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    os << grid.shape[du] << ":" << grid.spacing[du] << ":" << grid.periodic[du] << ":";
    for (const auto& [g, e] : grid.winding[du].letters) os << g << "," << e << ";";
    os << "|";
  }
  return os.str();
}

CellComplex grid_quotient_complex(const SpacetimeGrid& grid, const ScalarTarget& target,
                                  bool use_lattice) {
  grid.validate();
  const CutData cuts = make_cut_data(grid, target);
  const int f = target.monodromy.sp.dim;

  CellComplex cx;
  cx.fiber_dim = f;
  cx.grid_signature = grid_signature(grid);
  cx.transitions.push_back(MatQ::Identity(f, f));

  MatQ basis_change = MatQ::Identity(f, f);
  if (use_lattice) {
    if (!target.monodromy.lattice)
      throw LatticeNotPreserved("no lattice attached to the monodromy");
    cx.lattice = target.monodromy.lattice;
    basis_change = cx.lattice->basis_q();
  }
  const MatQ basis_inv = inverse_exact(basis_change);

  // Transition per direction, in the working fiber basis.
  std::array<int, 4> dir_transition{0, 0, 0, 0};
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (!grid.periodic[du] || grid.winding[du].empty()) continue;
    const MatQ t = basis_inv * transport(target.monodromy, grid.winding[du]) * basis_change;
    if (use_lattice)
      for (Eigen::Index i = 0; i < t.rows(); ++i)
        for (Eigen::Index j = 0; j < t.cols(); ++j)
          if (denominator(t(i, j)) != 1)
            throw LatticeNotPreserved("winding transition does not preserve the lattice");
    cx.transitions.push_back(t);
    dir_transition[du] = static_cast<int>(cx.transitions.size()) - 1;
  }

  // Per-dimension cell options: 0 = base vertex, 1 = far vertex (open dirs
  // only), 2 = edge.
  std::array<std::vector<int>, 4> options;
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    options[du] = grid.periodic[du] ? std::vector<int>{0, 2} : std::vector<int>{0, 1, 2};
  }

  struct Code {
    std::array<int, 4> c{};
  };
  std::vector<std::vector<Code>> codes(5);
  std::map<std::array<int, 4>, std::pair<int, int>> index_of;  // code -> (dim, index)

  std::array<std::size_t, 4> pick{0, 0, 0, 0};
  while (true) {
    std::array<int, 4> code{};
    int dim = 0;
    for (int d = 0; d < 4; ++d) {
      code[static_cast<std::size_t>(d)] =
          options[static_cast<std::size_t>(d)][pick[static_cast<std::size_t>(d)]];
      if (code[static_cast<std::size_t>(d)] == 2) ++dim;
    }
    index_of[code] = {dim, static_cast<int>(codes[static_cast<std::size_t>(dim)].size())};
    codes[static_cast<std::size_t>(dim)].push_back(Code{code});
    int d = 3;
    while (d >= 0 &&
           ++pick[static_cast<std::size_t>(d)] == options[static_cast<std::size_t>(d)].size()) {
      pick[static_cast<std::size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }

  cx.cells.resize(5);
  cx.boundary.resize(5);
  cx.grid_cells.resize(5);
  for (int k = 0; k <= 4; ++k) {
    cx.cells[static_cast<std::size_t>(k)] = static_cast<int>(codes[static_cast<std::size_t>(k)].size());
    cx.boundary[static_cast<std::size_t>(k)].resize(codes[static_cast<std::size_t>(k)].size());
    cx.grid_cells[static_cast<std::size_t>(k)].resize(codes[static_cast<std::size_t>(k)].size());
  }

  for (int k = 0; k <= 4; ++k) {
    for (std::size_t ci = 0; ci < codes[static_cast<std::size_t>(k)].size(); ++ci) {
      const auto& code = codes[static_cast<std::size_t>(k)][ci].c;

      CellComplex::GridCell info;
      for (int d = 0; d < 4; ++d) {
        const auto du = static_cast<std::size_t>(d);
        if (code[du] == 2)
          info.edge_dims.push_back(d);
        info.base[du] = (code[du] == 1) ? grid.shape[du] - 1 : 0;
      }
      cx.grid_cells[static_cast<std::size_t>(k)][ci] = info;

      if (k == 0) continue;
      std::vector<CellComplex::Incidence> faces;
      int edge_pos = 0;
      for (int d = 0; d < 4; ++d) {
        const auto du = static_cast<std::size_t>(d);
        if (code[du] != 2) continue;
        const int sign = (edge_pos % 2 == 0) ? 1 : -1;
        // Lower face: replace the edge by the base vertex.
        std::array<int, 4> lower = code;
        lower[du] = 0;
        // Upper face: far vertex for open directions, wrapped base vertex
        // with the winding transition for periodic ones.
        std::array<int, 4> upper = code;
        upper[du] = grid.periodic[du] ? 0 : 1;
        const int t_upper = grid.periodic[du] ? dir_transition[du] : 0;
        faces.push_back({index_of.at(upper).second, sign, t_upper});
        faces.push_back({index_of.at(lower).second, -sign, 0});
        ++edge_pos;
      }
      cx.boundary[static_cast<std::size_t>(k)][ci] = std::move(faces);
    }
  }
  cx.validate();
  return cx;
}

Eigen::VectorXd integrate_two_form(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                                   const CellComplex& complex) {
  if (complex.grid_cells.size() < 3 || complex.cell_count(2) == 0)
    throw ComplexMismatch("complex carries no grid 2-cells");
  if (!complex.grid_signature.empty() && complex.grid_signature != grid_signature(grid))
    throw ComplexMismatch("complex was built from a different grid");

  const int f = v.fiber_dim;
  Eigen::MatrixXd to_fiber = Eigen::MatrixXd::Identity(f, f);
  if (complex.lattice) to_fiber = to_dense(inverse_exact(complex.lattice->basis_q()));

  const std::vector<CellComplex::GridCell>& cells2 = complex.grid_cells[2];
  Eigen::VectorXd out(static_cast<Eigen::Index>(cells2.size()) * f);

  for (std::size_t ci = 0; ci < cells2.size(); ++ci) {
    const auto& cell = cells2[ci];
    if (cell.edge_dims.size() != 2) throw ComplexMismatch("malformed 2-cell");
    const int dmu = cell.edge_dims[0], dnu = cell.edge_dims[1];
    const auto mu = static_cast<std::size_t>(dmu), nu = static_cast<std::size_t>(dnu);
    const int comp = pair_index(dmu, dnu);
    const int pmu = grid.periodic[mu] ? grid.shape[mu] : grid.shape[mu] - 1;
    const int pnu = grid.periodic[nu] ? grid.shape[nu] : grid.shape[nu] - 1;
    const double area = grid.spacing[mu] * grid.spacing[nu];

    // Transitions for wrapped corners, in the ambient basis.
    Eigen::MatrixXd rho_mu = Eigen::MatrixXd::Identity(f, f);
    Eigen::MatrixXd rho_nu = Eigen::MatrixXd::Identity(f, f);
    const MatQ bc = complex.lattice ? complex.lattice->basis_q() : MatQ::Identity(f, f);
    const MatQ bc_inv = inverse_exact(bc);
    // Identify this cell's upper-face transitions from its boundary data.
    for (const CellComplex::Incidence& e : complex.boundary[2][ci]) {
      if (e.transition == 0) continue;
      const MatQ amb = bc * complex.transitions[static_cast<std::size_t>(e.transition)] * bc_inv;
      // The first edge dim contributes sign +1 upper faces, the second -1.
      if (e.sign == 1)
        rho_mu = to_dense(amb);
      else
        rho_nu = to_dense(amb);
    }

    auto corner = [&](int i, int j) -> Eigen::VectorXd {
      Eigen::MatrixXd pre = Eigen::MatrixXd::Identity(f, f);
      std::array<int, 4> c = cell.base;
      int ii = i, jj = j;
      if (ii == pmu && grid.periodic[mu]) {
        ii = 0;
        pre = rho_mu * pre;
      }
      if (jj == pnu && grid.periodic[nu]) {
        jj = 0;
        pre = rho_nu * pre;
      }
      c[mu] = ii;
      c[nu] = jj;
      const std::int64_t node = grid.index(c);
      Eigen::VectorXd val(f);
      for (int a = 0; a < f; ++a)
        val(a) = v.comp[static_cast<std::size_t>(node)](a, comp);
      return Eigen::VectorXd(pre * val);
    };

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(f);
    for (int i = 0; i < pmu; ++i)
      for (int j = 0; j < pnu; ++j)
        acc += 0.25 * area *
               (corner(i, j) + corner(i + 1, j) + corner(i, j + 1) + corner(i + 1, j + 1));
    out.segment(static_cast<Eigen::Index>(ci) * f, f) = to_fiber * acc;
  }
  return out;
}

QuantizationVerdict quantization_check(const TwistedTwoForm& v, const SpacetimeGrid& grid,
                                       const CellComplex& complex, double tol,
                                       double rank_tol) {
  return quantization_check_cochain(integrate_two_form(v, grid, complex), complex, tol,
                                    rank_tol);
}

QuantizationVerdict quantization_check_cochain(const Eigen::VectorXd& cochain,
                                               const CellComplex& complex, double tol,
                                               double rank_tol) {
  QuantizationVerdict verdict;
  if (cochain.size() !=
      static_cast<Eigen::Index>(complex.cell_count(2)) * complex.fiber_dim)
    throw ComplexMismatch("cochain size does not match the 2-cells");

  const Eigen::MatrixXd d2 = to_dense(complex.coboundary(2));
  verdict.closedness = d2.rows() ? (d2 * cochain).cwiseAbs().maxCoeff() : 0.0;
  if (verdict.closedness > tol) {
    verdict.kind = QuantizationVerdict::NotClosed;
    return verdict;
  }

  const IntegralImage image = integral_image_basis(complex, 2, rank_tol);
  const Eigen::Index betti = image.representatives.cols();
  if (betti == 0) {
    verdict.kind = QuantizationVerdict::Integral;
    verdict.coefficients = Eigen::VectorXd(0);
    verdict.lattice_point = Eigen::VectorXd(0);
    verdict.residual = 0.0;
    return verdict;
  }

  const Eigen::MatrixXd dkm1 = to_dense(complex.coboundary(1));
  Eigen::MatrixXd system(image.representatives.rows(), betti + dkm1.cols());
  system.leftCols(betti) = image.representatives;
  if (dkm1.cols() > 0) system.rightCols(dkm1.cols()) = dkm1;
  const Eigen::VectorXd sol =
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(system).solve(cochain);
  const Eigen::VectorXd alpha = sol.head(betti);

  // Coordinates of the class in the integral generator basis.
  const Eigen::VectorXd beta = image.coords.fullPivLu().solve(alpha);
  verdict.coefficients = beta;
  verdict.lattice_point = beta.array().round().matrix();
  verdict.residual = (beta - verdict.lattice_point).cwiseAbs().maxCoeff();
  verdict.kind = verdict.residual <= tol ? QuantizationVerdict::Integral
                                         : QuantizationVerdict::NonIntegral;
  return verdict;
}

}  // namespace esmv
