#include "esmv/local_system.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <map>
#include <sstream>

namespace esmv {

Word Word::reduced() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& l : letters) {
    if (!out.empty() && out.back().first == l.first && out.back().second == -l.second)
      out.pop_back();
    else
      out.push_back(l);
  }
  return Word(std::move(out));
}

Word Word::inverse() const {
  std::vector<std::pair<int, int>> out;
  for (auto it = letters.rbegin(); it != letters.rend(); ++it)
    out.emplace_back(it->first, -it->second);
  return Word(std::move(out));
}

Word Word::concat(const Word& other) const {
  std::vector<std::pair<int, int>> out = letters;
  out.insert(out.end(), other.letters.begin(), other.letters.end());
  return Word(std::move(out));
}

std::string Word::display(const std::vector<std::string>& generators) const {
  if (letters.empty()) return "1";
  std::ostringstream os;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (i) os << "*";
    os << generators.at(static_cast<std::size_t>(letters[i].first));
    if (letters[i].second < 0) os << "^-1";
  }
  return os.str();
}

void GroupPresentation::validate() const {
  for (const Word& rel : relations)
    for (const auto& [g, e] : rel.letters) {
      if (g < 0 || g >= static_cast<int>(generators.size()))
        throw Error("relation references undeclared generator");
      if (e != 1 && e != -1) throw Error("word exponents must be +/-1");
    }
}

GroupPresentation GroupPresentation::free_group(std::vector<std::string> gens) {
  GroupPresentation p;
  p.generators = std::move(gens);
  return p;
}

GroupPresentation GroupPresentation::free_abelian(std::vector<std::string> gens) {
  GroupPresentation p;
  p.generators = std::move(gens);
  const int n = static_cast<int>(p.generators.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      p.relations.push_back(Word({{i, 1}, {j, 1}, {i, -1}, {j, -1}}));
  return p;
}

MonodromyRep::MonodromyRep(GroupPresentation pres, SymplecticSpace space,
                           std::vector<MatQ> imgs, std::optional<IntegralLattice> lat)
    : presentation(std::move(pres)), sp(std::move(space)), images(std::move(imgs)),
      lattice(std::move(lat)) {
  presentation.validate();
  if (images.size() != presentation.generators.size())
    throw Error("one image required per generator");
  for (const MatQ& m : images) {
    if (!is_symplectic(m, sp))
      throw Error("generator image is not symplectic");
    inverse_images.push_back(inverse_exact(m));
  }
  for (const Word& rel : presentation.relations)
    if (transport(*this, rel) != MatQ(MatQ::Identity(sp.dim, sp.dim)))
      throw Error("relation does not map to the identity");
  if (lattice && !preserves_lattice(*this, *lattice))
    throw LatticeNotPreserved("monodromy does not preserve the lattice");
}

MonodromyRep MonodromyRep::trivial(int n_gens, SymplecticSpace space) {
  std::vector<std::string> names;
  for (int i = 0; i < n_gens; ++i) names.push_back("g" + std::to_string(i + 1));
  std::vector<MatQ> imgs(static_cast<std::size_t>(n_gens),
                         MatQ::Identity(space.dim, space.dim));
  return MonodromyRep(GroupPresentation::free_group(std::move(names)), std::move(space),
                      std::move(imgs));
}

MatQ transport(const MonodromyRep& rep, const Word& w) {
  MatQ out = MatQ::Identity(rep.sp.dim, rep.sp.dim);
  for (const auto& [g, e] : w.letters) {
    if (g < 0 || g >= static_cast<int>(rep.images.size()))
      throw Error("word references undeclared generator");
    out = out * (e > 0 ? rep.images[static_cast<std::size_t>(g)]
                       : rep.inverse_images[static_cast<std::size_t>(g)]);
  }
  return out;
}

Eigen::MatrixXd transport_dense(const MonodromyRep& rep, const Word& w) {
  return to_dense(transport(rep, w));
}

std::vector<Word> reduced_words(int n_gens, int max_len) {
  std::vector<Word> out;
  out.emplace_back();
  std::vector<Word> frontier = {Word()};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (int g = 0; g < n_gens; ++g)
        for (int e : {1, -1}) {
          if (!w.letters.empty() && w.letters.back().first == g &&
              w.letters.back().second == -e)
            continue;
          Word ext = w;
          ext.letters.emplace_back(g, e);
          next.push_back(std::move(ext));
        }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

namespace {

struct MatQLess {
  bool operator()(const MatQ& a, const MatQ& b) const {
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (a(i, j) < b(i, j)) return true;
        if (b(i, j) < a(i, j)) return false;
      }
    return false;
  }
};

// vec is column-major throughout: vec(A X) = (X^T (x) I) vec(A),
// vec(X A) = (I (x) X) vec(A).
MatQ kron(const MatQ& a, const MatQ& b) {
  MatQ out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

MatQ unvec(const VecQ& v, Eigen::Index n) {
  MatQ out(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = v(j * n + i);
  return out;
}

// Stacked linear system for { A : A r1(g_i) = r2(g_i) A, all i }.
MatQ intertwiner_system(const std::vector<MatQ>& r1, const std::vector<MatQ>& r2, int dim) {
  const Eigen::Index n = dim, nn = n * n;
  MatQ sys(static_cast<Eigen::Index>(r1.size()) * nn, nn);
  const MatQ id = MatQ::Identity(n, n);
  for (std::size_t k = 0; k < r1.size(); ++k)
    sys.middleRows(static_cast<Eigen::Index>(k) * nn, nn) =
        kron(MatQ(r1[k].transpose()), id) - kron(id, r2[k]);
  return sys;
}

}  // namespace

std::vector<MatQ> holonomy_sample(const MonodromyRep& rep, int max_len,
                                  std::size_t size_limit) {
  if (max_len < 0) throw Error("max_len must be nonnegative");
  std::vector<MatQ> out;
  std::map<MatQ, bool, MatQLess> seen;
  for (const Word& w : reduced_words(static_cast<int>(rep.images.size()), max_len)) {
    MatQ m = transport(rep, w);
    if (seen.emplace(m, true).second) {
      out.push_back(std::move(m));
      if (out.size() > size_limit)
        throw SizeLimit("holonomy sample exceeded configured bound");
    }
  }
  return out;
}

std::vector<MatQ> commutant_basis(const MonodromyRep& rep) {
  const Eigen::Index n = rep.sp.dim;
  if (rep.images.empty()) {
    std::vector<MatQ> all;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) {
        MatQ e = MatQ::Zero(n, n);
        e(i, j) = 1;
        all.push_back(std::move(e));
      }
    return all;
  }
  const MatQ sys = intertwiner_system(rep.images, rep.images, rep.sp.dim);
  const MatQ ker = nullspace_exact(sys);
  std::vector<MatQ> basis;
  for (Eigen::Index c = 0; c < ker.cols(); ++c) basis.push_back(unvec(ker.col(c), n));
  return basis;
}

bool commutes_with_monodromy(const MonodromyRep& rep, const MatQ& a) {
  for (const MatQ& m : rep.images)
    if (MatQ(a * m) != MatQ(m * a)) return false;
  return true;
}

bool in_commutant_span(const MonodromyRep& rep, const MatQ& a) {
  // The commutant is a linear space, so membership in the span is just the
  // commutation property itself; kept as an explicit cross-check path.
  const std::vector<MatQ> basis = commutant_basis(rep);
  const Eigen::Index n = rep.sp.dim;
  MatQ cols(n * n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        cols(j * n + i, static_cast<Eigen::Index>(k)) = basis[k](i, j);
  MatQ rhs(n * n, 1);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) rhs(j * n + i, 0) = a(i, j);
  MatQ x;
  return solve_exact(cols, rhs, x);
}

TrivialityVerdict is_trivializable(const MonodromyRep& rep) {
  // Solving A r(g) A^{-1} = I forces r(g) = I, so the verdict reduces to an
  // exact identity test; a nontrivial image is itself the witness.
  const MatQ id = MatQ::Identity(rep.sp.dim, rep.sp.dim);
  for (std::size_t k = 0; k < rep.images.size(); ++k)
    if (rep.images[k] != id) {
      TrivialityVerdict v;
      v.trivial = false;
      v.witness = rep.presentation.generators[k];
      return v;
    }
  return TrivialityVerdict{true, ""};
}

EquivalenceVerdict reps_equivalent(const MonodromyRep& r1, const MonodromyRep& r2,
                                   int max_word_len) {
  if (r1.presentation != r2.presentation || r1.sp.dim != r2.sp.dim ||
      r1.sp.omega != r2.sp.omega)
    throw PresentationMismatch("representations live over different presentations");

  EquivalenceVerdict verdict;
  const Eigen::Index n = r1.sp.dim;

  if (r1.images == r2.images) {
    verdict.kind = EquivalenceVerdict::Equivalent;
    verdict.conjugator = MatQ::Identity(n, n);
    verdict.witness = "identical representations";
    return verdict;
  }

  // Stage 1: exact trace separation on reduced words.
  for (const Word& w : reduced_words(static_cast<int>(r1.images.size()), max_word_len)) {
    if (transport(r1, w).trace() != transport(r2, w).trace()) {
      verdict.kind = EquivalenceVerdict::Distinct;
      verdict.witness = "trace differs on word " + w.display(r1.presentation.generators);
      return verdict;
    }
  }

  // Stage 2: the intertwiner space A r1 = r2 A.
  const MatQ ker = nullspace_exact(intertwiner_system(r1.images, r2.images, r1.sp.dim));
  const Eigen::Index k = ker.cols();
  if (k == 0) {
    verdict.kind = EquivalenceVerdict::Distinct;
    verdict.witness = "intertwiner space is zero";
    return verdict;
  }

  std::vector<MatQ> basis;
  for (Eigen::Index c = 0; c < k; ++c) basis.push_back(unvec(ker.col(c), n));

  const auto try_candidate = [&](const MatQ& a) -> bool {
    if (det_exact(a) == 0) return false;
    MatQ grami = a.transpose() * r1.sp.omega * a;
    // Proportionality to omega with positive factor.
    Rational lambda = 0;
    for (Eigen::Index i = 0; i < n && lambda == 0; ++i)
      for (Eigen::Index j = 0; j < n && lambda == 0; ++j)
        if (r1.sp.omega(i, j) != 0) lambda = grami(i, j) / r1.sp.omega(i, j);
    if (lambda <= 0) return false;
    if (grami != MatQ(lambda * r1.sp.omega)) return false;
    MatQ conj = a;
    Rational factor = lambda;
    // Rescale exactly when the factor is a perfect rational square.
    const Integer num = numerator(lambda), den = denominator(lambda);
    const Integer sn = sqrt(num), sd = sqrt(den);
    if (sn * sn == num && sd * sd == den) {
      conj = a * Rational(sd, sn);
      factor = 1;
    }
    verdict.kind = EquivalenceVerdict::Equivalent;
    verdict.conjugator = conj;
    verdict.conformal_factor = factor;
    verdict.witness = factor == 1 ? "symplectic conjugator"
                                  : "conjugator symplectic up to positive scale";
    return true;
  };

  // Deterministic sweep over bounded-height integer combinations.
  const int height = k <= 4 ? 2 : 1;
  const long combos_bound = 200000;
  long combos = 1;
  for (Eigen::Index i = 0; i < k && combos <= combos_bound; ++i)
    combos *= (2 * height + 1);
  if (combos <= combos_bound) {
    std::vector<int> coeff(static_cast<std::size_t>(k), -height);
    while (true) {
      bool all_zero = true;
      for (int c : coeff)
        if (c != 0) { all_zero = false; break; }
      if (!all_zero) {
        MatQ a = MatQ::Zero(n, n);
        for (Eigen::Index i = 0; i < k; ++i)
          if (coeff[static_cast<std::size_t>(i)] != 0)
            a += Rational(coeff[static_cast<std::size_t>(i)]) * basis[static_cast<std::size_t>(i)];
        if (try_candidate(a)) return verdict;
      }
      Eigen::Index pos = 0;
      while (pos < k && coeff[static_cast<std::size_t>(pos)] == height) {
        coeff[static_cast<std::size_t>(pos)] = -height;
        ++pos;
      }
      if (pos == k) break;
      ++coeff[static_cast<std::size_t>(pos)];
    }
  } else {
    for (const MatQ& b : basis)
      if (try_candidate(b)) return verdict;
  }

  // Rank witness: certify that the determinant vanishes identically on the
  // whole intertwiner space. deg(det) = n, so sampling a (n+1)-point grid
  // per coefficient is conclusive.
  {
    double grid_size = 1.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      grid_size *= static_cast<double>(n + 1);
      if (grid_size > 200000.0) break;
    }
    if (grid_size <= 200000.0) {
      std::vector<int> coeff(static_cast<std::size_t>(k), 0);
      bool all_singular = true;
      while (all_singular) {
        MatQ a = MatQ::Zero(n, n);
        for (Eigen::Index i = 0; i < k; ++i)
          a += Rational(coeff[static_cast<std::size_t>(i)]) * basis[static_cast<std::size_t>(i)];
        if (det_exact(a) != 0) { all_singular = false; break; }
        Eigen::Index pos = 0;
        while (pos < k && coeff[static_cast<std::size_t>(pos)] == static_cast<int>(n)) {
          coeff[static_cast<std::size_t>(pos)] = 0;
          ++pos;
        }
        if (pos == k) break;
        ++coeff[static_cast<std::size_t>(pos)];
      }
      if (all_singular) {
        verdict.kind = EquivalenceVerdict::Distinct;
        verdict.witness = "every intertwiner is singular (rank witness)";
        return verdict;
      }
      // An invertible intertwiner exists but none in the sweep was
      // symplectic up to positive scale; fall through to the float probe.
    }
  }

  // One floating-point fallback: pick an invertible intertwiner A0, correct
  // it to a symplectic one via the defect T = Omega^{-1} A0^T Omega A0,
  // which is an Omega-self-adjoint self-intertwiner: A0 T^{-1/2} intertwines
  // and is symplectic whenever the real square root exists.
  {
    const Eigen::MatrixXd om = to_dense(r1.sp.omega);
    std::vector<Eigen::MatrixXd> r1d, r2d;
    for (const MatQ& m : r1.images) r1d.push_back(to_dense(m));
    for (const MatQ& m : r2.images) r2d.push_back(to_dense(m));
    auto try_float = [&](const Eigen::MatrixXd& a0) -> bool {
      if (std::abs(a0.determinant()) < 1e-9) return false;
      const Eigen::MatrixXd t = om.inverse() * a0.transpose() * om * a0;
      // A real square root needs the spectrum off the closed negative axis.
      const Eigen::VectorXcd eigs = t.eigenvalues();
      for (Eigen::Index i = 0; i < eigs.size(); ++i)
        if (std::abs(eigs(i).imag()) < 1e-10 && eigs(i).real() < 1e-10) return false;
      const Eigen::MatrixXd root = Eigen::MatrixXd(t.sqrt());
      if (!root.allFinite()) return false;
      const Eigen::MatrixXd a = a0 * root.inverse();
      if (!a.allFinite()) return false;
      if (max_abs(a.transpose() * om * a - om) > 1e-8) return false;
      for (std::size_t g = 0; g < r1d.size(); ++g)
        if (max_abs(a * r1d[g] - r2d[g] * a) > 1e-8 * std::max(1.0, max_abs(a)))
          return false;
      MatQ conj(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) conj(i, j) = Rational(a(i, j));
      verdict.kind = EquivalenceVerdict::Equivalent;
      verdict.conjugator = conj;
      verdict.witness = "numerical conjugator (floating-point fallback)";
      return true;
    };
    // Candidates: deterministic weight patterns over the exact basis, then
    // the basis elements themselves.
    std::vector<Eigen::MatrixXd> basis_d;
    for (const MatQ& b : basis) basis_d.push_back(to_dense(b));
    std::uint64_t lcg = 0x2545F4914F6CDD1Dull;
    for (int pattern = 0; pattern < 12; ++pattern) {
      Eigen::MatrixXd cand = Eigen::MatrixXd::Zero(n, n);
      for (std::size_t i = 0; i < basis_d.size(); ++i) {
        lcg = lcg * 6364136223846793005ull + 1442695040888963407ull;
        const double w = 0.25 + static_cast<double>((lcg >> 33) % 1024) / 512.0;
        const double sgn = ((lcg >> 13) & 1) ? 1.0 : -1.0;
        cand += sgn * w * basis_d[i];
      }
      if (try_float(cand)) return verdict;
    }
    for (const Eigen::MatrixXd& b : basis_d)
      if (try_float(b)) return verdict;
  }

  verdict.kind = EquivalenceVerdict::Inconclusive;
  verdict.witness = "no symplectic conjugator found within search bounds";
  return verdict;
}

bool preserves_lattice(const MonodromyRep& rep, const IntegralLattice& lat) {
  if (lat.basis.rows() != rep.sp.dim) throw DimensionError("lattice dimension mismatch");
  const MatQ b = lat.basis_q();
  const MatQ binv = inverse_exact(b);
  for (const MatQ& m : rep.images) {
    const MatQ conj = binv * m * b;
    Rational det = 1;
    MatQ conj_int = conj;
    for (Eigen::Index i = 0; i < conj.rows(); ++i)
      for (Eigen::Index j = 0; j < conj.cols(); ++j)
        if (denominator(conj(i, j)) != 1) return false;
    det = det_exact(conj);
    if (det != 1 && det != -1) return false;
  }
  return true;
}

}  // namespace esmv
