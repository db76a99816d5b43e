#include "esmv/scenario.hpp"

#include <fstream>

namespace esmv {

Rational parse_rational(const Json& v) {
  if (v.is_number_integer()) return Rational(v.get<long long>());
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      return Rational(s);
    } catch (const std::exception&) {
      throw ParseError("cannot parse rational: " + s);
    }
  }
  throw ParseError("exact entries must be integers or \"p/q\" strings, got: " + v.dump());
}

MatQ parse_rational_matrix(const Json& v) {
  if (!v.is_array() || v.empty() || !v[0].is_array())
    throw ParseError("expected a matrix (array of arrays)");
  const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(v[0].size());
  MatQ m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(v[static_cast<std::size_t>(i)].size()) != cols)
      throw ParseError("ragged matrix");
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = parse_rational(v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
  }
  return m;
}

Eigen::MatrixXd parse_double_matrix(const Json& v) {
  if (!v.is_array() || v.empty() || !v[0].is_array())
    throw ParseError("expected a matrix (array of arrays)");
  const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(v[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      m(i, j) = v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  return m;
}

Word parse_word(const Json& v, int n_generators) {
  if (!v.is_array()) throw ParseError("expected a word (array of [generator, exponent])");
  Word w;
  for (const Json& letter : v) {
    if (!letter.is_array() || letter.size() != 2)
      throw ParseError("word letters are [generator, exponent] pairs");
    const int g = letter[0].get<int>();
    const int e = letter[1].get<int>();
    if (g < 1 || g > n_generators)
      throw ParseError("word references generator " + std::to_string(g) + " of " +
                       std::to_string(n_generators));
    if (e != 1 && e != -1) throw ParseError("word exponents must be +1 or -1");
    w.letters.emplace_back(g - 1, e);
  }
  return w;
}

std::string scenario_digest(const Json& j) {
  const std::string canon = j.dump();  // nlohmann objects iterate sorted by key
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

EsmParameters parse_params(const Json& j) {
  EsmParameters p;
  if (j.contains("params")) {
    const Json& pj = j.at("params");
    if (pj.contains("kappa")) p.kappa = pj.at("kappa").get<double>();
    if (pj.contains("tolerances"))
      for (const auto& [name, value] : pj.at("tolerances").items())
        p.tolerances[name] = value.get<double>();
  }
  p.validate();
  return p;
}

MonodromyRep parse_monodromy(const Json& tj, std::optional<IntegralLattice> lattice) {
  std::vector<std::string> gens;
  std::vector<MatQ> images;
  std::vector<Word> relations;
  int fiber = 2;
  // Generators and relations may come from a separate presentation block;
  // otherwise they live inside the monodromy block. Either way one image
  // per generator is required, keyed by name.
  const Json* pres_block = tj.contains("presentation") ? &tj.at("presentation") : nullptr;
  const Json* mono_block = tj.contains("monodromy") ? &tj.at("monodromy") : nullptr;
  if (pres_block) {
    gens = pres_block->at("generators").get<std::vector<std::string>>();
  } else if (mono_block) {
    gens = mono_block->at("generators").get<std::vector<std::string>>();
  }
  if (!gens.empty()) {
    if (!mono_block) throw ParseError("presentation given without monodromy images");
    const Json& images_block =
        mono_block->contains("images") ? mono_block->at("images") : *mono_block;
    for (const std::string& g : gens) {
      if (!images_block.contains(g))
        throw ParseError("missing monodromy image for generator " + g);
      images.push_back(parse_rational_matrix(images_block.at(g)));
    }
    if (!images.empty()) fiber = static_cast<int>(images[0].rows());
    const Json* rel_src = pres_block && pres_block->contains("relations") ? pres_block
                          : (mono_block->contains("relations") ? mono_block : nullptr);
    if (rel_src)
      for (const Json& r : rel_src->at("relations"))
        relations.push_back(parse_word(r, static_cast<int>(gens.size())));
  }
  if (tj.contains("fiber_dim")) fiber = tj.at("fiber_dim").get<int>();
  GroupPresentation pres = GroupPresentation::free_abelian(gens);
  pres.relations.insert(pres.relations.end(), relations.begin(), relations.end());
  return MonodromyRep(std::move(pres), SymplecticSpace::standard(fiber / 2),
                      std::move(images), std::move(lattice));
}

MatrixField parse_target_metric(const Json& mj, int dim) {
  if (mj.contains("constant")) {
    const Eigen::MatrixXd g = parse_double_matrix(mj.at("constant"));
    if (g.rows() != dim) throw ParseError("target metric dimension mismatch");
    return [g](const Eigen::VectorXd&) { return g; };
  }
  if (mj.contains("diagonal")) {
    const std::vector<double> d = mj.at("diagonal").get<std::vector<double>>();
    if (static_cast<int>(d.size()) != dim) throw ParseError("diagonal metric dimension mismatch");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) g(i, i) = d[static_cast<std::size_t>(i)];
    return [g](const Eigen::VectorXd&) { return g; };
  }
  throw ParseError("unsupported target metric block: " + mj.dump());
}

ScalarField parse_potential(const Json& pj) {
  if (pj.contains("constant")) {
    const double c = pj.at("constant").get<double>();
    return [c](const Eigen::VectorXd&) { return c; };
  }
  if (pj.contains("quadratic")) {
    const std::vector<double> center =
        pj.at("quadratic").at("center").get<std::vector<double>>();
    const std::vector<double> coeffs =
        pj.at("quadratic").at("coeffs").get<std::vector<double>>();
    return [center, coeffs](const Eigen::VectorXd& y) {
      double acc = 0;
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double d = y(i) - center[static_cast<std::size_t>(i)];
        acc += coeffs[static_cast<std::size_t>(i)] * d * d;
      }
      return acc;
    };
  }
  throw ParseError("unsupported potential block: " + pj.dump());
}

// Shear frame E(y) = I + (y/L)(rho - I) for a one-dimensional periodic
// target with unipotent monodromy.
Eigen::MatrixXd shear_frame(const ScalarTarget& target, double y) {
  const double L = target.periods[static_cast<std::size_t>(target.periodic_dims.at(0))];
  const Eigen::MatrixXd rho = to_dense(target.monodromy.images.at(0));
  const int f = static_cast<int>(rho.rows());
  return Eigen::MatrixXd::Identity(f, f) + (y / L) * (rho - Eigen::MatrixXd::Identity(f, f));
}

TamingField parse_taming(const Json& tj, const ScalarTarget& target) {
  TamingField jf;
  int samples = tj.value("taming_samples", 16);
  std::vector<int> counts(static_cast<std::size_t>(target.dim), samples);
  std::vector<double> spacing(static_cast<std::size_t>(target.dim));
  std::vector<double> origin(static_cast<std::size_t>(target.dim), 0.0);
  for (int i = 0; i < target.dim; ++i) {
    const double L = target.periods[static_cast<std::size_t>(i)];
    spacing[static_cast<std::size_t>(i)] = (L > 0 ? L : 1.0) / samples;
  }
  jf.sample_grid = TargetGrid{counts, spacing, origin};

  const Json& spec = tj.at("taming");
  if (spec.contains("constant")) {
    const Eigen::MatrixXd j = parse_double_matrix(spec.at("constant"));
    jf.j_at = [j](const Eigen::VectorXd&) { return j; };
    return jf;
  }
  if (spec.contains("shear_frame")) {
    if (target.dim != 1 || target.periodic_dims.size() != 1)
      throw ParseError("shear_frame taming needs a one-dimensional periodic target");
    const MatQ rho = target.monodromy.images.at(0);
    const MatQ n = rho - MatQ::Identity(rho.rows(), rho.cols());
    if (MatQ(n * n) != MatQ(MatQ::Zero(rho.rows(), rho.cols())))
      throw ParseError("shear_frame taming needs unipotent monodromy");
    const ScalarTarget* t = &target;
    Eigen::MatrixXd j0(2, 2);
    j0 << 0, -1, 1, 0;
    if (spec.at("shear_frame").contains("base"))
      j0 = parse_double_matrix(spec.at("shear_frame").at("base"));
    jf.j_at = [t, j0](const Eigen::VectorXd& y) {
      const Eigen::MatrixXd e = shear_frame(*t, y(0));
      return Eigen::MatrixXd(e * j0 * e.inverse());
    };
    return jf;
  }
  throw ParseError("unsupported taming block: " + spec.dump());
}

}  // namespace

namespace {

// Row-major binary array of 64-bit floats: one block per grid node, last
// grid axis fastest, block entries contiguous.
std::vector<double> read_sample_file(const std::string& base_dir, const std::string& file,
                                     std::size_t expected) {
  std::string path = file;
  if (!base_dir.empty() && !file.empty() && file[0] != '/')
    path = base_dir + "/" + file;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open sample file: " + path);
  std::vector<double> data(expected);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(expected * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != expected * sizeof(double))
    throw ParseError("sample file too short: " + path);
  return data;
}

}  // namespace

Scenario::Scenario(Json j, std::string base)
    : raw(std::move(j)),
      base_dir(std::move(base)),
      params(parse_params(raw)),
      target([&]() -> ScalarTarget {
        if (!raw.contains("target")) throw MissingSection("scenario lacks a target section");
        const Json& tj = raw.at("target");
        const int dim = tj.at("dim").get<int>();
        std::vector<double> periods(static_cast<std::size_t>(dim), 0.0);
        if (tj.contains("periods")) periods = tj.at("periods").get<std::vector<double>>();
        std::optional<IntegralLattice> lat;
        if (tj.contains("lattice")) {
          const MatQ b = parse_rational_matrix(tj.at("lattice").at("basis"));
          MatZ bz(b.rows(), b.cols());
          for (Eigen::Index r = 0; r < b.rows(); ++r)
            for (Eigen::Index c = 0; c < b.cols(); ++c) {
              if (denominator(b(r, c)) != 1)
                throw ParseError("lattice basis must be integral");
              bz(r, c) = numerator(b(r, c));
            }
          lat = IntegralLattice(bz);
        }
        ScalarTarget t(dim, periods, parse_monodromy(tj, std::move(lat)));
        t.metric = parse_target_metric(tj.at("metric"), dim);
        t.metric_constant =
            tj.at("metric").contains("constant") || tj.at("metric").contains("diagonal");
        t.potential = parse_potential(tj.at("potential"));
        if (tj.contains("fd_step")) t.fd_step = tj.at("fd_step").get<double>();
        return t;
      }()),
      taming(parse_taming(raw.at("target"), target)) {
  hash = scenario_digest(raw);
  target.validate_shape();
}

Scenario Scenario::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ParseError(std::string("scenario parse failure: ") + e.what());
  }
  std::string dir;
  const auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return Scenario(std::move(j), std::move(dir));
}

SpacetimeGrid Scenario::grid(int refine) const {
  if (!raw.contains("spacetime")) throw MissingSection("scenario lacks a spacetime section");
  const Json& sj = raw.at("spacetime");
  SpacetimeGrid g;
  const auto shape = sj.at("shape").get<std::vector<int>>();
  const auto spacing = sj.at("spacing").get<std::vector<double>>();
  const auto periodic = sj.at("periodic").get<std::vector<bool>>();
  if (shape.size() != 4 || spacing.size() != 4 || periodic.size() != 4)
    throw ParseError("spacetime blocks are 4-vectors");
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    g.shape[du] = shape[du];
    g.spacing[du] = spacing[du];
    g.periodic[du] = periodic[du];
  }
  if (sj.contains("phi_winding"))
    for (const auto& [key, word] : sj.at("phi_winding").items()) {
      const int d = std::stoi(key);
      if (d < 0 || d > 3) throw ParseError("phi_winding direction out of range");
      g.winding[static_cast<std::size_t>(d)] =
          parse_word(word, static_cast<int>(target.monodromy.images.size()));
    }
  g.validate();
  return refine > 1 ? g.refined(refine) : g;
}

LorentzMetricField Scenario::metric(const SpacetimeGrid& g) const {
  if (!raw.contains("metric")) throw MissingSection("scenario lacks a metric section");
  const Json& mj = raw.at("metric");
  Eigen::Matrix4d eta = Eigen::Matrix4d::Identity();
  eta(0, 0) = -1.0;
  if (mj.contains("minkowski"))
    return LorentzMetricField::sample(g, [eta](const Eigen::Vector4d&) { return eta; });
  if (mj.contains("conformal")) {
    const double amp = mj.at("conformal").at("amplitude").get<double>();
    const auto wave = mj.at("conformal").at("wave").get<std::vector<double>>();
    return LorentzMetricField::sample(g, [eta, amp, wave](const Eigen::Vector4d& x) {
      double phase = 0;
      for (int d = 0; d < 4; ++d) phase += wave[static_cast<std::size_t>(d)] * x(d);
      const double om = 1.0 + amp * std::sin(phase);
      return Eigen::Matrix4d(om * om * eta);
    });
  }
  if (mj.contains("schwarzschild")) {
    const double mass = mj.at("schwarzschild").value("mass", 1.0);
    const double r0 = mj.at("schwarzschild").value("r0", 4.0);
    const double th0 = mj.at("schwarzschild").value("theta0", M_PI / 3.0);
    return LorentzMetricField::sample(g, [mass, r0, th0](const Eigen::Vector4d& x) {
      const double r = r0 + x(1);
      const double th = th0 + x(2);
      const double f = 1.0 - 2.0 * mass / r;
      Eigen::Matrix4d gm = Eigen::Matrix4d::Zero();
      gm(0, 0) = -f;
      gm(1, 1) = 1.0 / f;
      gm(2, 2) = r * r;
      gm(3, 3) = r * r * std::sin(th) * std::sin(th);
      return gm;
    });
  }
  if (mj.contains("diagonal_profile")) {
    const auto entries = mj.at("diagonal_profile").at("entries").get<std::vector<double>>();
    if (entries.size() != 4) throw ParseError("diagonal_profile needs four entries");
    return LorentzMetricField::sample(g, [entries](const Eigen::Vector4d&) {
      Eigen::Matrix4d gm = Eigen::Matrix4d::Zero();
      for (int d = 0; d < 4; ++d) gm(d, d) = entries[static_cast<std::size_t>(d)];
      return gm;
    });
  }
  if (mj.contains("samples")) {
    const std::string file = mj.at("samples").at("file").get<std::string>();
    const auto n = static_cast<std::size_t>(g.nodes());
    const std::vector<double> data = read_sample_file(base_dir, file, n * 16);
    LorentzMetricField out;
    out.grid = g;
    out.g.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::Matrix4d gm;
      for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) gm(r, c) = data[i * 16 + static_cast<std::size_t>(r * 4 + c)];
      gm = 0.5 * (gm + gm.transpose().eval());
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(gm);
      int negatives = 0;
      for (int k = 0; k < 4; ++k) {
        if (es.eigenvalues()(k) == 0.0) throw SingularMetric("sampled metric degenerate");
        if (es.eigenvalues()(k) < 0.0) ++negatives;
      }
      if (negatives != 1) throw SignatureError("sampled metric signature is not (3,1)");
      out.g[i] = gm;
    }
    return out;
  }
  throw ParseError("unsupported metric block: " + mj.dump());
}

ScalarMapField Scenario::scalar_map(const SpacetimeGrid& g) const {
  if (!raw.contains("phi")) throw MissingSection("scenario lacks a phi section");
  const Json& pj = raw.at("phi");
  std::function<Eigen::VectorXd(const Eigen::Vector4d&)> fn;
  if (pj.contains("constant")) {
    const auto vals = pj.at("constant").get<std::vector<double>>();
    Eigen::VectorXd y0(static_cast<Eigen::Index>(vals.size()));
    for (Eigen::Index i = 0; i < y0.size(); ++i) y0(i) = vals[static_cast<std::size_t>(i)];
    fn = [y0](const Eigen::Vector4d&) { return y0; };
  } else if (pj.contains("linear")) {
    const auto base = pj.at("linear").at("base").get<std::vector<double>>();
    const auto slopes = pj.at("linear").at("slopes").get<std::vector<std::vector<double>>>();
    if (slopes.size() != 4) throw ParseError("linear phi needs one slope vector per direction");
    fn = [base, slopes](const Eigen::Vector4d& x) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(base.size()));
      for (Eigen::Index i = 0; i < y.size(); ++i) {
        y(i) = base[static_cast<std::size_t>(i)];
        for (int d = 0; d < 4; ++d)
          y(i) += slopes[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] * x(d);
      }
      return y;
    };
  } else if (pj.contains("samples")) {
    const std::string file = pj.at("samples").at("file").get<std::string>();
    const auto n = static_cast<std::size_t>(g.nodes());
    const auto d = static_cast<std::size_t>(target.dim);
    const std::vector<double> data = read_sample_file(base_dir, file, n * d);
    ScalarMapField out;
    out.target_dim = target.dim;
    out.phi.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::VectorXd y(target.dim);
      for (std::size_t k = 0; k < d; ++k) y(static_cast<Eigen::Index>(k)) = data[i * d + k];
      out.phi[i] = std::move(y);
    }
    return out;
  } else {
    throw ParseError("unsupported phi block: " + pj.dump());
  }

  // Winding consistency of the lift against the declared words.
  const CutData cuts = make_cut_data(g, target);
  const double tol = params.tol("field_tol");
  for (int d = 0; d < 4; ++d) {
    const auto du = static_cast<std::size_t>(d);
    if (!g.periodic[du]) continue;
    Eigen::Vector4d probe = 0.25 * Eigen::Vector4d::Ones();
    Eigen::Vector4d moved = probe;
    moved(d) += g.extent(d);
    if (max_abs(Eigen::VectorXd(fn(moved) - fn(probe) - cuts.shift[du])) > tol)
      throw ParseError("phi lift is inconsistent with phi_winding in direction " +
                       std::to_string(d));
  }
  return ScalarMapField::sample(g, target.dim, fn);
}

TwistedTwoForm Scenario::field_strength(const Json& spec, const SpacetimeGrid& g,
                                        const LorentzMetricField& gm,
                                        const ScalarMapField& phi) const {
  const int f = target.monodromy.sp.dim;
  if (spec.contains("zero")) return TwistedTwoForm::zero(g, f);

  TwistedTwoForm v = TwistedTwoForm::zero(g, f);
  bool needs_polarize = false;

  if (spec.contains("plane_wave")) {
    const Json& wj = spec.at("plane_wave");
    const auto cycles = wj.at("cycles").get<std::vector<double>>();
    const double amplitude = wj.value("amplitude", 1.0);
    needs_polarize = wj.value("polarize", true);
    Eigen::Vector4d k;
    for (int d = 0; d < 4; ++d)
      k(d) = 2.0 * M_PI * cycles[static_cast<std::size_t>(d)] / g.extent(d);
    std::vector<std::array<double, 3>> legs;  // [mu, nu, coeff]
    for (const Json& leg : wj.at("two_form"))
      legs.push_back({leg[0].get<double>(), leg[1].get<double>(), leg[2].get<double>()});

    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> section;
    if (wj.at("section").contains("constant")) {
      const auto vals = wj.at("section").at("constant").get<std::vector<double>>();
      Eigen::VectorXd s(static_cast<Eigen::Index>(vals.size()));
      for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = vals[static_cast<std::size_t>(i)];
      section = [s](const Eigen::VectorXd&) { return s; };
    } else if (wj.at("section").contains("shear_frame_basis")) {
      const int index = wj.at("section").at("shear_frame_basis").get<int>();
      const ScalarTarget* t = &target;
      section = [t, index, f](const Eigen::VectorXd& y) {
        return Eigen::VectorXd(shear_frame(*t, y(0)) * Eigen::VectorXd::Unit(f, index));
      };
    } else {
      throw ParseError("unsupported plane_wave section: " + wj.at("section").dump());
    }

    g.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
      const Eigen::Vector4d x = g.position(c);
      const double amp = amplitude * std::cos(k.dot(x));
      const Eigen::VectorXd s = section(phi.at(idx));
      auto& blk = v.comp[static_cast<std::size_t>(idx)];
      for (const auto& leg : legs) {
        const int mu = static_cast<int>(leg[0]), nu = static_cast<int>(leg[1]);
        const double sign = (mu < nu) ? 1.0 : -1.0;
        blk.col(pair_index(mu, nu)) += sign * amp * leg[2] * s;
      }
    });
  } else if (spec.contains("flux")) {
    const Json& fj = spec.at("flux");
    const auto plane = fj.at("plane").get<std::vector<int>>();
    const double units = fj.at("units").get<double>();
    const auto s0v = fj.at("section").get<std::vector<double>>();
    Eigen::VectorXd s0(static_cast<Eigen::Index>(s0v.size()));
    for (Eigen::Index i = 0; i < s0.size(); ++i) s0(i) = s0v[static_cast<std::size_t>(i)];
    const bool use_frame = fj.value("use_frame", false);
    if (plane.size() != 2) throw ParseError("flux plane is a directed pair");
    const int mu = plane[0], nu = plane[1];
    const double density = units / (g.extent(mu) * g.extent(nu));
    g.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
      (void)c;
      Eigen::VectorXd s = s0;
      if (use_frame) s = shear_frame(target, phi.at(idx)(0)) * s0;
      v.comp[static_cast<std::size_t>(idx)].col(pair_index(mu, nu)) +=
          (mu < nu ? 1.0 : -1.0) * density * s;
    });
  } else if (spec.contains("constant_form")) {
    const Json& cj = spec.at("constant_form");
    needs_polarize = cj.value("polarize", false);
    const auto s0v = cj.at("section").get<std::vector<double>>();
    Eigen::VectorXd s0(static_cast<Eigen::Index>(s0v.size()));
    for (Eigen::Index i = 0; i < s0.size(); ++i) s0(i) = s0v[static_cast<std::size_t>(i)];
    for (const Json& leg : cj.at("coefficients")) {
      const int mu = leg[0].get<int>(), nu = leg[1].get<int>();
      const double coeff = leg[2].get<double>();
      const double sign = (mu < nu) ? 1.0 : -1.0;
      for (auto& blk : v.comp) blk.col(pair_index(mu, nu)) += sign * coeff * s0;
    }
  } else if (spec.contains("samples")) {
    const std::string file = spec.at("samples").at("file").get<std::string>();
    const auto n = static_cast<std::size_t>(g.nodes());
    const auto fu = static_cast<std::size_t>(f);
    const std::vector<double> data = read_sample_file(base_dir, file, n * fu * 6);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < fu; ++a)
        for (std::size_t p = 0; p < 6; ++p)
          v.comp[i](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(p)) =
              data[(i * fu + a) * 6 + p];
    needs_polarize = spec.at("samples").value("polarize", false);
  } else {
    throw ParseError("unsupported V block: " + spec.dump());
  }

  if (needs_polarize) {
    std::vector<Eigen::MatrixXd> j_phi(static_cast<std::size_t>(g.nodes()));
    for (std::size_t i = 0; i < j_phi.size(); ++i) j_phi[i] = taming.j_at(phi.phi[i]);
    v = polarize(gm, j_phi, v);
  }
  return v;
}

EsmConfiguration Scenario::configuration(int refine) const {
  const SpacetimeGrid g = grid(refine);
  LorentzMetricField gm = metric(g);
  ScalarMapField phi = scalar_map(g);
  if (!raw.contains("V")) throw MissingSection("scenario lacks a V section");
  TwistedTwoForm v = field_strength(raw.at("V"), g, gm, phi);
  return EsmConfiguration::make(g, target, taming, std::move(gm), std::move(phi),
                                std::move(v), params);
}

TwistedTwoForm Scenario::quantize_field(const SpacetimeGrid& g,
                                        const LorentzMetricField& gm,
                                        const ScalarMapField& phi) const {
  if (raw.contains("V_quantize")) return field_strength(raw.at("V_quantize"), g, gm, phi);
  if (raw.contains("V")) return field_strength(raw.at("V"), g, gm, phi);
  throw MissingSection("scenario lacks a V or V_quantize section");
}

std::vector<DualityTransformation> Scenario::transformations() const {
  std::vector<DualityTransformation> out;
  if (!raw.contains("transformations")) return out;
  for (const Json& tj : raw.at("transformations")) {
    DualityTransformation f = make_identity_transformation(target);
    if (tj.contains("f0")) {
      const Json& fj = tj.at("f0");
      if (fj.contains("translation")) {
        const auto t = fj.at("translation").get<std::vector<double>>();
        Eigen::VectorXd tv(static_cast<Eigen::Index>(t.size()));
        for (Eigen::Index i = 0; i < tv.size(); ++i) tv(i) = t[static_cast<std::size_t>(i)];
        f.f0 = TargetIsometry::translate(tv);
      } else if (fj.contains("linear")) {
        f.f0 = TargetIsometry::linear_map(parse_double_matrix(fj.at("linear")));
      } else if (!fj.contains("identity")) {
        throw ParseError("unsupported f0 block: " + fj.dump());
      }
    }
    if (tj.contains("lift")) f.lift = parse_rational_matrix(tj.at("lift"));
    if (tj.contains("generator_action")) {
      f.generator_action.clear();
      for (const Json& w : tj.at("generator_action"))
        f.generator_action.push_back(
            parse_word(w, static_cast<int>(target.monodromy.images.size())));
    }
    out.push_back(std::move(f));
  }
  return out;
}

Json bundled_ufold_scenario(int resolution) {
  const int n = resolution;
  Json j;
  j["schema"] = "esmv-scenario-1";
  j["params"] = {{"kappa", 1.0}};
  j["target"] = {
      {"dim", 1},
      {"periods", {1.0}},
      {"fd_step", 1.0 / 64.0},
      {"metric", {{"constant", {{1.0}}}}},
      {"potential", {{"constant", 0.0}}},
      {"taming", {{"shear_frame", Json::object()}}},
      {"taming_samples", 16},
      {"monodromy",
       {{"generators", {"a"}}, {"images", {{"a", {{1, 1}, {0, 1}}}}}}},
      {"lattice", {{"basis", {{1, 0}, {0, 1}}}}},
  };
  j["spacetime"] = {
      {"shape", {n, n, n, n}},
      {"spacing", {1.0 / (n - 1), 1.0 / (n - 1), 1.0 / n, 1.0 / n}},
      {"periodic", {false, false, true, true}},
      {"phi_winding", {{"3", {{1, 1}}}}},
  };
  j["metric"] = {{"minkowski", true}};
  j["phi"] = {{"linear",
               {{"base", {0.0}}, {"slopes", {{0.0}, {0.0}, {0.0}, {1.0}}}}}};
  j["V"] = {{"plane_wave",
             {{"cycles", {0.0, 0.0, 0.0, 1.0}},
              {"amplitude", 1.0},
              {"two_form", {{0, 2, 1.0}}},
              {"section", {{"shear_frame_basis", 1}}},
              {"polarize", true}}}};
  j["V_quantize"] = {{"flux",
                      {{"plane", {2, 3}},
                       {"units", 1.0},
                       {"section", {0.0, 1.0}},
                       {"use_frame", true}}}};
  j["transformations"] = Json::array();
  // Deck transformation: full-period translation lifted by the monodromy.
  j["transformations"].push_back(
      {{"f0", {{"translation", {1.0}}}}, {"lift", {{1, 1}, {0, 1}}}});
  // Commutant lifts over generic translations.
  j["transformations"].push_back(
      {{"f0", {{"translation", {0.375}}}}, {"lift", {{1, 2}, {0, 1}}}});
  j["transformations"].push_back(
      {{"f0", {{"translation", {-0.25}}}}, {"lift", {{-1, "-1/2"}, {0, -1}}}});
  j["transformations"].push_back(
      {{"f0", {{"identity", true}}}, {"lift", {{1, -1}, {0, 1}}}});
  j["transformations"].push_back(
      {{"f0", {{"translation", {0.15625}}}}, {"lift", {{-1, 3}, {0, -1}}}});
  return j;
}

}  // namespace esmv
