#include <doctest.h>

#include "esmv/report.hpp"

#include <filesystem>
#include <fstream>

using namespace esmv;

namespace {

Json minimal_scenario() {
  Json j;
  j["schema"] = "esmv-scenario-1";
  j["target"] = {
      {"dim", 1},
      {"periods", {0.0}},
      {"fiber_dim", 2},
      {"metric", {{"constant", {{1.0}}}}},
      {"potential", {{"constant", 0.0}}},
      {"taming", {{"constant", {{0, -1}, {1, 0}}}}},
      {"taming_samples", 8},
  };
  j["spacetime"] = {{"shape", {5, 5, 5, 5}},
                    {"spacing", {0.25, 0.25, 0.25, 0.25}},
                    {"periodic", {false, false, false, false}}};
  j["metric"] = {{"minkowski", true}};
  j["phi"] = {{"constant", {0.0}}};
  j["V"] = {{"zero", true}};
  return j;
}

}  // namespace

TEST_CASE("rational parsing accepts integers and p/q strings only") {
  CHECK(parse_rational(Json(3)) == Rational(3));
  CHECK(parse_rational(Json("-5/2")) == Rational(-5, 2));
  CHECK_THROWS_AS(parse_rational(Json(0.5)), ParseError);
  CHECK_THROWS_AS(parse_rational(Json("half")), ParseError);
}

TEST_CASE("word parsing validates indices and exponents") {
  const Word w = parse_word(Json::parse("[[1,1],[2,-1]]"), 2);
  CHECK(w.letters == std::vector<std::pair<int, int>>({{0, 1}, {1, -1}}));
  CHECK_THROWS_AS(parse_word(Json::parse("[[3,1]]"), 2), ParseError);
  CHECK_THROWS_AS(parse_word(Json::parse("[[1,2]]"), 2), ParseError);
}

TEST_CASE("scenario digest is stable under key reordering") {
  const Json a = Json::parse(R"({"x": 1, "y": {"b": 2, "a": 3}})");
  const Json b = Json::parse(R"({"y": {"a": 3, "b": 2}, "x": 1})");
  CHECK(scenario_digest(a) == scenario_digest(b));
  const Json c = Json::parse(R"({"x": 2, "y": {"a": 3, "b": 2}})");
  CHECK(scenario_digest(a) != scenario_digest(c));
}

TEST_CASE("minimal scenario builds and validates") {
  const Scenario s(minimal_scenario());
  const EsmConfiguration cfg = s.configuration();
  CHECK(cfg.grid.nodes() == 625);
  const CommandResult res = cmd_validate(s);
  CHECK(res.exit_code == 0);
  CHECK(res.report.at("status") == "pass");
}

TEST_CASE("missing sections raise MissingSection") {
  Json j = minimal_scenario();
  j.erase("V");
  const Scenario s(j);
  CHECK_THROWS_AS(s.configuration(), MissingSection);

  Json j2 = minimal_scenario();
  j2.erase("target");
  auto build = [&] { return Scenario(j2); };
  CHECK_THROWS_AS(build(), MissingSection);
}

TEST_CASE("scenario rejects an inconsistent phi winding") {
  Json j = bundled_ufold_scenario(6);
  // Slope zero cannot produce the declared winding.
  j["phi"]["linear"]["slopes"] = {{0.0}, {0.0}, {0.0}, {0.0}};
  const Scenario s(j);
  CHECK_THROWS_AS(s.configuration(), ParseError);
}

TEST_CASE("taming validation flags a broken scenario") {
  Json j = minimal_scenario();
  j["target"]["taming"] = {{"constant", {{1, 0}, {0, 1}}}};  // J = I
  const Scenario s(j);
  const CommandResult res = cmd_validate(s);
  CHECK(res.exit_code == 1);
  bool found = false;
  for (const auto& c : res.report.at("checks"))
    if (c.at("name") == "taming_pointwise_valid" && !c.at("pass").get<bool>()) found = true;
  CHECK(found);
}

TEST_CASE("bundled U-fold scenario parses and its demo passes") {
  const Scenario s(bundled_ufold_scenario(6));
  CHECK(s.target.periodic_dims.size() == 1);
  CHECK(s.transformations().size() == 5);
  const CommandResult demo = cmd_ufold_demo(6);
  CHECK(demo.exit_code == 0);
  CHECK(demo.report.at("status") == "pass");
  CHECK(demo.report.at("triviality").at("trivial") == false);
  CHECK(demo.report.at("triviality_with_identity_monodromy") == true);
}

TEST_CASE("reports are byte-identical across repeated runs") {
  const Scenario s(bundled_ufold_scenario(6));
  const std::string a = render_report(cmd_residuals(s).report);
  const std::string b = render_report(cmd_residuals(s).report);
  CHECK(a == b);
  const std::string da = render_report(cmd_duality(s).report);
  const std::string db = render_report(cmd_duality(s).report);
  CHECK(da == db);
}

TEST_CASE("refinement block reports convergence ratios") {
  // Vacuum Schwarzschild data: the Einstein residual is pure truncation
  // error. The reported ratio mixes slightly different interior regions, so
  // the window is wider than the clean common-region measurement.
  Json j = Json::parse(R"({
    "target": {"dim": 1, "periods": [0], "fiber_dim": 2,
               "metric": {"constant": [[1.0]]}, "potential": {"constant": 0.0},
               "taming": {"constant": [[0, -1], [1, 0]]}, "taming_samples": 8},
    "spacetime": {"shape": [9, 9, 9, 9],
                  "spacing": [0.125, 0.5, 0.13089969389957471, 0.125],
                  "periodic": [false, false, false, false]},
    "metric": {"schwarzschild": {"mass": 1.0, "r0": 4.0, "theta0": 1.0471975511965976}},
    "phi": {"constant": [0.0]},
    "V": {"zero": true}
  })");
  const Scenario s(j);
  const CommandResult res = cmd_residuals(s, 2);
  REQUIRE(res.report.contains("refinement"));
  const double ratio =
      res.report.at("refinement").at("ratios").at("einstein_max").get<double>();
  CHECK(ratio > 2.5);
  CHECK(ratio < 6.0);
  // Scalar and EM residuals are identically zero here.
  CHECK(res.report.at("norms").at("scalar").at("max").get<double>() == 0.0);
  CHECK(res.report.at("norms").at("em").at("max").get<double>() == 0.0);
}

TEST_CASE("sampled field files round-trip against analytic definitions") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "esmv_samples_test";
  fs::create_directories(dir);

  Json j = minimal_scenario();
  const Scenario analytic(j);
  const SpacetimeGrid grid = analytic.grid();

  // Emit binary sample files from a nontrivial analytic configuration.
  {
    std::ofstream gm(dir / "g.bin", std::ios::binary);
    std::ofstream pm(dir / "phi.bin", std::ios::binary);
    std::ofstream vm(dir / "v.bin", std::ios::binary);
    grid.for_each([&](std::int64_t, const std::array<int, 4>& c) {
      const Eigen::Vector4d x = grid.position(c);
      const double om = 1.0 + 0.1 * std::sin(x.sum());
      Eigen::Matrix4d g = Eigen::Matrix4d::Identity() * om * om;
      g(0, 0) = -om * om;
      for (int r = 0; r < 4; ++r)
        for (int cc = 0; cc < 4; ++cc) {
          const double val = g(r, cc);
          gm.write(reinterpret_cast<const char*>(&val), sizeof(double));
        }
      const double prim = 0.25 * x(1);
      pm.write(reinterpret_cast<const char*>(&prim), sizeof(double));
      for (int a = 0; a < 2; ++a)
        for (int p = 0; p < 6; ++p) {
          const double val = 0.125 * (a + 1) * (p + 1) * std::cos(x(2));
          vm.write(reinterpret_cast<const char*>(&val), sizeof(double));
        }
    });
  }

  j["metric"] = {{"samples", {{"file", (dir / "g.bin").string()}}}};
  j["phi"] = {{"samples", {{"file", (dir / "phi.bin").string()}}}};
  j["V"] = {{"samples", {{"file", (dir / "v.bin").string()}}}};
  const Scenario sampled(j);
  const EsmConfiguration cfg = sampled.configuration();
  grid.for_each([&](std::int64_t idx, const std::array<int, 4>& c) {
    const Eigen::Vector4d x = grid.position(c);
    const double om = 1.0 + 0.1 * std::sin(x.sum());
    CHECK(cfg.g.at(idx)(1, 1) == doctest::Approx(om * om).epsilon(1e-15));
    CHECK(cfg.phi.at(idx)(0) == doctest::Approx(0.25 * x(1)).epsilon(1e-15));
    CHECK(cfg.v.at(idx)(1, 5) == doctest::Approx(1.5 * std::cos(x(2))).epsilon(1e-15));
  });

  // Truncated file is rejected.
  {
    std::ofstream bad(dir / "short.bin", std::ios::binary);
    const double one = 1.0;
    bad.write(reinterpret_cast<const char*>(&one), sizeof(double));
  }
  j["phi"] = {{"samples", {{"file", (dir / "short.bin").string()}}}};
  const Scenario broken(j);
  CHECK_THROWS_AS(broken.configuration(), ParseError);
  fs::remove_all(dir);
}

TEST_CASE("diagonal profile metric and constant_form V families") {
  Json j = minimal_scenario();
  j["metric"] = {{"diagonal_profile", {{"entries", {-2.0, 1.0, 1.0, 4.0}}}}};
  j["V"] = {{"constant_form",
             {{"coefficients", {{0, 1, 2.5}}}, {"section", {1.0, 0.0}}}}};
  const Scenario s(j);
  const EsmConfiguration cfg = s.configuration();
  CHECK(cfg.g.at(0)(0, 0) == -2.0);
  CHECK(cfg.g.at(0)(3, 3) == 4.0);
  CHECK(cfg.v.at(0)(0, pair_index(0, 1)) == 2.5);
  CHECK(cfg.v.at(0)(1, pair_index(0, 1)) == 0.0);
}

TEST_CASE("a separate presentation block is accepted") {
  Json j = minimal_scenario();
  j["target"]["periods"] = {1.0};
  j["target"]["presentation"] = {{"generators", {"a"}}, {"relations", Json::array()}};
  j["target"]["monodromy"] = {{"a", {{1, 1}, {0, 1}}}};
  j["target"]["taming"] = {{"shear_frame", Json::object()}};
  const Scenario s(j);
  CHECK(s.target.monodromy.images.size() == 1);
  CHECK(s.target.monodromy.images[0](0, 1) == Rational(1));
}

TEST_CASE("holonomy command reports the commutant and triviality") {
  const Scenario s(bundled_ufold_scenario(6));
  const CommandResult res = cmd_holonomy(s, 3);
  CHECK(res.exit_code == 0);
  CHECK(res.report.at("trivial") == false);
  CHECK(res.report.at("witness") == "a");
  CHECK(res.report.at("commutant_dimension") == 2);
  CHECK(res.report.at("preserves_lattice") == true);
}
