#pragma once

#include "esmv/cell_complex.hpp"
#include "esmv/duality.hpp"

#include <json.hpp>

namespace esmv {

using Json = nlohmann::json;

// Parsed scenario: the target data, a configuration recipe, and optional
// transformation and quantization sections. Exact matrices (monodromy,
// lattice, lifts, omega) are rationals; sampled fields are doubles.
struct Scenario {
  Json raw;
  std::string hash;
  std::string base_dir;  // resolves relative sample-file paths

  EsmParameters params;
  ScalarTarget target;
  TamingField taming;

  explicit Scenario(Json j, std::string base = "");
  static Scenario from_file(const std::string& path);

  bool has(const std::string& key) const { return raw.contains(key); }

  // Configuration assembly; `refine` scales the grid resolution.
  SpacetimeGrid grid(int refine = 1) const;
  LorentzMetricField metric(const SpacetimeGrid& g) const;
  ScalarMapField scalar_map(const SpacetimeGrid& g) const;
  TwistedTwoForm field_strength(const Json& spec, const SpacetimeGrid& g,
                                const LorentzMetricField& metric,
                                const ScalarMapField& phi) const;
  EsmConfiguration configuration(int refine = 1) const;
  // The quantize command prefers the V_quantize block when present.
  TwistedTwoForm quantize_field(const SpacetimeGrid& g, const LorentzMetricField& metric,
                                const ScalarMapField& phi) const;
  std::vector<DualityTransformation> transformations() const;
};

Rational parse_rational(const Json& v);
MatQ parse_rational_matrix(const Json& v);
Eigen::MatrixXd parse_double_matrix(const Json& v);
Word parse_word(const Json& v, int n_generators);

// Canonical content digest: FNV-1a over the sorted-key compact dump.
std::string scenario_digest(const Json& j);

// The bundled U-fold scenario (circle target, parabolic monodromy, twisted
// polarized wave, flux block, transformation samples) as a scenario object.
Json bundled_ufold_scenario(int resolution = 8);

}  // namespace esmv
