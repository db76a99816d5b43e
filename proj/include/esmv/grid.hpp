#pragma once

#include "esmv/target.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace esmv {

// Discretized chart of the oriented four-manifold. Periodic directions wrap;
// `winding` records, per direction, the image of the corresponding spacetime
// loop in the target fundamental group, which fixes the cut transitions of
// every pulled-back field.
struct SpacetimeGrid {
  std::array<int, 4> shape{};
  std::array<double, 4> spacing{};
  std::array<bool, 4> periodic{};
  std::array<Word, 4> winding{};

  void validate() const;
  std::int64_t nodes() const;
  std::int64_t index(const std::array<int, 4>& c) const;  // row-major, last axis fastest
  std::array<int, 4> coords(std::int64_t idx) const;
  Eigen::Vector4d position(const std::array<int, 4>& c) const;
  double extent(int d) const;  // period for periodic dims, domain length otherwise
  int margin(int d) const { return periodic[static_cast<std::size_t>(d)] ? 0 : 2; }
  bool interior(const std::array<int, 4>& c) const;
  std::int64_t interior_count() const;
  SpacetimeGrid refined(int factor) const;

  struct Neighbor {
    std::int64_t node = 0;
    int wrap = 0;  // +-1 when the step crossed the cut in this direction
  };
  // nullopt when stepping out of a non-periodic direction.
  std::optional<Neighbor> neighbor(std::array<int, 4> c, int dir, int step) const;

  template <class Fn>
  void for_each(Fn&& fn) const {
    std::array<int, 4> c{0, 0, 0, 0};
    const std::int64_t n = nodes();
    for (std::int64_t idx = 0; idx < n; ++idx) {
      fn(idx, c);
      for (int d = 3; d >= 0; --d) {
        if (++c[static_cast<std::size_t>(d)] < shape[static_cast<std::size_t>(d)]) break;
        c[static_cast<std::size_t>(d)] = 0;
      }
    }
  }
};

// Per-direction cut data induced by the scalar map's winding: the fiber
// transition and the target-lift shift picked up when crossing the cut.
struct CutData {
  std::array<Eigen::MatrixXd, 4> rho;
  std::array<Eigen::MatrixXd, 4> rho_inv;
  std::array<Eigen::VectorXd, 4> shift;
};

CutData make_cut_data(const SpacetimeGrid& grid, const ScalarTarget& target);

// Lift shift of a single word through the target's periodic coordinates.
Eigen::VectorXd winding_shift(const Word& w, const ScalarTarget& target);

}  // namespace esmv
