#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mvs/geometry.hpp"

namespace mvs {

enum class CheckerColor : std::uint8_t { Red, Black };  // Red <=> (x+y) even

inline CheckerColor checker_color(int x, int y) {
  return ((x + y) & 1) == 0 ? CheckerColor::Red : CheckerColor::Black;
}

enum class Direction : std::uint8_t { Up, Down, Left, Right };
enum class Band : std::uint8_t { Near, Far };

enum class PropagationScheme : std::uint8_t {
  Asymmetric,  // best-of-region sampling, 7 near / 11 far candidates
  Symmetric,   // fixed single candidate per region (limited-reach baseline)
  Disabled,    // no propagation (refinement-only ablation)
};

struct RegionSpec {
  Direction direction = Direction::Up;
  Band band = Band::Near;
  std::vector<std::pair<int, int>> offsets;  // (dx, dy), opposite checker color
};

// Near regions are 7-candidate V shapes, far regions 11-candidate axial
// strips reaching 23 pixels out. Every offset has odd |dx|+|dy|.
std::vector<std::pair<int, int>> region_offsets(Direction dir, Band band);

// The 8 regions (4 near + 4 far) for a scheme, in cost-matrix row order:
// near U,D,L,R then far U,D,L,R. Symmetric mode truncates each region to its
// first (closest) candidate; Disabled empties them.
std::array<RegionSpec, 8> propagation_regions(PropagationScheme scheme);

struct CostField {
  int width = 0;
  int height = 0;
  const double* cost = nullptr;  // per-pixel current best final cost

  double at(int x, int y) const { return cost[std::size_t(y) * width + x]; }
  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

// In-bounds candidate with minimal stored cost; ties broken by offset list
// order; nullopt if every candidate is out of bounds.
std::optional<Pixel> sample_region_best(const CostField& cost_map,
                                        const Pixel& px,
                                        const RegionSpec& region);

struct HypothesisFieldView {
  int width = 0;
  int height = 0;
  const double* depth = nullptr;
  const Vec3* normal = nullptr;
  const double* best_cost = nullptr;
};

struct GatheredHypothesis {
  PlaneHypothesis hyp;
  Pixel source;
};

// One entry per region with an in-bounds winner. Each hypothesis is
// re-anchored at px by intersecting px's viewing ray with the sender's plane;
// if the intersection violates the facing or depth-range constraints the
// sender's raw depth (clamped) is used instead.
std::vector<GatheredHypothesis> gather_hypotheses(
    const HypothesisFieldView& field, const CameraModel& ref, const Pixel& px,
    std::span<const RegionSpec> regions);

}  // namespace mvs
