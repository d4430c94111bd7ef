#pragma once

#include <cstdint>
#include <vector>

#include "mvs/geometry.hpp"

namespace mvs {

// Per-pixel depth, normal (camera frame), best aggregated cost and validity
// for one reference image.
struct DepthNormalMap {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<Vec3> normal;
  std::vector<double> best_cost;
  std::vector<std::uint8_t> valid;

  static DepthNormalMap zeros(int width, int height) {
    DepthNormalMap m;
    m.width = width;
    m.height = height;
    const std::size_t n = std::size_t(width) * height;
    m.depth.assign(n, 0.0);
    m.normal.assign(n, Vec3(0, 0, -1));
    m.best_cost.assign(n, 0.0);
    m.valid.assign(n, 0);
    return m;
  }

  std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
  bool contains(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }
};

}  // namespace mvs
