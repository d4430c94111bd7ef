#include "mvs/propagation.hpp"

namespace mvs {

std::vector<std::pair<int, int>> region_offsets(Direction dir, Band band) {
  // Canonical Up sets; the other directions are 90-degree rotations.
  std::vector<std::pair<int, int>> up;
  if (band == Band::Near) {
    up = {{0, -1}, {-1, -2}, {1, -2}, {-2, -3}, {2, -3}, {-3, -4}, {3, -4}};
  } else {
    for (int k = 1; k <= 11; ++k) up.emplace_back(0, -(2 * k + 1));
  }
  std::vector<std::pair<int, int>> out;
  out.reserve(up.size());
  for (auto [dx, dy] : up) {
    switch (dir) {
      case Direction::Up:    out.emplace_back(dx, dy); break;
      case Direction::Down:  out.emplace_back(-dx, -dy); break;
      case Direction::Right: out.emplace_back(-dy, dx); break;
      case Direction::Left:  out.emplace_back(dy, -dx); break;
    }
  }
  return out;
}

std::array<RegionSpec, 8> propagation_regions(PropagationScheme scheme) {
  constexpr Direction dirs[4] = {Direction::Up, Direction::Down,
                                 Direction::Left, Direction::Right};
  std::array<RegionSpec, 8> regions;
  for (int b = 0; b < 2; ++b) {
    const Band band = b == 0 ? Band::Near : Band::Far;
    for (int d = 0; d < 4; ++d) {
      RegionSpec& r = regions[b * 4 + d];
      r.direction = dirs[d];
      r.band = band;
      switch (scheme) {
        case PropagationScheme::Asymmetric:
          r.offsets = region_offsets(dirs[d], band);
          break;
        case PropagationScheme::Symmetric:
          r.offsets = {region_offsets(dirs[d], band).front()};
          break;
        case PropagationScheme::Disabled:
          break;
      }
    }
  }
  return regions;
}

std::optional<Pixel> sample_region_best(const CostField& cost_map,
                                        const Pixel& px,
                                        const RegionSpec& region) {
  std::optional<Pixel> best;
  double best_cost = 0.0;
  for (auto [dx, dy] : region.offsets) {
    const int x = px.x + dx;
    const int y = px.y + dy;
    if (!cost_map.contains(x, y)) continue;
    const double c = cost_map.at(x, y);
    if (!best || c < best_cost) {
      best = Pixel{x, y};
      best_cost = c;
    }
  }
  return best;
}

std::vector<GatheredHypothesis> gather_hypotheses(
    const HypothesisFieldView& field, const CameraModel& ref, const Pixel& px,
    std::span<const RegionSpec> regions) {
  const CostField cost_map{field.width, field.height, field.best_cost};
  const Vec3 ray = ref.ray(px);

  std::vector<GatheredHypothesis> out;
  out.reserve(regions.size());
  for (const RegionSpec& region : regions) {
    const std::optional<Pixel> sender = sample_region_best(cost_map, px, region);
    if (!sender) continue;

    const std::size_t idx = std::size_t(sender->y) * field.width + sender->x;
    const double sender_depth = field.depth[idx];
    const Vec3& n = field.normal[idx];

    // Intersect px's viewing ray with the sender's plane. The sender's plane
    // is n . X = n . X_q where X_q is the sender's backprojected point.
    const Vec3 X_q = sender_depth * ref.ray(*sender);
    const double denom = n.dot(ray);
    double depth = denom < 0.0 ? n.dot(X_q) / denom
                               : -1.0;  // forces the fallback below

    GatheredHypothesis g;
    g.source = *sender;
    g.hyp.normal = n;
    if (depth >= ref.depth_min() && depth <= ref.depth_max()) {
      g.hyp.depth = depth;
    } else {
      g.hyp.depth = ref.clamp_depth(sender_depth);
    }
    if (g.hyp.normal.dot(ray) >= 0.0) {
      // Keep the stored state invariant-clean even for grazing senders.
      g.hyp.normal = -g.hyp.normal;
      if (g.hyp.normal.dot(ray) >= 0.0) g.hyp.normal = -ray.normalized();
    }
    out.push_back(g);
  }
  return out;
}

}  // namespace mvs
