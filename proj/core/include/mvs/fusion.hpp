#pragma once

#include <span>
#include <utility>
#include <vector>

#include "mvs/depth_map.hpp"
#include "mvs/fusion_types.hpp"
#include "mvs/scene_io.hpp"

namespace mvs {

// True iff px's point, seen from src, lands on a valid source pixel whose
// depth agrees within f_rel_depth (relative) and whose world-frame normal is
// within f_ang degrees.
bool check_consistency(const DepthNormalMap& ref_map, const CameraModel& ref_cam,
                       const DepthNormalMap& src_map, const CameraModel& src_cam,
                       const Pixel& px, const FusionParams& params);

// Per-point cluster membership, for dedup audits and the support histogram.
struct FusionTrace {
  std::vector<std::vector<std::pair<int, Pixel>>> clusters;  // (view, pixel)
};

// Walks reference images in order; every unconsumed valid pixel with at least
// f_con consistent sources emits one point (component-wise median position,
// normalized mean normal, color from the reference image) and consumes the
// participating source pixels so no pixel is emitted twice.
std::vector<FusedPoint> fuse(const Scene& scene,
                             std::span<const DepthNormalMap> maps,
                             const FusionParams& params,
                             FusionTrace* trace = nullptr);

}  // namespace mvs
