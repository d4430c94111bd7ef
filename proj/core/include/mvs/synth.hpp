#pragma once

#include <filesystem>
#include <vector>

#include "mvs/depth_map.hpp"
#include "mvs/scene_io.hpp"

namespace mvs {

// Finite textured rectangle in world space.
struct PlaneSpec {
  Vec3 point = Vec3::Zero();      // rectangle center
  Vec3 normal = Vec3(0, 0, -1);   // normalized on load
  Vec3 u_axis = Vec3::Zero();     // optional; orthonormalized against normal
  double extent_u = 1.0;          // full side lengths
  double extent_v = 1.0;
  double tone = 0.5;              // base luma
};

struct SynthSpec {
  int width = 640;
  int height = 480;
  std::uint64_t texture_seed = 7;
  double depth_min = 2.0;
  double depth_max = 12.0;
  int camera_count = 5;
  double baseline = 0.45;         // spacing between adjacent camera centers
  Vec3 target = Vec3(0, 0, 6);    // look-at point
  double fov_deg = 55.0;          // horizontal field of view
  std::vector<PlaneSpec> planes;
};

SynthSpec parse_synth_spec(const std::filesystem::path& json_path);

struct SynthScene {
  Scene scene;
  std::vector<DepthNormalMap> gt;  // per view; normals in camera frame
  SynthSpec spec;
};

// Renders Perlin-textured planes under the pinhole model with z-buffering.
// Throws DegenerateSpec for empty plane lists, bad extents, or cameras
// touching a plane.
SynthScene synth_scene(const SynthSpec& spec);

// Writes images/, cams/ (loadable by read_scene) and gt/ with per-view
// ground-truth depth and normal PFMs.
void write_synth_scene(const SynthScene& s, const std::filesystem::path& dir);

// World-space distance from a point to the closest plane rectangle.
double distance_to_planes(const Vec3& p, std::span<const PlaneSpec> planes);

// Orthonormal in-plane axes for a plane spec (u, v).
std::pair<Vec3, Vec3> plane_axes(const PlaneSpec& plane);

}  // namespace mvs
