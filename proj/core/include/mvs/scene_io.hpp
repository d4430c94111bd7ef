#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mvs/depth_map.hpp"
#include "mvs/fusion_types.hpp"
#include "mvs/geometry.hpp"
#include "mvs/image.hpp"

namespace mvs {

struct SceneView {
  std::string name;  // basename without extension, e.g. "0003"
  CameraModel cam;
  RgbImage rgb;
  GrayImage gray;
};

struct Scene {
  std::vector<SceneView> views;
};

// Loads `dir/images/NNNN.png` (or .jpg) plus `dir/cams/NNNN.txt`, ordered by
// filename. Camera text format:
//   extrinsic
//   r11 r12 r13 t1   (3 lines, the 3x4 [R|t])
//   intrinsic
//   k11 k12 k13      (3 lines)
//   depth_min depth_max
// Throws MissingFile / MalformedCamera / DimensionMismatch / SceneTooSmall.
Scene read_scene(const std::filesystem::path& dir);

void write_camera_file(const std::filesystem::path& path,
                       const CameraModel& cam);

RgbImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const RgbImage& rgb);

// Uniform rescale of image and intrinsics by `factor` (area-averaged for
// downscales). Depth range is unchanged.
RgbImage resize_image(const RgbImage& rgb, double factor);
CameraModel scale_camera(const CameraModel& cam, double factor,
                         int new_width, int new_height);

// PFM storage: 1-channel ("Pf") or 3-channel ("PF"), rows bottom-to-top,
// scale sign encodes endianness. Writes are little-endian (scale -1.0).
struct Pfm {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;  // row-major, top-down in memory
};

Pfm read_pfm(const std::filesystem::path& path);
void write_pfm(const std::filesystem::path& path, const Pfm& pfm);

Pfm depth_to_pfm(const DepthNormalMap& map);    // invalid pixels become 0
Pfm normal_to_pfm(const DepthNormalMap& map);   // 3-channel
Pfm cost_to_pfm(const DepthNormalMap& map);

// Rebuilds a map from estimate outputs. `cost` may be empty, in which case
// validity means depth > 0 and finite.
DepthNormalMap map_from_pfm(const Pfm& depth, const Pfm& normal,
                            const Pfm* cost);

// Binary little-endian PLY with float x,y,z,nx,ny,nz and uchar red,green,blue.
void write_ply(const std::filesystem::path& path,
               std::span<const FusedPoint> points);
std::vector<FusedPoint> read_ply(const std::filesystem::path& path);

}  // namespace mvs
