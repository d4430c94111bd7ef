#pragma once

#include <Eigen/Dense>

#include "mvs/rng.hpp"

namespace mvs {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

struct Pixel {
  int x = 0;
  int y = 0;
  friend bool operator==(const Pixel&, const Pixel&) = default;
};

// Pinhole camera. World-to-camera mapping is X_cam = R * X_world + t.
// Pixel (x, y) has its center at continuous image coordinates (x+0.5, y+0.5).
class CameraModel {
 public:
  // Validates: K upper-triangular with positive focal lengths and K(2,2)=1,
  // R orthonormal to 1e-9, 0 < depth_min < depth_max. Throws
  // std::invalid_argument on violation.
  CameraModel(const Mat3& K, const Mat3& R, const Vec3& t, int width,
              int height, double depth_min, double depth_max);

  const Mat3& K() const { return K_; }
  const Mat3& K_inv() const { return K_inv_; }
  const Mat3& R() const { return R_; }
  const Vec3& t() const { return t_; }
  int width() const { return width_; }
  int height() const { return height_; }
  double depth_min() const { return depth_min_; }
  double depth_max() const { return depth_max_; }

  Vec3 center() const { return -(R_.transpose() * t_); }
  Vec3 to_camera(const Vec3& X_world) const { return R_ * X_world + t_; }
  Vec3 to_world(const Vec3& X_cam) const {
    return R_.transpose() * (X_cam - t_);
  }

  // Viewing ray of a pixel center in the camera frame, scaled so z == 1.
  Vec3 ray(const Pixel& px) const {
    return K_inv_ * Vec3(px.x + 0.5, px.y + 0.5, 1.0);
  }
  Vec3 ray_dir(const Pixel& px) const { return ray(px).normalized(); }

  bool contains(const Pixel& px) const {
    return px.x >= 0 && px.x < width_ && px.y >= 0 && px.y < height_;
  }

  double clamp_depth(double d) const {
    if (d < depth_min_) return depth_min_;
    if (d > depth_max_) return depth_max_;
    return d;
  }

 private:
  Mat3 K_, K_inv_, R_;
  Vec3 t_;
  int width_, height_;
  double depth_min_, depth_max_;
};

// Scene plane anchored at one pixel: depth along that pixel's viewing ray
// plus a unit normal in the reference camera frame, facing the camera
// (normal . ray < 0).
struct PlaneHypothesis {
  double depth = 0.0;
  Vec3 normal = Vec3(0, 0, -1);
};

// depth * K^-1 * (x+0.5, y+0.5, 1); third component equals depth.
Vec3 backproject(const CameraModel& cam, const Pixel& px, double depth);

// Projects a camera-frame point to continuous image coordinates; if depth_out
// is non-null it receives the point's depth (z in the camera frame).
Vec2 project(const CameraModel& cam, const Vec3& X_cam,
             double* depth_out = nullptr);

// Signed distance term d_p = n . backproject(ref, px, h.depth). Negative for
// any hypothesis satisfying the facing constraint.
double plane_distance(const CameraModel& ref, const Pixel& px,
                      const PlaneHypothesis& h);

// Precomputed per (reference, source) pair so per-hypothesis homographies are
// a rank-one update: H = A - b * (n^T K_ref^-1) / d_p.
struct PairwiseGeometry {
  Mat3 A;          // K_src * R_rel * K_ref^-1
  Vec3 b;          // K_src * t_rel
  Mat3 ref_K_inv;  // K_ref^-1
};

PairwiseGeometry make_pairwise_geometry(const CameraModel& ref,
                                        const CameraModel& src);

// Plane-induced homography mapping homogeneous reference image coordinates to
// the source image. Throws DegeneratePlane if |d_p| < 1e-12.
Mat3 plane_homography(const CameraModel& ref, const CameraModel& src,
                      const Pixel& px, const PlaneHypothesis& h);

// Same, from precomputed pair geometry. Returns false instead of throwing.
bool try_plane_homography(const PairwiseGeometry& pg, const CameraModel& ref,
                          const Pixel& px, const PlaneHypothesis& h, Mat3* H);

// Depth uniform in the camera's range, normal uniform over the hemisphere
// facing the camera at px.
PlaneHypothesis random_hypothesis(PixelRng& rng, const CameraModel& cam,
                                  const Pixel& px);

// Uniform hemisphere normal with normal . ray < 0 (strict).
Vec3 random_facing_normal(PixelRng& rng, const Vec3& ray);

// Depth scaled by a uniform factor in [1-depth_frac, 1+depth_frac] (clamped
// to the camera range); normal rotated by a uniform angle in [0, angle_max]
// about a random perpendicular axis, re-validated against the facing
// constraint with up to 8 retries before falling back to the input normal.
PlaneHypothesis perturb_hypothesis(PixelRng& rng, const CameraModel& cam,
                                   const Pixel& px, const PlaneHypothesis& h,
                                   double depth_frac, double angle_max);

// Type invariants: unit normal, camera-facing, depth within range.
bool hypothesis_valid(const CameraModel& cam, const Pixel& px,
                      const PlaneHypothesis& h);

}  // namespace mvs
