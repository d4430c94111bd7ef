#include "mvs/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include "mvs/errors.hpp"

namespace mvs {

namespace {
constexpr double kOrthoTol = 1e-9;
constexpr double kDegenerateDist = 1e-12;
}  // namespace

CameraModel::CameraModel(const Mat3& K, const Mat3& R, const Vec3& t,
                         int width, int height, double depth_min,
                         double depth_max)
    : K_(K), R_(R), t_(t), width_(width), height_(height),
      depth_min_(depth_min), depth_max_(depth_max) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("CameraModel: non-positive image extent");
  if (K(0, 0) <= 0 || K(1, 1) <= 0 || K(2, 2) != 1.0 || K(1, 0) != 0.0 ||
      K(2, 0) != 0.0 || K(2, 1) != 0.0)
    throw std::invalid_argument("CameraModel: K must be upper-triangular with "
                                "positive focal lengths and K(2,2)=1");
  const Mat3 rtr = R.transpose() * R - Mat3::Identity();
  if (rtr.cwiseAbs().maxCoeff() >= kOrthoTol)
    throw std::invalid_argument("CameraModel: R not orthonormal");
  if (std::abs(R.determinant() - 1.0) > kOrthoTol)
    throw std::invalid_argument("CameraModel: det(R) != 1");
  if (!(depth_min > 0.0 && depth_min < depth_max))
    throw std::invalid_argument("CameraModel: require 0 < depth_min < depth_max");
  K_inv_ = K.inverse();
}

Vec3 backproject(const CameraModel& cam, const Pixel& px, double depth) {
  return depth * cam.ray(px);
}

Vec2 project(const CameraModel& cam, const Vec3& X_cam, double* depth_out) {
  const Vec3 u = cam.K() * X_cam;
  if (depth_out) *depth_out = u.z();
  return Vec2(u.x() / u.z(), u.y() / u.z());
}

double plane_distance(const CameraModel& ref, const Pixel& px,
                      const PlaneHypothesis& h) {
  return h.normal.dot(backproject(ref, px, h.depth));
}

PairwiseGeometry make_pairwise_geometry(const CameraModel& ref,
                                        const CameraModel& src) {
  const Mat3 R_rel = src.R() * ref.R().transpose();
  const Vec3 t_rel = src.t() - R_rel * ref.t();
  PairwiseGeometry pg;
  pg.ref_K_inv = ref.K_inv();
  pg.A = src.K() * R_rel * pg.ref_K_inv;
  pg.b = src.K() * t_rel;
  return pg;
}

bool try_plane_homography(const PairwiseGeometry& pg, const CameraModel& ref,
                          const Pixel& px, const PlaneHypothesis& h, Mat3* H) {
  const double d_p = plane_distance(ref, px, h);
  if (std::abs(d_p) < kDegenerateDist) return false;
  const Eigen::RowVector3d row = h.normal.transpose() * pg.ref_K_inv;
  *H = pg.A - (pg.b / d_p) * row;
  return true;
}

Mat3 plane_homography(const CameraModel& ref, const CameraModel& src,
                      const Pixel& px, const PlaneHypothesis& h) {
  const PairwiseGeometry pg = make_pairwise_geometry(ref, src);
  Mat3 H;
  if (!try_plane_homography(pg, ref, px, h, &H))
    throw DegeneratePlane("plane passes through the reference camera center");
  return H;
}

Vec3 random_facing_normal(PixelRng& rng, const Vec3& ray) {
  for (;;) {
    const double z = 1.0 - 2.0 * rng.next_double();
    const double phi = 2.0 * M_PI * rng.next_double();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    Vec3 n(s * std::cos(phi), s * std::sin(phi), z);
    double d = n.dot(ray);
    if (d > 0.0) {
      n = -n;
      d = -d;
    }
    if (d < 0.0) return n;  // resample the measure-zero tangent case
  }
}

PlaneHypothesis random_hypothesis(PixelRng& rng, const CameraModel& cam,
                                  const Pixel& px) {
  PlaneHypothesis h;
  h.depth = rng.uniform(cam.depth_min(), cam.depth_max());
  h.normal = random_facing_normal(rng, cam.ray(px));
  return h;
}

namespace {

// Rodrigues rotation of v about unit axis by angle.
Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return v * c + axis.cross(v) * s + axis * (axis.dot(v) * (1.0 - c));
}

// Any unit vector perpendicular to n, parameterized by phi.
Vec3 perpendicular_axis(const Vec3& n, double phi) {
  // Pick the coordinate axis least aligned with n for a stable basis.
  Vec3 helper(1, 0, 0);
  const Vec3 a = n.cwiseAbs();
  if (a.y() <= a.x() && a.y() <= a.z()) helper = Vec3(0, 1, 0);
  else if (a.z() <= a.x() && a.z() <= a.y()) helper = Vec3(0, 0, 1);
  const Vec3 e1 = n.cross(helper).normalized();
  const Vec3 e2 = n.cross(e1);
  return std::cos(phi) * e1 + std::sin(phi) * e2;
}

}  // namespace

PlaneHypothesis perturb_hypothesis(PixelRng& rng, const CameraModel& cam,
                                   const Pixel& px, const PlaneHypothesis& h,
                                   double depth_frac, double angle_max) {
  PlaneHypothesis out;
  out.depth = cam.clamp_depth(
      h.depth * rng.uniform(1.0 - depth_frac, 1.0 + depth_frac));

  const Vec3 ray = cam.ray(px);
  out.normal = h.normal;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const double angle = rng.uniform(0.0, angle_max);
    const double phi = rng.uniform(0.0, 2.0 * M_PI);
    const Vec3 cand =
        angle == 0.0
            ? h.normal
            : rotate_about(h.normal, perpendicular_axis(h.normal, phi), angle)
                  .normalized();
    if (cand.dot(ray) < 0.0) {
      out.normal = cand;
      break;
    }
  }
  return out;
}

bool hypothesis_valid(const CameraModel& cam, const Pixel& px,
                      const PlaneHypothesis& h) {
  if (!(h.depth >= cam.depth_min() && h.depth <= cam.depth_max())) return false;
  if (std::abs(h.normal.norm() - 1.0) > 1e-9) return false;
  return h.normal.dot(cam.ray(px)) < 0.0;
}

}  // namespace mvs
