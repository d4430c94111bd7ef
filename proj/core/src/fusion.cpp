#include "mvs/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "mvs/errors.hpp"

namespace mvs {

namespace {

// Integer pixel whose center is nearest to continuous coordinates (u, v).
Pixel nearest_pixel(const Vec2& uv) {
  return Pixel{int(std::floor(uv.x())), int(std::floor(uv.y()))};
}

bool depth_consistent(double d_projected, double d_src,
                      const FusionParams& p) {
  if (d_src <= 0.0) return false;
  if (p.f_eps_disparity && p.disparity_scale) {
    const double disp_diff =
        *p.disparity_scale * std::abs(1.0 / d_projected - 1.0 / d_src);
    return disp_diff <= *p.f_eps_disparity;
  }
  return std::abs(d_projected - d_src) / d_src <= p.f_rel_depth;
}

}  // namespace

bool check_consistency(const DepthNormalMap& ref_map,
                       const CameraModel& ref_cam,
                       const DepthNormalMap& src_map,
                       const CameraModel& src_cam, const Pixel& px,
                       const FusionParams& params) {
  const std::size_t i = ref_map.index(px.x, px.y);
  if (!ref_map.valid[i]) return false;

  const Vec3 X_world =
      ref_cam.to_world(backproject(ref_cam, px, ref_map.depth[i]));
  const Vec3 X_src = src_cam.to_camera(X_world);
  if (X_src.z() <= 0.0) return false;

  double d_projected = 0.0;
  const Vec2 uv = project(src_cam, X_src, &d_projected);
  const Pixel q = nearest_pixel(uv);
  if (!src_map.contains(q.x, q.y)) return false;
  const std::size_t qi = src_map.index(q.x, q.y);
  if (!src_map.valid[qi]) return false;

  if (!depth_consistent(d_projected, src_map.depth[qi], params)) return false;

  const Vec3 n_ref = ref_cam.R().transpose() * ref_map.normal[i];
  const Vec3 n_src = src_cam.R().transpose() * src_map.normal[qi];
  const double cosang =
      std::clamp(n_ref.dot(n_src) / (n_ref.norm() * n_src.norm()), -1.0, 1.0);
  return std::acos(cosang) <= params.f_ang_deg * M_PI / 180.0;
}

std::vector<FusedPoint> fuse(const Scene& scene,
                             std::span<const DepthNormalMap> maps,
                             const FusionParams& params, FusionTrace* trace) {
  const int V = int(scene.views.size());
  if (int(maps.size()) != V)
    throw DimensionMismatch("fuse: one map per scene view required");

  std::vector<std::vector<std::uint8_t>> consumed(V);
  for (int v = 0; v < V; ++v)
    consumed[v].assign(maps[v].depth.size(), 0);

  std::vector<FusedPoint> points;
  std::vector<Vec3> cluster_pos;
  std::vector<Vec3> cluster_normal;
  std::vector<std::pair<int, Pixel>> members;

  for (int r = 0; r < V; ++r) {
    const DepthNormalMap& ref_map = maps[r];
    const CameraModel& ref_cam = scene.views[r].cam;
    for (int y = 0; y < ref_map.height; ++y) {
      for (int x = 0; x < ref_map.width; ++x) {
        const Pixel px{x, y};
        const std::size_t i = ref_map.index(x, y);
        if (!ref_map.valid[i] || consumed[r][i]) continue;

        cluster_pos.clear();
        cluster_normal.clear();
        members.clear();
        const Vec3 ref_point =
            ref_cam.to_world(backproject(ref_cam, px, ref_map.depth[i]));
        cluster_pos.push_back(ref_point);
        cluster_normal.push_back(ref_cam.R().transpose() * ref_map.normal[i]);
        members.emplace_back(r, px);

        for (int s = 0; s < V; ++s) {
          if (s == r) continue;
          if (!check_consistency(ref_map, ref_cam, maps[s],
                                 scene.views[s].cam, px, params))
            continue;
          const Vec3 X_src =
              scene.views[s].cam.to_camera(ref_point);
          const Pixel q = nearest_pixel(project(scene.views[s].cam, X_src));
          const std::size_t qi = maps[s].index(q.x, q.y);
          if (consumed[s][qi]) continue;  // already part of another cluster
          cluster_pos.push_back(scene.views[s].cam.to_world(
              backproject(scene.views[s].cam, q, maps[s].depth[qi])));
          cluster_normal.push_back(scene.views[s].cam.R().transpose() *
                                   maps[s].normal[qi]);
          members.emplace_back(s, q);
        }

        const int support = int(members.size()) - 1;
        if (support < params.f_con) continue;

        FusedPoint pt;
        // Component-wise lower median over the ref point and its sources.
        for (int c = 0; c < 3; ++c) {
          std::vector<double> vals;
          vals.reserve(cluster_pos.size());
          for (const Vec3& p : cluster_pos) vals.push_back(p[c]);
          std::sort(vals.begin(), vals.end());
          pt.position[c] = vals[(vals.size() - 1) / 2];
        }
        Vec3 nsum = Vec3::Zero();
        for (const Vec3& n : cluster_normal) nsum += n;
        pt.normal = nsum.norm() > 1e-12 ? Vec3(nsum.normalized())
                                        : cluster_normal.front();
        pt.color = scene.views[r].rgb.at(x, y);
        pt.support = support;
        points.push_back(pt);

        for (const auto& [v, q] : members)
          consumed[v][maps[v].index(q.x, q.y)] = 1;
        if (trace) trace->clusters.push_back(members);
      }
    }
  }
  return points;
}

}  // namespace mvs
