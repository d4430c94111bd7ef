#include "mvs/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mvs/errors.hpp"

namespace mvs {

DepthErrorStats depth_error_stats(const DepthNormalMap& est,
                                  const DepthNormalMap& gt,
                                  std::span<const double> thresholds,
                                  ErrorKind kind) {
  if (est.width != gt.width || est.height != gt.height)
    throw DimensionMismatch("depth_error_stats: map sizes differ");

  DepthErrorStats stats;
  stats.fraction.assign(thresholds.size(), 0.0);
  std::size_t gt_valid = 0, both_valid = 0;
  std::vector<std::size_t> below(thresholds.size(), 0);
  for (std::size_t i = 0; i < gt.depth.size(); ++i) {
    if (!gt.valid[i]) continue;
    ++gt_valid;
    if (!est.valid[i]) continue;
    ++both_valid;
    double err = std::abs(est.depth[i] - gt.depth[i]);
    if (kind == ErrorKind::Relative) err /= gt.depth[i];
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      if (err < thresholds[k]) ++below[k];
  }
  if (gt_valid == 0) return stats;
  for (std::size_t k = 0; k < thresholds.size(); ++k)
    stats.fraction[k] = double(below[k]) / double(gt_valid);
  stats.completeness = double(both_valid) / double(gt_valid);
  return stats;
}

std::vector<CurvePoint> convergence_curve(const Scene& scene,
                                          std::span<const DepthNormalMap> gt,
                                          const SolverConfig& cfg,
                                          PropagationScheme scheme,
                                          std::span<const double> thresholds,
                                          std::span<const int> ref_ids) {
  const std::string scheme_name =
      scheme == PropagationScheme::Asymmetric ? "acp" : "scp";
  SolverConfig run_cfg = cfg;
  run_cfg.scheme = scheme;

  // accum[t][k] = (accuracy sum, completeness sum) over references
  std::vector<std::vector<std::pair<double, double>>> accum(
      run_cfg.iterations,
      std::vector<std::pair<double, double>>(thresholds.size(), {0.0, 0.0}));

  for (std::size_t ri = 0; ri < ref_ids.size(); ++ri) {
    const int ref = ref_ids[ri];
    const DepthNormalMap& gt_map = gt[ri];
    estimate_depth_map(scene, ref, run_cfg,
                       [&](int t, const DepthNormalMap& snap) {
                         const DepthErrorStats s = depth_error_stats(
                             snap, gt_map, thresholds, ErrorKind::Relative);
                         for (std::size_t k = 0; k < thresholds.size(); ++k) {
                           accum[t][k].first += s.fraction[k];
                           accum[t][k].second += s.completeness;
                         }
                       });
  }

  std::vector<CurvePoint> out;
  const double n = double(ref_ids.size());
  for (int t = 0; t < run_cfg.iterations; ++t)
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      out.push_back(CurvePoint{t + 1, scheme_name, thresholds[k],
                               accum[t][k].first / n, accum[t][k].second / n});
  return out;
}

void write_curve_csv(const std::filesystem::path& path,
                     std::span<const CurvePoint> points) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot open for write: " + path.string());
  out << "iteration,scheme,threshold,accuracy,completeness\n";
  out.precision(10);
  for (const CurvePoint& p : points)
    out << p.iteration << ',' << p.scheme << ',' << p.threshold << ','
        << p.accuracy << ',' << p.completeness << '\n';
}

PointCloudError point_cloud_error(std::span<const FusedPoint> points,
                                  std::span<const PlaneSpec> planes) {
  if (points.empty()) throw EmptyCloud("point_cloud_error: no points");
  std::vector<double> dist;
  dist.reserve(points.size());
  for (const FusedPoint& p : points)
    dist.push_back(distance_to_planes(p.position, planes));

  PointCloudError err;
  double sum = 0.0;
  for (double d : dist) sum += d;
  err.mean = sum / double(dist.size());
  std::sort(dist.begin(), dist.end());
  const std::size_t rank =
      std::size_t(std::ceil(0.95 * double(dist.size())));  // nearest rank
  err.p95 = dist[std::max<std::size_t>(rank, 1) - 1];
  return err;
}

}  // namespace mvs
