#pragma once

#include <span>
#include <string>
#include <vector>

#include "mvs/depth_map.hpp"
#include "mvs/fusion_types.hpp"
#include "mvs/solver.hpp"
#include "mvs/synth.hpp"

namespace mvs {

enum class ErrorKind { Absolute, Relative };

struct DepthErrorStats {
  std::vector<double> fraction;  // one entry per threshold
  double completeness = 0.0;     // GT-valid pixels with a valid estimate
};

// fraction[k] = share of GT-valid pixels that are estimated valid and whose
// depth error (|d_est - d_gt|, divided by d_gt for Relative) is below
// thresholds[k]. Throws DimensionMismatch.
DepthErrorStats depth_error_stats(const DepthNormalMap& est,
                                  const DepthNormalMap& gt,
                                  std::span<const double> thresholds,
                                  ErrorKind kind = ErrorKind::Absolute);

struct CurvePoint {
  int iteration = 0;  // 1-based count of completed full iterations
  std::string scheme;
  double threshold = 0.0;
  double accuracy = 0.0;
  double completeness = 0.0;
};

// Runs the solver over ref_ids capturing relative-threshold stats after every
// full iteration, averaged across the references.
std::vector<CurvePoint> convergence_curve(const Scene& scene,
                                          std::span<const DepthNormalMap> gt,
                                          const SolverConfig& cfg,
                                          PropagationScheme scheme,
                                          std::span<const double> thresholds,
                                          std::span<const int> ref_ids);

void write_curve_csv(const std::filesystem::path& path,
                     std::span<const CurvePoint> points);

struct PointCloudError {
  double mean = 0.0;
  double p95 = 0.0;  // nearest-rank 95th percentile
};

// Distance of every point to the nearest ground-truth plane rectangle.
// Throws EmptyCloud on empty input.
PointCloudError point_cloud_error(std::span<const FusedPoint> points,
                                  std::span<const PlaneSpec> planes);

}  // namespace mvs
