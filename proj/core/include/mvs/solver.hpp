#pragma once

#include <functional>
#include <memory>

#include "mvs/cost.hpp"
#include "mvs/depth_map.hpp"
#include "mvs/propagation.hpp"
#include "mvs/scene_io.hpp"
#include "mvs/viewsel.hpp"

namespace mvs {

struct RefinementConfig {
  int bisection_iters = 3;   // iterations with bisection-only refinement
  double depth_frac = 0.05;  // perturbation half-range, relative
  double angle_max = 0.18;   // normal perturbation bound, radians
};

struct SolverConfig {
  int iterations = 6;
  ViewSelParams viewsel;
  MatchWindow window;
  double sigma_I = 3.0;
  double sigma_x = 30.0;
  RefinementConfig refinement;
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  PropagationScheme scheme = PropagationScheme::Asymmetric;
  // Freezes psi_mod to uniform weights over all views; instrumentation only.
  bool uniform_weights = false;
};

// Per-pixel solver state for one reference image.
struct SolverState {
  int width = 0;
  int height = 0;
  std::vector<double> depth;
  std::vector<Vec3> normal;
  std::vector<double> best_cost;
  std::vector<std::uint64_t> prev_selected;  // S_{t-1} bitmask per pixel
  std::vector<std::int16_t> prev_view;       // v_{t-1}, kNoView if none

  std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
};

// Called after every completed full iteration with a snapshot of the state.
using IterationHook =
    std::function<void(int t, const DepthNormalMap& snapshot)>;

class PatchMatchSolver {
 public:
  // Throws SceneTooSmall when the scene has fewer than 2 views.
  PatchMatchSolver(const Scene& scene, int ref_id, const SolverConfig& cfg);

  // Random hypotheses everywhere; best_cost is each pixel's own cost row
  // aggregated with uniform weights across all source views.
  void initialize();

  // Updates every pixel of `color`: gather -> cost matrix -> view selection
  // -> aggregation -> adopt -> refine. Pixels of the other color are
  // untouched.
  void half_iteration(CheckerColor color, int t);

  // Refinement step for a single pixel under fixed view weights: bisection
  // for t < bisection_iters, bisection plus random/perturbed candidates
  // afterwards. Never increases the pixel's aggregated cost.
  void refine(const Pixel& px, int t, std::span<const double> psi_mod);

  DepthNormalMap snapshot() const;

  const SolverState& state() const { return state_; }
  SolverState& state() { return state_; }
  const SolverConfig& config() const { return cfg_; }
  int num_views() const { return int(sources_.size()); }

  // One full per-pixel update; exposed so the update rule is testable in
  // isolation. Not thread-safe across calls for the same pixel.
  void update_pixel(const Pixel& px, int t);

 private:
  void refine_impl(const Pixel& px, int t, std::span<const double> psi_mod,
                   const RefWindow& refwin);
  double aggregate_or_max(std::span<const double> row,
                          std::span<const double> psi_mod) const;

  const Scene* scene_;
  int ref_id_;
  SolverConfig cfg_;
  const SceneView* ref_;
  std::vector<SourceView> sources_;
  std::vector<PairwiseGeometry> pairwise_;
  std::array<RegionSpec, 8> regions_;
  SolverState state_;
};

// Median of the 16 depths at offsets {-1,0,1,2}^2 (lower median); invalid or
// out-of-bounds neighbors are excluded. Normals and validity are untouched.
DepthNormalMap median_filter_4x4(const DepthNormalMap& map);

// initialize -> iterations x (red, black) -> median filter. valid = best_cost
// < kCostMax. Deterministic for a fixed seed regardless of thread count.
DepthNormalMap estimate_depth_map(const Scene& scene, int ref_id,
                                  const SolverConfig& cfg,
                                  const IterationHook& hook = nullptr);

}  // namespace mvs
