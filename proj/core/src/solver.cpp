#include "mvs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <omp.h>
#include <stdexcept>

#include "mvs/errors.hpp"
#include "mvs/rng.hpp"

namespace mvs {

namespace {
constexpr int kMaxViews = 64;  // source-view bitmask width
}

PatchMatchSolver::PatchMatchSolver(const Scene& scene, int ref_id,
                                   const SolverConfig& cfg)
    : scene_(&scene), ref_id_(ref_id), cfg_(cfg) {
  if (ref_id < 0 || ref_id >= int(scene.views.size()))
    throw std::invalid_argument("reference id out of range");
  if (scene.views.size() < 2)
    throw SceneTooSmall("need at least one source view besides the reference");
  ref_ = &scene.views[ref_id];
  for (int i = 0; i < int(scene.views.size()); ++i) {
    if (i == ref_id) continue;
    sources_.push_back(SourceView{&scene.views[i].gray, &scene.views[i].cam});
    pairwise_.push_back(make_pairwise_geometry(ref_->cam, scene.views[i].cam));
  }
  if (sources_.size() > kMaxViews)
    throw std::invalid_argument("at most 64 source views supported");
  regions_ = propagation_regions(cfg.scheme);

  state_.width = ref_->cam.width();
  state_.height = ref_->cam.height();
  const std::size_t n = std::size_t(state_.width) * state_.height;
  state_.depth.assign(n, 0.0);
  state_.normal.assign(n, Vec3(0, 0, -1));
  state_.best_cost.assign(n, kCostMax);
  state_.prev_selected.assign(n, 0);
  state_.prev_view.assign(n, std::int16_t(kNoView));
}

double PatchMatchSolver::aggregate_or_max(
    std::span<const double> row, std::span<const double> psi_mod) const {
  const auto v = aggregate_row(row, psi_mod);
  return v ? *v : kCostMax;
}

void PatchMatchSolver::initialize() {
  const int w = state_.width;
  const int h = state_.height;
  const int N = int(sources_.size());
  const int nthreads = cfg_.threads > 0 ? cfg_.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
  for (int y = 0; y < h; ++y) {
    std::vector<double> row(N);
    std::vector<double> uniform(N, 1.0);
    for (int x = 0; x < w; ++x) {
      const Pixel px{x, y};
      const std::size_t i = state_.index(x, y);
      PixelRng rng(cfg_.seed, x, y, 0, kRngInit);
      const PlaneHypothesis hyp = random_hypothesis(rng, ref_->cam, px);
      state_.depth[i] = hyp.depth;
      state_.normal[i] = hyp.normal;

      const RefWindow refwin = make_ref_window(ref_->gray, px, cfg_.window,
                                               cfg_.sigma_I, cfg_.sigma_x);
      compute_cost_row(refwin, ref_->cam, sources_, pairwise_, hyp, row.data());
      state_.best_cost[i] = aggregate_or_max(row, uniform);
      state_.prev_selected[i] = 0;
      state_.prev_view[i] = std::int16_t(kNoView);
    }
  }
}

void PatchMatchSolver::update_pixel(const Pixel& px, int t) {
  const std::size_t i = state_.index(px.x, px.y);
  const int N = int(sources_.size());
  const RefWindow refwin = make_ref_window(ref_->gray, px, cfg_.window,
                                           cfg_.sigma_I, cfg_.sigma_x);

  const PlaneHypothesis current{state_.depth[i], state_.normal[i]};
  double current_row[kMaxViews];
  compute_cost_row(refwin, ref_->cam, sources_, pairwise_, current,
                   current_row);

  const HypothesisFieldView field{state_.width, state_.height,
                                  state_.depth.data(), state_.normal.data(),
                                  state_.best_cost.data()};
  const std::vector<GatheredHypothesis> gathered =
      gather_hypotheses(field, ref_->cam, px, regions_);

  // Regions without an in-bounds winner contribute the current hypothesis, so
  // the matrix always has its 8 rows.
  std::array<PlaneHypothesis, 8> hyps;
  CostMatrix m;
  m.num_views = N;
  m.values.resize(std::size_t(8) * N);
  for (int slot = 0; slot < 8; ++slot) {
    double* row = m.values.data() + std::size_t(slot) * N;
    if (slot < int(gathered.size())) {
      hyps[slot] = gathered[slot].hyp;
      compute_cost_row(refwin, ref_->cam, sources_, pairwise_, hyps[slot],
                       row);
    } else {
      hyps[slot] = current;
      std::memcpy(row, current_row, sizeof(double) * N);
    }
  }

  // View selection; frozen-uniform mode bypasses it for instrumentation.
  std::vector<double> psi_mod;
  std::uint64_t selected_mask = 0;
  int v_t = kNoView;
  if (cfg_.uniform_weights) {
    psi_mod.assign(N, 1.0);
  } else {
    const std::vector<std::uint8_t> selected =
        classify_views(m, t, cfg_.viewsel);
    const std::vector<double> psi = view_importance(m, selected, cfg_.viewsel);
    v_t = most_important_view(psi);

    ViewSelectionState vs;
    vs.prev_most_important = state_.prev_view[i];
    vs.prev_selected.resize(N);
    for (int j = 0; j < N; ++j)
      vs.prev_selected[j] = (state_.prev_selected[i] >> j) & 1;
    psi_mod = modified_importance(psi, selected, vs, cfg_.viewsel);

    for (int j = 0; j < N; ++j)
      if (selected[j]) selected_mask |= std::uint64_t(1) << j;
  }

  double final_costs[9];
  for (int slot = 0; slot < 8; ++slot)
    final_costs[slot] = aggregate_or_max(m.row(slot), psi_mod);
  final_costs[8] = aggregate_or_max({current_row, std::size_t(N)}, psi_mod);

  const int best = select_best({final_costs, 9});
  if (best < 8) {
    state_.depth[i] = hyps[best].depth;
    state_.normal[i] = hyps[best].normal;
    state_.best_cost[i] = final_costs[best];
  } else {
    state_.best_cost[i] = final_costs[8];
  }

  refine_impl(px, t, psi_mod, refwin);

  state_.prev_selected[i] = selected_mask;
  state_.prev_view[i] = std::int16_t(v_t);
}

void PatchMatchSolver::refine(const Pixel& px, int t,
                              std::span<const double> psi_mod) {
  const RefWindow refwin = make_ref_window(ref_->gray, px, cfg_.window,
                                           cfg_.sigma_I, cfg_.sigma_x);
  refine_impl(px, t, psi_mod, refwin);
}

void PatchMatchSolver::refine_impl(const Pixel& px, int t,
                                   std::span<const double> psi_mod,
                                   const RefWindow& refwin) {
  const std::size_t i = state_.index(px.x, px.y);
  const CameraModel& cam = ref_->cam;

  double best_depth = state_.depth[i];
  Vec3 best_normal = state_.normal[i];
  double best_cost = state_.best_cost[i];
  const double d = best_depth;
  const Vec3 n = best_normal;

  // Depth interval: full camera range at t = 0, halved every iteration,
  // re-centered on the current depth.
  const double range = cam.depth_max() - cam.depth_min();
  const double half = range / std::exp2(double(t)) * 0.5;
  const double lo = std::max(cam.depth_min(), d - half);
  const double hi = std::min(cam.depth_max(), d + half);

  std::vector<PlaneHypothesis> candidates;
  candidates.reserve(8);
  candidates.push_back({(lo + d) * 0.5, n});
  candidates.push_back({(d + hi) * 0.5, n});

  if (t >= cfg_.refinement.bisection_iters) {
    PixelRng rng(cfg_.seed, px.x, px.y, t, kRngRefine);
    const double d_rand = rng.uniform(cam.depth_min(), cam.depth_max());
    const Vec3 n_rand = random_facing_normal(rng, cam.ray(px));
    const PlaneHypothesis pert =
        perturb_hypothesis(rng, cam, px, {d, n}, cfg_.refinement.depth_frac,
                           cfg_.refinement.angle_max);
    candidates.push_back({d_rand, n});
    candidates.push_back({d, n_rand});
    candidates.push_back({d_rand, n_rand});
    candidates.push_back({pert.depth, n});
    candidates.push_back({d, pert.normal});
    candidates.push_back({pert.depth, pert.normal});
  }

  double row[kMaxViews];
  for (const PlaneHypothesis& cand : candidates) {
    compute_cost_row(refwin, cam, sources_, pairwise_, cand, row);
    const double c =
        aggregate_or_max({row, std::size_t(sources_.size())}, psi_mod);
    if (c < best_cost) {  // ties keep the current hypothesis
      best_cost = c;
      best_depth = cand.depth;
      best_normal = cand.normal;
    }
  }
  state_.depth[i] = best_depth;
  state_.normal[i] = best_normal;
  state_.best_cost[i] = best_cost;
}

void PatchMatchSolver::half_iteration(CheckerColor color, int t) {
  const int w = state_.width;
  const int h = state_.height;
  const int nthreads = cfg_.threads > 0 ? cfg_.threads : omp_get_max_threads();

#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
  for (int y = 0; y < h; ++y) {
    const int red_start = (y % 2 == 0) ? 0 : 1;
    const int start =
        color == CheckerColor::Red ? red_start : 1 - red_start;
    for (int x = start; x < w; x += 2) update_pixel(Pixel{x, y}, t);
  }
}

DepthNormalMap PatchMatchSolver::snapshot() const {
  DepthNormalMap map;
  map.width = state_.width;
  map.height = state_.height;
  map.depth = state_.depth;
  map.normal = state_.normal;
  map.best_cost = state_.best_cost;
  map.valid.resize(map.depth.size());
  for (std::size_t i = 0; i < map.valid.size(); ++i)
    map.valid[i] = state_.best_cost[i] < kCostMax ? 1 : 0;
  return map;
}

DepthNormalMap median_filter_4x4(const DepthNormalMap& map) {
  DepthNormalMap out = map;
  std::array<double, 16> window;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      int count = 0;
      for (int dy = -1; dy <= 2; ++dy)
        for (int dx = -1; dx <= 2; ++dx) {
          const int sx = x + dx;
          const int sy = y + dy;
          if (!map.contains(sx, sy)) continue;
          const std::size_t idx = map.index(sx, sy);
          if (!map.valid[idx]) continue;
          window[count++] = map.depth[idx];
        }
      if (count == 0) continue;
      std::sort(window.begin(), window.begin() + count);
      out.depth[map.index(x, y)] = window[(count - 1) / 2];  // lower median
    }
  }
  return out;
}

DepthNormalMap estimate_depth_map(const Scene& scene, int ref_id,
                                  const SolverConfig& cfg,
                                  const IterationHook& hook) {
  PatchMatchSolver solver(scene, ref_id, cfg);
  solver.initialize();
  for (int t = 0; t < cfg.iterations; ++t) {
    solver.half_iteration(CheckerColor::Red, t);
    solver.half_iteration(CheckerColor::Black, t);
    if (hook) hook(t, solver.snapshot());
  }
  return median_filter_4x4(solver.snapshot());
}

}  // namespace mvs
