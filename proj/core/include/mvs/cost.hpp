#pragma once

#include <span>
#include <vector>

#include "mvs/geometry.hpp"
#include "mvs/image.hpp"

namespace mvs {

// Sentinel for invalid / undefined matches.
inline constexpr double kCostMax = 2.0;

// Sampled offsets are {k*skip : |k*skip| <= radius} on both axes, always
// including 0 (the window center).
struct MatchWindow {
  int radius = 5;
  int skip = 2;
};

// exp(-delta_I / (2 sigma_I^2) - delta_x / (2 sigma_x^2)). delta_I is the
// absolute luma difference scaled to [0,255]; delta_x the Euclidean pixel
// distance from the window center. Both enter unsquared.
double bilateral_weight(double delta_I, double delta_x, double sigma_I,
                        double sigma_x);

// 8 x N photometric costs: row = propagated hypothesis, column = source view.
struct CostMatrix {
  int num_views = 0;
  std::vector<double> values;  // 8 * num_views, row-major

  double at(int hyp, int view) const {
    return values[std::size_t(hyp) * num_views + view];
  }
  double& at(int hyp, int view) {
    return values[std::size_t(hyp) * num_views + view];
  }
  std::span<const double> row(int hyp) const {
    return {values.data() + std::size_t(hyp) * num_views,
            std::size_t(num_views)};
  }
};

// Reference-side window data computed once per pixel and reused across all
// hypotheses and views: kept offsets (those inside the reference image),
// bilateral weights anchored at the center, and the weighted reference
// moments.
struct RefWindow {
  Pixel px;
  std::vector<int> dx, dy;
  std::vector<double> weight;
  std::vector<double> ref_value;
  double weight_sum = 0.0;
  double ref_mean = 0.0;
  double ref_var = 0.0;
};

RefWindow make_ref_window(const GrayImage& ref, const Pixel& px,
                          const MatchWindow& win, double sigma_I,
                          double sigma_x);

// Bilaterally weighted NCC cost 1 - cov(p,h)/sqrt(cov(p,p) cov(h,h)), clamped
// to [0,2]. Returns kCostMax if any warped sample leaves the source image or
// either weighted variance is below 1e-12.
double ncc_cost(const RefWindow& refwin, const GrayImage& src, const Mat3& H);

double ncc_cost(const GrayImage& ref, const GrayImage& src, const Pixel& px,
                const Mat3& H, const MatchWindow& win, double sigma_I,
                double sigma_x);

struct SourceView {
  const GrayImage* image = nullptr;
  const CameraModel* cam = nullptr;
};

// Cost of one hypothesis against every source view; degenerate planes map to
// kCostMax entries.
void compute_cost_row(const RefWindow& refwin, const CameraModel& ref_cam,
                      std::span<const SourceView> sources,
                      std::span<const PairwiseGeometry> pairwise,
                      const PlaneHypothesis& h, double* row_out);

// values[i][j] = ncc cost of hypothesis i against source view j.
// Requires exactly 8 hypotheses and at least one source.
CostMatrix build_cost_matrix(const GrayImage& ref_img,
                             const CameraModel& ref_cam,
                             std::span<const SourceView> sources,
                             const Pixel& px,
                             std::span<const PlaneHypothesis> hyps,
                             const MatchWindow& win, double sigma_I,
                             double sigma_x);

}  // namespace mvs
