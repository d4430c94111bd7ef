#include "mvs/cost.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace mvs {

namespace {
constexpr double kMinVariance = 1e-12;
}

double bilateral_weight(double delta_I, double delta_x, double sigma_I,
                        double sigma_x) {
  return std::exp(-delta_I / (2.0 * sigma_I * sigma_I) -
                  delta_x / (2.0 * sigma_x * sigma_x));
}

RefWindow make_ref_window(const GrayImage& ref, const Pixel& px,
                          const MatchWindow& win, double sigma_I,
                          double sigma_x) {
  RefWindow rw;
  rw.px = px;
  const int steps = win.radius / win.skip;
  const int n = 2 * steps + 1;
  rw.dx.reserve(n * n);
  rw.dy.reserve(n * n);
  rw.weight.reserve(n * n);
  rw.ref_value.reserve(n * n);

  const double center = ref.at(px.x, px.y);
  double wsum = 0.0, wv = 0.0, wvv = 0.0;
  for (int ky = -steps; ky <= steps; ++ky) {
    const int dy = ky * win.skip;
    for (int kx = -steps; kx <= steps; ++kx) {
      const int dx = kx * win.skip;
      const int sx = px.x + dx;
      const int sy = px.y + dy;
      if (!ref.contains(sx, sy)) continue;  // partial windows at the border
      const double value = ref.at(sx, sy);
      const double delta_I = std::abs(value - center) * 255.0;
      const double delta_x = std::sqrt(double(dx * dx + dy * dy));
      const double w = bilateral_weight(delta_I, delta_x, sigma_I, sigma_x);
      rw.dx.push_back(dx);
      rw.dy.push_back(dy);
      rw.weight.push_back(w);
      rw.ref_value.push_back(value);
      wsum += w;
      wv += w * value;
      wvv += w * value * value;
    }
  }
  rw.weight_sum = wsum;
  rw.ref_mean = wv / wsum;
  rw.ref_var = wvv / wsum - rw.ref_mean * rw.ref_mean;
  return rw;
}

double ncc_cost(const RefWindow& refwin, const GrayImage& src, const Mat3& H) {
  if (refwin.ref_var < kMinVariance) return kCostMax;

  const double cx = refwin.px.x + 0.5;
  const double cy = refwin.px.y + 0.5;
  const std::size_t n = refwin.weight.size();

  double ws = 0.0, ws2 = 0.0, wrs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ux = cx + refwin.dx[i];
    const double uy = cy + refwin.dy[i];
    const double hz = H(2, 0) * ux + H(2, 1) * uy + H(2, 2);
    const double hu = (H(0, 0) * ux + H(0, 1) * uy + H(0, 2)) / hz;
    const double hv = (H(1, 0) * ux + H(1, 1) * uy + H(1, 2)) / hz;
    if (!src.in_bilinear_bounds(hu, hv)) return kCostMax;
    const double s = src.sample_bilinear(hu, hv);
    const double w = refwin.weight[i];
    ws += w * s;
    ws2 += w * s * s;
    wrs += w * refwin.ref_value[i] * s;
  }
  const double src_mean = ws / refwin.weight_sum;
  const double src_var = ws2 / refwin.weight_sum - src_mean * src_mean;
  if (src_var < kMinVariance) return kCostMax;

  const double cross = wrs / refwin.weight_sum - refwin.ref_mean * src_mean;
  const double ncc = cross / std::sqrt(refwin.ref_var * src_var);
  const double cost = 1.0 - ncc;
  if (cost < 0.0) return 0.0;
  if (cost > kCostMax) return kCostMax;
  return cost;
}

double ncc_cost(const GrayImage& ref, const GrayImage& src, const Pixel& px,
                const Mat3& H, const MatchWindow& win, double sigma_I,
                double sigma_x) {
  return ncc_cost(make_ref_window(ref, px, win, sigma_I, sigma_x), src, H);
}

void compute_cost_row(const RefWindow& refwin, const CameraModel& ref_cam,
                      std::span<const SourceView> sources,
                      std::span<const PairwiseGeometry> pairwise,
                      const PlaneHypothesis& h, double* row_out) {
  assert(sources.size() == pairwise.size());
  Mat3 H;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    if (!try_plane_homography(pairwise[j], ref_cam, refwin.px, h, &H)) {
      row_out[j] = kCostMax;
      continue;
    }
    row_out[j] = ncc_cost(refwin, *sources[j].image, H);
  }
}

CostMatrix build_cost_matrix(const GrayImage& ref_img,
                             const CameraModel& ref_cam,
                             std::span<const SourceView> sources,
                             const Pixel& px,
                             std::span<const PlaneHypothesis> hyps,
                             const MatchWindow& win, double sigma_I,
                             double sigma_x) {
  if (hyps.size() != 8)
    throw std::invalid_argument("build_cost_matrix: exactly 8 hypotheses required");
  if (sources.empty())
    throw std::invalid_argument("build_cost_matrix: at least one source view");

  const RefWindow refwin = make_ref_window(ref_img, px, win, sigma_I, sigma_x);
  std::vector<PairwiseGeometry> pairwise;
  pairwise.reserve(sources.size());
  for (const SourceView& sv : sources)
    pairwise.push_back(make_pairwise_geometry(ref_cam, *sv.cam));

  CostMatrix m;
  m.num_views = int(sources.size());
  m.values.resize(8 * sources.size());
  for (int i = 0; i < 8; ++i)
    compute_cost_row(refwin, ref_cam, sources, pairwise, hyps[i],
                     m.values.data() + std::size_t(i) * sources.size());
  return m;
}

}  // namespace mvs
