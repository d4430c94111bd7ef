#include "mvs/viewsel.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>

namespace mvs {

double tau_mc(int t, const ViewSelParams& p) {
  return p.tau_mc_init * std::exp(-double(t) * double(t) / p.alpha);
}

std::vector<std::uint8_t> classify_views(const CostMatrix& m, int t,
                                         const ViewSelParams& p) {
  const double tau = tau_mc(t, p);
  std::vector<std::uint8_t> selected(m.num_views, 0);
  for (int j = 0; j < m.num_views; ++j) {
    int low = 0, high = 0;
    for (int i = 0; i < 8; ++i) {
      const double c = m.at(i, j);
      if (c < tau) ++low;
      if (c > p.tau_up) ++high;
    }
    selected[j] = (low > p.n1 && high < p.n2) ? 1 : 0;
  }
  return selected;
}

double confidence(double m, double beta) {
  return std::exp(-m * m / (2.0 * beta * beta));
}

std::vector<double> view_importance(const CostMatrix& m,
                                    std::span<const std::uint8_t> selected,
                                    const ViewSelParams& p) {
  assert(int(selected.size()) == m.num_views);
  std::vector<double> psi(m.num_views, 0.0);
  std::vector<int> picked;
  for (int j = 0; j < m.num_views; ++j) {
    if (!selected[j]) continue;
    double sum = 0.0;
    for (int i = 0; i < 8; ++i) sum += confidence(m.at(i, j), p.beta);
    psi[j] = sum / 8.0;
    picked.push_back(j);
  }
  if (int(picked.size()) > p.k) {
    // Keep the k largest; equal importances keep the lower view index.
    std::sort(picked.begin(), picked.end(), [&](int a, int b) {
      if (psi[a] != psi[b]) return psi[a] > psi[b];
      return a < b;
    });
    for (std::size_t r = p.k; r < picked.size(); ++r) psi[picked[r]] = 0.0;
  }
  return psi;
}

int most_important_view(std::span<const double> psi) {
  int best = kNoView;
  double best_psi = 0.0;
  for (int j = 0; j < int(psi.size()); ++j) {
    if (psi[j] > best_psi) {
      best = j;
      best_psi = psi[j];
    }
  }
  return best;
}

std::vector<double> modified_importance(std::span<const double> psi,
                                        std::span<const std::uint8_t> selected,
                                        const ViewSelectionState& state,
                                        const ViewSelParams& p) {
  assert(psi.size() == selected.size());
  const int prev = state.prev_most_important;
  const bool prev_was_selected =
      prev != kNoView && prev < int(state.prev_selected.size()) &&
      state.prev_selected[prev] != 0;

  std::vector<double> out(psi.size(), 0.0);
  for (int j = 0; j < int(psi.size()); ++j) {
    if (selected[j]) {
      const double eps = (j == prev) ? 2.0 : 1.0;
      out[j] = eps * psi[j];
    } else if (prev_was_selected &&
               (p.broadcast_unselected_fallback || j == prev)) {
      out[j] = 0.2;
    }
  }
  return out;
}

std::optional<double> aggregate_row(std::span<const double> row,
                                    std::span<const double> psi_mod) {
  assert(row.size() == psi_mod.size());
  double wsum = 0.0, acc = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    wsum += psi_mod[j];
    acc += psi_mod[j] * row[j];
  }
  if (wsum <= 0.0) return std::nullopt;
  return acc / wsum;
}

std::optional<std::array<double, 8>> aggregate_final(
    const CostMatrix& m, std::span<const double> psi_mod) {
  std::array<double, 8> out{};
  for (int i = 0; i < 8; ++i) {
    const auto v = aggregate_row(m.row(i), psi_mod);
    if (!v) return std::nullopt;
    out[i] = *v;
  }
  return out;
}

int select_best(std::span<const double> final_costs) {
  assert(final_costs.size() == 9);
  int best = 0;
  for (int i = 1; i < 8; ++i)
    if (final_costs[i] < final_costs[best]) best = i;
  if (final_costs[8] <= final_costs[best]) return 8;
  return best;
}

}  // namespace mvs
