#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mvs/cost.hpp"

namespace mvs {

inline constexpr int kNoView = -1;

struct ViewSelParams {
  double tau_mc_init = 0.8;  // initial matching-cost threshold
  double alpha = 90.0;       // threshold decay
  double beta = 0.3;         // confidence bandwidth
  int n1 = 2;                // required count of low costs (strict >)
  int n2 = 3;                // allowed count of high costs (strict <)
  double tau_up = 1.2;       // high-cost threshold
  int k = 4;                 // max views kept after importance truncation
  // Alternative reading of the unselected-view fallback: give every
  // unselected view the 0.2 weight instead of only the previous most
  // important one.
  bool broadcast_unselected_fallback = false;
};

// Per-pixel selection state carried across iterations.
struct ViewSelectionState {
  std::vector<std::uint8_t> selected;       // S_t
  std::vector<double> weights;              // psi_mod
  int most_important = kNoView;             // v_t
  std::vector<std::uint8_t> prev_selected;  // S_{t-1}
  int prev_most_important = kNoView;        // v_{t-1}
};

// tau_mc_init * exp(-t^2 / alpha); strictly decreasing in t.
double tau_mc(int t, const ViewSelParams& p);

// View j is good iff strictly more than n1 of its 8 costs are below tau_mc(t)
// and strictly fewer than n2 are above tau_up.
std::vector<std::uint8_t> classify_views(const CostMatrix& m, int t,
                                         const ViewSelParams& p);

// exp(-m^2 / (2 beta^2)), in (0,1].
double confidence(double m, double beta);

// psi(j) = mean confidence of column j for selected views, 0 otherwise; only
// the k largest survive (ties keep the lower view index).
std::vector<double> view_importance(const CostMatrix& m,
                                    std::span<const std::uint8_t> selected,
                                    const ViewSelParams& p);

// Index of the maximal importance (ties to the lowest index), kNoView if all
// weights are zero.
int most_important_view(std::span<const double> psi);

// Selected views keep psi, doubled for the previous most important view when
// it is selected again. An unselected previous most-important view falls back
// to weight 0.2 if it was selected last iteration. No history (t = 0) means
// no boost and no fallback.
std::vector<double> modified_importance(std::span<const double> psi,
                                        std::span<const std::uint8_t> selected,
                                        const ViewSelectionState& state,
                                        const ViewSelParams& p);

// Weighted mean of one cost row; nullopt when all weights are zero (caller
// substitutes kCostMax).
std::optional<double> aggregate_row(std::span<const double> row,
                                    std::span<const double> psi_mod);

// m_final(i) for all 8 hypotheses; nullopt when all weights are zero.
std::optional<std::array<double, 8>> aggregate_final(
    const CostMatrix& m, std::span<const double> psi_mod);

// Argmin over 8 propagated costs plus the current hypothesis in slot 8.
// Among propagated hypotheses ties go to the lowest index; the current
// hypothesis wins whenever it is no worse than every propagated one.
int select_best(std::span<const double> final_costs);

}  // namespace mvs
