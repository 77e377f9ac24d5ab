#ifndef GSAMPLE_GREEDY_HPP
#define GSAMPLE_GREEDY_HPP

#include <atomic>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsample/costs.hpp"

namespace gsample {

enum class FastPath { kOff, kExactRankOne, kEigPerturbation };

std::string to_string(FastPath path);
FastPath parse_fast_path(const std::string& name);

struct GreedyConfig {
  CostKind kind = CostKind::kBmse;
  /// Budget mode: select exactly this many nodes.
  std::optional<int> budget;
  /// Threshold mode: stop at the first set whose cost is <= threshold.
  std::optional<double> threshold;
  FastPath fast_path = FastPath::kOff;
  /// Frequency band, required by A- and E-design.
  std::optional<BandlimitedSpec> band;
  /// Workers for candidate evaluation; 0 means all cores. Capped by GSAMPLE_THREADS.
  int threads = 1;
};

struct GreedyResult {
  /// Selected nodes in order of selection.
  std::vector<int> selected;
  /// Cost after each accepted node.
  std::vector<double> cost_trace;
  /// Cost of the empty set.
  double initial_cost = 0.0;
  /// Candidate evaluations per step, and their total.
  std::vector<long> evaluations_per_step;
  long evaluations = 0;
  FastPath fast_path_used = FastPath::kOff;
  std::vector<std::string> notices;
};

/// Greedy forward selection. At each step the candidate with the smallest
/// cost is added; near-ties (relative 1e-12) go to the smallest index.
/// Throws InfeasibleError in threshold mode when even the full set misses
/// the threshold.
GreedyResult greedy_select(std::shared_ptr<const ProblemInstance> instance,
                           const GreedyConfig& config);

/// Running K^dagger under rank-one additions r_a r_a^T, r_a = sqrt(Rinv_aa) h_M e_a.
/// Requires diagonal R.
class RankOneTracker {
 public:
  RankOneTracker(std::shared_ptr<const ProblemInstance> instance, CostKind kind,
                 const std::vector<int>& initial = {});

  /// Exact cost after adding `a`. Falls back to a full recomputation when the
  /// rank-one update is not valid (r_a outside range(K), or breakdown).
  double candidate_cost(int a) const;
  /// Adds `a` to the set and updates K^dagger.
  void accept(int a);

  double cost() const { return cost_; }
  const Mat& k_inverse() const { return k_inv_; }
  const std::vector<int>& selected() const { return selected_; }
  /// Number of candidates that needed the naive fallback.
  long fallbacks() const { return fallbacks_.load(); }

 private:
  Vec column(int a) const;
  bool in_range(const Vec& r, const Vec& w) const;
  double naive_cost(int a) const;
  void refresh();

  std::shared_ptr<const ProblemInstance> instance_;
  CostKind kind_;
  std::vector<int> selected_;
  Mat k_, k_inv_;
  double trace_ = 0.0;    // tr(K^dagger)
  double trace_h_ = 0.0;  // tr(K^dagger^2 h_R)
  double cost_ = 0.0;
  mutable std::atomic<long> fallbacks_{0};
};

/// Candidate cost from an existing state without refactorizing K.
/// BMSE, BCRB and WC-MSE are exact (Sherman-Morrison); WC-BMSE returns the
/// first-order value 1 / (lambda_min + (r_a^T v_min)^2).
double greedy_step_fast(const EstimatorState& state, CostKind kind, int a);

}  // namespace gsample

#endif  // GSAMPLE_GREEDY_HPP
