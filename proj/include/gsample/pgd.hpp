#ifndef GSAMPLE_PGD_HPP
#define GSAMPLE_PGD_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gsample/costs.hpp"

namespace gsample {

/// Scales y by q/||y||^2 when ||y||^2 > q. With `euclidean` the factor is
/// sqrt(q)/||y||, the exact projection onto the ball.
Vec project_ball(const Vec& y, double q, bool euclidean = false);
/// Elementwise clamp to [0, 1].
Vec project_box(const Vec& y);
/// Nearest point of {0,1}^N with at most q ones: round at 1/2, then keep the
/// q largest values (smallest index first on ties).
Vec project_binary(const Vec& y, int q);
/// The q largest entries of d (smallest index first on ties), sorted.
std::vector<int> top_q(const Vec& d, int q);

struct PgdConfig {
  int budget = 1;
  double rho0 = 1.0;
  double beta = 0.5;
  int max_iterations = 200;   // M1
  int max_backtracks = 30;    // M2
  double eps = 1e-6;
  /// Initial point; default (q/N) 1 clipped into [0.01, 0.99].
  std::optional<Vec> d0;
  /// Ball-then-box passes per iteration.
  int alt_rounds = 1;
  bool euclidean_ball = false;
  /// Accept steps on the relaxed cost C(d) instead of the projected-cost test.
  bool relaxed_linesearch = false;
  /// Frequency band for A- and E-design.
  std::optional<BandlimitedSpec> band;
};

enum class PgdTermination { kConverged, kMaxIterations, kStalled, kZeroGradient };
std::string to_string(PgdTermination t);

struct PgdResult {
  Vec relaxed;
  /// project_binary(relaxed, q); may hold fewer than q ones.
  Vec binary;
  /// Budget-filling rounding: top_q(relaxed, q).
  std::vector<int> selected;
  /// Relaxed cost C(d_k) and projected cost C(P(d_k)), k = 0 (start) onward.
  std::vector<double> cost_trace;
  std::vector<double> projected_trace;
  /// Accepted step sizes.
  std::vector<double> step_sizes;
  /// Every accepted iterate, starting with d0.
  std::vector<Vec> iterates;
  int iterations = 0;
  PgdTermination termination = PgdTermination::kMaxIterations;
  std::string diagnostic;
  /// Cost actually descended (differs from the requested kind for baselines).
  CostKind optimized_kind = CostKind::kBmse;
  bool subgradient_seen = false;
};

/// Projected gradient descent on the relaxed problem. A step is accepted
/// when both C(P(d - rho g)) and C(P(Pi(d - rho g))) are <= C(P(d)), where P
/// is project_binary and Pi the ball/box projection (or, with
/// relaxed_linesearch, when C(Pi(d - rho g)) <= C(d)). Baselines are optimized
/// through a proposed cost on a surrogate instance.
PgdResult pgd_solve(std::shared_ptr<const ProblemInstance> instance, CostKind kind,
                    const PgdConfig& config);

}  // namespace gsample

#endif  // GSAMPLE_PGD_HPP
