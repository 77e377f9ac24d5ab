#ifndef GSAMPLE_COSTS_HPP
#define GSAMPLE_COSTS_HPP

#include <memory>
#include <optional>
#include <string>

#include "gsample/estimator.hpp"

namespace gsample {

/// Sampling criteria. The first four are the MSE surrogates of the GFR-ML
/// estimator; the last three are the classical baselines. Every kind is
/// minimized (E- and LR-design are returned negated).
enum class CostKind { kBcrb, kWcMse, kBmse, kWcBmse, kADesign, kEDesign, kLrDesign };

std::string to_string(CostKind kind);
CostKind parse_cost_kind(const std::string& name);
bool is_proposed(CostKind kind);
bool requires_band(CostKind kind);

/// tr(K^{-1} K_M K^{-1}); the variance term of the exact MSE.
double bcrb(const EstimatorState& state);
/// bCRB + mu^2 sigma_max^2(K^{-1} h_R): worst bias over the unit ball around x0.
double wc_mse(const EstimatorState& state);
/// tr(K^{-1}).
double bmse(const EstimatorState& state);
/// lambda_max(K^dagger) = 1 / (smallest nonzero eigenvalue of K).
double wc_bmse(const EstimatorState& state);

/// V_{S,R}^T R_{S,S}^{-1} V_{S,R} for the support S of d.
Mat design_gram(const ProblemInstance& instance, const BandlimitedSpec& band,
                const SamplingVector& d);
/// tr(Gram^{-1}); ObservabilityError when |S| < |R| or the Gram is singular.
double a_design_cost(const ProblemInstance& instance, const BandlimitedSpec& band,
                     const SamplingVector& d);
/// -lambda_min(Gram). Returns 0 (worst) for rank-deficient designs.
double e_design_cost(const ProblemInstance& instance, const BandlimitedSpec& band,
                     const SamplingVector& d);
/// -lambda_min(D^T D + mu L).
double lr_design_cost(const ProblemInstance& instance, const SamplingVector& d);

/// Growth-phase form of the A/E criteria used by greedy selection. Only the
/// m = min(|S|, |R|) largest Gram eigenvalues count, so sets smaller than the
/// band are still ranked. Coincides with the strict cost once |S| >= |R|.
double design_selection_cost(CostKind kind, const ProblemInstance& instance,
                             const BandlimitedSpec& band, const SamplingVector& d);

struct Gradient {
  Vec value;
  /// The extreme eigenvalue was degenerate; `value` is one subgradient.
  bool subgradient = false;
};

/// Analytic gradient w.r.t. d of one of the four proposed costs:
/// -2 diag(R^{-1} D h_M K^{-1} Q K^{-1} h_M).
Gradient cost_gradient(CostKind kind, const EstimatorState& state);

/// Instance on which a proposed cost stands in for a baseline: A -> BMSE and
/// E -> WC-BMSE with h_M = I, h_R = projector onto the band complement,
/// mu = 1e4; LR -> WC-BMSE with h_M = I, h_R = L, R = I and the same mu.
std::shared_ptr<const ProblemInstance> surrogate_instance(CostKind kind,
                                                          const ProblemInstance& instance,
                                                          const std::optional<BandlimitedSpec>& band);
/// Proposed kind used in place of a baseline (identity for proposed kinds).
CostKind surrogate_kind(CostKind kind);

/// A sampling criterion bound to a problem instance.
class CostFunction {
 public:
  CostFunction(CostKind kind, std::shared_ptr<const ProblemInstance> instance,
               std::optional<BandlimitedSpec> band = std::nullopt);

  CostKind kind() const { return kind_; }
  const ProblemInstance& instance() const { return *instance_; }
  const std::shared_ptr<const ProblemInstance>& instance_ptr() const { return instance_; }
  const std::optional<BandlimitedSpec>& band() const { return band_; }

  /// The criterion value at d (baselines use their own formula).
  double value(const SamplingVector& d) const;
  double value(const EstimatorState& state) const;
  /// Value used to rank candidates during greedy growth.
  double selection_value(const SamplingVector& d) const;

 private:
  CostKind kind_;
  std::shared_ptr<const ProblemInstance> instance_;
  std::optional<BandlimitedSpec> band_;
};

/// Relative gap under which two extreme eigenvalues count as equal.
inline constexpr double kDegeneracyTolerance = 1e-9;

}  // namespace gsample

#endif  // GSAMPLE_COSTS_HPP
