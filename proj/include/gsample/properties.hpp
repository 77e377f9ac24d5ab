#ifndef GSAMPLE_PROPERTIES_HPP
#define GSAMPLE_PROPERTIES_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gsample/costs.hpp"

namespace gsample {

/// Central finite differences of a proposed cost at a relaxed d.
Vec finite_difference_gradient(CostKind kind, std::shared_ptr<const ProblemInstance> instance,
                               const Vec& d, double h = 1e-5);

/// ||analytic - fd||_inf / ||fd||_inf.
double gradient_relative_error(const Vec& analytic, const Vec& numeric);

struct GradcheckReport {
  CostKind kind = CostKind::kBmse;
  int points = 0;
  double max_relative_error = 0.0;
  /// At least one point hit a degenerate extreme eigenvalue.
  bool subgradient_seen = false;
};

/// Audits the analytic gradient at `points` random interior d in [0.05, 0.95]^N.
std::vector<GradcheckReport> gradcheck(std::shared_ptr<const ProblemInstance> instance,
                                       const std::vector<CostKind>& kinds, int points,
                                       std::uint64_t seed, double h = 1e-5);

struct PropertyResult {
  std::string name;
  bool passed = true;
  /// Assumptions of the property do not hold on this instance; reported only.
  bool advisory = false;
  std::string detail;
};

/// BMSE submodularity and monotonicity on random (A subset B, a) triples,
/// BMSE convexity in w = d^2, and the mu -> infinity agreement with A/E-design.
std::vector<PropertyResult> run_property_suites(std::shared_ptr<const ProblemInstance> instance,
                                                const BandlimitedSpec& band, std::uint64_t seed,
                                                int samples = 200);

}  // namespace gsample

#endif  // GSAMPLE_PROPERTIES_HPP
