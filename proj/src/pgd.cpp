#include "gsample/pgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsample/errors.hpp"

namespace gsample {

Vec project_ball(const Vec& y, double q, bool euclidean) {
  const double sq = y.squaredNorm();
  if (sq <= q || sq == 0.0) return y;
  const double factor = euclidean ? std::sqrt(q / sq) : q / sq;
  return factor * y;
}

Vec project_box(const Vec& y) { return y.cwiseMax(0.0).cwiseMin(1.0); }

Vec project_binary(const Vec& y, int q) {
  const int n = static_cast<int>(y.size());
  std::vector<int> ones;
  for (int i = 0; i < n; ++i) {
    if (y(i) >= 0.5) ones.push_back(i);
  }
  if (static_cast<int>(ones.size()) > q) {
    std::stable_sort(ones.begin(), ones.end(), [&](int a, int b) { return y(a) > y(b); });
    ones.resize(std::max(q, 0));
  }
  Vec out = Vec::Zero(n);
  for (int i : ones) out(i) = 1.0;
  return out;
}

std::string to_string(PgdTermination t) {
  switch (t) {
    case PgdTermination::kConverged: return "converged";
    case PgdTermination::kMaxIterations: return "max_iterations";
    case PgdTermination::kStalled: return "stalled";
    case PgdTermination::kZeroGradient: return "zero_gradient";
  }
  return "unknown";
}

namespace {

std::vector<int> support_of(const Vec& b) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < b.size(); ++i) {
    if (b(i) != 0.0) s.push_back(static_cast<int>(i));
  }
  return s;
}

Vec feasible(const Vec& y, double q, const PgdConfig& config) {
  Vec d = y;
  for (int r = 0; r < std::max(1, config.alt_rounds); ++r) {
    d = project_box(project_ball(d, q, config.euclidean_ball));
  }
  return d;
}

}  // namespace

std::vector<int> top_q(const Vec& d, int q) {
  std::vector<int> order(d.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d(a) > d(b); });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(q, 0))));
  std::sort(order.begin(), order.end());
  return order;
}

PgdResult pgd_solve(std::shared_ptr<const ProblemInstance> instance, CostKind kind,
                    const PgdConfig& config) {
  if (!instance) throw StructuralError("null problem instance");
  const int n = instance->size();
  const int q = config.budget;
  if (q < 1 || q > n) throw DomainError("budget must lie in [1, N]");
  if (!(config.beta > 0.0 && config.beta < 1.0)) throw DomainError("beta must lie in (0, 1)");
  if (!(config.rho0 > 0.0)) throw DomainError("rho0 must be positive");
  if (config.max_iterations < 1 || config.max_backtracks < 1) {
    throw DomainError("iteration limits must be positive");
  }

  PgdResult result;
  std::shared_ptr<const ProblemInstance> work = instance;
  result.optimized_kind = kind;
  if (!is_proposed(kind)) {
    work = surrogate_instance(kind, *instance, config.band);
    result.optimized_kind = surrogate_kind(kind);
  }
  const CostKind ckind = result.optimized_kind;
  const CostFunction cost_fn(ckind, work);

  Vec d;
  if (config.d0) {
    d = *config.d0;
    if (d.size() != n) throw StructuralError("d0 has the wrong length");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(d(i) > 0.0 && d(i) < 1.0)) throw DomainError("d0 must lie strictly inside (0, 1)");
    }
  } else {
    d = Vec::Constant(n, std::clamp(static_cast<double>(q) / n, 0.01, 0.99));
  }
  d = feasible(d, q, config);

  auto relaxed_cost = [&](const Vec& v) {
    return cost_fn.value(SamplingVector::relaxed(v, q));
  };
  auto projected_cost = [&](const Vec& v) {
    return cost_fn.value(SamplingVector::binary(n, support_of(project_binary(v, q)), n));
  };

  double pc = projected_cost(d);
  result.iterates.push_back(d);
  result.cost_trace.push_back(relaxed_cost(d));
  result.projected_trace.push_back(pc);

  for (int k = 1; k <= config.max_iterations; ++k) {
    result.iterations = k;
    const EstimatorState state = EstimatorState::build(work, SamplingVector::relaxed(d, q));
    const Gradient grad = cost_gradient(ckind, state);
    if (!grad.value.allFinite()) throw NumericalError("non-finite gradient at iteration " +
                                                      std::to_string(k));
    result.subgradient_seen = result.subgradient_seen || grad.subgradient;
    const double scale = std::max(1.0, std::abs(result.cost_trace.back()));
    if (grad.value.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
      result.termination = PgdTermination::kZeroGradient;
      break;
    }

    double rho = config.rho0;
    bool accepted = false;
    Vec next;
    double next_pc = pc;
    for (int t = 0; t < config.max_backtracks; ++t) {
      const Vec y = d - rho * grad.value;
      next = feasible(y, q, config);
      next_pc = projected_cost(next);
      const bool ok = config.relaxed_linesearch
                          ? relaxed_cost(next) <= result.cost_trace.back()
                          : projected_cost(y) <= pc && next_pc <= pc;
      if (ok) {
        accepted = true;
        break;
      }
      rho *= config.beta;
    }
    if (!accepted) {
      result.termination = PgdTermination::kStalled;
      result.diagnostic = "no descent step after " + std::to_string(config.max_backtracks) +
                          " backtracks at iteration " + std::to_string(k);
      break;
    }
    const double step = (next - d).norm();
    d = next;
    pc = next_pc;
    result.iterates.push_back(d);
    result.cost_trace.push_back(relaxed_cost(d));
    result.projected_trace.push_back(pc);
    result.step_sizes.push_back(rho);
    if (step < config.eps) {
      result.termination = PgdTermination::kConverged;
      break;
    }
  }

  result.relaxed = d;
  result.binary = project_binary(d, q);
  result.selected = top_q(d, q);
  return result;
}

}  // namespace gsample
