#include "gsample/greedy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsample/errors.hpp"
#include "gsample/parallel.hpp"

namespace gsample {

std::string to_string(FastPath path) {
  switch (path) {
    case FastPath::kOff: return "off";
    case FastPath::kExactRankOne: return "exact-rank-one";
    case FastPath::kEigPerturbation: return "eig-perturbation";
  }
  return "unknown";
}

FastPath parse_fast_path(const std::string& name) {
  for (FastPath p : {FastPath::kOff, FastPath::kExactRankOne, FastPath::kEigPerturbation}) {
    if (to_string(p) == name) return p;
  }
  throw DomainError("unknown fast path '" + name + "'");
}

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kBreakdownTolerance = 1e-12;

bool has_rank_one_form(CostKind kind) {
  return kind == CostKind::kBmse || kind == CostKind::kBcrb || kind == CostKind::kWcMse;
}

double sanitize(double c) { return std::isnan(c) ? std::numeric_limits<double>::infinity() : c; }

// Smallest cost, near-ties to the first (smallest) candidate.
std::size_t pick_best(const std::vector<double>& costs) {
  double best = std::numeric_limits<double>::infinity();
  for (double c : costs) best = std::min(best, c);
  const double slack = std::isfinite(best) ? kTieTolerance * std::abs(best) : 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (costs[i] <= best + slack) return i;
  }
  return 0;
}

SamplingVector indicator(int n, const std::vector<int>& selected) {
  return SamplingVector::binary(n, selected, n);
}

double top_eigenvalue(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

// Cost from a running inverse A and the rank-one quantities of one candidate.
double rank_one_cost(CostKind kind, const ProblemInstance& inst, const Mat& a_inv, double trace,
                     double trace_h, const Vec& w, double c) {
  const double bmse_new = trace - c * w.squaredNorm();
  if (kind == CostKind::kBmse) return bmse_new;
  const double mu = inst.mu();
  const Vec z = a_inv * w;
  const Vec hw = inst.h_r() * w;
  const double trace_h_new = trace_h - 2.0 * c * hw.dot(z) + c * c * w.squaredNorm() * w.dot(hw);
  const double bcrb_new = bmse_new - mu * trace_h_new;
  if (kind == CostKind::kBcrb || mu == 0.0) return bcrb_new;
  const Mat k_inv_new = a_inv - c * w * w.transpose();
  const Mat m = k_inv_new * inst.h_r();
  Mat g = m.transpose() * m;
  g = 0.5 * (g + g.transpose());
  return bcrb_new + mu * mu * top_eigenvalue(g);
}

}  // namespace

// ---------------------------------------------------------------------------

RankOneTracker::RankOneTracker(std::shared_ptr<const ProblemInstance> instance, CostKind kind,
                               const std::vector<int>& initial)
    : instance_(std::move(instance)), kind_(kind), selected_(initial) {
  if (!instance_) throw StructuralError("null problem instance");
  if (!has_rank_one_form(kind_)) {
    throw DomainError("no rank-one update for cost " + to_string(kind_));
  }
  if (!instance_->diagonal_noise()) {
    throw DomainError("rank-one updates require a diagonal noise covariance");
  }
  refresh();
}

void RankOneTracker::refresh() {
  const EstimatorState state =
      EstimatorState::build(instance_, indicator(instance_->size(), selected_));
  k_ = state.k();
  k_inv_ = state.k_inverse();
  trace_ = k_inv_.trace();
  trace_h_ = (k_inv_ * k_inv_ * instance_->h_r()).trace();
  CostFunction cf(kind_, instance_);
  cost_ = cf.value(state);
}

Vec RankOneTracker::column(int a) const {
  return std::sqrt(instance_->noise_precision()(a, a)) * instance_->h_m().col(a);
}

bool RankOneTracker::in_range(const Vec& r, const Vec& w) const {
  const double rn = r.norm();
  if (rn == 0.0) return true;
  return (k_ * w - r).norm() <= 1e-8 * rn;
}

double RankOneTracker::naive_cost(int a) const {
  std::vector<int> s = selected_;
  s.push_back(a);
  ++fallbacks_;
  return CostFunction(kind_, instance_).value(indicator(instance_->size(), s));
}

double RankOneTracker::candidate_cost(int a) const {
  if (std::find(selected_.begin(), selected_.end(), a) != selected_.end()) {
    throw DomainError("candidate already selected");
  }
  const Vec r = column(a);
  const Vec w = k_inv_ * r;
  const double denom = 1.0 + r.dot(w);
  if (!in_range(r, w) || denom <= kBreakdownTolerance) return naive_cost(a);
  return rank_one_cost(kind_, *instance_, k_inv_, trace_, trace_h_, w, 1.0 / denom);
}

void RankOneTracker::accept(int a) {
  const Vec r = column(a);
  const Vec w = k_inv_ * r;
  const double denom = 1.0 + r.dot(w);
  const bool valid = in_range(r, w) && denom > kBreakdownTolerance;
  selected_.push_back(a);
  if (!valid) {
    refresh();
    return;
  }
  const double c = 1.0 / denom;
  cost_ = rank_one_cost(kind_, *instance_, k_inv_, trace_, trace_h_, w, c);
  k_ += r * r.transpose();
  k_inv_ -= c * w * w.transpose();
  k_inv_ = 0.5 * (k_inv_ + k_inv_.transpose());
  trace_ = k_inv_.trace();
  trace_h_ = (k_inv_ * k_inv_ * instance_->h_r()).trace();
}

// ---------------------------------------------------------------------------

double greedy_step_fast(const EstimatorState& state, CostKind kind, int a) {
  const ProblemInstance& inst = state.instance();
  if (!inst.diagonal_noise()) throw DomainError("fast greedy step requires diagonal R");
  if (a < 0 || a >= inst.size()) throw StructuralError("candidate index out of range");
  const Vec r = std::sqrt(inst.noise_precision()(a, a)) * inst.h_m().col(a);
  if (kind == CostKind::kWcBmse) {
    const Vec& ev = state.k_eigenvalues();
    int idx = 0;
    while (idx < ev.size() && !(ev(idx) > state.zero_threshold())) ++idx;
    if (idx == ev.size()) throw RankError("K(d) has no nonzero eigenvalue");
    const double proj = r.dot(state.k_eigenvectors().col(idx));
    return 1.0 / (ev(idx) + proj * proj);
  }
  if (!has_rank_one_form(kind)) throw DomainError("no fast step for cost " + to_string(kind));
  const Mat& a_inv = state.k_inverse();
  const Vec w = a_inv * r;
  const double denom = 1.0 + r.dot(w);
  if (denom <= kBreakdownTolerance) throw NumericalError("rank-one update breakdown");
  const double trace = a_inv.trace();
  const double trace_h = (a_inv * a_inv * inst.h_r()).trace();
  return rank_one_cost(kind, inst, a_inv, trace, trace_h, w, 1.0 / denom);
}

// ---------------------------------------------------------------------------

GreedyResult greedy_select(std::shared_ptr<const ProblemInstance> instance,
                           const GreedyConfig& config) {
  if (!instance) throw StructuralError("null problem instance");
  const int n = instance->size();
  if (config.budget.has_value() == config.threshold.has_value()) {
    throw DomainError("exactly one of budget and threshold must be set");
  }
  if (config.budget && (*config.budget < 1 || *config.budget > n)) {
    throw DomainError("budget must lie in [1, N]");
  }
  if (config.fast_path == FastPath::kEigPerturbation && config.kind != CostKind::kWcBmse) {
    throw DomainError("eig-perturbation fast path is only valid for wc_bmse");
  }
  if (config.fast_path == FastPath::kExactRankOne && !has_rank_one_form(config.kind)) {
    throw DomainError("exact-rank-one fast path is only valid for bmse, bcrb and wc_mse");
  }

  GreedyResult result;
  result.fast_path_used = config.fast_path;
  if (config.fast_path != FastPath::kOff && !instance->diagonal_noise()) {
    result.notices.push_back("non-diagonal noise covariance: fast path disabled");
    result.fast_path_used = FastPath::kOff;
  }
  const int threads = worker_count(config.threads);
  const CostFunction cost_fn(config.kind, instance, config.band);

  std::vector<int> selected;
  std::optional<RankOneTracker> tracker;
  if (result.fast_path_used == FastPath::kExactRankOne) {
    tracker.emplace(instance, config.kind);
    result.initial_cost = tracker->cost();
  } else {
    result.initial_cost = cost_fn.selection_value(indicator(n, selected));
  }

  double current = result.initial_cost;
  const int target = config.budget ? *config.budget : n;
  auto done = [&] {
    if (static_cast<int>(selected.size()) >= target) return true;
    return config.threshold.has_value() && current <= *config.threshold;
  };

  std::vector<char> taken(n, 0);
  while (!done()) {
    std::vector<int> candidates;
    for (int i = 0; i < n; ++i) {
      if (!taken[i]) candidates.push_back(i);
    }
    const int m = static_cast<int>(candidates.size());
    std::vector<double> costs(m);

    std::optional<EstimatorState> state;
    if (result.fast_path_used == FastPath::kEigPerturbation) {
      state.emplace(EstimatorState::build(instance, indicator(n, selected)));
    }
    parallel_for(m, threads, [&](int j) {
      const int a = candidates[j];
      double c;
      switch (result.fast_path_used) {
        case FastPath::kExactRankOne:
          c = tracker->candidate_cost(a);
          break;
        case FastPath::kEigPerturbation:
          c = greedy_step_fast(*state, config.kind, a);
          break;
        default: {
          std::vector<int> s = selected;
          s.push_back(a);
          c = cost_fn.selection_value(indicator(n, s));
        }
      }
      costs[j] = sanitize(c);
    });

    const int chosen = candidates[pick_best(costs)];
    taken[chosen] = 1;
    selected.push_back(chosen);
    if (tracker) {
      tracker->accept(chosen);
      current = tracker->cost();
    } else if (result.fast_path_used == FastPath::kEigPerturbation) {
      current = cost_fn.value(indicator(n, selected));
    } else {
      current = costs[pick_best(costs)];
    }
    result.selected.push_back(chosen);
    result.cost_trace.push_back(current);
    result.evaluations_per_step.push_back(m);
    result.evaluations += m;
  }

  if (tracker && tracker->fallbacks() > 0) {
    result.notices.push_back(std::to_string(tracker->fallbacks()) +
                             " candidate(s) fell back to full recomputation");
  }
  if (config.threshold && current > *config.threshold) {
    double best = result.initial_cost;
    for (double c : result.cost_trace) best = std::min(best, c);
    throw InfeasibleError("threshold " + std::to_string(*config.threshold) +
                              " not reached even with every node sampled",
                          best);
  }
  return result;
}

}  // namespace gsample
