#include <cmath>
#include <functional>

#include "doctest.h"
#include "gsample/errors.hpp"
#include "gsample/greedy.hpp"
#include "test_util.hpp"

using namespace gsample;

namespace {

std::shared_ptr<const ProblemInstance> random_instance(int n, Rng& rng, bool correlated = false) {
  ProblemInstance::Options o;
  o.measurement = FilterSpec::tikhonov(0.4);
  o.regularizer = FilterSpec::tikhonov(0.3).dagger();
  o.mu = 0.1;
  o.sigma2 = 0.01;
  if (correlated) o.noise_cov = 0.01 * testutil::random_spd(n, rng);
  return ProblemInstance::create(testutil::random_graph(n, 0.3, rng), o);
}

// BMSE of a binary set from a dense inverse.
double bmse_oracle(const ProblemInstance& inst, const std::vector<int>& s) {
  const int n = inst.size();
  Vec d = Vec::Zero(n);
  for (int i : s) d(i) = 1.0;
  const Mat k = inst.h_m() * d.asDiagonal() * inst.noise_cov().inverse() * d.asDiagonal() * inst.h_m() +
                inst.mu() * inst.h_r();
  return k.inverse().trace();
}

void for_each_subset(int n, int q, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> s(q);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == q) return f(s);
    for (int i = start; i < n; ++i) {
      s[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

GreedyConfig budget_config(CostKind kind, int q, FastPath fp = FastPath::kOff) {
  GreedyConfig c;
  c.kind = kind;
  c.budget = q;
  c.fast_path = fp;
  return c;
}

}  // namespace

TEST_CASE("config validation") {
  Rng rng(51);
  const auto inst = random_instance(6, rng);
  GreedyConfig c;
  CHECK_THROWS_AS(greedy_select(inst, c), DomainError);
  c.budget = 2;
  c.threshold = 1.0;
  CHECK_THROWS_AS(greedy_select(inst, c), DomainError);
  CHECK_THROWS_AS(greedy_select(inst, budget_config(CostKind::kBmse, 2, FastPath::kEigPerturbation)), DomainError);
  CHECK_THROWS_AS(greedy_select(inst, budget_config(CostKind::kWcBmse, 2, FastPath::kExactRankOne)), DomainError);
  CHECK_THROWS_AS(greedy_select(inst, budget_config(CostKind::kBmse, 7)), DomainError);
  CHECK_THROWS_AS(greedy_select(inst, budget_config(CostKind::kADesign, 2)), DomainError);
  CHECK(parse_fast_path("exact-rank-one") == FastPath::kExactRankOne);
  CHECK_THROWS_AS(parse_fast_path("lazy"), DomainError);
}

TEST_CASE("q = 1 picks the best singleton") {
  Rng rng(52);
  for (int t = 0; t < 5; ++t) {
    const auto inst = random_instance(9, rng);
    int best = -1;
    double best_cost = 1e300;
    for (int i = 0; i < 9; ++i) {
      const double c = bmse_oracle(*inst, {i});
      if (c < best_cost) best_cost = c, best = i;
    }
    const GreedyResult r = greedy_select(inst, budget_config(CostKind::kBmse, 1));
    CHECK(r.selected == std::vector<int>{best});
    CHECK(testutil::rel(r.cost_trace[0], best_cost) < 1e-10);
  }
}

TEST_CASE("greedy gain is within 1 - 1/e of the exhaustive optimum") {
  Rng rng(53);
  for (int t = 0; t < 10; ++t) {
    const auto inst = random_instance(10, rng);
    const double empty = bmse_oracle(*inst, {});
    double best = 1e300;
    for_each_subset(10, 3, [&](const std::vector<int>& s) { best = std::min(best, bmse_oracle(*inst, s)); });
    const GreedyResult r = greedy_select(inst, budget_config(CostKind::kBmse, 3));
    CHECK(empty - r.cost_trace.back() >= (1.0 - std::exp(-1.0)) * (empty - best));
    CHECK(r.initial_cost == doctest::Approx(empty).epsilon(1e-10));
    for (std::size_t i = 1; i < r.cost_trace.size(); ++i) CHECK(r.cost_trace[i] <= r.cost_trace[i - 1]);
  }
}

TEST_CASE("threshold mode") {
  Rng rng(54);
  const auto inst = random_instance(8, rng);
  const double full = bmse_oracle(*inst, SamplingVector::all_indices(8));
  GreedyConfig c;
  c.kind = CostKind::kBmse;
  c.threshold = full;
  const GreedyResult r = greedy_select(inst, c);
  CHECK(r.cost_trace.back() <= full * (1 + 1e-12));
  CHECK(r.selected.size() <= 8);

  const double mid = 0.5 * (bmse_oracle(*inst, {}) + full);
  c.threshold = mid;
  const GreedyResult early = greedy_select(inst, c);
  CHECK(early.cost_trace.back() <= mid);
  CHECK(early.selected.size() < 8);
  // One node fewer misses the threshold.
  std::vector<int> prefix(early.selected.begin(), early.selected.end() - 1);
  CHECK(bmse_oracle(*inst, prefix) > mid);

  c.threshold = 0.5 * full;
  try {
    greedy_select(inst, c);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(testutil::rel(e.best_cost(), full) < 1e-10);
  }
}

TEST_CASE("exact rank-one path reproduces the naive sequence") {
  Rng rng(55);
  for (CostKind k : {CostKind::kBmse, CostKind::kBcrb, CostKind::kWcMse}) {
    const auto inst = random_instance(16, rng);
    const GreedyResult slow = greedy_select(inst, budget_config(k, 6));
    const GreedyResult fast = greedy_select(inst, budget_config(k, 6, FastPath::kExactRankOne));
    CHECK(slow.selected == fast.selected);
    for (std::size_t i = 0; i < slow.cost_trace.size(); ++i) {
      CHECK(testutil::rel(fast.cost_trace[i], slow.cost_trace[i]) < 1e-8);
    }
  }
}

TEST_CASE("naive evaluation count is q(N - (q-1)/2)") {
  Rng rng(56);
  const auto inst = random_instance(12, rng);
  const GreedyResult r = greedy_select(inst, budget_config(CostKind::kBmse, 5));
  CHECK(r.evaluations == 5 * 12 - 5 * 4 / 2);
  for (int i = 0; i < 5; ++i) CHECK(r.evaluations_per_step[i] == 12 - i);
}

TEST_CASE("thread count does not change the result") {
  Rng rng(57);
  const auto inst = random_instance(14, rng);
  GreedyConfig c = budget_config(CostKind::kWcBmse, 5);
  const GreedyResult one = greedy_select(inst, c);
  c.threads = 4;
  const GreedyResult four = greedy_select(inst, c);
  CHECK(one.selected == four.selected);
  CHECK(one.cost_trace == four.cost_trace);
}

TEST_CASE("non-diagonal R disables the fast path with a notice") {
  Rng rng(58);
  const auto inst = random_instance(8, rng, true);
  const GreedyResult r = greedy_select(inst, budget_config(CostKind::kBmse, 3, FastPath::kExactRankOne));
  CHECK(r.fast_path_used == FastPath::kOff);
  CHECK_FALSE(r.notices.empty());
  CHECK(r.selected == greedy_select(inst, budget_config(CostKind::kBmse, 3)).selected);
}

TEST_CASE("running inverse matches direct inversion") {
  Rng rng(59);
  const auto inst = random_instance(20, rng);
  RankOneTracker tr(inst, CostKind::kBmse);
  for (int a : testutil::random_subset(20, 10, rng)) tr.accept(a);
  const Mat direct = EstimatorState::build(inst, SamplingVector::binary(20, tr.selected(), 20)).k().inverse();
  CHECK((tr.k_inverse() - direct).norm() <= 1e-8 * direct.norm());
  CHECK(testutil::rel(tr.cost(), direct.trace()) < 1e-8);
}

TEST_CASE("greedy_step_fast agrees with the naive recomputation") {
  Rng rng(60);
  for (CostKind k : {CostKind::kBmse, CostKind::kBcrb, CostKind::kWcMse}) {
    const auto inst = random_instance(20, rng);
    const std::vector<int> s = testutil::random_subset(20, 5, rng);
    const EstimatorState st = EstimatorState::build(inst, SamplingVector::binary(20, s, 20));
    const CostFunction cf(k, inst);
    for (int a = 0; a < 20; ++a) {
      if (std::find(s.begin(), s.end(), a) != s.end()) continue;
      std::vector<int> s1 = s;
      s1.push_back(a);
      std::sort(s1.begin(), s1.end());
      const double naive = cf.value(SamplingVector::binary(20, s1, 20));
      CHECK(testutil::rel(greedy_step_fast(st, k, a), naive) <= 1e-9);
    }
  }
}

TEST_CASE("candidate with a vanishing measurement row leaves the cost unchanged") {
  Rng rng(62);
  const WeightedGraph g = testutil::random_graph(5, 0.4, rng);
  ProblemInstance::Options o;
  o.mu = 0.5;
  o.noise_cov = 0.01 * Mat::Identity(5, 5);
  o.noise_cov(3, 3) = 1e300;  // r_3 = R_33^{-1/2} h_M e_3 underflows to zero
  const auto inst = ProblemInstance::create(g, o);
  const EstimatorState st = EstimatorState::build(inst, SamplingVector::binary(5, {0}, 5));
  CHECK(greedy_step_fast(st, CostKind::kBmse, 3) == doctest::Approx(bmse(st)).epsilon(1e-12));
  CHECK(greedy_step_fast(st, CostKind::kBmse, 2) < bmse(st));
}

namespace {

struct PerturbationStats {
  double worst = 0.0;
  int agree = 0;
};

// First-order WC-BMSE against exact eigensolves over 100 random instances.
PerturbationStats perturbation_stats(double sigma2, double mu, std::uint64_t seed) {
  Rng rng(seed);
  PerturbationStats out;
  for (int t = 0; t < 100; ++t) {
    ProblemInstance::Options o;
    o.regularizer = FilterSpec::diffusion(0.2);
    o.mu = mu;
    o.sigma2 = sigma2;
    const auto inst = ProblemInstance::create(testutil::random_graph(12, 0.3, rng), o);
    const std::vector<int> s = testutil::random_subset(12, 4, rng);
    const EstimatorState st = EstimatorState::build(inst, SamplingVector::binary(12, s, 12));
    int arg_fast = -1, arg_exact = -1;
    double best_fast = 1e300, best_exact = 1e300;
    for (int a = 0; a < 12; ++a) {
      if (std::find(s.begin(), s.end(), a) != s.end()) continue;
      std::vector<int> s1 = s;
      s1.push_back(a);
      std::sort(s1.begin(), s1.end());
      const Mat k = EstimatorState::build(inst, SamplingVector::binary(12, s1, 12)).k();
      const double exact = 1.0 / Eigen::SelfAdjointEigenSolver<Mat>(k).eigenvalues()(0);
      const double fast = greedy_step_fast(st, CostKind::kWcBmse, a);
      out.worst = std::max(out.worst, testutil::rel(fast, exact));
      if (fast < best_fast) best_fast = fast, arg_fast = a;
      if (exact < best_exact) best_exact = exact, arg_exact = a;
    }
    if (arg_fast == arg_exact) ++out.agree;
  }
  return out;
}

}  // namespace

TEST_CASE("eigenvalue perturbation tracks the exact WC-BMSE when the update is small") {
  // ||r_a||^2 = 1/sigma^2 is well below the spectral gap of K = mu exp(-0.2 L) + ...
  const PerturbationStats small = perturbation_stats(100.0, 1.0, 61);
  MESSAGE("small update: worst relative error " << small.worst << ", argmin agreement " << small.agree << "/100");
  CHECK(small.worst <= 0.05);
  CHECK(small.agree >= 90);
}

TEST_CASE("eigenvalue perturbation degrades when the update dominates the gap") {
  const PerturbationStats large = perturbation_stats(0.01, 0.1, 61);
  MESSAGE("large update: worst relative error " << large.worst << ", argmin agreement " << large.agree << "/100");
  CHECK(large.worst > 0.5);
}
