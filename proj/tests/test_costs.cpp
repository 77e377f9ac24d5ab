#include <cmath>

#include "doctest.h"
#include "gsample/costs.hpp"
#include "gsample/errors.hpp"
#include "test_util.hpp"

using namespace gsample;

namespace {

const CostKind kProposed[] = {CostKind::kBcrb, CostKind::kWcMse, CostKind::kBmse, CostKind::kWcBmse};

std::shared_ptr<const ProblemInstance> random_instance(int n, Rng& rng, bool correlated = false,
                                                       double mu = 0.2) {
  ProblemInstance::Options o;
  o.measurement = FilterSpec::tikhonov(0.3);
  o.regularizer = FilterSpec::laplacian_power(1);
  o.mu = mu;
  o.sigma2 = 0.05;
  if (correlated) o.noise_cov = 0.05 * testutil::random_spd(n, rng);
  return ProblemInstance::create(testutil::random_graph(n, 0.3, rng), o);
}

// Costs evaluated from first principles with dense inverses.
double oracle_cost(CostKind kind, const ProblemInstance& inst, const Vec& d) {
  const Mat dd = d.asDiagonal();
  const Mat km = inst.h_m() * dd * inst.noise_cov().inverse() * dd * inst.h_m();
  const Mat k = km + inst.mu() * inst.h_r();
  const Mat ki = k.inverse();
  switch (kind) {
    case CostKind::kBmse: return ki.trace();
    case CostKind::kBcrb: return (ki * km * ki).trace();
    case CostKind::kWcMse: {
      const Mat b = ki * inst.h_r();
      return (ki * km * ki).trace() + inst.mu() * inst.mu() * testutil::power_iteration(b.transpose() * b);
    }
    case CostKind::kWcBmse: return testutil::power_iteration(ki);
    default: return 0.0;
  }
}

Vec fd_gradient(CostKind kind, const ProblemInstance& inst, const Vec& d, double h) {
  Vec g(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    Vec p = d, m = d;
    p(i) += h;
    m(i) -= h;
    g(i) = (oracle_cost(kind, inst, p) - oracle_cost(kind, inst, m)) / (2 * h);
  }
  return g;
}

double value(CostKind kind, const std::shared_ptr<const ProblemInstance>& inst, const Vec& d) {
  return CostFunction(kind, inst).value(SamplingVector::relaxed(d, inst->size()));
}

}  // namespace

TEST_CASE("proposed costs match dense first-principles oracles") {
  Rng rng(31);
  for (bool corr : {false, true}) {
    for (int t = 0; t < 4; ++t) {
      const auto inst = random_instance(7, rng, corr);
      const Vec d = testutil::random_interior(7, rng);
      for (CostKind k : kProposed) {
        CHECK(testutil::rel(value(k, inst, d), oracle_cost(k, *inst, d)) < 1e-8);
      }
    }
  }
}

TEST_CASE("trivial cost values") {
  Rng rng(32);
  const WeightedGraph g = testutil::random_graph(3, 0.5, rng);
  ProblemInstance::Options o;
  o.mu = 0.1;
  const auto inst = ProblemInstance::create(g, o);
  const EstimatorState empty = EstimatorState::build(inst, SamplingVector::empty(3));
  CHECK(bmse(empty) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(bcrb(empty) == 0.0);
  CHECK(wc_mse(empty) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(wc_bmse(empty) == doctest::Approx(10.0).epsilon(1e-12));
  const Gradient g0 = cost_gradient(CostKind::kWcBmse, empty);
  CHECK(g0.subgradient);

  ProblemInstance::Options flat;
  flat.mu = 0.0;
  flat.sigma2 = 1.0;
  const auto unit = ProblemInstance::create(testutil::random_graph(5, 0.4, rng), flat);
  const EstimatorState full = EstimatorState::build(unit, SamplingVector::full(5));
  const Gradient gb = cost_gradient(CostKind::kBmse, full);
  CHECK((gb.value + 2.0 * Vec::Ones(5)).norm() < 1e-12);
  CHECK(bcrb(full) == doctest::Approx(wc_mse(full)).epsilon(1e-12));
}

TEST_CASE("all costs at d = 1, mu = 0 equal tr((h_M R^-1 h_M)^dagger) for the trace costs") {
  Rng rng(33);
  ProblemInstance::Options o;
  o.mu = 0.0;
  o.sigma2 = 0.04;
  const auto inst = ProblemInstance::create(testutil::random_graph(6, 0.4, rng), o);
  const EstimatorState st = EstimatorState::build(inst, SamplingVector::full(6));
  CHECK(bmse(st) == doctest::Approx(6 * 0.04).epsilon(1e-12));
  CHECK(bcrb(st) == doctest::Approx(6 * 0.04).epsilon(1e-12));
  CHECK(wc_mse(st) == doctest::Approx(6 * 0.04).epsilon(1e-12));
  // The spectral-norm cost is the largest eigenvalue of sigma^2 I, not the trace.
  CHECK(wc_bmse(st) == doctest::Approx(0.04).epsilon(1e-12));
}

TEST_CASE("gradients match central finite differences") {
  Rng rng(34);
  for (bool corr : {false, true}) {
    for (int t = 0; t < 5; ++t) {
      const auto inst = random_instance(8, rng, corr);
      const Vec d = testutil::random_interior(8, rng);
      const EstimatorState st = EstimatorState::build(inst, SamplingVector::relaxed(d, 8));
      for (CostKind k : kProposed) {
        const Vec a = cost_gradient(k, st).value;
        const Vec f = fd_gradient(k, *inst, d, 1e-5);
        CHECK((a - f).cwiseAbs().maxCoeff() <= 1e-5 * f.cwiseAbs().maxCoeff());
      }
    }
  }
}

TEST_CASE("gradient vanishes on unsampled coordinates with R = sigma^2 I") {
  Rng rng(35);
  const auto inst = random_instance(6, rng);
  Vec d = testutil::random_interior(6, rng);
  d(2) = 0.0;
  const EstimatorState st = EstimatorState::build(inst, SamplingVector::relaxed(d, 6));
  for (CostKind k : kProposed) CHECK(cost_gradient(k, st).value(2) == 0.0);
  CHECK_THROWS_AS(cost_gradient(CostKind::kADesign, st), DomainError);
}

TEST_CASE("wc_mse is the worst unit-ball MSE and orderings hold") {
  Rng rng(36);
  const auto inst = random_instance(6, rng);
  const Vec d = testutil::random_interior(6, rng);
  const EstimatorState st = EstimatorState::build(inst, SamplingVector::relaxed(d, 6));
  std::normal_distribution<double> z(0.0, 1.0);
  double best = 0.0;
  for (int t = 0; t < 10000; ++t) {
    Vec u(6);
    for (int i = 0; i < 6; ++i) u(i) = z(rng);
    best = std::max(best, analytic_mse(st, inst->x0() + u / u.norm()));
  }
  CHECK(best <= wc_mse(st) * (1 + 1e-12));
  CHECK(best >= 0.98 * wc_mse(st));
  CHECK(wc_bmse(st) <= bmse(st));
  CHECK(bcrb(st) <= wc_mse(st));
  CHECK(bmse(st) == doctest::Approx(bcrb(st) + inst->mu() * (st.k_inverse() * st.k_inverse() * inst->h_r()).trace())
                        .epsilon(1e-10));
}

TEST_CASE("design costs") {
  Rng rng(37);
  const WeightedGraph g = testutil::random_graph(8, 0.4, rng);
  ProblemInstance::Options o;
  o.sigma2 = 1.0;
  o.mu = 0.0;
  const auto inst = ProblemInstance::create(g, o);
  const BandlimitedSpec band = BandlimitedSpec::low(8, 3);
  const SamplingVector full = SamplingVector::full(8);
  CHECK(a_design_cost(*inst, band, full) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(e_design_cost(*inst, band, full) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lr_design_cost(*inst, full) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(lr_design_cost(*inst, SamplingVector::empty(8)) == 0.0);
  const SamplingVector two = SamplingVector::binary(8, {0, 5}, 8);
  CHECK_THROWS_AS(a_design_cost(*inst, band, two), ObservabilityError);
  CHECK(e_design_cost(*inst, band, two) == 0.0);
  // Growth form ranks small sets and coincides with the strict cost once |S| >= |R|.
  CHECK(std::isfinite(design_selection_cost(CostKind::kADesign, *inst, band, two)));
  CHECK(design_selection_cost(CostKind::kEDesign, *inst, band, two) < 0.0);
  const SamplingVector four = SamplingVector::binary(8, {0, 2, 5, 7}, 8);
  CHECK(design_selection_cost(CostKind::kADesign, *inst, band, four) ==
        doctest::Approx(a_design_cost(*inst, band, four)));
  CHECK(design_selection_cost(CostKind::kEDesign, *inst, band, four) ==
        doctest::Approx(e_design_cost(*inst, band, four)));
  CHECK_THROWS_AS(CostFunction(CostKind::kADesign, inst), DomainError);
}

TEST_CASE("large-mu regime: proposed costs coincide with A/E-design") {
  Rng rng(38);
  const int n = 16;
  const WeightedGraph g = testutil::random_graph(n, 0.3, rng);
  const SpectralDecomposition s = spectral_decompose(build_laplacian(g));
  const BandlimitedSpec band = BandlimitedSpec::low(n, 8);
  ProblemInstance::Options o;
  o.regularizer = FilterSpec::ideal_projector(band.complement());
  o.mu = 1e8;
  const auto inst = ProblemInstance::create(s, o);
  int checked = 0;
  for (int t = 0; t < 50 && checked < 5; ++t) {
    const SamplingVector d = SamplingVector::binary(n, testutil::random_subset(n, 12, rng), n);
    const Mat gram = design_gram(*inst, band, d);
    Eigen::SelfAdjointEigenSolver<Mat> es(gram);
    if (es.eigenvalues()(0) < 0.05) continue;
    ++checked;
    const EstimatorState st = EstimatorState::build(inst, d);
    const double a = gram.inverse().trace();
    CHECK(testutil::rel(bcrb(st), a) <= 1e-4);
    CHECK(testutil::rel(bmse(st), a) <= 1e-4);
    CHECK(testutil::rel(wc_bmse(st), 1.0 / es.eigenvalues()(0)) <= 1e-4);
  }
  CHECK(checked == 5);
}

TEST_CASE("LR-design and WC-BMSE share the exhaustive argmin") {
  Rng rng(39);
  const int n = 8;
  const WeightedGraph g = testutil::random_graph(n, 0.3, rng);
  ProblemInstance::Options o;
  o.regularizer = FilterSpec::laplacian_power(1);
  o.sigma2 = 1.0;
  o.mu = 0.5;
  const auto inst = ProblemInstance::create(g, o);
  double best_lr = 1e300, best_wc = 1e300;
  std::vector<int> arg_lr, arg_wc;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        const SamplingVector d = SamplingVector::binary(n, {a, b, c}, n);
        const double lr = lr_design_cost(*inst, d);
        const double wc = wc_bmse(EstimatorState::build(inst, d));
        if (lr < best_lr) best_lr = lr, arg_lr = {a, b, c};
        if (wc < best_wc) best_wc = wc, arg_wc = {a, b, c};
      }
  CHECK(arg_lr == arg_wc);
  CHECK(best_wc == doctest::Approx(-1.0 / best_lr).epsilon(1e-10));
}

TEST_CASE("dominant full-rank prior makes every cost insensitive to d") {
  Rng rng(40);
  const int n = 10;
  ProblemInstance::Options o;
  o.regularizer = FilterSpec::tikhonov(0.5).dagger();
  o.mu = 1e8;
  const auto inst = ProblemInstance::create(testutil::random_graph(n, 0.3, rng), o);
  for (CostKind k : kProposed) {
    double lo = 1e300, hi = -1e300;
    for (int t = 0; t < 50; ++t) {
      const double v = CostFunction(k, inst).value(SamplingVector::binary(n, testutil::random_subset(n, 4, rng), n));
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (k == CostKind::kBcrb) {
      CHECK(hi <= 1e-6);  // variance term vanishes as mu grows
    } else {
      CHECK((hi - lo) <= 1e-3 * hi);
    }
  }
}

TEST_CASE("surrogate instances for baseline gradients") {
  Rng rng(41);
  const auto inst = random_instance(8, rng);
  const BandlimitedSpec band = BandlimitedSpec::low(8, 4);
  const auto a = surrogate_instance(CostKind::kADesign, *inst, band);
  CHECK(a->mu() == 1e4);
  CHECK((a->h_m() - Mat::Identity(8, 8)).norm() < 1e-12);
  CHECK(a->h_r().trace() == doctest::Approx(4.0));
  CHECK(surrogate_kind(CostKind::kADesign) == CostKind::kBmse);
  CHECK(surrogate_kind(CostKind::kEDesign) == CostKind::kWcBmse);
  CHECK(surrogate_kind(CostKind::kLrDesign) == CostKind::kWcBmse);
  const auto lr = surrogate_instance(CostKind::kLrDesign, *inst, std::nullopt);
  CHECK((lr->h_r() - inst->laplacian()).norm() < 1e-10);
  CHECK((lr->noise_cov() - Mat::Identity(8, 8)).norm() == 0.0);
  CHECK_THROWS_AS(surrogate_instance(CostKind::kEDesign, *inst, std::nullopt), DomainError);
  CHECK(parse_cost_kind("wc_bmse") == CostKind::kWcBmse);
  CHECK_THROWS_AS(parse_cost_kind("d_design"), DomainError);
}
