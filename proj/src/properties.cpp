#include "gsample/properties.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gsample/errors.hpp"

namespace gsample {

namespace {

double relaxed_cost(CostKind kind, const std::shared_ptr<const ProblemInstance>& inst,
                    const Vec& d) {
  return CostFunction(kind, inst).value(SamplingVector::relaxed(d, inst->size()));
}

double set_cost(const std::shared_ptr<const ProblemInstance>& inst, const std::vector<int>& s) {
  const int n = inst->size();
  return bmse(EstimatorState::build(inst, SamplingVector::binary(n, s, n)));
}

std::vector<int> random_subset(int n, int size, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(size);
  std::sort(perm.begin(), perm.end());
  return perm;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

}  // namespace

Vec finite_difference_gradient(CostKind kind, std::shared_ptr<const ProblemInstance> instance,
                               const Vec& d, double h) {
  const int n = instance->size();
  Vec g(n);
  for (int i = 0; i < n; ++i) {
    Vec plus = d, minus = d;
    plus(i) += h;
    minus(i) -= h;
    g(i) = (relaxed_cost(kind, instance, plus) - relaxed_cost(kind, instance, minus)) / (2.0 * h);
  }
  return g;
}

double gradient_relative_error(const Vec& analytic, const Vec& numeric) {
  const double scale = numeric.cwiseAbs().maxCoeff();
  const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
  return scale > 0.0 ? diff / scale : diff;
}

std::vector<GradcheckReport> gradcheck(std::shared_ptr<const ProblemInstance> instance,
                                       const std::vector<CostKind>& kinds, int points,
                                       std::uint64_t seed, double h) {
  const int n = instance->size();
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  std::vector<Vec> ds;
  for (int p = 0; p < points; ++p) {
    Vec d(n);
    for (int i = 0; i < n; ++i) d(i) = unif(rng);
    ds.push_back(d);
  }
  std::vector<GradcheckReport> out;
  for (CostKind kind : kinds) {
    if (!is_proposed(kind)) throw DomainError("gradcheck covers the four proposed costs only");
    GradcheckReport rep;
    rep.kind = kind;
    rep.points = points;
    for (const Vec& d : ds) {
      const EstimatorState state = EstimatorState::build(instance, SamplingVector::relaxed(d, n));
      const Gradient g = cost_gradient(kind, state);
      rep.subgradient_seen = rep.subgradient_seen || g.subgradient;
      const Vec fd = finite_difference_gradient(kind, instance, d, h);
      rep.max_relative_error = std::max(rep.max_relative_error, gradient_relative_error(g.value, fd));
    }
    out.push_back(rep);
  }
  return out;
}

std::vector<PropertyResult> run_property_suites(std::shared_ptr<const ProblemInstance> instance,
                                                const BandlimitedSpec& band, std::uint64_t seed,
                                                int samples) {
  const int n = instance->size();
  Rng rng(seed);
  std::vector<PropertyResult> out;
  const bool pd_prior = instance->h_r_response().minCoeff() > 0.0;
  const bool assumptions = pd_prior && instance->diagonal_noise();

  // Submodularity and monotonicity of BMSE.
  {
    int gain_violations = 0, mono_violations = 0;
    double worst_gain = 0.0;
    std::uniform_int_distribution<int> size_b(1, std::max(1, n - 1));
    for (int t = 0; t < samples; ++t) {
      const int nb = std::min(size_b(rng), n - 1);
      std::vector<int> perm = random_subset(n, n, rng);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<int> b(perm.begin(), perm.begin() + nb);
      const int a = perm[nb];
      std::uniform_int_distribution<int> size_a(0, nb);
      std::vector<int> a_set(b.begin(), b.begin() + size_a(rng));
      auto with = [](std::vector<int> s, int x) {
        s.push_back(x);
        std::sort(s.begin(), s.end());
        return s;
      };
      std::sort(b.begin(), b.end());
      std::sort(a_set.begin(), a_set.end());
      const double fa = set_cost(instance, a_set), fa1 = set_cost(instance, with(a_set, a));
      const double fb = set_cost(instance, b), fb1 = set_cost(instance, with(b, a));
      const double slack = 1e-9 * std::max(1.0, std::abs(fa));
      const double excess = (fb - fb1) - (fa - fa1);
      worst_gain = std::max(worst_gain, excess);
      if (excess > slack) ++gain_violations;
      if (fa1 > fa + slack || fb1 > fb + slack) ++mono_violations;
    }
    out.push_back({"bmse_submodular", gain_violations == 0, !assumptions,
                   std::to_string(gain_violations) + "/" + std::to_string(samples) +
                       " violations, worst excess gain " + fmt(worst_gain)});
    out.push_back({"bmse_monotone", mono_violations == 0, !assumptions,
                   std::to_string(mono_violations) + "/" + std::to_string(samples) +
                       " violations"});
  }

  // Convexity of BMSE in w = d^2 (midpoint test).
  {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int violations = 0;
    const int trials = std::max(1, samples / 4);
    for (int t = 0; t < trials; ++t) {
      Vec w1(n), w2(n);
      for (int i = 0; i < n; ++i) {
        w1(i) = unif(rng);
        w2(i) = unif(rng);
      }
      const Vec wm = 0.5 * (w1 + w2);
      const double f1 = relaxed_cost(CostKind::kBmse, instance, w1.cwiseSqrt());
      const double f2 = relaxed_cost(CostKind::kBmse, instance, w2.cwiseSqrt());
      const double fm = relaxed_cost(CostKind::kBmse, instance, wm.cwiseSqrt());
      if (fm > 0.5 * (f1 + f2) + 1e-9 * std::max(1.0, std::abs(fm))) ++violations;
    }
    out.push_back({"bmse_convex_in_d_squared", violations == 0, !assumptions,
                   std::to_string(violations) + "/" + std::to_string(trials) +
                       " midpoint violations"});
  }

  // mu -> infinity: proposed costs against A/E-design.
  {
    ProblemInstance::Options opt;
    opt.measurement = FilterSpec::identity();
    opt.regularizer = FilterSpec::ideal_projector(band.complement());
    opt.noise_cov = instance->noise_cov();
    opt.mu = 1e8;
    const auto lim = ProblemInstance::create(instance->decomp(), opt);
    const int size = std::min(n, std::max(band.size() + 2, (3 * n + 3) / 4));
    std::vector<int> s;
    double lam_min = 0.0;
    for (int attempt = 0; attempt < 50; ++attempt) {
      s = random_subset(n, size, rng);
      Eigen::SelfAdjointEigenSolver<Mat> es(
          design_gram(*lim, band, SamplingVector::binary(n, s, n)), Eigen::EigenvaluesOnly);
      lam_min = es.eigenvalues()(0);
      if (lam_min > 0.05) break;
    }
    const SamplingVector d = SamplingVector::binary(n, s, n);
    const EstimatorState st = EstimatorState::build(lim, d);
    const double a_cost = a_design_cost(*lim, band, d);
    const double e_inv = -1.0 / e_design_cost(*lim, band, d);
    const double r1 = std::abs(bcrb(st) - a_cost) / a_cost;
    const double r2 = std::abs(bmse(st) - a_cost) / a_cost;
    const double r3 = std::abs(wc_bmse(st) - e_inv) / e_inv;
    const double worst = std::max({r1, r2, r3});
    out.push_back({"asymptotic_a_e_design", worst <= 1e-4, lam_min <= 0.05,
                   "relative gaps bcrb " + fmt(r1) + ", bmse " + fmt(r2) + ", wc_bmse " + fmt(r3)});
  }
  return out;
}

}  // namespace gsample
