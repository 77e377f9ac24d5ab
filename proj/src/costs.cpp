#include "gsample/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "gsample/errors.hpp"

namespace gsample {

std::string to_string(CostKind kind) {
  switch (kind) {
    case CostKind::kBcrb: return "bcrb";
    case CostKind::kWcMse: return "wc_mse";
    case CostKind::kBmse: return "bmse";
    case CostKind::kWcBmse: return "wc_bmse";
    case CostKind::kADesign: return "a_design";
    case CostKind::kEDesign: return "e_design";
    case CostKind::kLrDesign: return "lr_design";
  }
  return "unknown";
}

CostKind parse_cost_kind(const std::string& name) {
  for (CostKind k : {CostKind::kBcrb, CostKind::kWcMse, CostKind::kBmse, CostKind::kWcBmse,
                     CostKind::kADesign, CostKind::kEDesign, CostKind::kLrDesign}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown cost kind '" + name + "'");
}

bool is_proposed(CostKind kind) {
  return kind == CostKind::kBcrb || kind == CostKind::kWcMse || kind == CostKind::kBmse ||
         kind == CostKind::kWcBmse;
}

bool requires_band(CostKind kind) {
  return kind == CostKind::kADesign || kind == CostKind::kEDesign;
}

namespace {

struct ExtremeEigen {
  double value = 0.0;
  Vec vector;
  bool degenerate = false;
};

int argmax_abs(const Vec& v) {
  Eigen::Index idx = 0;
  v.cwiseAbs().maxCoeff(&idx);
  return static_cast<int>(idx);
}

// Pick among the eigenvectors of a degenerate cluster [first, last] the one
// whose largest-magnitude entry has the smallest index.
Vec pick_from_cluster(const Mat& vectors, int first, int last) {
  int best_col = first;
  int best_idx = argmax_abs(vectors.col(first));
  for (int c = first + 1; c <= last; ++c) {
    const int idx = argmax_abs(vectors.col(c));
    if (idx < best_idx) {
      best_idx = idx;
      best_col = c;
    }
  }
  Vec v = vectors.col(best_col);
  if (v(argmax_abs(v)) < 0.0) v = -v;
  return v;
}

// Smallest eigenvalue of K above the pseudo-inverse threshold.
ExtremeEigen smallest_nonzero(const EstimatorState& state) {
  const Vec& ev = state.k_eigenvalues();
  const int n = static_cast<int>(ev.size());
  int first = 0;
  while (first < n && !(ev(first) > state.zero_threshold())) ++first;
  if (first == n) throw RankError("K(d) has no nonzero eigenvalue");
  int last = first;
  while (last + 1 < n && (ev(last + 1) - ev(first)) <= kDegeneracyTolerance * ev(first)) ++last;
  return {ev(first), pick_from_cluster(state.k_eigenvectors(), first, last), last > first};
}

ExtremeEigen largest_eigen(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric);
  const Vec& ev = solver.eigenvalues();
  const int n = static_cast<int>(ev.size());
  const int last = n - 1;
  const double scale = std::max(std::abs(ev(last)), std::numeric_limits<double>::min());
  int first = last;
  while (first - 1 >= 0 && (ev(last) - ev(first - 1)) <= kDegeneracyTolerance * scale) --first;
  return {ev(last), pick_from_cluster(solver.eigenvectors(), first, last), first < last};
}

// h_R K^{-2} h_R, whose top eigenvalue is sigma_max^2(K^{-1} h_R).
Mat bias_gram(const EstimatorState& state) {
  const Mat m = state.k_inverse() * state.instance().h_r();
  Mat g = m.transpose() * m;
  return 0.5 * (g + g.transpose());
}

std::vector<int> support_of(const SamplingVector& d) { return d.support(); }

}  // namespace

double bcrb(const EstimatorState& state) {
  const Mat& kinv = state.k_inverse();
  return (kinv * state.k_measurement() * kinv).trace();
}

double wc_mse(const EstimatorState& state) {
  const double mu = state.instance().mu();
  if (mu == 0.0) return bcrb(state);
  return bcrb(state) + mu * mu * largest_eigen(bias_gram(state)).value;
}

double bmse(const EstimatorState& state) { return state.k_inverse().trace(); }

double wc_bmse(const EstimatorState& state) { return 1.0 / smallest_nonzero(state).value; }

Mat design_gram(const ProblemInstance& instance, const BandlimitedSpec& band,
                const SamplingVector& d) {
  const std::vector<int> s = support_of(d);
  const Mat u = band.basis(instance.decomp());
  const int m = static_cast<int>(s.size());
  if (m == 0) return Mat::Zero(band.size(), band.size());
  Mat v_sr(m, band.size());
  Mat r_ss(m, m);
  for (int i = 0; i < m; ++i) {
    v_sr.row(i) = u.row(s[i]);
    for (int j = 0; j < m; ++j) r_ss(i, j) = instance.noise_cov()(s[i], s[j]);
  }
  Eigen::LLT<Mat> llt(r_ss);
  Mat g = v_sr.transpose() * llt.solve(v_sr);
  return 0.5 * (g + g.transpose());
}

double a_design_cost(const ProblemInstance& instance, const BandlimitedSpec& band,
                     const SamplingVector& d) {
  if (static_cast<int>(d.support().size()) < band.size()) {
    throw ObservabilityError("A-design needs at least |R| = " + std::to_string(band.size()) +
                             " sampled nodes");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(design_gram(instance, band, d));
  const Vec& ev = solver.eigenvalues();
  if (!(ev.minCoeff() > 1e-10 * std::max(ev.maxCoeff(), 0.0))) {
    throw ObservabilityError("A-design Gram matrix is singular");
  }
  return ev.cwiseInverse().sum();
}

double e_design_cost(const ProblemInstance& instance, const BandlimitedSpec& band,
                     const SamplingVector& d) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(design_gram(instance, band, d));
  const Vec& ev = solver.eigenvalues();
  const double lam_min = ev.minCoeff();
  if (lam_min <= 1e-10 * std::max(ev.maxCoeff(), 0.0)) return 0.0;
  return -lam_min;
}

double lr_design_cost(const ProblemInstance& instance, const SamplingVector& d) {
  const Vec dd = d.values().cwiseProduct(d.values());
  Mat m = instance.mu() * instance.laplacian();
  m.diagonal() += dd;
  m = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> solver(m, Eigen::EigenvaluesOnly);
  const double lam_min = solver.eigenvalues()(0);
  const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  return std::abs(lam_min) <= 1e-12 * scale ? -0.0 : -lam_min;
}

double design_selection_cost(CostKind kind, const ProblemInstance& instance,
                             const BandlimitedSpec& band, const SamplingVector& d) {
  if (!requires_band(kind)) throw DomainError("design_selection_cost: A or E design expected");
  const int m = std::min<int>(static_cast<int>(d.support().size()), band.size());
  if (m == 0) {
    return kind == CostKind::kADesign ? std::numeric_limits<double>::infinity() : 0.0;
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(design_gram(instance, band, d),
                                            Eigen::EigenvaluesOnly);
  const Vec& ev = solver.eigenvalues();  // ascending
  const Vec top = ev.tail(m);
  const double floor = 1e-10 * std::max(ev.maxCoeff(), 0.0);
  if (kind == CostKind::kEDesign) {
    return top(0) <= floor ? 0.0 : -top(0);
  }
  if (top(0) <= floor) return std::numeric_limits<double>::infinity();
  return top.cwiseInverse().sum();
}

// ---------------------------------------------------------------------------

Gradient cost_gradient(CostKind kind, const EstimatorState& state) {
  if (!is_proposed(kind)) {
    throw DomainError("analytic gradient is only defined for the four proposed costs");
  }
  const ProblemInstance& inst = state.instance();
  const int n = inst.size();
  const Mat& kinv = state.k_inverse();
  const Mat& h_r = inst.h_r();
  const double mu = inst.mu();

  // middle = K^{-1} Q K^{-1}
  Mat middle;
  bool subgradient = false;
  switch (kind) {
    case CostKind::kBmse:
      middle = kinv * kinv;
      break;
    case CostKind::kBcrb:
    case CostKind::kWcMse: {
      const Mat kh = kinv * h_r;
      Mat q = Mat::Identity(n, n) - mu * (kh + kh.transpose());
      if (kind == CostKind::kWcMse && mu != 0.0) {
        const ExtremeEigen top = largest_eigen(bias_gram(state));
        subgradient = top.degenerate;
        const Vec hu = h_r * top.vector;
        const Mat p = hu * hu.transpose();
        const Mat kp = kinv * p;
        q += mu * mu * (kp + kp.transpose());
      }
      middle = kinv * q * kinv;
      break;
    }
    case CostKind::kWcBmse: {
      const ExtremeEigen low = smallest_nonzero(state);
      subgradient = low.degenerate;
      // K^{-1} (K u u^T K / lambda^2) K^{-1} = u u^T / lambda^2
      middle = low.vector * low.vector.transpose() / (low.value * low.value);
      break;
    }
    default:
      break;
  }
  const Mat a = inst.h_m() * middle * inst.h_m();
  const Vec& d = state.sampling().values();
  Vec g(n);
  if (inst.diagonal_noise()) {
    g = -2.0 * inst.noise_precision().diagonal().cwiseProduct(d).cwiseProduct(a.diagonal());
  } else {
    // diag(R^{-1} D A)_n = sum_k Rinv(n,k) d_k A(k,n)
    const Mat b = inst.noise_precision() * d.asDiagonal() * a;
    g = -2.0 * b.diagonal();
  }
  return {g, subgradient};
}

// ---------------------------------------------------------------------------

CostKind surrogate_kind(CostKind kind) {
  switch (kind) {
    case CostKind::kADesign: return CostKind::kBmse;
    case CostKind::kEDesign:
    case CostKind::kLrDesign: return CostKind::kWcBmse;
    default: return kind;
  }
}

std::shared_ptr<const ProblemInstance> surrogate_instance(
    CostKind kind, const ProblemInstance& instance, const std::optional<BandlimitedSpec>& band) {
  ProblemInstance::Options opt;
  opt.measurement = FilterSpec::identity();
  switch (kind) {
    case CostKind::kADesign:
    case CostKind::kEDesign: {
      if (!band) throw DomainError(to_string(kind) + " requires a frequency band");
      opt.regularizer = FilterSpec::ideal_projector(band->complement());
      opt.noise_cov = instance.noise_cov();
      opt.mu = 1e4;
      break;
    }
    case CostKind::kLrDesign:
      opt.regularizer = FilterSpec::laplacian_power(1);
      opt.sigma2 = 1.0;
      opt.mu = instance.mu();
      break;
    default:
      throw DomainError("surrogate_instance: baseline kind expected");
  }
  return ProblemInstance::create(instance.decomp(), opt);
}

CostFunction::CostFunction(CostKind kind, std::shared_ptr<const ProblemInstance> instance,
                           std::optional<BandlimitedSpec> band)
    : kind_(kind), instance_(std::move(instance)), band_(std::move(band)) {
  if (!instance_) throw StructuralError("null problem instance");
  if (requires_band(kind_) && !band_) {
    throw DomainError(to_string(kind_) + " requires a frequency band");
  }
  if (band_ && band_->n() != instance_->size()) {
    throw StructuralError("band size does not match the graph");
  }
}

double CostFunction::value(const EstimatorState& state) const {
  switch (kind_) {
    case CostKind::kBcrb: return bcrb(state);
    case CostKind::kWcMse: return wc_mse(state);
    case CostKind::kBmse: return bmse(state);
    case CostKind::kWcBmse: return wc_bmse(state);
    default: return value(state.sampling());
  }
}

double CostFunction::value(const SamplingVector& d) const {
  switch (kind_) {
    case CostKind::kADesign: return a_design_cost(*instance_, *band_, d);
    case CostKind::kEDesign: return e_design_cost(*instance_, *band_, d);
    case CostKind::kLrDesign: return lr_design_cost(*instance_, d);
    default: return value(EstimatorState::build(instance_, d));
  }
}

double CostFunction::selection_value(const SamplingVector& d) const {
  if (requires_band(kind_)) return design_selection_cost(kind_, *instance_, *band_, d);
  return value(d);
}

}  // namespace gsample
