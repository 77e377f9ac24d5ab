#include "gsample/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "gsample/errors.hpp"

namespace gsample {

EstimatorState EstimatorState::build(std::shared_ptr<const ProblemInstance> instance,
                                     const SamplingVector& d, bool allow_pseudo_inverse) {
  if (!instance) throw StructuralError("null problem instance");
  const int n = instance->size();
  if (d.size() != n) throw StructuralError("sampling vector length does not match the graph");

  EstimatorState s;
  s.instance_ = std::move(instance);
  s.sampling_ = d;
  const ProblemInstance& inst = *s.instance_;
  const Vec& dv = d.values();

  // D R^{-1} D, then h_M (D R^{-1} D).
  const Mat weighted = dv.asDiagonal() * inst.noise_precision() * dv.asDiagonal();
  s.data_op_ = inst.h_m() * weighted;
  s.k_m_ = s.data_op_ * inst.h_m();
  s.k_m_ = 0.5 * (s.k_m_ + s.k_m_.transpose());
  s.k_ = s.k_m_ + inst.mu() * inst.h_r();

  Eigen::SelfAdjointEigenSolver<Mat> solver(s.k_);
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver failed on K(d)");
  s.k_eigenvalues_ = solver.eigenvalues();
  s.k_eigenvectors_ = solver.eigenvectors();

  const double lam_max = std::max(0.0, s.k_eigenvalues_.maxCoeff());
  s.zero_threshold_ = kPseudoInverseTolerance * lam_max;
  Vec inv = Vec::Zero(n);
  s.rank_ = 0;
  for (int i = 0; i < n; ++i) {
    if (s.k_eigenvalues_(i) > s.zero_threshold_ && lam_max > 0.0) {
      inv(i) = 1.0 / s.k_eigenvalues_(i);
      ++s.rank_;
    }
  }
  if (s.rank_ < n && !allow_pseudo_inverse) {
    throw RankError("K(d) is numerically singular (rank " + std::to_string(s.rank_) + " of " +
                    std::to_string(n) + ")");
  }
  s.k_inv_ = s.k_eigenvectors_ * inv.asDiagonal() * s.k_eigenvectors_.transpose();
  s.k_inv_ = 0.5 * (s.k_inv_ + s.k_inv_.transpose());
  return s;
}

Vec estimate(const EstimatorState& state, const Vec& y) {
  const ProblemInstance& inst = state.instance();
  if (y.size() != inst.size()) throw StructuralError("estimate: measurement has the wrong length");
  const Vec masked = (state.sampling().values().array() != 0.0).select(y, 0.0);
  return state.solve(state.data_operator() * masked + inst.mu() * (inst.h_r() * inst.x0()));
}

Vec bias(const EstimatorState& state, const Vec& x) {
  const ProblemInstance& inst = state.instance();
  if (x.size() != inst.size()) throw StructuralError("bias: signal has the wrong length");
  return state.solve(state.k_measurement() * x + inst.mu() * (inst.h_r() * inst.x0())) - x;
}

double analytic_mse(const EstimatorState& state, const Vec& x) {
  const ProblemInstance& inst = state.instance();
  if (x.size() != inst.size()) throw StructuralError("analytic_mse: signal has the wrong length");
  const Vec bias_term = inst.mu() * state.solve(inst.h_r() * (x - inst.x0()));
  const Mat& kinv = state.k_inverse();
  const double variance = (kinv * state.k_measurement() * kinv).trace();
  return bias_term.squaredNorm() + variance;
}

namespace {

// Gram = H^T D R^{-1} D H and the right-hand operator H^T D R^{-1} D.
struct BandSystem {
  Mat gram;
  Mat rhs;
  Mat basis;
};

BandSystem band_system(const ProblemInstance& inst, const BandlimitedSpec& band,
                       const SamplingVector& d) {
  if (d.size() != inst.size()) throw StructuralError("sampling vector length mismatch");
  BandSystem sys;
  sys.basis = band.basis(inst.decomp());
  const Mat h = inst.h_m() * sys.basis;
  const Vec& dv = d.values();
  sys.rhs = h.transpose() * dv.asDiagonal() * inst.noise_precision() * dv.asDiagonal();
  sys.gram = sys.rhs * h;
  sys.gram = 0.5 * (sys.gram + sys.gram.transpose());
  return sys;
}

}  // namespace

Vec estimate_bandlimited(const ProblemInstance& instance, const BandlimitedSpec& band,
                         const SamplingVector& d, const Vec& y) {
  if (y.size() != instance.size()) throw StructuralError("measurement has the wrong length");
  const BandSystem sys = band_system(instance, band, d);
  Eigen::SelfAdjointEigenSolver<Mat> solver(sys.gram);
  const Vec& ev = solver.eigenvalues();
  const double lam_max = std::max(ev.maxCoeff(), 0.0);
  if (lam_max <= 0.0 || ev.minCoeff() <= 1e-10 * lam_max) {
    throw ObservabilityError("frequency band is not identifiable from the sampled nodes");
  }
  const Vec coeffs = solver.eigenvectors() *
                     ev.cwiseInverse().asDiagonal() *
                     solver.eigenvectors().transpose() *
                     (sys.rhs * (d.values().array() != 0.0).select(y, 0.0));
  return sys.basis * coeffs;
}

bool has_full_column_rank(const ProblemInstance& instance, const SamplingVector& d) {
  const Mat a = d.values().asDiagonal() * instance.h_m();
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return false;
  return s(s.size() - 1) > 1e-10 * s(0);
}

}  // namespace gsample
