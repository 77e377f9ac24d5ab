#ifndef GSAMPLE_ESTIMATOR_HPP
#define GSAMPLE_ESTIMATOR_HPP

#include <memory>

#include "gsample/signal_model.hpp"

namespace gsample {

/// K(d) = h_M D R^{-1} D h_M + mu h_R for one sampling vector, factorized.
///
/// The factorization is a full symmetric eigendecomposition of K. Eigenvalues
/// at or below 1e-10 * lambda_max(K) are treated as zero and the
/// pseudo-inverse is used throughout.
class EstimatorState {
 public:
  static EstimatorState build(std::shared_ptr<const ProblemInstance> instance,
                              const SamplingVector& d, bool allow_pseudo_inverse = true);

  const ProblemInstance& instance() const { return *instance_; }
  const std::shared_ptr<const ProblemInstance>& instance_ptr() const { return instance_; }
  const SamplingVector& sampling() const { return sampling_; }

  const Mat& k() const { return k_; }
  /// K_M = h_M D R^{-1} D h_M.
  const Mat& k_measurement() const { return k_m_; }
  /// K^{-1}, or K^dagger when K is singular.
  const Mat& k_inverse() const { return k_inv_; }
  /// Eigenvalues of K, ascending, and matching eigenvectors.
  const Vec& k_eigenvalues() const { return k_eigenvalues_; }
  const Mat& k_eigenvectors() const { return k_eigenvectors_; }
  int rank() const { return rank_; }
  bool singular() const { return rank_ < instance_->size(); }
  double zero_threshold() const { return zero_threshold_; }
  /// h_M D R^{-1} D: maps a masked measurement into the normal equations.
  const Mat& data_operator() const { return data_op_; }

  /// K^dagger b.
  Vec solve(const Vec& b) const { return k_inv_ * b; }

 private:
  EstimatorState() = default;

  std::shared_ptr<const ProblemInstance> instance_;
  SamplingVector sampling_ = SamplingVector::empty(1);
  Mat k_, k_m_, k_inv_, k_eigenvectors_, data_op_;
  Vec k_eigenvalues_;
  int rank_ = 0;
  double zero_threshold_ = 0.0;
};

/// Relative threshold defining numerical zero eigenvalues of K.
inline constexpr double kPseudoInverseTolerance = 1e-10;

/// x_hat = K^{-1}(h_M D R^{-1} D y + mu h_R x0). `y` is masked by d first.
Vec estimate(const EstimatorState& state, const Vec& y);

/// b(x) = K^{-1}(K_M x + mu h_R x0) - x.
Vec bias(const EstimatorState& state, const Vec& x);

/// mu^2 ||K^{-1} h_R (x - x0)||^2 + tr(K^{-1} K_M K^{-1}).
double analytic_mse(const EstimatorState& state, const Vec& x);

/// Generalized least squares restricted to span(U_band):
/// x_hat = U (H^T D R^{-1} D H)^{-1} H^T D R^{-1} D y, H = h_M U.
/// Throws ObservabilityError when the Gram matrix is rank deficient.
Vec estimate_bandlimited(const ProblemInstance& instance, const BandlimitedSpec& band,
                         const SamplingVector& d, const Vec& y);

/// True when D h_M(L) has full column rank (unique unregularized solution).
bool has_full_column_rank(const ProblemInstance& instance, const SamplingVector& d);

}  // namespace gsample

#endif  // GSAMPLE_ESTIMATOR_HPP
