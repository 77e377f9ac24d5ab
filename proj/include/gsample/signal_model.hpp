#ifndef GSAMPLE_SIGNAL_MODEL_HPP
#define GSAMPLE_SIGNAL_MODEL_HPP

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "gsample/graph.hpp"

namespace gsample {

using Rng = std::mt19937_64;

/// Measurement model y = D(h_M(L) x + e), e ~ N(0, R), with the Gaussian
/// prior x ~ N(x0, (1/mu) h_R(L)^dagger).
///
/// Immutable once created. Filter matrices, R^{-1} and the prior square root
/// are materialized at construction.
class ProblemInstance {
 public:
  struct Options {
    FilterSpec measurement = FilterSpec::identity();
    FilterSpec regularizer = FilterSpec::identity();
    Mat noise_cov;  // empty -> sigma2 * I
    double sigma2 = 0.01;
    double mu = 0.1;
    Vec x0;  // empty -> zero
  };

  static std::shared_ptr<const ProblemInstance> create(SpectralDecomposition decomp,
                                                       const Options& options);
  /// Convenience: Laplacian of `graph`, decomposed.
  static std::shared_ptr<const ProblemInstance> create(const WeightedGraph& graph,
                                                       const Options& options);

  int size() const { return decomp_.size(); }
  const SpectralDecomposition& decomp() const { return decomp_; }
  const FilterSpec& measurement_filter() const { return options_.measurement; }
  const FilterSpec& regularizer_filter() const { return options_.regularizer; }
  const Options& options() const { return options_; }

  /// h_M(L).
  const Mat& h_m() const { return h_m_; }
  /// h_R(L).
  const Mat& h_r() const { return h_r_; }
  const Vec& h_r_response() const { return h_r_response_; }
  const Mat& noise_cov() const { return noise_cov_; }
  const Mat& noise_precision() const { return noise_precision_; }
  /// Lower Cholesky factor of R.
  const Mat& noise_chol() const { return noise_chol_; }
  bool diagonal_noise() const { return diagonal_noise_; }
  double mu() const { return options_.mu; }
  const Vec& x0() const { return x0_; }
  /// L reconstructed from the decomposition.
  Mat laplacian() const { return decomp_.reconstruct(); }

  /// Norm of the component of x0 in the kernel of h_R(L). Nonzero values are
  /// allowed; they shift the prior mean along unpenalized directions.
  double x0_kernel_component() const { return x0_kernel_norm_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Copy with a different noise variance (R = sigma2 I).
  std::shared_ptr<const ProblemInstance> with_sigma2(double sigma2) const;
  std::shared_ptr<const ProblemInstance> with_mu(double mu) const;

  /// x0 + (1/sqrt(mu)) V diag(sqrt(dagger(h_R))) applied to a standard normal.
  const Mat& prior_sqrt() const { return prior_sqrt_; }

 private:
  ProblemInstance() = default;

  SpectralDecomposition decomp_;
  Options options_;
  Mat h_m_, h_r_, noise_cov_, noise_precision_, noise_chol_, prior_sqrt_;
  Vec h_r_response_, x0_;
  bool diagonal_noise_ = true;
  double x0_kernel_norm_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Binary or relaxed sampling indicator with budget q.
class SamplingVector {
 public:
  enum class Mode { kBinary, kRelaxed };

  static SamplingVector binary(int n, const std::vector<int>& selected, int budget = -1);
  static SamplingVector relaxed(Vec values, int budget);
  static SamplingVector full(int n) { return binary(n, all_indices(n)); }
  static SamplingVector empty(int n) { return binary(n, {}, n); }

  const Vec& values() const { return values_; }
  int budget() const { return budget_; }
  Mode mode() const { return mode_; }
  int size() const { return static_cast<int>(values_.size()); }
  /// Indices with a nonzero entry, ascending.
  std::vector<int> support() const;

  static std::vector<int> all_indices(int n);

 private:
  SamplingVector(Vec values, int budget, Mode mode)
      : values_(std::move(values)), budget_(budget), mode_(mode) {}

  Vec values_;
  int budget_;
  Mode mode_;
};

/// A frequency band given as eigenvalue indices (ascending order convention).
class BandlimitedSpec {
 public:
  BandlimitedSpec(std::vector<int> band, int n);

  /// Lowest `count` frequencies.
  static BandlimitedSpec low(int n, int count);
  /// Highest `count` frequencies.
  static BandlimitedSpec high(int n, int count);

  const std::vector<int>& band() const { return band_; }
  std::vector<int> complement() const;
  int size() const { return static_cast<int>(band_.size()); }
  int n() const { return n_; }
  /// Columns of V indexed by the band.
  Mat basis(const SpectralDecomposition& decomp) const;

 private:
  std::vector<int> band_;
  int n_;
};

Vec sample_prior(const ProblemInstance& instance, Rng& rng);

/// h_M x + e on the support of d, zero elsewhere.
Vec sample_measurement(const ProblemInstance& instance, const Vec& x,
                       const SamplingVector& d, Rng& rng);

struct TopologyChange {
  bool added = false;
  int src = 0;
  int dst = 0;
};

struct PerturbedGraph {
  WeightedGraph graph;
  std::vector<TopologyChange> log;
};

/// Apply exactly `delta` random edge additions/removals (type chosen
/// uniformly), keeping the graph connected by rejection. Added edges take the
/// mean weight of the original graph unless `new_edge_weight` > 0.
PerturbedGraph perturb_topology(const WeightedGraph& graph, int delta, Rng& rng,
                                double new_edge_weight = -1.0);

}  // namespace gsample

#endif  // GSAMPLE_SIGNAL_MODEL_HPP
