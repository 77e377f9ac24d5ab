#include "gsample/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsample/errors.hpp"

namespace gsample {

std::shared_ptr<const ProblemInstance> ProblemInstance::create(SpectralDecomposition decomp,
                                                               const Options& options) {
  const int n = decomp.size();
  if (n == 0) throw StructuralError("empty decomposition");
  if (!(options.mu >= 0.0) || !std::isfinite(options.mu)) {
    throw DomainError("mu must be finite and nonnegative");
  }

  auto inst = std::shared_ptr<ProblemInstance>(new ProblemInstance());
  inst->decomp_ = std::move(decomp);
  inst->options_ = options;

  inst->h_m_ = filter_matrix(inst->decomp_, options.measurement);
  inst->h_r_response_ = options.regularizer.response(inst->decomp_);
  const double r_scale = std::max(1.0, inst->h_r_response_.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (inst->h_r_response_(i) < -1e-12 * r_scale) {
      throw DomainError("regularizer response must be nonnegative, got " +
                        std::to_string(inst->h_r_response_(i)));
    }
    inst->h_r_response_(i) = std::max(0.0, inst->h_r_response_(i));
  }
  const Mat& v = inst->decomp_.eigenvectors;
  inst->h_r_ = v * inst->h_r_response_.asDiagonal() * v.transpose();
  inst->h_r_ = 0.5 * (inst->h_r_ + inst->h_r_.transpose());

  if (options.noise_cov.size() == 0) {
    if (!(options.sigma2 > 0.0)) throw DomainError("noise variance must be positive");
    inst->noise_cov_ = options.sigma2 * Mat::Identity(n, n);
  } else {
    if (options.noise_cov.rows() != n || options.noise_cov.cols() != n) {
      throw StructuralError("noise covariance has the wrong shape");
    }
    inst->noise_cov_ = options.noise_cov;
  }
  const Mat& r = inst->noise_cov_;
  if ((r - r.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, r.cwiseAbs().maxCoeff())) {
    throw StructuralError("noise covariance must be symmetric");
  }
  Eigen::LLT<Mat> llt(r);
  if (llt.info() != Eigen::Success) throw DomainError("noise covariance must be positive definite");
  inst->noise_chol_ = llt.matrixL();
  inst->noise_precision_ = llt.solve(Mat::Identity(n, n));
  inst->noise_precision_ = 0.5 * (inst->noise_precision_ + inst->noise_precision_.transpose());
  inst->diagonal_noise_ = (r - Mat(r.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;

  if (options.x0.size() == 0) {
    inst->x0_ = Vec::Zero(n);
  } else {
    if (options.x0.size() != n) throw StructuralError("x0 has the wrong length");
    inst->x0_ = options.x0;
  }

  const Vec inv = dagger_response(inst->h_r_response_);
  Vec kernel_coeff = gft(inst->decomp_, inst->x0_);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (inv(i) != 0.0) kernel_coeff(i) = 0.0;
  }
  inst->x0_kernel_norm_ = kernel_coeff.norm();
  if (inst->x0_kernel_norm_ > 1e-12 * std::max(1.0, inst->x0_.norm())) {
    inst->warnings_.push_back("x0 has a component of norm " +
                              std::to_string(inst->x0_kernel_norm_) +
                              " in the kernel of the regularizer");
  }

  if (options.mu > 0.0) {
    const Vec scale = inv.cwiseSqrt() / std::sqrt(options.mu);
    inst->prior_sqrt_ = v * scale.asDiagonal();
  } else {
    inst->prior_sqrt_ = Mat::Zero(n, n);
    inst->warnings_.push_back("mu = 0: the prior is improper, sample_prior returns x0");
  }
  return inst;
}

std::shared_ptr<const ProblemInstance> ProblemInstance::create(const WeightedGraph& graph,
                                                               const Options& options) {
  return create(spectral_decompose(build_laplacian(graph)), options);
}

std::shared_ptr<const ProblemInstance> ProblemInstance::with_sigma2(double sigma2) const {
  Options opt = options_;
  opt.noise_cov = Mat();
  opt.sigma2 = sigma2;
  return create(decomp_, opt);
}

std::shared_ptr<const ProblemInstance> ProblemInstance::with_mu(double mu) const {
  Options opt = options_;
  opt.mu = mu;
  return create(decomp_, opt);
}

// ---------------------------------------------------------------------------

std::vector<int> SamplingVector::all_indices(int n) {
  std::vector<int> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

SamplingVector SamplingVector::binary(int n, const std::vector<int>& selected, int budget) {
  if (n <= 0) throw StructuralError("sampling vector needs a positive length");
  if (budget < 0) budget = n;
  if (budget == 0 || budget > n) throw DomainError("budget must lie in [1, N]");
  Vec values = Vec::Zero(n);
  for (int idx : selected) {
    if (idx < 0 || idx >= n) throw StructuralError("selected index out of range");
    if (values(idx) != 0.0) throw StructuralError("duplicate selected index");
    values(idx) = 1.0;
  }
  if (static_cast<int>(selected.size()) > budget) {
    throw DomainError("selected set exceeds the budget");
  }
  return {std::move(values), budget, Mode::kBinary};
}

SamplingVector SamplingVector::relaxed(Vec values, int budget) {
  const int n = static_cast<int>(values.size());
  if (n <= 0) throw StructuralError("sampling vector needs a positive length");
  if (budget <= 0 || budget > n) throw DomainError("budget must lie in [1, N]");
  constexpr double kTol = 1e-9;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(values(i) >= -kTol && values(i) <= 1.0 + kTol)) {
      throw DomainError("relaxed sampling entries must lie in [0, 1]");
    }
    values(i) = std::clamp(values(i), 0.0, 1.0);
  }
  if (values.squaredNorm() > budget + kTol) {
    throw DomainError("relaxed sampling vector violates ||d||^2 <= q");
  }
  return {std::move(values), budget, Mode::kRelaxed};
}

std::vector<int> SamplingVector::support() const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (values_(i) != 0.0) out.push_back(static_cast<int>(i));
  }
  return out;
}

// ---------------------------------------------------------------------------

BandlimitedSpec::BandlimitedSpec(std::vector<int> band, int n) : band_(std::move(band)), n_(n) {
  if (band_.empty()) throw DomainError("frequency band must be non-empty");
  std::sort(band_.begin(), band_.end());
  band_.erase(std::unique(band_.begin(), band_.end()), band_.end());
  if (band_.front() < 0 || band_.back() >= n_) throw DomainError("band index out of range");
}

BandlimitedSpec BandlimitedSpec::low(int n, int count) {
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  return {idx, n};
}

BandlimitedSpec BandlimitedSpec::high(int n, int count) {
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), n - count);
  return {idx, n};
}

std::vector<int> BandlimitedSpec::complement() const {
  std::vector<int> out;
  for (int i = 0, j = 0; i < n_; ++i) {
    if (j < size() && band_[j] == i) {
      ++j;
    } else {
      out.push_back(i);
    }
  }
  return out;
}

Mat BandlimitedSpec::basis(const SpectralDecomposition& decomp) const {
  if (decomp.size() != n_) throw StructuralError("band size does not match the graph");
  Mat u(n_, size());
  for (int j = 0; j < size(); ++j) u.col(j) = decomp.eigenvectors.col(band_[j]);
  return u;
}

// ---------------------------------------------------------------------------

namespace {

Vec standard_normal(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec z(n);
  for (int i = 0; i < n; ++i) z(i) = normal(rng);
  return z;
}

}  // namespace

Vec sample_prior(const ProblemInstance& instance, Rng& rng) {
  return instance.x0() + instance.prior_sqrt() * standard_normal(instance.size(), rng);
}

Vec sample_measurement(const ProblemInstance& instance, const Vec& x, const SamplingVector& d,
                       Rng& rng) {
  if (x.size() != instance.size() || d.size() != instance.size()) {
    throw StructuralError("sample_measurement: dimension mismatch");
  }
  const Vec e = instance.noise_chol() * standard_normal(instance.size(), rng);
  return (d.values().array() != 0.0).select(instance.h_m() * x + e, 0.0);
}

PerturbedGraph perturb_topology(const WeightedGraph& graph, int delta, Rng& rng,
                                double new_edge_weight) {
  if (delta < 0) throw DomainError("delta must be nonnegative");
  constexpr int kRetryCap = 100;
  const int n = graph.n_nodes();
  if (new_edge_weight <= 0.0) {
    double total = 0.0;
    for (const auto& e : graph.edges()) total += e.weight;
    new_edge_weight = graph.n_edges() > 0 ? total / graph.n_edges() : 1.0;
  }

  std::vector<Edge> edges = graph.edges();
  std::vector<TopologyChange> log;
  std::bernoulli_distribution coin(0.5);
  const std::size_t max_edges = static_cast<std::size_t>(n) * (n - 1) / 2;

  for (int op = 0; op < delta; ++op) {
    bool applied = false;
    for (int attempt = 0; attempt < kRetryCap && !applied; ++attempt) {
      const bool add = coin(rng);
      if (add) {
        if (edges.size() >= max_edges) continue;
        std::uniform_int_distribution<int> node(0, n - 1);
        int k = node(rng), l = node(rng);
        if (k == l) continue;
        if (k > l) std::swap(k, l);
        const bool exists = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
          return e.src == k && e.dst == l;
        });
        if (exists) continue;
        edges.push_back({k, l, new_edge_weight});
        log.push_back({true, k, l});
        applied = true;
      } else {
        if (edges.empty()) continue;
        std::uniform_int_distribution<std::size_t> pick(0, edges.size() - 1);
        const std::size_t idx = pick(rng);
        std::vector<Edge> trial = edges;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(idx));
        if (!WeightedGraph(n, trial).is_connected()) continue;
        log.push_back({false, edges[idx].src, edges[idx].dst});
        edges = std::move(trial);
        applied = true;
      }
    }
    if (!applied) {
      throw InfeasibleError("perturb_topology: no connectivity-preserving change found after " +
                            std::to_string(kRetryCap) + " attempts");
    }
  }
  return {WeightedGraph(n, std::move(edges)), std::move(log)};
}

}  // namespace gsample
