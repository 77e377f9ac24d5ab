#ifndef GSAMPLE_GRAPH_HPP
#define GSAMPLE_GRAPH_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gsample {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;
};

/// Undirected graph with strictly positive edge weights.
///
/// Construction validates indices, rejects self-loops, zero or negative
/// weights and duplicate unordered pairs. Edges are stored with src < dst.
class WeightedGraph {
 public:
  WeightedGraph(int n_nodes, std::vector<Edge> edges);

  int n_nodes() const { return n_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t n_edges() const { return edges_.size(); }

  bool has_edge(int k, int l) const;
  bool is_connected() const;
  Mat adjacency() const;

  bool operator==(const WeightedGraph& other) const;

 private:
  int n_nodes_;
  std::vector<Edge> edges_;
};

/// Degree-minus-adjacency matrix: diag = weighted degree, off-diag = -W.
Mat build_laplacian(const WeightedGraph& graph);

/// Laplacian with the row and column of `node` removed (reference pinning).
Mat grounded_laplacian(const Mat& laplacian, int node);

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
///
/// Each eigenvector is oriented so that its largest-magnitude entry
/// (first such index on ties) is positive. Eigenvalues within the grouping
/// tolerance of zero are snapped to exactly zero.
struct SpectralDecomposition {
  Vec eigenvalues;
  Mat eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }
  /// V diag(lambda) V^T.
  Mat reconstruct() const;
  /// Group id per eigenvalue; equal ids mean numerically equal eigenvalues.
  std::vector<int> eigenvalue_groups() const;
};

/// Relative tolerance used to group numerically equal eigenvalues.
inline constexpr double kEigenGroupTolerance = 1e-9;

SpectralDecomposition spectral_decompose(const Mat& symmetric);

/// A scalar frequency response h(lambda) defining the filter V h(Lambda) V^T.
///
/// Families follow the usual GSP filter zoo. Two modifiers compose on top of
/// the base response: an integer power and the pseudo-inverse ("dagger"),
/// applied in that order. Index-based kinds (ideal projector, custom table)
/// are evaluated per eigenvalue index rather than per eigenvalue.
class FilterSpec {
 public:
  enum class Kind {
    kIdentity,
    kLaplacianPower,
    kGmrf,
    kTikhonov,
    kDiffusion,
    kInverseDiffusion,
    kIdealProjector,
    kCustom,
  };

  static FilterSpec identity();
  static FilterSpec laplacian_power(int k);
  /// Square root of the Laplacian pseudo-inverse: response sqrt(dagger(lambda)).
  static FilterSpec gmrf();
  /// Response 1 / (1 + alpha lambda).
  static FilterSpec tikhonov(double alpha);
  /// Heat kernel exp(-tau lambda).
  static FilterSpec diffusion(double tau);
  /// exp(+tau lambda).
  static FilterSpec inverse_diffusion(double tau);
  /// 1 on the listed eigenvalue indices, 0 elsewhere.
  static FilterSpec ideal_projector(std::vector<int> frequency_indices);
  /// Tabulated response, one value per eigenvalue index.
  static FilterSpec custom(std::vector<double> response);

  /// Raise the response to an integer power (applied before dagger).
  FilterSpec pow(int exponent) const;
  FilterSpec squared() const { return pow(2); }
  /// Pseudo-inverse: 1/r where |r| exceeds the relative threshold, else 0.
  FilterSpec dagger() const;

  Kind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  int exponent() const { return exponent_; }
  bool pseudo_inverse() const { return pseudo_inverse_; }
  const std::vector<int>& indices() const { return indices_; }
  const std::vector<double>& table() const { return table_; }

  /// Response at every eigenvalue of `decomp`. Numerically equal eigenvalues
  /// receive the response of their group mean. Throws DomainError on a
  /// non-finite value.
  Vec response(const SpectralDecomposition& decomp) const;

  /// Short human-readable name, e.g. "tikhonov(0.2)^2^dagger".
  std::string describe() const;

 private:
  FilterSpec(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  double base_response(double lambda) const;

  Kind kind_;
  double parameter_ = 0.0;
  int exponent_ = 1;
  bool pseudo_inverse_ = false;
  std::vector<int> indices_;
  std::vector<double> table_;
};

/// Pseudo-inverse of a response vector with threshold rel_tol * max|r|.
Vec dagger_response(const Vec& response, double rel_tol = 1e-10);

/// h(L) = V diag(h(lambda)) V^T.
Mat filter_matrix(const SpectralDecomposition& decomp, const FilterSpec& spec);

/// h(L) a computed as igft(h(lambda) .* gft(a)).
Vec apply_filter(const SpectralDecomposition& decomp, const FilterSpec& spec,
                 const Vec& a);

Vec gft(const SpectralDecomposition& decomp, const Vec& a);
Vec igft(const SpectralDecomposition& decomp, const Vec& a_hat);

/// a^T L a.
double total_variation(const Mat& laplacian, const Vec& a);

/// Parse a `k,l,weight` edge list. `#` lines and a `src,dst,weight` header
/// are skipped. The node count is max index + 1 unless `n_nodes` is given.
WeightedGraph read_edge_list(const std::filesystem::path& path, int n_nodes = -1);
WeightedGraph parse_edge_list(const std::string& text, int n_nodes = -1);
void write_edge_list(const WeightedGraph& graph, const std::filesystem::path& path);

}  // namespace gsample

#endif  // GSAMPLE_GRAPH_HPP
