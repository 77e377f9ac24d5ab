#include "gsample/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "gsample/errors.hpp"

namespace gsample {

WeightedGraph::WeightedGraph(int n_nodes, std::vector<Edge> edges)
    : n_nodes_(n_nodes), edges_(std::move(edges)) {
  if (n_nodes_ <= 0) throw StructuralError("graph must have at least one node");
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.src < 0 || e.src >= n_nodes_ || e.dst < 0 || e.dst >= n_nodes_) {
      throw StructuralError("edge (" + std::to_string(e.src) + "," +
                            std::to_string(e.dst) + ") has an invalid node index");
    }
    if (e.src == e.dst) {
      throw StructuralError("self-loop at node " + std::to_string(e.src));
    }
    if (!(e.weight > 0.0) || !std::isfinite(e.weight)) {
      throw StructuralError("edge weights must be finite and strictly positive");
    }
    if (e.src > e.dst) std::swap(e.src, e.dst);
    if (!seen.emplace(e.src, e.dst).second) {
      throw StructuralError("duplicate edge (" + std::to_string(e.src) + "," +
                            std::to_string(e.dst) + ")");
    }
  }
}

bool WeightedGraph::has_edge(int k, int l) const {
  if (k > l) std::swap(k, l);
  return std::any_of(edges_.begin(), edges_.end(),
                     [&](const Edge& e) { return e.src == k && e.dst == l; });
}

bool WeightedGraph::is_connected() const {
  std::vector<std::vector<int>> adj(n_nodes_);
  for (const auto& e : edges_) {
    adj[e.src].push_back(e.dst);
    adj[e.dst].push_back(e.src);
  }
  std::vector<char> visited(n_nodes_, 0);
  std::vector<int> stack{0};
  visited[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!visited[w]) {
        visited[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == n_nodes_;
}

Mat WeightedGraph::adjacency() const {
  Mat w = Mat::Zero(n_nodes_, n_nodes_);
  for (const auto& e : edges_) {
    w(e.src, e.dst) = e.weight;
    w(e.dst, e.src) = e.weight;
  }
  return w;
}

bool WeightedGraph::operator==(const WeightedGraph& other) const {
  if (n_nodes_ != other.n_nodes_ || edges_.size() != other.edges_.size()) return false;
  auto key = [](const Edge& e) { return std::make_tuple(e.src, e.dst, e.weight); };
  std::vector<std::tuple<int, int, double>> a, b;
  for (const auto& e : edges_) a.push_back(key(e));
  for (const auto& e : other.edges_) b.push_back(key(e));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Mat build_laplacian(const WeightedGraph& graph) {
  const int n = graph.n_nodes();
  Mat lap = Mat::Zero(n, n);
  for (const auto& e : graph.edges()) {
    lap(e.src, e.dst) -= e.weight;
    lap(e.dst, e.src) -= e.weight;
    lap(e.src, e.src) += e.weight;
    lap(e.dst, e.dst) += e.weight;
  }
  return lap;
}

Mat grounded_laplacian(const Mat& laplacian, int node) {
  const int n = static_cast<int>(laplacian.rows());
  if (node < 0 || node >= n) throw StructuralError("reference node out of range");
  Mat out(n - 1, n - 1);
  for (int i = 0, r = 0; i < n; ++i) {
    if (i == node) continue;
    for (int j = 0, c = 0; j < n; ++j) {
      if (j == node) continue;
      out(r, c++) = laplacian(i, j);
    }
    ++r;
  }
  return out;
}

Mat SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

std::vector<int> SpectralDecomposition::eigenvalue_groups() const {
  const int n = size();
  std::vector<int> group(n, 0);
  if (n == 0) return group;
  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  for (int i = 1; i < n; ++i) {
    const bool same =
        std::abs(eigenvalues(i) - eigenvalues(i - 1)) / scale <= kEigenGroupTolerance;
    group[i] = same ? group[i - 1] : group[i - 1] + 1;
  }
  return group;
}

SpectralDecomposition spectral_decompose(const Mat& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) {
    throw StructuralError("spectral_decompose expects a non-empty square matrix");
  }
  const double scale = std::max(1.0, symmetric.cwiseAbs().maxCoeff());
  if ((symmetric - symmetric.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw StructuralError("spectral_decompose expects a symmetric matrix");
  }
  Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};

  const double lam_scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
    if (std::abs(out.eigenvalues(i)) <= kEigenGroupTolerance * lam_scale) {
      out.eigenvalues(i) = 0.0;
    }
  }
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.eigenvectors.rows(); ++i) {
      // Strict comparison with a small margin so near-ties resolve to the
      // first index consistently across platforms.
      const double mag = std::abs(out.eigenvectors(i, j));
      if (mag > best * (1.0 + 1e-12)) {
        best = mag;
        arg = i;
      }
    }
    if (out.eigenvectors(arg, j) < 0.0) out.eigenvectors.col(j) *= -1.0;
  }
  return out;
}

// ---------------------------------------------------------------------------
// FilterSpec

FilterSpec FilterSpec::identity() { return {Kind::kIdentity, 0.0}; }

FilterSpec FilterSpec::laplacian_power(int k) {
  return {Kind::kLaplacianPower, static_cast<double>(k)};
}

FilterSpec FilterSpec::gmrf() { return {Kind::kGmrf, 0.0}; }

FilterSpec FilterSpec::tikhonov(double alpha) {
  if (!(alpha >= 0.0)) throw DomainError("tikhonov alpha must be nonnegative");
  return {Kind::kTikhonov, alpha};
}

FilterSpec FilterSpec::diffusion(double tau) {
  if (!(tau >= 0.0)) throw DomainError("diffusion tau must be nonnegative");
  return {Kind::kDiffusion, tau};
}

FilterSpec FilterSpec::inverse_diffusion(double tau) {
  if (!(tau >= 0.0)) throw DomainError("diffusion tau must be nonnegative");
  return {Kind::kInverseDiffusion, tau};
}

FilterSpec FilterSpec::ideal_projector(std::vector<int> frequency_indices) {
  FilterSpec spec(Kind::kIdealProjector, 0.0);
  std::sort(frequency_indices.begin(), frequency_indices.end());
  frequency_indices.erase(std::unique(frequency_indices.begin(), frequency_indices.end()),
                          frequency_indices.end());
  spec.indices_ = std::move(frequency_indices);
  return spec;
}

FilterSpec FilterSpec::custom(std::vector<double> response) {
  FilterSpec spec(Kind::kCustom, 0.0);
  spec.table_ = std::move(response);
  return spec;
}

FilterSpec FilterSpec::pow(int exponent) const {
  FilterSpec out = *this;
  out.exponent_ *= exponent;
  return out;
}

FilterSpec FilterSpec::dagger() const {
  FilterSpec out = *this;
  out.pseudo_inverse_ = !out.pseudo_inverse_;
  return out;
}

double FilterSpec::base_response(double lambda) const {
  switch (kind_) {
    case Kind::kIdentity:
      return 1.0;
    case Kind::kLaplacianPower:
      return std::pow(lambda, parameter_);
    case Kind::kGmrf:
      return lambda > 0.0 ? 1.0 / std::sqrt(lambda) : 0.0;
    case Kind::kTikhonov:
      return 1.0 / (1.0 + parameter_ * lambda);
    case Kind::kDiffusion:
      return std::exp(-parameter_ * lambda);
    case Kind::kInverseDiffusion:
      return std::exp(parameter_ * lambda);
    case Kind::kIdealProjector:
    case Kind::kCustom:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

Vec FilterSpec::response(const SpectralDecomposition& decomp) const {
  const int n = decomp.size();
  Vec r(n);
  if (kind_ == Kind::kIdealProjector) {
    r.setZero();
    for (int idx : indices_) {
      if (idx < 0 || idx >= n) throw DomainError("ideal projector index out of range");
      r(idx) = 1.0;
    }
  } else if (kind_ == Kind::kCustom) {
    if (static_cast<int>(table_.size()) != n) {
      throw DomainError("custom response table has the wrong length");
    }
    for (int i = 0; i < n; ++i) r(i) = table_[i];
  } else {
    const auto groups = decomp.eigenvalue_groups();
    for (int i = 0; i < n;) {
      int j = i;
      double sum = 0.0;
      while (j < n && groups[j] == groups[i]) sum += decomp.eigenvalues(j++);
      const double value = base_response(sum / (j - i));
      for (int k = i; k < j; ++k) r(k) = value;
      i = j;
    }
  }
  if (exponent_ != 1) {
    for (int i = 0; i < n; ++i) r(i) = std::pow(r(i), exponent_);
  }
  if (pseudo_inverse_) {
    for (int i = 0; i < n; ++i) {
      if (std::isinf(r(i))) r(i) = 0.0;
    }
    r = dagger_response(r);
  }
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(r(i))) {
      throw DomainError("filter " + describe() + " has a non-finite response at eigenvalue " +
                        std::to_string(decomp.eigenvalues(i)));
    }
  }
  return r;
}

std::string FilterSpec::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::kIdentity: os << "identity"; break;
    case Kind::kLaplacianPower: os << "laplacian_power(" << parameter_ << ")"; break;
    case Kind::kGmrf: os << "gmrf"; break;
    case Kind::kTikhonov: os << "tikhonov(" << parameter_ << ")"; break;
    case Kind::kDiffusion: os << "diffusion(" << parameter_ << ")"; break;
    case Kind::kInverseDiffusion: os << "inverse_diffusion(" << parameter_ << ")"; break;
    case Kind::kIdealProjector: os << "ideal_projector[" << indices_.size() << "]"; break;
    case Kind::kCustom: os << "custom[" << table_.size() << "]"; break;
  }
  if (exponent_ != 1) os << "^" << exponent_;
  if (pseudo_inverse_) os << "^dagger";
  return os.str();
}

Vec dagger_response(const Vec& response, double rel_tol) {
  Vec out = Vec::Zero(response.size());
  if (response.size() == 0) return out;
  const double threshold = rel_tol * response.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < response.size(); ++i) {
    if (std::abs(response(i)) > threshold) out(i) = 1.0 / response(i);
  }
  return out;
}

Mat filter_matrix(const SpectralDecomposition& decomp, const FilterSpec& spec) {
  const Vec h = spec.response(decomp);
  const Mat& v = decomp.eigenvectors;
  Mat out = v * h.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Vec apply_filter(const SpectralDecomposition& decomp, const FilterSpec& spec,
                 const Vec& a) {
  const Vec h = spec.response(decomp);
  return igft(decomp, h.cwiseProduct(gft(decomp, a)));
}

Vec gft(const SpectralDecomposition& decomp, const Vec& a) {
  if (a.size() != decomp.size()) throw StructuralError("gft: dimension mismatch");
  return decomp.eigenvectors.transpose() * a;
}

Vec igft(const SpectralDecomposition& decomp, const Vec& a_hat) {
  if (a_hat.size() != decomp.size()) throw StructuralError("igft: dimension mismatch");
  return decomp.eigenvectors * a_hat;
}

double total_variation(const Mat& laplacian, const Vec& a) {
  if (laplacian.rows() != a.size() || laplacian.cols() != a.size()) {
    throw StructuralError("total_variation: dimension mismatch");
  }
  return a.dot(laplacian * a);
}

// ---------------------------------------------------------------------------
// Edge-list I/O

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

WeightedGraph parse_edge_list(const std::string& text, int n_nodes) {
  std::istringstream in(text);
  std::string line;
  std::vector<Edge> edges;
  int max_index = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 3) {
      throw StructuralError("edge list line " + std::to_string(line_no) +
                            ": expected 3 comma-separated fields");
    }
    if (fields[0] == "src" && fields[1] == "dst") continue;
    Edge e;
    try {
      std::size_t pos = 0;
      e.src = std::stoi(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument("src");
      e.dst = std::stoi(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument("dst");
      e.weight = std::stod(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument("weight");
    } catch (const std::logic_error&) {
      throw StructuralError("edge list line " + std::to_string(line_no) + ": malformed entry");
    }
    max_index = std::max({max_index, e.src, e.dst});
    edges.push_back(e);
  }
  return WeightedGraph(n_nodes > 0 ? n_nodes : max_index + 1, std::move(edges));
}

WeightedGraph read_edge_list(const std::filesystem::path& path, int n_nodes) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open edge list " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_edge_list(buffer.str(), n_nodes);
}

void write_edge_list(const WeightedGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write edge list " + path.string());
  out << "src,dst,weight\n";
  out.precision(17);
  for (const auto& e : graph.edges()) out << e.src << "," << e.dst << "," << e.weight << "\n";
}

}  // namespace gsample
