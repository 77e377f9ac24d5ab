#ifndef GSAMPLE_TEST_UTIL_HPP
#define GSAMPLE_TEST_UTIL_HPP

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>
#include <vector>

#include "gsample/signal_model.hpp"

namespace testutil {

using gsample::Edge;
using gsample::Mat;
using gsample::Rng;
using gsample::Vec;
using gsample::WeightedGraph;

// Ring backbone plus random chords; always connected.
inline WeightedGraph random_graph(int n, double p, Rng& rng) {
  std::uniform_real_distribution<double> w(0.5, 2.0);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (int k = 0; k < n; ++k) {
    for (int l = k + 1; l < n; ++l) {
      if (l == k + 1 || (k == 0 && l == n - 1 && n > 2) || coin(rng)) edges.push_back({k, l, w(rng)});
    }
  }
  return WeightedGraph(n, edges);
}

// Laplacian assembled directly from the edge list.
inline Mat laplacian_oracle(const WeightedGraph& g) {
  Mat l = Mat::Zero(g.n_nodes(), g.n_nodes());
  for (const auto& e : g.edges()) {
    l(e.src, e.src) += e.weight;
    l(e.dst, e.dst) += e.weight;
    l(e.src, e.dst) -= e.weight;
    l(e.dst, e.src) -= e.weight;
  }
  return l;
}

inline Vec random_interior(int n, Rng& rng, double lo = 0.05, double hi = 0.95) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec d(n);
  for (int i = 0; i < n; ++i) d(i) = u(rng);
  return d;
}

inline std::vector<int> random_subset(int n, int size, Rng& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  perm.resize(size);
  std::sort(perm.begin(), perm.end());
  return perm;
}

inline Mat random_spd(int n, Rng& rng, double floor = 0.5) {
  std::normal_distribution<double> z(0.0, 1.0);
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = z(rng);
  Mat s = a * a.transpose() / n + floor * Mat::Identity(n, n);
  return 0.5 * (s + s.transpose());
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
inline double power_iteration(const Mat& a, int iters = 20000) {
  Vec v = Vec::Ones(a.rows()) + Vec::LinSpaced(a.rows(), 0.0, 1.0);
  double lam = 0.0;
  for (int i = 0; i < iters; ++i) {
    Vec w = a * v;
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double next = v.dot(w) / v.squaredNorm();
    v = w / nw;
    if (i > 10 && std::abs(next - lam) <= 1e-15 * std::abs(next)) return next;
    lam = next;
  }
  return lam;
}

}  // namespace testutil

#endif
