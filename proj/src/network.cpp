#include "dmgt/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "dmgt/errors.hpp"
#include "dmgt/parallel.hpp"

namespace dmgt {

int Graph::edge_count() const {
  int e = 0;
  for (const auto& a : adj) e += static_cast<int>(a.size());
  return e / 2;
}

bool Graph::connected() const {
  if (m == 0) return false;
  std::vector<char> seen(m, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == m;
}

void Graph::add_edge(int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= m || j >= m) throw std::invalid_argument("add_edge: invalid edge");
  if (std::find(adj[i].begin(), adj[i].end(), j) != adj[i].end()) return;
  adj[i].insert(std::upper_bound(adj[i].begin(), adj[i].end(), j), j);
  adj[j].insert(std::upper_bound(adj[j].begin(), adj[j].end(), i), i);
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < m; ++i)
    for (int j : adj[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

static Graph empty_graph(int m) {
  Graph g;
  g.m = m;
  g.adj.assign(m, {});
  return g;
}

Graph erdos_renyi(int m, double p, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("erdos_renyi: m must be at least 2");
  if (!(p > 0 && p <= 1)) throw std::invalid_argument("erdos_renyi: p must lie in (0,1]");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    auto rng = make_rng({seed, static_cast<std::uint64_t>(attempt)});
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Graph g = empty_graph(m);
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (U(rng) < p) g.add_edge(i, j);
    if (g.connected()) {
      g.retries = attempt;
      return g;
    }
  }
  throw DisconnectedAfterRetries("erdos_renyi: no connected graph after 1000 attempts");
}

Graph complete_graph(int m) {
  Graph g = empty_graph(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) g.add_edge(i, j);
  return g;
}

Graph ring_graph(int m) {
  if (m < 3) return path_graph(m);
  Graph g = empty_graph(m);
  for (int i = 0; i < m; ++i) g.add_edge(i, (i + 1) % m);
  return g;
}

Graph path_graph(int m) {
  Graph g = empty_graph(m);
  for (int i = 0; i + 1 < m; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph graph_from_edges(int m, const std::vector<std::pair<int, int>>& edges) {
  Graph g = empty_graph(m);
  for (auto [i, j] : edges) g.add_edge(i, j);
  return g;
}

double spectral_gap(const Mat& W) {
  const Eigen::Index m = W.rows();
  Mat D = W - Mat::Constant(m, m, 1.0 / m);
  Eigen::SelfAdjointEigenSolver<Mat> es(D, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

MixingMatrix metropolis_weights(const Graph& g) {
  if (g.m < 1) throw std::invalid_argument("metropolis_weights: empty graph");
  if (!g.connected()) throw Disconnected("metropolis_weights: graph is not connected");
  MixingMatrix M;
  M.m = g.m;
  M.graph = g;
  M.W = Mat::Zero(g.m, g.m);
  for (int i = 0; i < g.m; ++i) {
    double off = 0.0;
    for (int j : g.adj[i]) {
      double w = 1.0 / (1.0 + std::max(g.adj[i].size(), g.adj[j].size()));
      M.W(i, j) = w;
      off += w;
    }
    M.W(i, i) = 1.0 - off;
  }
  M.rho = spectral_gap(M.W);
  return M;
}

MixingMatrix mixing_from_matrix(const Mat& W) {
  MixingMatrix M;
  M.m = static_cast<int>(W.rows());
  M.W = W;
  M.rho = spectral_gap(W);
  M.graph = empty_graph(M.m);
  for (int i = 0; i < M.m; ++i)
    for (int j = i + 1; j < M.m; ++j)
      if (W(i, j) != 0.0) M.graph.add_edge(i, j);
  return M;
}

namespace {

Mat spd_power(const Mat& H, double e) {
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.eigenvalues().minCoeff() <= 0) throw PreconditionViolated("matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().array().pow(e).matrix().asDiagonal() *
         es.eigenvectors().transpose();
}

double weighted_disagreement(const Mat& V, const Mat& H) {
  Eigen::RowVectorXd mean = V.colwise().mean();
  double s = 0.0;
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    Eigen::RowVectorXd r = V.row(i) - mean;
    s += r * H * r.transpose();
  }
  return s;
}

}  // namespace

double root_ratio_norm(const Mat& H, const Mat& H_plus) {
  Mat P = spd_power(H_plus, 0.5) * spd_power(H, -0.5);
  Eigen::JacobiSVD<Mat> svd(P);
  return svd.singularValues()(0);
}

bool contraction_check(const MixingMatrix& W, const Mat& H, const Mat& H_plus, const Mat& V,
                       const Mat& U) {
  const double rho = W.rho;
  double n = root_ratio_norm(H, H_plus);
  double alpha = n * n - 1.0;
  if (alpha > 0.5 * (1.0 - rho) * (1.0 + 1e-12))
    throw PreconditionViolated("contraction_check: weight change exceeds (1-rho)/2");
  Mat Vp = W.W * V + U;
  double lhs = weighted_disagreement(Vp, H_plus);
  double rhs = rho * weighted_disagreement(V, H);
  double uu = 0.0;
  for (Eigen::Index i = 0; i < U.rows(); ++i) uu += U.row(i) * H * U.row(i).transpose();
  rhs += 3.0 / (1.0 - rho) * uu;
  return lhs <= rhs * (1.0 + 1e-10) + 1e-300;
}

}  // namespace dmgt
