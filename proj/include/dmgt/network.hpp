#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dmgt/types.hpp"

namespace dmgt {

struct Graph {
  int m = 0;
  std::vector<std::vector<int>> adj;
  int retries = 0;

  int edge_count() const;
  bool connected() const;
  void add_edge(int i, int j);
  std::vector<std::pair<int, int>> edges() const;
};

Graph erdos_renyi(int m, double p, std::uint64_t seed);
Graph complete_graph(int m);
Graph ring_graph(int m);
Graph path_graph(int m);
Graph graph_from_edges(int m, const std::vector<std::pair<int, int>>& edges);

struct MixingMatrix {
  int m = 0;
  Mat W;
  double rho = 0.0;
  Graph graph;
};

MixingMatrix metropolis_weights(const Graph& g);
MixingMatrix mixing_from_matrix(const Mat& W);
double spectral_gap(const Mat& W);

// Contraction inequality for V+ = W V + U in the H / H+ weighted norms.
bool contraction_check(const MixingMatrix& W, const Mat& H, const Mat& H_plus, const Mat& V,
                       const Mat& U);

// Spectral norm of H+^{1/2} H^{-1/2}.
double root_ratio_norm(const Mat& H, const Mat& H_plus);

}  // namespace dmgt
