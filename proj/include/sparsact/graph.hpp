#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsact/types.hpp"

namespace sparsact {

// Undirected simple graph as a 1-based edge list.
struct EdgeListGraph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;
};

// Parses "u v" per line, '#' comments and blank lines skipped, 1-based
// vertices. Duplicate edges (either orientation) and self-loops are
// rejected with the offending line number.
EdgeListGraph load_edge_list(const std::string& path);

// Diffusion dynamics A = I - L/n from the graph Laplacian L. Rows sum to 1
// and A is symmetric, so the spectral norm is exactly 1.
MatrixXd graph_to_system(const EdgeListGraph& graph);

// A = I - L/n for an Erdos-Renyi graph G(n, p). edge_probability defaults
// to 2 ln(n) / n (connectivity threshold regime). p = 0 gives the identity;
// p = 1 gives the complete graph, A = (1/n) 1 1^T.
MatrixXd erdos_renyi_system(int n, uint64_t seed,
                            std::optional<double> edge_probability = {});

}  // namespace sparsact
