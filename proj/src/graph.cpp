#include "sparsact/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "sparsact/rng.hpp"

namespace sparsact {

EdgeListGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open edge list file: " + path);
  }
  EdgeListGraph graph;
  std::set<std::pair<int, int>> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream tokens(line);
    int u = 0, v = 0;
    if (!(tokens >> u)) continue;  // blank or comment-only line
    std::string extra;
    if (!(tokens >> v) || (tokens >> extra)) {
      throw std::invalid_argument("edge list line " +
                                  std::to_string(line_number) +
                                  ": expected exactly two vertex ids");
    }
    if (u < 1 || v < 1) {
      throw std::invalid_argument("edge list line " +
                                  std::to_string(line_number) +
                                  ": vertex ids are 1-based");
    }
    if (u == v) {
      throw std::invalid_argument("edge list line " +
                                  std::to_string(line_number) +
                                  ": self-loops are not allowed");
    }
    const auto key = std::minmax(u, v);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("edge list line " +
                                  std::to_string(line_number) +
                                  ": duplicate edge");
    }
    graph.edges.push_back(key);
    graph.vertex_count = std::max({graph.vertex_count, u, v});
  }
  if (graph.edges.empty()) {
    throw std::invalid_argument("edge list holds no edges: " + path);
  }
  return graph;
}

MatrixXd graph_to_system(const EdgeListGraph& graph) {
  const int n = graph.vertex_count;
  if (n <= 0) {
    throw std::invalid_argument("graph has no vertices");
  }
  MatrixXd laplacian = MatrixXd::Zero(n, n);
  for (const auto& [u, v] : graph.edges) {
    if (u < 1 || u > n || v < 1 || v > n || u == v) {
      throw std::invalid_argument("edge references an invalid vertex");
    }
    laplacian(u - 1, v - 1) -= 1.0;
    laplacian(v - 1, u - 1) -= 1.0;
    laplacian(u - 1, u - 1) += 1.0;
    laplacian(v - 1, v - 1) += 1.0;
  }
  return MatrixXd::Identity(n, n) - laplacian / static_cast<double>(n);
}

MatrixXd erdos_renyi_system(int n, uint64_t seed,
                            std::optional<double> edge_probability) {
  if (n <= 0) {
    throw std::invalid_argument("vertex count must be positive");
  }
  const double p =
      edge_probability.value_or(2.0 * std::log(static_cast<double>(n)) / n);
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("edge probability must lie in [0, 1]");
  }
  std::mt19937_64 engine = make_engine(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  MatrixXd laplacian = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (uniform(engine) < p) {
        laplacian(i, j) -= 1.0;
        laplacian(j, i) -= 1.0;
        laplacian(i, i) += 1.0;
        laplacian(j, j) += 1.0;
      }
    }
  }
  return MatrixXd::Identity(n, n) - laplacian / static_cast<double>(n);
}

}  // namespace sparsact
