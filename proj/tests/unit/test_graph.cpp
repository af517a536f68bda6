#include <doctest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <string>

#include "sparsact/graph.hpp"
#include "sparsact/linalg.hpp"
#include "test_support.hpp"

using namespace sparsact;

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = "sparsact_test_graph_" + std::to_string(counter++) + ".edges";
    std::ofstream out(path);
    out << contents;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("erdos_renyi_system limit probabilities") {
  const int n = 5;
  MatrixXd empty = erdos_renyi_system(n, 1, 0.0);
  CHECK((empty - MatrixXd::Identity(n, n)).norm() == 0.0);

  MatrixXd complete = erdos_renyi_system(n, 1, 1.0);
  MatrixXd expected = MatrixXd::Constant(n, n, 1.0 / n);
  CHECK((complete - expected).norm() <= 1e-12);
}

TEST_CASE("erdos_renyi_system rows sum to one and stay symmetric") {
  for (uint64_t seed = 0; seed < 5; ++seed) {
    MatrixXd a = erdos_renyi_system(12, seed);
    CHECK((a.rowwise().sum() - VectorXd::Ones(12)).norm() <= 1e-12);
    CHECK((a - a.transpose()).norm() <= 1e-12);
    CHECK(spectral_norm(a) <= 1.0 + 1e-10);
  }

  MatrixXd again = erdos_renyi_system(12, 3);
  CHECK((again - erdos_renyi_system(12, 3)).norm() == 0.0);
  CHECK((again - erdos_renyi_system(12, 4)).norm() > 0.0);
}

TEST_CASE("erdos_renyi_system validates arguments") {
  CHECK_THROWS_AS(erdos_renyi_system(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(erdos_renyi_system(5, 1, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(erdos_renyi_system(5, 1, 1.5), std::invalid_argument);
}

TEST_CASE("load_edge_list parses comments and blank lines") {
  TempFile file("# a comment\n\n1 2\n2 3\n");
  EdgeListGraph graph = load_edge_list(file.path);
  CHECK(graph.vertex_count == 3);
  REQUIRE(graph.edges.size() == 2);
  CHECK(graph.edges[0] == std::make_pair(1, 2));
  CHECK(graph.edges[1] == std::make_pair(2, 3));
}

TEST_CASE("graph_to_system on a single edge averages the pair") {
  TempFile file("1 2\n");
  MatrixXd a = graph_to_system(load_edge_list(file.path));
  MatrixXd expected(2, 2);
  expected << 0.5, 0.5, 0.5, 0.5;
  CHECK((a - expected).norm() <= 1e-14);
}

TEST_CASE("load_edge_list rejects malformed lines with their number") {
  TempFile extra("1 2 3\n");
  CHECK_THROWS_WITH_AS(load_edge_list(extra.path), doctest::Contains("line 1"),
                       std::invalid_argument);

  TempFile zero("0 2\n");
  CHECK_THROWS_AS(load_edge_list(zero.path), std::invalid_argument);

  TempFile loop("2 2\n");
  CHECK_THROWS_AS(load_edge_list(loop.path), std::invalid_argument);

  TempFile dup("1 2\n2 1\n");
  CHECK_THROWS_WITH_AS(load_edge_list(dup.path), doctest::Contains("line 2"),
                       std::invalid_argument);

  CHECK_THROWS_AS(load_edge_list("does_not_exist.edges"),
                  std::invalid_argument);
}

TEST_CASE("bundled karate club graph loads with the known shape") {
  std::string path = std::string(SPARSACT_SOURCE_DIR) +
                     "/data/zachary_karate.edges";
  EdgeListGraph graph = load_edge_list(path);
  CHECK(graph.vertex_count == 34);
  CHECK(graph.edges.size() == 78);

  MatrixXd a = graph_to_system(graph);
  REQUIRE(a.rows() == 34);
  CHECK((a.rowwise().sum() - VectorXd::Ones(34)).norm() <= 1e-12);
  CHECK((a - a.transpose()).norm() == 0.0);
  // Hub vertex 1 touches 16 others.
  CHECK(a(0, 0) == doctest::Approx(1.0 - 16.0 / 34.0).epsilon(1e-14));
}
