#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "splitobs/netgraph.hpp"
#include "splitobs/randgen.hpp"

using namespace splitobs;

namespace {

// Reachability oracle: boolean transitive closure by repeated squaring-free
// Floyd-Warshall; independent of the Tarjan-style path in the library.
bool reachability_strongly_connected(const NeighborGraph& g) {
  std::vector<std::vector<bool>> reach(g.m, std::vector<bool>(g.m, false));
  for (auto& [j, i] : g.arcs) reach[j][i] = true;
  for (int k = 0; k < g.m; ++k)
    for (int a = 0; a < g.m; ++a)
      for (int b = 0; b < g.m; ++b)
        if (reach[a][k] && reach[k][b]) reach[a][b] = true;
  for (int a = 0; a < g.m; ++a)
    for (int b = 0; b < g.m; ++b)
      if (!reach[a][b]) return false;
  return true;
}

NeighborGraph random_digraph(Rng& rng, int m, double p) {
  std::vector<std::pair<int, int>> arcs;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && rng.uniform() < p) arcs.push_back({a, b});
  return make_graph(m, arcs);
}

}  // namespace

TEST_SUITE("netgraph") {

TEST_CASE("make_graph inserts self-loops; flow matrix is uniform row averaging") {
  NeighborGraph g2 = make_graph(2, {{0, 1}, {1, 0}});
  CHECK(g2.has_self_loops());
  Matrix S2 = flow_matrix(g2);
  CHECK((S2 - Matrix{{0.5, 0.5}, {0.5, 0.5}}).norm() <= 1e-15);

  // directed 3-cycle: every row has exactly two entries of 1/2
  Matrix S3 = flow_matrix(testkit::graph_b());
  for (int i = 0; i < 3; ++i) {
    int halves = 0;
    for (int j = 0; j < 3; ++j)
      if (std::abs(S3(i, j) - 0.5) < 1e-15) ++halves;
    CHECK(halves == 2);
    CHECK(S3.row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
  }

  // vertex with only its self-loop gets a unit row
  NeighborGraph iso = make_graph(2, {{0, 1}});
  Matrix Si = flow_matrix(iso);
  CHECK(Si(0, 0) == doctest::Approx(1.0));
  CHECK(Si(0, 1) == doctest::Approx(0.0));

  NeighborGraph broken;
  broken.m = 2;
  broken.arcs = {{0, 1}};  // built by hand, no self-loops
  CHECK_THROWS_AS(flow_matrix(broken), MissingSelfLoop);
}

TEST_CASE("strongly_connected against a reachability oracle") {
  CHECK(strongly_connected(testkit::graph_b()));
  CHECK_FALSE(strongly_connected(make_graph(2, {{0, 1}})));

  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    int m = rng.uniform_int(2, 7);
    NeighborGraph g = random_digraph(rng, m, rng.uniform(0.1, 0.6));
    CHECK(strongly_connected(g) == reachability_strongly_connected(g));
  }
}

TEST_CASE("perron_vector: pinned fixed points and residuals") {
  Matrix Sds{{0.5, 0.5}, {0.5, 0.5}};
  Vector pi = perron_vector(Sds);
  CHECK(pi(0) == doctest::Approx(0.5).epsilon(1e-12));

  Matrix S{{0.5, 0.5}, {0.25, 0.75}};
  pi = perron_vector(S);
  CHECK(pi(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(pi(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));

  CHECK_THROWS_AS(perron_vector(Matrix::Identity(2, 2)), NotIrreducible);

  Rng rng(29);
  for (int trial = 0; trial < 50; ++trial) {
    NeighborGraph g = random_strongly_connected(rng, 5);
    Matrix Sf = flow_matrix(g);
    Vector p = perron_vector(Sf);
    CHECK(p.minCoeff() > 0.0);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((Sf.transpose() * p - p).norm() <= 1e-10);
  }
}

TEST_CASE("snapshot of the chordal ring: Perron vector and Laplacian spectrum") {
  NetworkSnapshot snap = make_snapshot(testkit::graph_a());
  CHECK(snap.pi(0) == doctest::Approx(4.0 / 9.0).epsilon(1e-10));
  CHECK(snap.pi(1) == doctest::Approx(2.0 / 9.0).epsilon(1e-10));
  CHECK(snap.pi(2) == doctest::Approx(3.0 / 9.0).epsilon(1e-10));

  Spectrum ls = eigenvalues(snap.L);
  std::vector<double> eigs;
  for (auto z : ls.eigenvalues) eigs.push_back(z.real());
  std::sort(eigs.begin(), eigs.end());
  CHECK(std::abs(eigs[0]) <= 1e-10);
  CHECK(eigs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(eigs[2] == doctest::Approx(7.0 / 9.0).epsilon(1e-9));
  CHECK((snap.L - generalized_laplacian(snap)).norm() <= 1e-12);
}

TEST_CASE("generalized Laplacian: closed forms and PSD structure") {
  NetworkSnapshot s1 = make_snapshot(make_graph(1, {}));
  CHECK(s1.L.rows() == 1);
  CHECK(std::abs(s1.L(0, 0)) <= 1e-15);

  NetworkSnapshot s2 = make_snapshot(make_graph(2, {{0, 1}, {1, 0}}));
  CHECK((s2.L - Matrix{{0.5, -0.5}, {-0.5, 0.5}}).norm() <= 1e-12);

  Rng rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    NeighborGraph g = random_strongly_connected(rng, rng.uniform_int(2, 6));
    NetworkSnapshot snap = make_snapshot(g);
    CHECK((snap.L - snap.L.transpose()).norm() <= 1e-12);
    CHECK((snap.L * Vector::Ones(g.m)).norm() <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> es(snap.L);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    if (g.m >= 2) CHECK(es.eigenvalues()(1) > 1e-10);  // kernel dimension one
  }
}

TEST_CASE("discrete Laplacian: kernel structure for positive-diagonal stochastic M") {
  auto [Pi1, L1] = discrete_laplacian(Matrix{{1.0}});
  CHECK(std::abs(L1(0, 0)) <= 1e-15);

  auto [Pi2, L2] = discrete_laplacian(Matrix{{0.5, 0.5}, {0.5, 0.5}});
  CHECK((L2 * Vector::Ones(2)).norm() <= 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es2(L2);
  CHECK(es2.eigenvalues().minCoeff() >= -1e-12);

  Rng rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    int m = rng.uniform_int(2, 6);
    NeighborGraph g = random_strongly_connected(rng, m);
    // non-uniform positive weights on the same arc set, rows renormalized
    Matrix M = Matrix::Zero(m, m);
    for (auto& [j, i] : g.arcs) M(i, j) = rng.uniform(0.1, 1.0);
    for (int i = 0; i < m; ++i) M.row(i) /= M.row(i).sum();
    auto [Pi, L] = discrete_laplacian(M);
    CHECK((L * Vector::Ones(m)).norm() <= 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> es(L);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    CHECK(es.eigenvalues()(1) > 1e-10);
  }
}

TEST_CASE("doubly_stochastic and Metropolis weights") {
  CHECK(doubly_stochastic(Matrix::Identity(3, 3)));
  CHECK_FALSE(doubly_stochastic(make_snapshot(testkit::graph_a()).S));
  CHECK(doubly_stochastic(make_snapshot(testkit::graph_b()).S));  // ring: circulant

  Matrix W = metropolis_weights(make_graph(2, {{0, 1}, {1, 0}}));
  CHECK((W - Matrix{{0.5, 0.5}, {0.5, 0.5}}).norm() <= 1e-14);

  NeighborGraph und =
      make_graph(4, {{0, 1}, {1, 0}, {1, 2}, {2, 1}, {2, 3}, {3, 2}, {3, 0}, {0, 3}});
  Matrix W4 = metropolis_weights(und);
  CHECK((W4 - W4.transpose()).norm() <= 1e-14);
  CHECK(doubly_stochastic(W4));
  for (int i = 0; i < 4; ++i) CHECK(W4(i, i) > 0.0);

  CHECK_THROWS_AS(metropolis_weights(make_graph(3, {{0, 1}, {1, 2}, {2, 0}})),
                  NotSymmetricGraph);
}

TEST_CASE("in_neighbors lists sources of incoming arcs") {
  NeighborGraph g = testkit::graph_a();
  auto n2 = g.in_neighbors(2);  // vertex 3: fed by 1 (chord), 2 (ring), itself
  std::set<int> got(n2.begin(), n2.end());
  CHECK(got == std::set<int>{0, 1, 2});
  auto n1 = g.in_neighbors(1);
  CHECK(std::set<int>(n1.begin(), n1.end()) == std::set<int>{0, 1});
}

}  // TEST_SUITE
