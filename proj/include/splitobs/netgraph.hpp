#ifndef SPLITOBS_NETGRAPH_HPP_
#define SPLITOBS_NETGRAPH_HPP_

#include <set>
#include <utility>
#include <vector>

#include "splitobs/matrixkit.hpp"

namespace splitobs {

// Directed neighbor graph on vertices 0..m-1. An arc (j, i) means j is a
// neighbor of i (information flows j -> i). Self-loops are required at every
// vertex; make_graph adds them so callers list only the off-diagonal arcs.
struct NeighborGraph {
  int m = 0;
  std::set<std::pair<int, int>> arcs;

  std::vector<int> in_neighbors(int i) const;
  bool has_self_loops() const;
};

NeighborGraph make_graph(int m, const std::vector<std::pair<int, int>>& arcs);

// A graph plus everything derived from it that the analysis needs: the flow
// matrix S = D^{-1} A', its Perron vector pi (S' pi = pi), Pi = diag(pi), and
// the generalized Laplacian L = 2 Pi - Pi S - S' Pi.
struct NetworkSnapshot {
  NeighborGraph graph;
  Matrix S;
  Vector pi;
  Matrix Pi;
  Matrix L;
};

Matrix flow_matrix(const NeighborGraph& g);

bool strongly_connected(const NeighborGraph& g);

// Perron vector of S' (normalized to a probability vector). Power iteration
// with a dense-eigensolve fallback.
Vector perron_vector(const Matrix& S);

NetworkSnapshot make_snapshot(const NeighborGraph& g);

// Recomputes L from the snapshot's S and pi.
Matrix generalized_laplacian(const NetworkSnapshot& snap);

// (Pi_M, L_M) with L_M = Pi_M - M' Pi_M M for a row-stochastic M whose
// transpose graph is strongly connected.
std::pair<Matrix, Matrix> discrete_laplacian(const Matrix& M);

bool doubly_stochastic(const Matrix& S, double tol = 1e-10);

// Metropolis weights for an undirected (symmetric-arc) graph:
// w_ij = 1/(1 + max(d_i, d_j)) on edges, diagonal fills each row to 1.
Matrix metropolis_weights(const NeighborGraph& g);

}  // namespace splitobs

#endif  // SPLITOBS_NETGRAPH_HPP_
