#include "splitobs/netgraph.hpp"

#include <algorithm>
#include <cmath>
#include <stack>

#include <Eigen/Eigenvalues>

namespace splitobs {

std::vector<int> NeighborGraph::in_neighbors(int i) const {
  std::vector<int> out;
  for (const auto& [j, k] : arcs)
    if (k == i) out.push_back(j);
  std::sort(out.begin(), out.end());
  return out;
}

bool NeighborGraph::has_self_loops() const {
  for (int i = 0; i < m; ++i)
    if (!arcs.count({i, i})) return false;
  return true;
}

NeighborGraph make_graph(int m, const std::vector<std::pair<int, int>>& arcs) {
  if (m <= 0) throw DimensionMismatch("make_graph: vertex count must be positive");
  NeighborGraph g;
  g.m = m;
  for (const auto& [j, i] : arcs) {
    if (j < 0 || j >= m || i < 0 || i >= m)
      throw DimensionMismatch("make_graph: arc endpoint out of range");
    g.arcs.insert({j, i});
  }
  for (int i = 0; i < m; ++i) g.arcs.insert({i, i});
  return g;
}

Matrix flow_matrix(const NeighborGraph& g) {
  if (!g.has_self_loops())
    throw MissingSelfLoop("flow_matrix: every vertex needs a self-loop");
  Matrix S = Matrix::Zero(g.m, g.m);
  for (int i = 0; i < g.m; ++i) {
    auto ni = g.in_neighbors(i);
    for (int j : ni) S(i, j) = 1.0 / static_cast<double>(ni.size());
  }
  return S;
}

namespace {

// Iterative Tarjan SCC; returns the number of strongly connected components.
int count_sccs(const NeighborGraph& g) {
  const int m = g.m;
  std::vector<std::vector<int>> adj(m);  // j -> i edges
  for (const auto& [j, i] : g.arcs)
    if (j != i) adj[j].push_back(i);

  std::vector<int> index(m, -1), lowlink(m, 0);
  std::vector<bool> on_stack(m, false);
  std::stack<int> scc_stack;
  int next_index = 0, sccs = 0;

  struct Frame { int v; size_t child; };
  for (int root = 0; root < m; ++root) {
    if (index[root] != -1) continue;
    std::stack<Frame> call;
    call.push({root, 0});
    index[root] = lowlink[root] = next_index++;
    scc_stack.push(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.top();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = lowlink[w] = next_index++;
          scc_stack.push(w);
          on_stack[w] = true;
          call.push({w, 0});
        } else if (on_stack[w]) {
          lowlink[f.v] = std::min(lowlink[f.v], index[w]);
        }
      } else {
        if (lowlink[f.v] == index[f.v]) {
          ++sccs;
          int w;
          do {
            w = scc_stack.top();
            scc_stack.pop();
            on_stack[w] = false;
          } while (w != f.v);
        }
        int v = f.v;
        call.pop();
        if (!call.empty())
          lowlink[call.top().v] = std::min(lowlink[call.top().v], lowlink[v]);
      }
    }
  }
  return sccs;
}

NeighborGraph graph_of_transpose_sparsity(const Matrix& S) {
  NeighborGraph g;
  g.m = static_cast<int>(S.rows());
  for (int i = 0; i < g.m; ++i)
    for (int j = 0; j < g.m; ++j)
      if (S(i, j) != 0.0) g.arcs.insert({j, i});
  for (int i = 0; i < g.m; ++i) g.arcs.insert({i, i});
  return g;
}

}  // namespace

bool strongly_connected(const NeighborGraph& g) {
  return count_sccs(g) == 1;
}

Vector perron_vector(const Matrix& S) {
  const int m = static_cast<int>(S.rows());
  if (S.cols() != m) throw DimensionMismatch("perron_vector: S not square");
  for (int i = 0; i < m; ++i)
    if (std::abs(S.row(i).sum() - 1.0) > 1e-9)
      throw Error("perron_vector: S is not row-stochastic");
  if (!strongly_connected(graph_of_transpose_sparsity(S)))
    throw NotIrreducible("perron_vector: graph is not strongly connected");

  Vector pi = Vector::Constant(m, 1.0 / m);
  const Matrix St = S.transpose();
  bool converged = false;
  for (int it = 0; it < 100000; ++it) {
    Vector next = St * pi;
    next /= next.sum();
    double delta = (next - pi).lpNorm<Eigen::Infinity>();
    pi = next;
    if (delta < 1e-15) { converged = true; break; }
  }
  if (!converged || (St * pi - pi).lpNorm<Eigen::Infinity>() > 1e-10) {
    // Periodic or slowly mixing chains: fall back to a dense eigensolve and
    // take the eigenvector of the eigenvalue closest to 1.
    Eigen::EigenSolver<Matrix> es(St);
    int best = 0;
    double best_dist = std::abs(es.eigenvalues()(0) - std::complex<double>(1.0));
    for (int i = 1; i < m; ++i) {
      double d = std::abs(es.eigenvalues()(i) - std::complex<double>(1.0));
      if (d < best_dist) { best = i; best_dist = d; }
    }
    Vector v = es.eigenvectors().col(best).real();
    pi = v / v.sum();
  }
  if (pi.minCoeff() <= 0.0)
    throw NotIrreducible("perron_vector: fixed point not positive");
  return pi;
}

NetworkSnapshot make_snapshot(const NeighborGraph& g) {
  NetworkSnapshot snap;
  snap.graph = g;
  snap.S = flow_matrix(g);
  if (!strongly_connected(g))
    throw NotIrreducible("make_snapshot: graph is not strongly connected");
  snap.pi = perron_vector(snap.S);
  snap.Pi = snap.pi.asDiagonal();
  snap.L = generalized_laplacian(snap);
  return snap;
}

Matrix generalized_laplacian(const NetworkSnapshot& snap) {
  const Matrix& S = snap.S;
  Matrix Pi = snap.pi.asDiagonal();
  Matrix L = 2.0 * Pi - Pi * S - S.transpose() * Pi;
  return 0.5 * (L + L.transpose());  // kill symmetry rounding
}

std::pair<Matrix, Matrix> discrete_laplacian(const Matrix& M) {
  Vector pi = perron_vector(M);  // validates stochasticity + irreducibility
  Matrix Pi = pi.asDiagonal();
  Matrix L = Pi - M.transpose() * Pi * M;
  return {Pi, 0.5 * (L + L.transpose())};
}

bool doubly_stochastic(const Matrix& S, double tol) {
  for (int i = 0; i < S.rows(); ++i)
    if (std::abs(S.row(i).sum() - 1.0) > tol) return false;
  for (int j = 0; j < S.cols(); ++j)
    if (std::abs(S.col(j).sum() - 1.0) > tol) return false;
  return true;
}

Matrix metropolis_weights(const NeighborGraph& g) {
  for (const auto& [j, i] : g.arcs)
    if (j != i && !g.arcs.count({i, j}))
      throw NotSymmetricGraph("metropolis_weights: arc set is not symmetric");
  const int m = g.m;
  std::vector<int> deg(m, 0);
  for (const auto& [j, i] : g.arcs)
    if (j != i) ++deg[i];
  Matrix W = Matrix::Zero(m, m);
  for (const auto& [j, i] : g.arcs)
    if (j != i) W(i, j) = 1.0 / (1.0 + std::max(deg[i], deg[j]));
  for (int i = 0; i < m; ++i) W(i, i) = 1.0 - W.row(i).sum();
  return W;
}

}  // namespace splitobs
