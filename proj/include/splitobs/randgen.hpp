#ifndef SPLITOBS_RANDGEN_HPP_
#define SPLITOBS_RANDGEN_HPP_

#include <cstdint>
#include <random>

#include "splitobs/decomposition.hpp"
#include "splitobs/netgraph.hpp"

namespace splitobs {

// Deterministic random source. mt19937_64's bit stream is pinned by the
// standard; the mappings below avoid std::*_distribution, whose output is
// implementation-defined, so seeded runs reproduce bit-for-bit everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // Inclusive bounds.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * static_cast<double>(hi - lo + 1));
  }
  double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }
  // Standard normal (Box-Muller, two draws per call, no cached state).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// Random strongly connected digraph on m vertices (self-loops included).
NeighborGraph random_strongly_connected(Rng& rng, int m);

// Orthogonal matrix from the sign-fixed QR of a Gaussian matrix.
Matrix random_orthogonal(Rng& rng, int n);

struct RandomInstance {
  Plant plant;
  NeighborGraph graph;
};

// Random jointly observable multi-channel plant with nontrivial per-agent
// unobservable subspaces, plus a strongly connected graph. Dense random
// (C_i, A) pairs are almost surely observable agent-by-agent (every V_i
// would be empty), so the plant is built block-diagonal (1x1 blocks and 2x2
// rotation-scaling blocks with distinct spectra), each agent measures a
// subset of blocks with every block covered by someone and at least one
// agent not covering all, and the structure is then hidden behind a random
// orthogonal change of basis.
RandomInstance random_instance(Rng& rng, TimeKind kind, int max_n = 6, int max_m = 4);

}  // namespace splitobs

#endif  // SPLITOBS_RANDGEN_HPP_
