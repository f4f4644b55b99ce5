#ifndef SPLITOBS_STACKED_OPS_HPP_
#define SPLITOBS_STACKED_OPS_HPP_

#include "splitobs/decomposition.hpp"
#include "splitobs/netgraph.hpp"

namespace splitobs {

// Builders shared by designer, simulator and analyzer. All operate on the
// stacked error coordinates e = [e_1; ...; e_m] of dimension mn.

// S_bar = S (x) I_n.
Matrix stacked_flow(const StackedDecomposition& st, const NetworkSnapshot& snap);

// N = V' (I - S_bar) V, the consensus map on the unobservable directions.
Matrix consensus_map(const StackedDecomposition& st, const NetworkSnapshot& snap);

// B = V' S_bar V.
Matrix mixing_map(const StackedDecomposition& st, const NetworkSnapshot& snap);

// R = V' (Pi (x) I_n) V, the Perron-weighted Gram matrix (positive definite).
Matrix perron_weight(const StackedDecomposition& st, const NetworkSnapshot& snap);

// H = blockdiag{pi_i I_{n_i}}.
Matrix perron_block_diag(const StackedDecomposition& st, const NetworkSnapshot& snap);

// Continuous error generator A_err = A_bar_big - g P (I - S_bar).
Matrix error_map_continuous(const StackedDecomposition& st, const NetworkSnapshot& snap,
                            double g);

// Discrete error map A_bar_big (I - P (I - S_bar))^q.
Matrix error_map_discrete(const StackedDecomposition& st, const NetworkSnapshot& snap, int q);

}  // namespace splitobs

#endif  // SPLITOBS_STACKED_OPS_HPP_
