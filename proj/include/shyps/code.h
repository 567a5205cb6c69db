// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "shyps/gf2.h"
#include "shyps/simplex.h"

namespace shyps {

/// SHYPS(r): subsystem hypergraph product of the simplex check matrix with itself.
/// Physical qubit (i,j) of the n_r×n_r grid has index i·n_r+j; logical qubits use the same scheme on r×r.
struct ShypsCode {
    SimplexCode simplex;
    size_t r = 0;
    size_t nr = 0;
    size_t n = 0;
    size_t k = 0;
    size_t d = 0;
    BitMatrix GX, GZ;  // H⊗I, I⊗H
    BitMatrix SX, SZ;  // H⊗G, G⊗H
    BitMatrix LX, LZ;  // P⊗G, G⊗P
    std::shared_ptr<const RowSpace> gx_space, gz_space, sx_space, sz_space;
};

ShypsCode build_shyps(size_t r);
/// Shared cached instance per r.
const ShypsCode &shyps_code(size_t r);

/// π = σ1⊗σ2 with σi = aut_permutation(gi).
Permutation lift_automorphism(const ShypsCode &code, const BitMatrix &g1, const BitMatrix &g2);

/// Logical CNOT matrix g1^{-T}⊗g2 induced by the transversal CNOT with pairing lift_automorphism(g1, g2).
BitMatrix logical_action_of_lift(const ShypsCode &code, const BitMatrix &g1, const BitMatrix &g2);

struct DistanceReport {
    size_t no_logical_below = 0;  // no dressed logical of weight < this value exists (of either type)
    size_t w_max = 0;
    std::optional<std::vector<size_t>> witness;  // support of a minimum-weight dressed logical, if found
    char witness_type = 0;                        // 'X' or 'Z'
};

/// Exhaustively classifies all pure-X and pure-Z patterns of weight ≤ w_max.
DistanceReport dressed_distance_bound(const ShypsCode &code, size_t w_max);

}  // namespace shyps
