// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "shyps/gf2.h"

namespace shyps {

/// Σ g1⊗g2 over invertible r×r pairs.
struct TensorSum {
    size_t r = 0;
    std::vector<std::pair<BitMatrix, BitMatrix>> terms;

    explicit TensorSum(size_t r = 0) : r(r) {}
    /// Appends a term; throws std::logic_error unless both factors are invertible.
    void add(BitMatrix g1, BitMatrix g2);
    size_t weight() const { return terms.size(); }
    BitMatrix reconstruct() const;
};

/// Σ S(g) = Σ (g⊗g^T)·τ_r over invertible g.
struct SymTensorSum {
    size_t r = 0;
    std::vector<BitMatrix> terms;

    explicit SymTensorSum(size_t r = 0) : r(r) {}
    void add(BitMatrix g);
    size_t weight() const { return terms.size(); }
    BitMatrix reconstruct() const;
    /// Σ g⊗g^T without the trailing τ_r.
    BitMatrix reconstruct_untwisted() const;
};

/// S(A) = (A⊗A^T)·τ_r.
BitMatrix sym_term(const BitMatrix &a);
/// D(A,B) = S(A+B) + S(A) + S(B).
BitMatrix cross_term(const BitMatrix &a, const BitMatrix &b);

/// The canonical r-cycle 0→1→…→r−1→0 as a matrix.
BitMatrix canonical_cycle(size_t r);

/// Writes M as one invertible matrix (if M is invertible) or a sum of two.
std::vector<BitMatrix> sum_two_invertibles(const BitMatrix &m);
/// X, Y invertible with X + Y = I_k, k ≥ 2, built from the 2×2 and 3×3 blocks.
std::pair<BitMatrix, BitMatrix> identity_as_two_invertibles(size_t k);

/// Invertible matrices whose span contains the span of a linearly independent basis; at most min(2d, r², d+2).
std::vector<BitMatrix> invertible_spanning_set(const std::vector<BitMatrix> &basis, uint64_t seed = 0);

/// Diagonal D with A + D invertible; D = 0 when A is already invertible.
BitMatrix diagonal_complement(const BitMatrix &a);
/// Returns D if it is invertible, otherwise D + P (invertible for every r-cycle P).
BitMatrix cycle_complement(const BitMatrix &d, const BitMatrix &p);

/// Minimal number of Kronecker terms t, with the factors from a rank factorization of the block reshape.
std::vector<std::pair<BitMatrix, BitMatrix>> tensor_rank_factors(const BitMatrix &a, size_t r);

TensorSum tensor_decompose(const BitMatrix &a, size_t r, uint64_t seed = 0);
TensorSum tensor_decompose_upper_triangular(const BitMatrix &a, size_t r, uint64_t seed = 0);

/// L with L·L^T = S and at most rank(S)+1 columns (exactly rank+1 iff S has zero diagonal and S ≠ 0).
BitMatrix binary_cholesky(const BitMatrix &s);
/// M_i (possibly singular) with S = Σ S(M_i).
std::vector<BitMatrix> symmetric_tensor_decompose(const BitMatrix &s, size_t r);
SymTensorSum invertible_symmetric_decompose(const BitMatrix &s, size_t r, uint64_t seed = 0);

/// C invertible with A+C, B+C and A+B+C invertible, if one exists.
std::optional<BitMatrix> find_cross_complement(const BitMatrix &a, const BitMatrix &b, uint64_t seed = 0);
/// Invertible decomposition of D(A,B); four terms via a cross complement, seven for the r=3 exceptional pairs.
SymTensorSum cross_term_decompose(const BitMatrix &a, const BitMatrix &b, uint64_t seed = 0);

/// The weight-7 decomposition of D(E_11, [[0,1,0],[1,0,0],[0,0,1]]) at r = 3.
const std::vector<BitMatrix> &exceptional_cross_fixture();

/// True iff dmat is diagonal and dmat·τ_r is symmetric.
bool in_xi(const BitMatrix &dmat, size_t r);
/// The element of ξ whose diagonal is flatten(V), V symmetric.
BitMatrix xi_from_support(const BitMatrix &v);
/// Terms g with Σ g⊗g^T = dmat.
SymTensorSum xi_decompose(const BitMatrix &dmat, size_t r, uint64_t seed = 0);

/// Decomposition of the cross-block CNOT block for control (a,b) and target (c,d): E_{a,c}⊗E_{b,d}.
TensorSum single_cnot_cross(size_t r, std::pair<size_t, size_t> control, std::pair<size_t, size_t> target);
/// Decomposition of I + E_{a,c}⊗E_{b,d}, the in-block CNOT from (a,b) to (c,d).
TensorSum single_cnot_in_block(size_t r, std::pair<size_t, size_t> control, std::pair<size_t, size_t> target);
/// Decomposition of S(E_{i,j}), the single logical S on qubit (i,j).
SymTensorSum single_s(size_t r, size_t i, size_t j, uint64_t seed = 0);
/// Decomposition of D(E_{a,d}, E_{c,b}), the logical CZ between (a,b) and (c,d).
SymTensorSum single_cz(size_t r, std::pair<size_t, size_t> q1, std::pair<size_t, size_t> q2, uint64_t seed = 0);

}  // namespace shyps
