// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "shyps/gf2.h"
#include "shyps/poly.h"

namespace shyps {

/// A Clifford operator modulo Paulis on m qubits, acting on Pauli row vectors (u|v) by p ↦ p·mat.
/// Applying χ1 and then χ2 corresponds to the product χ1·χ2.
struct SymplecticMatrix {
    size_t m = 0;
    BitMatrix mat;

    SymplecticMatrix() = default;
    explicit SymplecticMatrix(BitMatrix full);
    static SymplecticMatrix identity(size_t m);
    static SymplecticMatrix from_blocks(const BitMatrix &a, const BitMatrix &b, const BitMatrix &c,
                                        const BitMatrix &d);

    BitMatrix A() const { return mat.block(0, 0, m, m); }
    BitMatrix B() const { return mat.block(0, m, m, m); }
    BitMatrix C() const { return mat.block(m, 0, m, m); }
    BitMatrix D() const { return mat.block(m, m, m, m); }
    bool is_symplectic() const;
    SymplecticMatrix inverse() const;
    SymplecticMatrix operator*(const SymplecticMatrix &o) const { return SymplecticMatrix(mat * o.mat); }
    bool operator==(const SymplecticMatrix &o) const { return mat == o.mat; }
};

BitMatrix omega(size_t m);

SymplecticMatrix from_cnot(const BitMatrix &c);
SymplecticMatrix from_diagonal(const BitMatrix &b);
SymplecticMatrix from_x_diagonal(const BitMatrix &b);
SymplecticMatrix from_hadamard(const BitVec &v);
/// Logical qubit permutation moving qubit i to position σ(i).
SymplecticMatrix from_permutation(const Permutation &sigma);
/// Block-diagonal combination acting on disjoint qubit ranges.
SymplecticMatrix direct_sum(const SymplecticMatrix &a, const SymplecticMatrix &b);

BitVec pauli_image(const SymplecticMatrix &chi, const BitVec &p);
/// ω(p, q) = u_p·v_q + v_p·u_q.
bool symplectic_form(const BitVec &p, const BitVec &q);

/// Product of random CNOT, diagonal and Hadamard factors; not uniformly distributed.
SymplecticMatrix random_symplectic(size_t m, std::mt19937_64 &rng);

BitMatrix companion(const Poly &f);

/// Invariant factors (non-unit, monic, each dividing the next) from the Smith form of xI − M.
std::vector<Poly> invariant_factors(const BitMatrix &m);

struct RationalCanonicalForm {
    BitMatrix S;       // invertible, S·Λ·S^{-1} = M
    BitMatrix Lambda;  // block diagonal of companion matrices
    std::vector<Poly> factors;
};

RationalCanonicalForm rational_canonical_form(const BitMatrix &m, uint64_t seed = 0);

struct SymmetricPair {
    BitMatrix s1;
    BitMatrix s2;
};

/// Symmetric S1, S2 with S1·S2 = M.
SymmetricPair product_of_two_symmetrics(const BitMatrix &m, uint64_t seed = 0);

/// Symmetric K, with every row of weight ≤ 1, such that [[I,K],[0,I]]·χ has an invertible A block.
BitMatrix make_top_left_invertible(const SymplecticMatrix &chi);

struct XZXZ {
    BitMatrix L, M, N, P;
};

/// χ = [[I,0],[L,I]]·[[I,M],[0,I]]·[[I,0],[N,I]]·[[I,P],[0,I]]; requires invertible A.
XZXZ xzxz_factor(const SymplecticMatrix &chi, uint64_t seed = 0);

/// C = DZ·DX·DZ'·DX'·DZ(1) as operators, so in application order DZ(1) comes first. The matrix identity is
/// χ = from_diagonal(dz1)·from_x_diagonal(dx_prime)·from_diagonal(dz_prime)·from_x_diagonal(dx)·from_diagonal(dz).
struct CliffordDecomposition1 {
    BitMatrix dz, dx, dz_prime, dx_prime, dz1;
    SymplecticMatrix product() const;
};

CliffordDecomposition1 clifford_decompose_1(const SymplecticMatrix &chi, uint64_t seed = 0);

/// C = DZ·CX·DX·DZ(1): χ = from_diagonal(dz1)·from_x_diagonal(dx)·from_cnot(cx)·from_diagonal(dz).
struct CliffordDecomposition2 {
    BitMatrix dz, cx, dx, dz1;
    SymplecticMatrix product() const;
};

CliffordDecomposition2 clifford_decompose_2(const SymplecticMatrix &chi);

}  // namespace shyps
