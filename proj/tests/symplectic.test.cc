// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "shyps/symplectic.h"

using namespace shyps;

namespace {

BitMatrix eval_poly(const Poly &p, const BitMatrix &m) {
    size_t n = m.rows();
    BitMatrix acc(n, n), pow = BitMatrix::identity(n);
    for (long i = 0; i <= p.degree(); i++) {
        if (p.coeff(static_cast<size_t>(i))) {
            acc += pow;
        }
        pow = pow * m;
    }
    return acc;
}

// Minimal polynomial from the first linear dependence among I, M, M², …
Poly minimal_polynomial(const BitMatrix &m) {
    size_t n = m.rows();
    std::vector<BitVec> powers;
    BitMatrix pow = BitMatrix::identity(n);
    for (size_t d = 0; d <= n; d++) {
        BitVec flat = flatten(pow);
        if (!powers.empty()) {
            BitMatrix prev = BitMatrix::from_rows(powers);
            if (auto c = try_solve(prev.transposed(), flat)) {
                Poly p = Poly::monomial(d);
                for (size_t i = 0; i < d; i++) {
                    if (c->get(i)) {
                        p += Poly::monomial(i);
                    }
                }
                return p;
            }
        }
        powers.push_back(flat);
        pow = pow * m;
    }
    throw std::logic_error("unreachable");
}

void expect_is_symmetric_diagonal_rows(const BitMatrix &k) {
    EXPECT_TRUE(k.is_symmetric());
    for (size_t i = 0; i < k.rows(); i++) {
        EXPECT_LE(k.row_weight(i), 1u);
    }
}

}  // namespace

TEST(symplectic, generators_are_symplectic_and_act_on_paulis) {
    std::mt19937_64 rng(1);
    EXPECT_TRUE(from_cnot(BitMatrix::random_invertible(5, rng)).is_symplectic());
    EXPECT_TRUE(from_hadamard(BitVec::from_string("10110")).is_symplectic());
    EXPECT_TRUE(from_permutation(Permutation::random(5, rng)).is_symplectic());
    EXPECT_THROW(from_diagonal(BitMatrix::from_strings({"01", "00"})), std::invalid_argument);

    // CNOT 0→1 maps X0 to X0X1 and Z1 to Z0Z1.
    BitMatrix c = BitMatrix::from_strings({"11", "01"});
    SymplecticMatrix cx = from_cnot(c);
    EXPECT_EQ(pauli_image(cx, BitVec::from_string("1000")), BitVec::from_string("1100"));
    EXPECT_EQ(pauli_image(cx, BitVec::from_string("0001")), BitVec::from_string("0011"));
    // S maps X to Y.
    SymplecticMatrix s = from_diagonal(BitMatrix::from_strings({"1"}));
    EXPECT_EQ(pauli_image(s, BitVec::from_string("10")), BitVec::from_string("11"));
    // Permutation moves qubit 0 to 2.
    SymplecticMatrix p = from_permutation(Permutation({2, 0, 1}));
    EXPECT_EQ(pauli_image(p, BitVec::from_string("100000")), BitVec::from_string("001000"));
}

TEST(symplectic, random_symplectic_preserves_form) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; trial++) {
        SymplecticMatrix chi = random_symplectic(6, rng);
        EXPECT_TRUE(chi.is_symplectic());
        EXPECT_TRUE((chi * chi.inverse()).mat.is_identity());
        BitVec p = BitVec::random(12, rng), q = BitVec::random(12, rng);
        EXPECT_EQ(symplectic_form(p, q), symplectic_form(pauli_image(chi, p), pauli_image(chi, q)));
    }
}

TEST(symplectic, invariant_factor_examples) {
    Poly xp1 = Poly::from_exponents({0, 1});
    EXPECT_EQ(invariant_factors(BitMatrix::identity(3)), (std::vector<Poly>{xp1, xp1, xp1}));
    EXPECT_EQ(invariant_factors(BitMatrix::from_strings({"11", "01"})), (std::vector<Poly>{xp1 * xp1}));
    Poly f = Poly::from_exponents({0, 1, 4});
    EXPECT_EQ(invariant_factors(companion(f)), (std::vector<Poly>{f}));
    EXPECT_EQ(invariant_factors(BitMatrix(2, 2)), (std::vector<Poly>{Poly::x(), Poly::x()}));
}

TEST(symplectic, rational_canonical_form_properties) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; trial++) {
        size_t n = 2 + trial % 9;
        BitMatrix m = BitMatrix::random(n, n, rng);
        if (trial % 4 == 0) {
            // Structured case with repeated factors.
            BitMatrix s = BitMatrix::random_invertible(n, rng);
            BitMatrix d(n, n);
            for (size_t i = 0; i < n; i++) {
                d.set(i, i, i % 2);
            }
            m = s * d * invert(s);
        }
        RationalCanonicalForm rcf = rational_canonical_form(m, trial);
        EXPECT_EQ(rcf.S * rcf.Lambda * invert(rcf.S), m);
        long total = 0;
        for (size_t i = 0; i < rcf.factors.size(); i++) {
            total += rcf.factors[i].degree();
            if (i + 1 < rcf.factors.size()) {
                EXPECT_TRUE((rcf.factors[i + 1] % rcf.factors[i]).is_zero());
            }
        }
        EXPECT_EQ(total, static_cast<long>(n));
        EXPECT_EQ(rcf.factors.back(), minimal_polynomial(m));
        EXPECT_TRUE(eval_poly(rcf.factors.back(), m).is_zero());
    }
}

TEST(symplectic, product_of_two_symmetrics) {
    BitMatrix sym = BitMatrix::from_strings({"101", "011", "110"});
    SymmetricPair trivial = product_of_two_symmetrics(sym);
    EXPECT_EQ(trivial.s1, sym);
    EXPECT_TRUE(trivial.s2.is_identity());

    BitMatrix c = companion(Poly::from_exponents({0, 1, 2}));
    SymmetricPair cp = product_of_two_symmetrics(c);
    EXPECT_TRUE(cp.s1.is_symmetric());
    EXPECT_TRUE(cp.s2.is_symmetric());
    EXPECT_EQ(cp.s1 * cp.s2, c);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 60; trial++) {
        size_t n = 1 + trial % 12;
        BitMatrix m = BitMatrix::random(n, n, rng);
        SymmetricPair f = product_of_two_symmetrics(m, trial);
        EXPECT_TRUE(f.s1.is_symmetric());
        EXPECT_TRUE(f.s2.is_symmetric());
        EXPECT_EQ(f.s1 * f.s2, m);
    }
}

TEST(symplectic, make_top_left_invertible) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; trial++) {
        size_t m = 2 + trial % 7;
        SymplecticMatrix chi = random_symplectic(m, rng);
        if (trial % 3 == 0) {
            chi = chi * from_hadamard(BitVec::random(m, rng));
        }
        BitMatrix k = make_top_left_invertible(chi);
        expect_is_symmetric_diagonal_rows(k);
        EXPECT_TRUE(is_invertible((from_diagonal(k) * chi).A()));
    }
    BitVec all(4);
    for (size_t i = 0; i < 4; i++) {
        all.set(i, true);
    }
    SymplecticMatrix h = from_hadamard(all);
    EXPECT_TRUE(h.A().is_zero());
    EXPECT_TRUE(make_top_left_invertible(h).is_identity());
}

TEST(symplectic, clifford_decompositions_reconstruct) {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 40; trial++) {
        size_t m = 2 + trial % 10;
        SymplecticMatrix chi = random_symplectic(m, rng) * from_hadamard(BitVec::random(m, rng));
        CliffordDecomposition1 d1 = clifford_decompose_1(chi, trial);
        for (const BitMatrix *b : {&d1.dz, &d1.dx, &d1.dz_prime, &d1.dx_prime, &d1.dz1}) {
            EXPECT_TRUE(b->is_symmetric());
        }
        expect_is_symmetric_diagonal_rows(d1.dz1);
        EXPECT_EQ(d1.product(), chi);

        CliffordDecomposition2 d2 = clifford_decompose_2(chi);
        EXPECT_TRUE(d2.dz.is_symmetric());
        EXPECT_TRUE(d2.dx.is_symmetric());
        EXPECT_TRUE(is_invertible(d2.cx));
        EXPECT_EQ(d2.product(), chi);
    }
    SymplecticMatrix id = SymplecticMatrix::identity(5);
    EXPECT_EQ(clifford_decompose_1(id).product(), id);
    EXPECT_EQ(clifford_decompose_2(id).product(), id);
}

TEST(symplectic, companion_hankel_identity) {
    // The coefficient Hankel matrix Y (Y[i][j] = f_{i+j+1}) symmetrizes the companion matrix: C·Y is symmetric.
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; trial++) {
        size_t d = 1 + trial % 8;
        Poly f = Poly::monomial(d);
        for (size_t i = 0; i < d; i++) {
            if (rng() & 1) {
                f += Poly::monomial(i);
            }
        }
        BitMatrix c = companion(f), y(d, d);
        for (size_t i = 0; i < d; i++) {
            for (size_t j = 0; i + j + 1 <= d && j < d; j++) {
                y.set(i, j, f.coeff(i + j + 1));
            }
        }
        EXPECT_TRUE(y.is_symmetric());
        EXPECT_TRUE(is_invertible(y));
        EXPECT_TRUE((c * y).is_symmetric());
    }
}

TEST(symplectic, worked_generator_examples) {
    // S_1·CZ_{1,2} on two qubits: B = [[1,1],[1,0]]; X_1 maps to Y_1 Z_2.
    SymplecticMatrix scz = from_diagonal(BitMatrix::from_strings({"11", "10"}));
    EXPECT_EQ(scz.mat, BitMatrix::from_strings({"1011", "0110", "0010", "0001"}));
    EXPECT_EQ(pauli_image(scz, BitVec::from_string("1000")), BitVec::from_string("1011"));
    EXPECT_EQ(pauli_image(SymplecticMatrix::identity(2), BitVec::from_string("0110")), BitVec::from_string("0110"));

    BitVec ones = BitVec::from_string("111");
    SymplecticMatrix h = from_hadamard(ones);
    EXPECT_TRUE(h.A().is_zero());
    EXPECT_TRUE(h.B().is_identity());
    EXPECT_TRUE(h.C().is_identity());
    EXPECT_TRUE(h.D().is_zero());

    SymplecticMatrix cx = from_cnot(BitMatrix::from_strings({"110", "010", "001"}));
    EXPECT_EQ(cx.A(), BitMatrix::from_strings({"110", "010", "001"}));
    EXPECT_EQ(cx.D(), BitMatrix::from_strings({"100", "110", "001"}));
    EXPECT_THROW(from_cnot(BitMatrix(3, 3)), std::domain_error);
}

TEST(symplectic, xzxz_trivial_cases) {
    XZXZ id = xzxz_factor(SymplecticMatrix::identity(4));
    EXPECT_TRUE((id.M * id.N).is_zero());
    EXPECT_TRUE(id.L.is_zero());
    EXPECT_TRUE(id.P.is_zero());
    BitMatrix b = BitMatrix::from_strings({"110", "101", "011"});
    XZXZ diag = xzxz_factor(from_diagonal(b));
    EXPECT_EQ(from_x_diagonal(diag.L) * from_diagonal(diag.M) * from_x_diagonal(diag.N) * from_diagonal(diag.P),
              from_diagonal(b));
    EXPECT_THROW(xzxz_factor(from_hadamard(BitVec::from_string("111"))), std::domain_error);
}

TEST(symplectic, decompose_2_of_cnot_is_pure_cnot) {
    std::mt19937_64 rng(8);
    BitMatrix c = BitMatrix::random_invertible(6, rng);
    CliffordDecomposition2 d = clifford_decompose_2(from_cnot(c));
    EXPECT_EQ(d.cx, c);
    EXPECT_TRUE(d.dz.is_zero());
    EXPECT_TRUE(d.dx.is_zero());
    EXPECT_TRUE(d.dz1.is_zero());
}

TEST(symplectic, large_random_reconstruction) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; trial++) {
        SymplecticMatrix chi = random_symplectic(18, rng);
        EXPECT_EQ(clifford_decompose_1(chi, trial).product(), chi);
        SymplecticMatrix chi9 = random_symplectic(9, rng) * from_hadamard(BitVec::random(9, rng));
        EXPECT_EQ(clifford_decompose_2(chi9).product(), chi9);
    }
    for (int trial = 0; trial < 10000; trial++) {
        size_t n = 1 + trial % 12;
        BitMatrix m = BitMatrix::random(n, n, rng);
        SymmetricPair f = product_of_two_symmetrics(m, trial);
        ASSERT_TRUE(f.s1.is_symmetric() && f.s2.is_symmetric() && f.s1 * f.s2 == m);
    }
}
