// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <set>

#include "shyps/poly.h"
#include "shyps/simplex.h"

using namespace shyps;

namespace {

// Independent check: order of x modulo g by brute-force stepping.
uint64_t order_of_x(const Poly &g) {
    Poly acc = Poly::x() % g;
    for (uint64_t k = 1; k < (uint64_t{1} << 22); k++) {
        if (acc.is_one()) {
            return k;
        }
        acc = mulmod(acc, Poly::x(), g);
    }
    return 0;
}

}  // namespace

TEST(simplex, check_polynomial_r3) {
    auto [a, b] = find_check_polynomial(3);
    EXPECT_EQ(a, 2u);
    EXPECT_EQ(b, 3u);
    Poly h = Poly::from_exponents({0, a, b});
    Poly g = gcd(h, Poly::monomial(7) + Poly::one());
    EXPECT_EQ(g.degree(), 3);
    EXPECT_EQ(order_of_x(g), 7u);
}

TEST(simplex, check_polynomial_r4_r5_primitive) {
    for (size_t r : {4u, 5u}) {
        auto [a, b] = find_check_polynomial(r);
        size_t n = (size_t{1} << r) - 1;
        Poly g = gcd(Poly::from_exponents({0, a, b}), Poly::monomial(n) + Poly::one());
        EXPECT_EQ(g.degree(), static_cast<long>(r));
        EXPECT_EQ(order_of_x(g), n);
        // Scan-order minimality: no earlier pair in (b, b−a) order satisfies the degree-and-order test.
        for (size_t b2 = 2; b2 <= b; b2++) {
            for (size_t a2 = b2 - 1; a2 >= 1 && (b2 < b || a2 > a); a2--) {
                Poly g2 = gcd(Poly::from_exponents({0, a2, b2}), Poly::monomial(n) + Poly::one());
                EXPECT_FALSE(g2.degree() == static_cast<long>(r) && order_of_x(g2) == n);
            }
        }
    }
}

TEST(simplex, r3_matrices) {
    SimplexCode c = build_simplex(3);
    EXPECT_EQ(c.H.row(0).str(), "1011000");
    EXPECT_EQ(c.H, BitMatrix::from_strings({"1011000", "0101100", "0010110", "0001011", "1000101", "1100010",
                                            "0110001"}));
    BitMatrix worked_g = BitMatrix::from_strings({"1011100", "0101110", "0010111"});
    EXPECT_EQ(rank(worked_g), 3u);
    // The displayed generator annihilates the columns of H (G·H = 0), not its rows; the row kernel is used here.
    EXPECT_TRUE((worked_g * c.H).is_zero());
    EXPECT_TRUE((c.H * c.G.transposed()).is_zero());
}

TEST(simplex, invariants) {
    for (size_t r : {3u, 4u, 5u}) {
        SimplexCode c = build_simplex(r);
        EXPECT_TRUE((c.H * c.G.transposed()).is_zero());
        EXPECT_EQ(rank(c.G), r);
        EXPECT_EQ(rank(c.H), c.n - r);
        for (size_t i = 0; i < c.n; i++) {
            EXPECT_EQ(c.H.row_weight(i), 3u);
            EXPECT_EQ(c.H.col_weight(i), 3u);
        }
        EXPECT_TRUE((c.P * c.G.transposed()).is_identity());
        for (size_t i = 0; i < r; i++) {
            EXPECT_EQ(c.P.row_weight(i), 1u);
        }
    }
}

TEST(simplex, r4_minimum_weight) {
    SimplexCode c = build_simplex(4);
    EXPECT_EQ(c.n, 15u);
    size_t min_weight = c.n;
    for (uint32_t m = 1; m < 16; m++) {
        BitVec msg(4);
        for (size_t i = 0; i < 4; i++) {
            msg.set(i, (m >> i) & 1);
        }
        min_weight = std::min(min_weight, c.G.left_mul(msg).weight());
    }
    EXPECT_EQ(min_weight, 8u);
}

TEST(simplex, aut_permutation_identity_and_worked_example) {
    SimplexCode c = build_simplex(3);
    EXPECT_TRUE(aut_permutation(c, BitMatrix::identity(3)).is_identity());
    BitMatrix worked_g = BitMatrix::from_strings({"1011100", "0101110", "0010111"});
    BitMatrix g = BitMatrix::from_strings({"110", "010", "001"});
    // (2,4)(5,6) in 1-based cycle notation is (1,3)(4,5) here.
    Permutation expected({0, 3, 2, 1, 5, 4, 6});
    Permutation sigma = aut_permutation(worked_g, g);
    EXPECT_EQ(sigma, expected);
    EXPECT_EQ(g * worked_g, worked_g * sigma.matrix());
    EXPECT_THROW(aut_permutation(c, BitMatrix(3, 3)), std::domain_error);
}

TEST(simplex, aut_permutation_is_a_homomorphism_and_injective) {
    for (size_t r : {3u, 4u}) {
        SimplexCode c = build_simplex(r);
        const auto &gl = general_linear_group(r);
        std::set<std::vector<uint32_t>> images;
        std::mt19937_64 rng(r);
        for (size_t idx = 0; idx < gl.size(); idx += (r == 3 ? 1 : 37)) {
            const BitMatrix &g = gl[idx];
            Permutation s = aut_permutation(c, g);
            EXPECT_EQ(g * c.G, c.G * s.matrix());
            EXPECT_EQ(aut_matrix(c, s), g);
            images.insert(s.images());
            const BitMatrix &h = gl[rng() % gl.size()];
            EXPECT_EQ(aut_permutation(c, g * h), compose(s, aut_permutation(c, h)));
            // Row space of H is preserved: H·σ = h_σ·H is solvable.
            RowSpace hspace(c.H);
            EXPECT_TRUE(hspace.contains_rows(c.H * s.matrix()));
        }
        if (r == 3) {
            EXPECT_EQ(images.size(), 168u);
        }
    }
}

TEST(simplex, aut_permutation_injective_sampled_r5) {
    SimplexCode c = build_simplex(5);
    std::mt19937_64 rng(55);
    std::set<std::vector<uint32_t>> images;
    std::set<std::string> mats;
    for (int trial = 0; trial < 300; trial++) {
        BitMatrix g = BitMatrix::random_invertible(5, rng);
        if (!mats.insert(g.str()).second) {
            continue;
        }
        Permutation s = aut_permutation(c, g);
        EXPECT_EQ(g * c.G, c.G * s.matrix());
        images.insert(s.images());
    }
    EXPECT_EQ(images.size(), mats.size());
}
