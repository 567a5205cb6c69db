// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "shyps/gf2.h"

namespace shyps {

struct SimplexCode {
    size_t r = 0;
    size_t n = 0;  // 2^r − 1
    size_t a = 0;  // check polynomial h(x) = 1 + x^a + x^b
    size_t b = 0;
    BitMatrix H;  // n×n cyclic, row i supported on {i, i+a, i+b} mod n
    BitMatrix G;  // r×n generator in reduced row echelon form
    std::vector<size_t> pivots;
    BitMatrix P;  // r×n pivot indicator, P·G^T = I
};

/// First (a, b) such that gcd(1+x^a+x^b, x^n−1) is primitive of degree r, scanning b upwards and then
/// b−a upwards. At r=3 this yields h(x) = 1+x²+x³.
std::pair<size_t, size_t> find_check_polynomial(size_t r);

SimplexCode build_simplex(size_t r);

/// The bit permutation σ with g·G = G·σ, i.e. σ(j) is the column of G equal to g·G[:,j].
Permutation aut_permutation(const SimplexCode &code, const BitMatrix &g);
Permutation aut_permutation(const BitMatrix &generator, const BitMatrix &g);

/// Inverse of aut_permutation: recovers g from σ.
BitMatrix aut_matrix(const SimplexCode &code, const Permutation &sigma);

}  // namespace shyps
