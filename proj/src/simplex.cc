// SPDX-License-Identifier: Apache-2.0
#include "shyps/simplex.h"

#include <stdexcept>
#include <unordered_map>

#include "shyps/poly.h"

namespace shyps {

namespace {

std::vector<uint64_t> prime_factors(uint64_t n) {
    std::vector<uint64_t> out;
    for (uint64_t p = 2; p * p <= n; p++) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) {
                n /= p;
            }
        }
    }
    if (n > 1) {
        out.push_back(n);
    }
    return out;
}

bool x_has_full_order(const Poly &g, size_t r) {
    uint64_t order = (uint64_t{1} << r) - 1;
    Poly x = Poly::x();
    if (!powmod(x, order, g).is_one()) {
        return false;
    }
    for (uint64_t p : prime_factors(order)) {
        if (powmod(x, order / p, g).is_one()) {
            return false;
        }
    }
    return true;
}

uint64_t column_key(const BitMatrix &m, size_t j) {
    uint64_t key = 0;
    for (size_t i = 0; i < m.rows(); i++) {
        key |= uint64_t{m.get(i, j)} << i;
    }
    return key;
}

}  // namespace

std::pair<size_t, size_t> find_check_polynomial(size_t r) {
    if (r < 3 || r > 40) {
        throw std::invalid_argument("find_check_polynomial: supported range is 3 ≤ r ≤ 40");
    }
    size_t n = (size_t{1} << r) - 1;
    // gcd(h, x^n − 1) = gcd(h, x^{2^r} − x) because x does not divide h.
    for (size_t b = 2; b < n; b++) {
        for (size_t a = b - 1; a >= 1; a--) {
            Poly h = Poly::from_exponents({0, a, b});
            Poly frob = Poly::x();
            for (size_t k = 0; k < r; k++) {
                frob = mulmod(frob, frob, h);
            }
            Poly g = gcd(h, frob + Poly::x());
            if (g.degree() == static_cast<long>(r) && x_has_full_order(g, r)) {
                return {a, b};
            }
        }
    }
    throw std::runtime_error("find_check_polynomial: no weight-3 check polynomial found");
}

SimplexCode build_simplex(size_t r) {
    SimplexCode code;
    code.r = r;
    code.n = (size_t{1} << r) - 1;
    std::tie(code.a, code.b) = find_check_polynomial(r);
    code.H = BitMatrix(code.n, code.n);
    for (size_t i = 0; i < code.n; i++) {
        for (size_t e : {size_t{0}, code.a, code.b}) {
            code.H.set(i, (i + e) % code.n, true);
        }
    }
    code.G = rref(kernel(code.H), &code.pivots);
    if (code.G.rows() != r) {
        throw std::logic_error("build_simplex: kernel dimension differs from r");
    }
    code.P = BitMatrix(r, code.n);
    for (size_t k = 0; k < r; k++) {
        code.P.set(k, code.pivots[k], true);
    }
    return code;
}

Permutation aut_permutation(const BitMatrix &generator, const BitMatrix &g) {
    if (g.rows() != generator.rows() || g.cols() != generator.rows()) {
        throw std::invalid_argument("aut_permutation: g must be r×r");
    }
    if (!is_invertible(g)) {
        throw std::domain_error("aut_permutation: g is singular");
    }
    size_t n = generator.cols();
    std::unordered_map<uint64_t, uint32_t> index;
    for (size_t j = 0; j < n; j++) {
        index[column_key(generator, j)] = static_cast<uint32_t>(j);
    }
    BitMatrix image = g * generator;
    std::vector<uint32_t> sigma(n);
    for (size_t j = 0; j < n; j++) {
        auto it = index.find(column_key(image, j));
        if (it == index.end()) {
            throw std::invalid_argument("aut_permutation: columns of the generator are not closed under g");
        }
        sigma[j] = it->second;
    }
    return Permutation(std::move(sigma));
}

Permutation aut_permutation(const SimplexCode &code, const BitMatrix &g) { return aut_permutation(code.G, g); }

BitMatrix aut_matrix(const SimplexCode &code, const Permutation &sigma) {
    // g·G = G·σ restricted to the pivot columns gives g = G·σ·P^T.
    return code.G * sigma.matrix() * code.P.transposed();
}

}  // namespace shyps
