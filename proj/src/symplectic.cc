// SPDX-License-Identifier: Apache-2.0
#include "shyps/symplectic.h"

#include <stdexcept>

namespace shyps {

SymplecticMatrix::SymplecticMatrix(BitMatrix full) : m(full.rows() / 2), mat(std::move(full)) {
    if (mat.rows() != mat.cols() || mat.rows() % 2 != 0) {
        throw std::invalid_argument("symplectic matrix must be 2m x 2m");
    }
}

SymplecticMatrix SymplecticMatrix::identity(size_t m) { return SymplecticMatrix(BitMatrix::identity(2 * m)); }

SymplecticMatrix SymplecticMatrix::from_blocks(const BitMatrix &a, const BitMatrix &b, const BitMatrix &c,
                                               const BitMatrix &d) {
    size_t m = a.rows();
    for (const BitMatrix *x : {&a, &b, &c, &d}) {
        if (x->rows() != m || x->cols() != m) {
            throw std::invalid_argument("symplectic blocks must be m x m");
        }
    }
    BitMatrix full(2 * m, 2 * m);
    full.set_block(0, 0, a);
    full.set_block(0, m, b);
    full.set_block(m, 0, c);
    full.set_block(m, m, d);
    return SymplecticMatrix(std::move(full));
}

BitMatrix omega(size_t m) {
    BitMatrix w(2 * m, 2 * m);
    for (size_t i = 0; i < m; i++) {
        w.set(i, m + i, true);
        w.set(m + i, i, true);
    }
    return w;
}

bool SymplecticMatrix::is_symplectic() const { return mat * omega(m) * mat.transposed() == omega(m); }

SymplecticMatrix SymplecticMatrix::inverse() const {
    BitMatrix w = omega(m);
    return SymplecticMatrix(w * mat.transposed() * w);
}

SymplecticMatrix from_cnot(const BitMatrix &c) {
    size_t m = c.rows();
    return SymplecticMatrix::from_blocks(c, BitMatrix(m, m), BitMatrix(m, m), invert(c).transposed());
}

SymplecticMatrix from_diagonal(const BitMatrix &b) {
    if (!b.is_symmetric()) {
        throw std::invalid_argument("diagonal Clifford needs a symmetric matrix");
    }
    size_t m = b.rows();
    return SymplecticMatrix::from_blocks(BitMatrix::identity(m), b, BitMatrix(m, m), BitMatrix::identity(m));
}

SymplecticMatrix from_x_diagonal(const BitMatrix &b) {
    if (!b.is_symmetric()) {
        throw std::invalid_argument("X-diagonal Clifford needs a symmetric matrix");
    }
    size_t m = b.rows();
    return SymplecticMatrix::from_blocks(BitMatrix::identity(m), BitMatrix(m, m), b, BitMatrix::identity(m));
}

SymplecticMatrix from_hadamard(const BitVec &v) {
    size_t m = v.size();
    BitMatrix full = BitMatrix::identity(2 * m);
    for (size_t i = 0; i < m; i++) {
        if (v.get(i)) {
            full.set(i, i, false);
            full.set(m + i, m + i, false);
            full.set(i, m + i, true);
            full.set(m + i, i, true);
        }
    }
    return SymplecticMatrix(std::move(full));
}

SymplecticMatrix from_permutation(const Permutation &sigma) {
    BitMatrix r = sigma.row_action_matrix();
    return SymplecticMatrix(block_diag(r, r));
}

SymplecticMatrix direct_sum(const SymplecticMatrix &a, const SymplecticMatrix &b) {
    return SymplecticMatrix::from_blocks(block_diag(a.A(), b.A()), block_diag(a.B(), b.B()),
                                         block_diag(a.C(), b.C()), block_diag(a.D(), b.D()));
}

BitVec pauli_image(const SymplecticMatrix &chi, const BitVec &p) { return chi.mat.left_mul(p); }

bool symplectic_form(const BitVec &p, const BitVec &q) {
    size_t m = p.size() / 2;
    return p.slice(0, m).dot(q.slice(m, m)) ^ p.slice(m, m).dot(q.slice(0, m));
}

namespace {

BitMatrix random_symmetric(size_t m, std::mt19937_64 &rng) {
    BitMatrix s(m, m);
    for (size_t i = 0; i < m; i++) {
        for (size_t j = i; j < m; j++) {
            bool v = rng() & 1;
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    return s;
}

}  // namespace

SymplecticMatrix random_symplectic(size_t m, std::mt19937_64 &rng) {
    SymplecticMatrix acc = from_permutation(Permutation::random(m, rng));
    for (int round = 0; round < 3; round++) {
        acc = acc * from_cnot(BitMatrix::random_invertible(m, rng));
        acc = acc * from_diagonal(random_symmetric(m, rng));
        acc = acc * from_hadamard(BitVec::random(m, rng));
        acc = acc * from_x_diagonal(random_symmetric(m, rng));
    }
    return acc;
}

BitMatrix companion(const Poly &f) {
    long d = f.degree();
    if (d < 1 || !f.coeff(static_cast<size_t>(d))) {
        throw std::invalid_argument("companion matrix needs a polynomial of positive degree");
    }
    size_t n = static_cast<size_t>(d);
    BitMatrix c(n, n);
    for (size_t i = 0; i + 1 < n; i++) {
        c.set(i + 1, i, true);
    }
    for (size_t i = 0; i < n; i++) {
        c.set(i, n - 1, f.coeff(i));
    }
    return c;
}

std::vector<Poly> invariant_factors(const BitMatrix &mat) {
    size_t n = mat.rows();
    if (mat.cols() != n) {
        throw std::invalid_argument("invariant factors need a square matrix");
    }
    std::vector<std::vector<Poly>> a(n, std::vector<Poly>(n));
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            if (mat.get(i, j)) {
                a[i][j] = Poly::one();
            }
        }
        a[i][i] += Poly::x();
    }

    auto add_row_multiple = [&](size_t dst, size_t src, const Poly &q) {
        for (size_t j = 0; j < n; j++) {
            if (!a[src][j].is_zero()) {
                a[dst][j] += q * a[src][j];
            }
        }
    };
    auto add_col_multiple = [&](size_t dst, size_t src, const Poly &q) {
        for (size_t i = 0; i < n; i++) {
            if (!a[i][src].is_zero()) {
                a[i][dst] += q * a[i][src];
            }
        }
    };

    std::vector<Poly> diag;
    for (size_t k = 0; k < n; k++) {
        while (true) {
            long best = -1;
            size_t bi = 0, bj = 0;
            for (size_t i = k; i < n; i++) {
                for (size_t j = k; j < n; j++) {
                    long d = a[i][j].degree();
                    if (d >= 0 && (best < 0 || d < best)) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (best < 0) {
                // Remaining block is zero; xI − M is nonsingular, so this never happens.
                throw std::logic_error("singular characteristic matrix");
            }
            std::swap(a[k], a[bi]);
            for (size_t i = 0; i < n; i++) {
                std::swap(a[i][k], a[i][bj]);
            }
            bool clean = true;
            for (size_t i = k + 1; i < n; i++) {
                if (!a[i][k].is_zero()) {
                    add_row_multiple(i, k, a[i][k] / a[k][k]);
                    clean &= a[i][k].is_zero();
                }
            }
            for (size_t j = k + 1; j < n; j++) {
                if (!a[k][j].is_zero()) {
                    add_col_multiple(j, k, a[k][j] / a[k][k]);
                    clean &= a[k][j].is_zero();
                }
            }
            if (!clean) {
                continue;
            }
            bool divides = true;
            for (size_t i = k + 1; i < n && divides; i++) {
                for (size_t j = k + 1; j < n; j++) {
                    if (!(a[i][j] % a[k][k]).is_zero()) {
                        add_row_multiple(k, i, Poly::one());
                        divides = false;
                        break;
                    }
                }
            }
            if (divides) {
                break;
            }
        }
        diag.push_back(a[k][k]);
    }

    std::vector<Poly> out;
    for (const Poly &p : diag) {
        if (p.degree() > 0) {
            out.push_back(p);
        }
    }
    return out;
}

namespace {

BitMatrix block_diag_all(const std::vector<BitMatrix> &blocks) {
    size_t n = 0;
    for (const auto &b : blocks) {
        n += b.rows();
    }
    BitMatrix out(n, n);
    size_t off = 0;
    for (const auto &b : blocks) {
        out.set_block(off, off, b);
        off += b.rows();
    }
    return out;
}

BitVec random_combination(const BitMatrix &basis, std::mt19937_64 &rng) {
    return basis.left_mul(BitVec::random(basis.rows(), rng));
}

// Symmetric invertible Y with C·Y symmetric; the Hankel matrix of the coefficients when it works.
BitMatrix companion_symmetrizer(const BitMatrix &c, const Poly &f, std::mt19937_64 &rng) {
    size_t d = c.rows();
    BitMatrix y(d, d);
    for (size_t i = 0; i < d; i++) {
        for (size_t j = 0; i + j + 1 <= d && j < d; j++) {
            y.set(i, j, f.coeff(i + j + 1));
        }
    }
    if (is_invertible(y) && (c * y).is_symmetric()) {
        return y;
    }
    // Linear solve over symmetric Y: unknowns are the upper-triangular entries.
    std::vector<std::pair<size_t, size_t>> vars;
    for (size_t i = 0; i < d; i++) {
        for (size_t j = i; j < d; j++) {
            vars.emplace_back(i, j);
        }
    }
    auto build = [&](const BitVec &x) {
        BitMatrix s(d, d);
        for (size_t v = 0; v < vars.size(); v++) {
            if (x.get(v)) {
                s.set(vars[v].first, vars[v].second, true);
                s.set(vars[v].second, vars[v].first, true);
            }
        }
        return s;
    };
    BitMatrix system(d * d, vars.size());
    for (size_t v = 0; v < vars.size(); v++) {
        BitMatrix e = build(BitVec::unit(vars.size(), v));
        BitMatrix ce = c * e;
        BitMatrix res = ce + ce.transposed();
        for (size_t i = 0; i < d; i++) {
            for (size_t j = 0; j < d; j++) {
                if (res.get(i, j)) {
                    system.set(i * d + j, v, true);
                }
            }
        }
    }
    BitMatrix basis = kernel(system);
    for (int attempt = 0; attempt < 4096; attempt++) {
        BitMatrix s = build(random_combination(basis, rng));
        if (is_invertible(s)) {
            return s;
        }
    }
    throw std::logic_error("no symmetric similarity for companion matrix");
}

}  // namespace

RationalCanonicalForm rational_canonical_form(const BitMatrix &m, uint64_t seed) {
    size_t n = m.rows();
    RationalCanonicalForm out;
    out.factors = invariant_factors(m);
    std::vector<BitMatrix> blocks;
    for (const Poly &f : out.factors) {
        blocks.push_back(companion(f));
    }
    out.Lambda = block_diag_all(blocks);
    // Solve M·X = X·Λ, then draw from the solution space until X is invertible.
    BitMatrix system(n * n, n * n);
    for (size_t i = 0; i < n; i++) {
        for (size_t j = 0; j < n; j++) {
            size_t eq = i * n + j;
            for (size_t k = 0; k < n; k++) {
                if (m.get(i, k)) {
                    system.flip(eq, k * n + j);
                }
                if (out.Lambda.get(k, j)) {
                    system.flip(eq, i * n + k);
                }
            }
        }
    }
    BitMatrix basis = kernel(system);
    std::mt19937_64 rng(seed ^ 0x5eedc0de);
    for (int attempt = 0; attempt < 20000; attempt++) {
        BitVec x = random_combination(basis, rng);
        BitMatrix s(n, n);
        for (size_t i = 0; i < n; i++) {
            for (size_t j = 0; j < n; j++) {
                s.set(i, j, x.get(i * n + j));
            }
        }
        if (is_invertible(s)) {
            out.S = std::move(s);
            return out;
        }
    }
    throw std::logic_error("rational canonical form: no invertible similarity found");
}

SymmetricPair product_of_two_symmetrics(const BitMatrix &m, uint64_t seed) {
    size_t n = m.rows();
    if (m.is_symmetric()) {
        return {m, BitMatrix::identity(n)};
    }
    RationalCanonicalForm rcf = rational_canonical_form(m, seed);
    std::mt19937_64 rng(seed ^ 0xc0ffee);
    std::vector<BitMatrix> us, vs;
    for (const Poly &f : rcf.factors) {
        BitMatrix c = companion(f);
        BitMatrix y = companion_symmetrizer(c, f, rng);
        us.push_back(c * y);
        vs.push_back(invert(y));
    }
    BitMatrix u = block_diag_all(us), v = block_diag_all(vs);
    BitMatrix s_inv = invert(rcf.S);
    SymmetricPair out{rcf.S * u * rcf.S.transposed(), s_inv.transposed() * v * s_inv};
    if (!out.s1.is_symmetric() || !out.s2.is_symmetric() || out.s1 * out.s2 != m) {
        throw std::logic_error("product_of_two_symmetrics: factorization check failed");
    }
    return out;
}

BitMatrix make_top_left_invertible(const SymplecticMatrix &chi) {
    size_t n = chi.m;
    BitMatrix a = chi.A(), c = chi.C();
    BitMatrix k(n, n);
    if (is_invertible(a)) {
        return k;
    }
    BitMatrix ker = kernel(a);  // rows x with A·x = 0
    BitMatrix w = c * ker.transposed();
    std::vector<size_t> pivots;
    rref(w.transposed(), &pivots);
    for (size_t row : pivots) {
        k.set(row, row, true);
    }
    if (!is_invertible(a + k * c)) {
        throw std::logic_error("make_top_left_invertible: selected rows do not give an invertible block");
    }
    return k;
}

XZXZ xzxz_factor(const SymplecticMatrix &chi, uint64_t seed) {
    size_t n = chi.m;
    BitMatrix a = chi.A();
    BitMatrix a_inv = invert(a);
    BitMatrix a_plus_i = a + BitMatrix::identity(n);
    SymmetricPair mn = a_plus_i.is_zero() ? SymmetricPair{BitMatrix(n, n), BitMatrix(n, n)}
                                          : product_of_two_symmetrics(a_plus_i, seed);
    XZXZ out;
    out.M = mn.s1;
    out.N = mn.s2;
    out.L = (chi.C() + out.N) * a_inv;
    out.P = a_inv * (chi.B() + out.M);
    if (!out.L.is_symmetric() || !out.P.is_symmetric()) {
        throw std::logic_error("xzxz_factor: outer factors are not symmetric");
    }
    return out;
}

SymplecticMatrix CliffordDecomposition1::product() const {
    return from_diagonal(dz1) * from_x_diagonal(dx_prime) * from_diagonal(dz_prime) * from_x_diagonal(dx) *
           from_diagonal(dz);
}

CliffordDecomposition1 clifford_decompose_1(const SymplecticMatrix &chi, uint64_t seed) {
    BitMatrix k = make_top_left_invertible(chi);
    SymplecticMatrix rest = from_diagonal(k) * chi;
    XZXZ f = xzxz_factor(rest, seed);
    CliffordDecomposition1 out{f.P, f.N, f.M, f.L, k};
    if (out.product() != chi) {
        throw std::logic_error("clifford_decompose_1: reconstruction failed");
    }
    return out;
}

SymplecticMatrix CliffordDecomposition2::product() const {
    return from_diagonal(dz1) * from_x_diagonal(dx) * from_cnot(cx) * from_diagonal(dz);
}

CliffordDecomposition2 clifford_decompose_2(const SymplecticMatrix &chi) {
    BitMatrix k = make_top_left_invertible(chi);
    SymplecticMatrix rest = from_diagonal(k) * chi;
    BitMatrix a = rest.A();
    BitMatrix a_inv = invert(a);
    CliffordDecomposition2 out{a_inv * rest.B(), a, rest.C() * a_inv, k};
    if (out.product() != chi) {
        throw std::logic_error("clifford_decompose_2: reconstruction failed");
    }
    return out;
}

}  // namespace shyps
