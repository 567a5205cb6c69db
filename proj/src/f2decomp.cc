// SPDX-License-Identifier: Apache-2.0
#include "shyps/f2decomp.h"

#include <algorithm>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>

namespace shyps {

void TensorSum::add(BitMatrix g1, BitMatrix g2) {
    if (g1.rows() != r || g2.rows() != r || !is_invertible(g1) || !is_invertible(g2)) {
        throw std::logic_error("tensor term with a singular factor");
    }
    terms.emplace_back(std::move(g1), std::move(g2));
}

BitMatrix TensorSum::reconstruct() const {
    BitMatrix acc(r * r, r * r);
    for (const auto &[g1, g2] : terms) {
        acc += kron(g1, g2);
    }
    return acc;
}

void SymTensorSum::add(BitMatrix g) {
    if (g.rows() != r || !is_invertible(g)) {
        throw std::logic_error("symmetric tensor term with a singular factor");
    }
    terms.push_back(std::move(g));
}

BitMatrix SymTensorSum::reconstruct() const {
    BitMatrix acc(r * r, r * r);
    for (const auto &g : terms) {
        acc += sym_term(g);
    }
    return acc;
}

BitMatrix SymTensorSum::reconstruct_untwisted() const {
    BitMatrix acc(r * r, r * r);
    for (const auto &g : terms) {
        acc += kron(g, g.transposed());
    }
    return acc;
}

BitMatrix sym_term(const BitMatrix &a) {
    return kron(a, a.transposed()) * Permutation::tau(a.rows()).matrix();
}

BitMatrix cross_term(const BitMatrix &a, const BitMatrix &b) {
    return sym_term(a + b) + sym_term(a) + sym_term(b);
}

BitMatrix canonical_cycle(size_t r) { return Permutation::cycle(r).matrix(); }

namespace {

BitMatrix unit_diag(size_t r, size_t j) { return BitMatrix::single(r, r, j, j); }

// T·m = R with R the reduced row echelon form of m and T invertible.
std::pair<BitMatrix, BitMatrix> rref_with_transform(const BitMatrix &m) {
    size_t k = m.rows();
    BitMatrix aug = rref(hstack(m, BitMatrix::identity(k)));
    return {aug.block(0, 0, k, m.cols()), aug.block(0, m.cols(), k, k)};
}

template <typename T>
void erase_pairs(std::vector<T> &items) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < items.size() && !changed; i++) {
            for (size_t j = i + 1; j < items.size(); j++) {
                if (items[i] == items[j]) {
                    items.erase(items.begin() + static_cast<long>(j));
                    items.erase(items.begin() + static_cast<long>(i));
                    changed = true;
                    break;
                }
            }
        }
    }
}

// Cancels repeated terms and merges terms sharing a factor when the merged factor stays invertible.
void simplify(TensorSum &ts) {
    auto &t = ts.terms;
    bool changed = true;
    while (changed) {
        erase_pairs(t);
        changed = false;
        for (size_t i = 0; i < t.size() && !changed; i++) {
            for (size_t j = i + 1; j < t.size() && !changed; j++) {
                for (int side = 0; side < 2 && !changed; side++) {
                    const BitMatrix &same_i = side == 0 ? t[i].first : t[i].second;
                    const BitMatrix &same_j = side == 0 ? t[j].first : t[j].second;
                    if (same_i != same_j) {
                        continue;
                    }
                    BitMatrix other = side == 0 ? t[i].second + t[j].second : t[i].first + t[j].first;
                    if (other.is_zero()) {
                        t.erase(t.begin() + static_cast<long>(j));
                        t.erase(t.begin() + static_cast<long>(i));
                        changed = true;
                    } else if (is_invertible(other)) {
                        (side == 0 ? t[i].second : t[i].first) = other;
                        t.erase(t.begin() + static_cast<long>(j));
                        changed = true;
                    }
                }
            }
        }
    }
}

void simplify(SymTensorSum &ts) { erase_pairs(ts.terms); }

const BitMatrix &invertible_basis_of_full_space(size_t r) {
    static std::map<size_t, BitMatrix> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(r);
    if (it != cache.end()) {
        return it->second;
    }
    // Greedy invertible basis of M_r(2); each row of the result is a flattened matrix.
    std::mt19937_64 rng(0xba515 + r);
    std::vector<BitVec> rows;
    RowSpace space(BitMatrix(0, r * r));
    while (rows.size() < r * r) {
        BitMatrix g = BitMatrix::random_invertible(r, rng);
        BitVec f = flatten(g);
        if (!space.contains(f)) {
            rows.push_back(f);
            space = RowSpace(BitMatrix::from_rows(rows));
        }
    }
    return cache.emplace(r, BitMatrix::from_rows(rows)).first->second;
}

BitMatrix stack_flat(const std::vector<BitMatrix> &ms, size_t r) {
    BitMatrix out(ms.size(), r * r);
    for (size_t i = 0; i < ms.size(); i++) {
        out.set_row(i, flatten(ms[i]));
    }
    return out;
}

// Coefficients of each target over the generators; every target must lie in their span.
std::vector<BitVec> coordinates_over(const std::vector<BitMatrix> &gens, const std::vector<BitMatrix> &targets,
                                     size_t r) {
    RowSpace space(stack_flat(gens, r));
    std::vector<BitVec> out;
    for (const auto &t : targets) {
        auto c = space.coordinates(flatten(t));
        if (!c) {
            throw std::logic_error("spanning set does not contain a target");
        }
        out.push_back(*c);
    }
    return out;
}

// Coset search: d independent invertibles in M + V, then the even-weight sums plus one split element.
std::optional<std::vector<BitMatrix>> coset_spanning_set(const std::vector<BitMatrix> &basis, size_t r,
                                                         std::mt19937_64 &rng) {
    size_t d = basis.size();
    auto try_coset = [&](const BitMatrix &m, bool exhaustive) -> std::optional<std::vector<BitMatrix>> {
        std::vector<BitMatrix> found;
        std::vector<BitVec> found_flat;
        RowSpace found_space(BitMatrix(0, r * r));
        auto consider = [&](const BitVec &coeffs) {
            BitMatrix g = m;
            for (size_t i = 0; i < d; i++) {
                if (coeffs.get(i)) {
                    g += basis[i];
                }
            }
            if (!is_invertible(g) || found_space.contains(flatten(g))) {
                return;
            }
            found.push_back(g);
            found_flat.push_back(flatten(g));
            found_space = RowSpace(BitMatrix::from_rows(found_flat));
        };
        if (exhaustive) {
            for (uint64_t mask = 0; mask < (uint64_t{1} << d) && found.size() < d; mask++) {
                BitVec c(d);
                for (size_t i = 0; i < d; i++) {
                    c.set(i, (mask >> i) & 1);
                }
                consider(c);
            }
        } else {
            for (size_t sample = 0; sample < 48 * d && found.size() < d; sample++) {
                consider(BitVec::random(d, rng));
            }
        }
        if (found.size() < d) {
            return std::nullopt;
        }
        RowSpace v_space(stack_flat(basis, r));
        if (v_space.contains(flatten(m))) {
            return found;  // the coset is V itself, so the invertibles already span it
        }
        std::vector<BitMatrix> even;
        for (size_t i = 1; i < d; i++) {
            even.push_back(found[0] + found[i]);
        }
        RowSpace even_space(even.empty() ? BitMatrix(0, r * r) : stack_flat(even, r));
        for (const auto &a : basis) {
            if (!even_space.contains(flatten(a))) {
                for (auto &h : sum_two_invertibles(a)) {
                    found.push_back(h);
                }
                return found;
            }
        }
        throw std::logic_error("coset spanning set: even subspace already spans V");
    };
    for (int attempt = 0; attempt < 64; attempt++) {
        BitMatrix m = attempt == 0 ? BitMatrix(r, r) : BitMatrix::random(r, r, rng);
        if (auto t = try_coset(m, false)) {
            return t;
        }
    }
    if (d <= 12) {
        for (int attempt = 0; attempt < 64; attempt++) {
            if (auto t = try_coset(BitMatrix::random(r, r, rng), true)) {
                return t;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

std::pair<BitMatrix, BitMatrix> identity_as_two_invertibles(size_t k) {
    if (k < 2) {
        throw std::invalid_argument("identity splits into two invertibles only for k >= 2");
    }
    BitMatrix x2 = BitMatrix::from_strings({"11", "10"}), y2 = BitMatrix::from_strings({"01", "11"});
    BitMatrix x3 = BitMatrix::from_strings({"111", "011", "101"}), y3 = BitMatrix::from_strings({"011", "001", "100"});
    BitMatrix x(k, k), y(k, k);
    size_t off = 0;
    if (k % 2 == 1) {
        x.set_block(0, 0, x3);
        y.set_block(0, 0, y3);
        off = 3;
    }
    for (; off < k; off += 2) {
        x.set_block(off, off, x2);
        y.set_block(off, off, y2);
    }
    return {x, y};
}

std::vector<BitMatrix> sum_two_invertibles(const BitMatrix &m) {
    size_t k = m.rows();
    if (is_invertible(m)) {
        return {m};
    }
    if (k < 2) {
        throw std::invalid_argument("a singular 1x1 matrix is not a sum of two invertibles");
    }
    // g·m·g' = diag(I_l, 0) by row reduction on both sides.
    auto [reduced, g] = rref_with_transform(m);
    auto [normal, h] = rref_with_transform(reduced.transposed());
    BitMatrix g_prime = h.transposed();
    size_t l = rank(m);
    BitMatrix x = BitMatrix::identity(k), y = BitMatrix::identity(k);
    if (l == 1) {
        x.set_block(0, 0, BitMatrix::from_strings({"11", "10"}));
        y.set_block(0, 0, BitMatrix::from_strings({"01", "10"}));
    } else if (l >= 2) {
        auto [xl, yl] = identity_as_two_invertibles(l);
        x.set_block(0, 0, xl);
        y.set_block(0, 0, yl);
    }
    BitMatrix gi = invert(g), gpi = invert(g_prime);
    std::vector<BitMatrix> out{gi * x * gpi, gi * y * gpi};
    if (out[0] + out[1] != m) {
        throw std::logic_error("sum_two_invertibles: reconstruction failed");
    }
    return out;
}

std::vector<BitMatrix> invertible_spanning_set(const std::vector<BitMatrix> &basis, uint64_t seed) {
    if (basis.empty()) {
        return {};
    }
    size_t r = basis[0].rows();
    size_t d = basis.size();
    if (rank(stack_flat(basis, r)) != d) {
        throw std::invalid_argument("invertible_spanning_set needs a linearly independent basis");
    }
    std::vector<BitMatrix> out, singular;
    for (const auto &b : basis) {
        (is_invertible(b) ? out : singular).push_back(b);
    }
    if (singular.size() == 1) {
        for (auto &h : sum_two_invertibles(singular[0])) {
            out.push_back(h);
        }
    } else if (singular.size() >= 2) {
        std::mt19937_64 rng(seed ^ 0x5a4e);
        auto coset = coset_spanning_set(singular, r, rng);
        if (coset && coset->size() <= 2 * singular.size()) {
            out.insert(out.end(), coset->begin(), coset->end());
        } else {
            for (const auto &s : singular) {
                for (auto &h : sum_two_invertibles(s)) {
                    out.push_back(h);
                }
            }
        }
    }
    if (out.size() > r * r) {
        const BitMatrix &full = invertible_basis_of_full_space(r);
        out.clear();
        for (size_t i = 0; i < full.rows(); i++) {
            out.push_back(unflatten(full.row(i), r));
        }
    }
    return out;
}

BitMatrix diagonal_complement(const BitMatrix &a) {
    size_t r = a.rows();
    BitMatrix d(r, r);
    if (is_invertible(a)) {
        return d;
    }
    // Grow the leading block one index at a time, fixing each new diagonal entry by the Schur complement.
    d.set(0, 0, !a.get(0, 0));
    for (size_t l = 1; l < r; l++) {
        BitMatrix lead_inv = invert(a.block(0, 0, l, l) + d.block(0, 0, l, l));
        BitVec u = a.block(l, 0, 1, l).row(0);
        BitVec v = a.block(0, l, l, 1).col(0);
        bool schur = a.get(l, l) ^ u.dot(lead_inv.right_mul(v));
        d.set(l, l, !schur);
    }
    if (!is_invertible(a + d)) {
        throw std::logic_error("diagonal_complement: construction failed");
    }
    return d;
}

BitMatrix cycle_complement(const BitMatrix &d, const BitMatrix &p) {
    if (!d.is_diagonal()) {
        throw std::invalid_argument("cycle_complement needs a diagonal matrix");
    }
    if (is_invertible(d)) {
        return d;
    }
    BitMatrix out = d + p;
    if (!is_invertible(out)) {
        throw std::invalid_argument("cycle_complement needs a single r-cycle");
    }
    return out;
}

std::vector<std::pair<BitMatrix, BitMatrix>> tensor_rank_factors(const BitMatrix &a, size_t r) {
    if (a.rows() != r * r || a.cols() != r * r) {
        throw std::invalid_argument("tensor factors need an r^2 x r^2 matrix");
    }
    BitMatrix re = reshape(a);
    std::vector<size_t> pivots;
    BitMatrix basis = rref(re, &pivots);
    std::vector<std::pair<BitMatrix, BitMatrix>> out;
    for (size_t k = 0; k < pivots.size(); k++) {
        BitMatrix m(r, r);
        for (size_t i = 0; i < r; i++) {
            for (size_t j = 0; j < r; j++) {
                m.set(i, j, re.get(i * r + j, pivots[k]));
            }
        }
        out.emplace_back(m, unflatten(basis.row(k), r));
    }
    return out;
}

namespace {

TensorSum split_path(const std::vector<std::pair<BitMatrix, BitMatrix>> &factors, size_t r) {
    TensorSum out(r);
    for (const auto &[m, n] : factors) {
        for (const auto &g1 : sum_two_invertibles(m)) {
            for (const auto &g2 : sum_two_invertibles(n)) {
                out.add(g1, g2);
            }
        }
    }
    return out;
}

TensorSum spanning_path(const std::vector<std::pair<BitMatrix, BitMatrix>> &factors, size_t r, uint64_t seed) {
    TensorSum out(r);
    BitMatrix cycle = canonical_cycle(r);
    std::vector<BitMatrix> ms, ns;
    for (const auto &[m, n] : factors) {
        ms.push_back(m);
        ns.push_back(n);
    }
    std::vector<BitMatrix> b = invertible_spanning_set(ms, seed);
    std::vector<BitVec> mu = coordinates_over(b, ms, r);

    // A = Σ_j B_j ⊗ (C_j + D_j) with C_j invertible and D_j diagonal.
    std::vector<BitVec> diags;
    std::vector<BitMatrix> diag_owner;
    for (size_t j = 0; j < b.size(); j++) {
        BitMatrix n_j(r, r);
        for (size_t i = 0; i < ms.size(); i++) {
            if (mu[i].get(j)) {
                n_j += ns[i];
            }
        }
        if (n_j.is_zero()) {
            continue;
        }
        BitMatrix d_j = diagonal_complement(n_j);
        out.add(b[j], n_j + d_j);
        if (!d_j.is_zero()) {
            BitVec dv(r);
            for (size_t i = 0; i < r; i++) {
                dv.set(i, d_j.get(i, i));
            }
            diags.push_back(dv);
            diag_owner.push_back(b[j]);
        }
    }
    if (diags.empty()) {
        return out;
    }

    // Σ_j B_j ⊗ D_j = Σ_ℓ Y_ℓ ⊗ E_ℓ over a basis E_ℓ of the diagonal span.
    std::vector<size_t> pivots;
    BitMatrix e_basis = rref(BitMatrix::from_rows(diags), &pivots);
    std::vector<BitMatrix> ys(pivots.size(), BitMatrix(r, r)), es;
    for (size_t l = 0; l < pivots.size(); l++) {
        es.push_back(BitMatrix::diagonal(e_basis.row(l)));
        for (size_t j = 0; j < diags.size(); j++) {
            if (diags[j].get(pivots[l])) {
                ys[l] += diag_owner[j];
            }
        }
    }
    std::vector<BitMatrix> y_basis;
    {
        BitMatrix yb = rref(stack_flat(ys, r));
        for (size_t i = 0; i < yb.rows(); i++) {
            if (!yb.row(i).is_zero()) {
                y_basis.push_back(unflatten(yb.row(i), r));
            }
        }
    }
    std::vector<BitMatrix> f = invertible_spanning_set(y_basis, seed + 1);
    std::vector<BitVec> beta = coordinates_over(f, ys, r);

    BitMatrix tail(r, r);
    for (size_t a = 0; a < f.size(); a++) {
        BitMatrix w(r, r);
        for (size_t l = 0; l < ys.size(); l++) {
            if (beta[l].get(a)) {
                w += es[l];
            }
        }
        if (w.is_zero()) {
            continue;
        }
        if (is_invertible(w)) {
            out.add(f[a], w);
        } else {
            out.add(f[a], cycle_complement(w, cycle));
            tail += f[a];
        }
    }
    if (!tail.is_zero()) {
        for (const auto &g : sum_two_invertibles(tail)) {
            out.add(g, cycle);
        }
    }
    return out;
}

TensorSum swap_factors(const TensorSum &ts) {
    TensorSum out(ts.r);
    for (const auto &[g1, g2] : ts.terms) {
        out.add(g2, g1);
    }
    return out;
}

}  // namespace

TensorSum tensor_decompose(const BitMatrix &a, size_t r, uint64_t seed) {
    auto factors = tensor_rank_factors(a, r);
    std::vector<TensorSum> candidates;
    candidates.push_back(split_path(factors, r));
    if (!factors.empty()) {
        candidates.push_back(spanning_path(factors, r, seed));
        std::vector<std::pair<BitMatrix, BitMatrix>> swapped;
        for (const auto &[m, n] : factors) {
            swapped.emplace_back(n, m);
        }
        candidates.push_back(swap_factors(spanning_path(swapped, r, seed)));
    }
    for (auto &c : candidates) {
        simplify(c);
    }
    auto best = std::min_element(candidates.begin(), candidates.end(),
                                 [](const TensorSum &x, const TensorSum &y) { return x.weight() < y.weight(); });
    if (best->reconstruct() != a) {
        throw std::logic_error("tensor_decompose: reconstruction failed");
    }
    return *best;
}

TensorSum tensor_decompose_upper_triangular(const BitMatrix &a, size_t r, uint64_t seed) {
    if (a.rows() != r * r || !a.is_upper_triangular() || !is_invertible(a)) {
        throw std::invalid_argument("tensor_decompose_upper_triangular needs an invertible upper-triangular matrix");
    }
    TensorSum out(r);
    BitMatrix id = BitMatrix::identity(r), cycle = canonical_cycle(r);

    // Strictly upper blocks: Σ_{i<j} E_ij ⊗ A_ij = Σ_g (I + S_g) ⊗ G_g + I ⊗ Σ_g G_g.
    std::vector<BitMatrix> upper;
    std::vector<std::pair<size_t, size_t>> where;
    for (size_t i = 0; i < r; i++) {
        for (size_t j = i + 1; j < r; j++) {
            BitMatrix blk = a.block(i * r, j * r, r, r);
            if (!blk.is_zero()) {
                upper.push_back(blk);
                where.emplace_back(i, j);
            }
        }
    }
    if (!upper.empty()) {
        std::vector<BitMatrix> basis;
        BitMatrix ub = rref(stack_flat(upper, r));
        for (size_t i = 0; i < ub.rows(); i++) {
            if (!ub.row(i).is_zero()) {
                basis.push_back(unflatten(ub.row(i), r));
            }
        }
        std::vector<BitMatrix> g = invertible_spanning_set(basis, seed);
        std::vector<BitVec> nu = coordinates_over(g, upper, r);
        BitMatrix tail(r, r);
        for (size_t k = 0; k < g.size(); k++) {
            BitMatrix s(r, r);
            for (size_t u = 0; u < upper.size(); u++) {
                if (nu[u].get(k)) {
                    s.flip(where[u].first, where[u].second);
                }
            }
            if (s.is_zero()) {
                continue;
            }
            out.add(id + s, g[k]);
            tail += g[k];
        }
        if (!tail.is_zero()) {
            for (const auto &h : sum_two_invertibles(tail)) {
                out.add(id, h);
            }
        }
    }

    // Diagonal blocks: Σ_i E_ii ⊗ U_i = Σ_i (E_ii + C) ⊗ U_i + C ⊗ Σ_i U_i.
    BitMatrix u_sum(r, r);
    for (size_t i = 0; i < r; i++) {
        BitMatrix u = a.block(i * r, i * r, r, r);
        out.add(unit_diag(r, i) + cycle, u);
        u_sum += u;
    }
    if (!u_sum.is_zero()) {
        for (const auto &h : sum_two_invertibles(u_sum)) {
            out.add(cycle, h);
        }
    }
    simplify(out);
    TensorSum generic = tensor_decompose(a, r, seed);
    TensorSum &best = generic.weight() < out.weight() ? generic : out;
    if (best.reconstruct() != a) {
        throw std::logic_error("tensor_decompose_upper_triangular: reconstruction failed");
    }
    return best;
}

BitMatrix binary_cholesky(const BitMatrix &s) {
    if (!s.is_symmetric()) {
        throw std::invalid_argument("binary_cholesky needs a symmetric matrix");
    }
    size_t n = s.rows();
    BitMatrix t = s;
    std::vector<BitVec> cols;
    auto diag = [&]() {
        BitVec d(n);
        for (size_t i = 0; i < n; i++) {
            d.set(i, t.get(i, i));
        }
        return d;
    };
    auto subtract_outer = [&](const BitVec &v) {
        for (size_t i = 0; i < n; i++) {
            if (v.get(i)) {
                t.xor_into_row(i, v);
            }
        }
        cols.push_back(v);
    };
    if (!t.is_zero() && diag().is_zero()) {
        for (size_t j = 0; j < n; j++) {
            if (t.col_weight(j) > 0) {
                subtract_outer(t.col(j));
                break;
            }
        }
    }
    std::mt19937_64 rng(0xc401);
    while (!t.is_zero()) {
        BitVec d = diag();
        if (rank(t) == 1) {
            subtract_outer(d);
            break;
        }
        // x with x·T·x^T = 1 whose image T·x differs from the diagonal, so T + (Tx)(Tx)^T stays non-alternating.
        std::optional<BitVec> pick;
        for (size_t i = 0; i < n && !pick; i++) {
            if (d.get(i) && t.col(i) != d) {
                pick = t.col(i);
            }
        }
        for (size_t i = 0; i < n && !pick; i++) {
            for (size_t j = i + 1; j < n && !pick; j++) {
                if (d.get(i) != d.get(j)) {
                    BitVec tx = t.col(i) ^ t.col(j);
                    if (tx != d) {
                        pick = tx;
                    }
                }
            }
        }
        while (!pick) {
            BitVec x = BitVec::random(n, rng);
            if (x.dot(d)) {
                BitVec tx = t.right_mul(x);
                if (tx != d) {
                    pick = tx;
                }
            }
        }
        subtract_outer(*pick);
    }
    std::reverse(cols.begin(), cols.end());
    BitMatrix l(n, cols.size());
    for (size_t k = 0; k < cols.size(); k++) {
        for (size_t i = 0; i < n; i++) {
            l.set(i, k, cols[k].get(i));
        }
    }
    return l;
}

std::vector<BitMatrix> symmetric_tensor_decompose(const BitMatrix &s, size_t r) {
    if (!s.is_symmetric() || s.rows() != r * r) {
        throw std::invalid_argument("symmetric_tensor_decompose needs a symmetric r^2 x r^2 matrix");
    }
    BitMatrix tau = Permutation::tau(r).matrix();
    BitMatrix l = binary_cholesky(reshape(s * tau) * tau);
    std::vector<BitMatrix> out;
    for (size_t k = 0; k < l.cols(); k++) {
        out.push_back(unflatten(l.col(k), r));
    }
    return out;
}

const std::vector<BitMatrix> &exceptional_cross_fixture() {
    static const std::vector<BitMatrix> fixture = [] {
        std::vector<BitMatrix> out;
        for (const char *rows : {"001010100", "001101010", "100111110", "110100001", "111110101", "111001011",
                                 "010011111"}) {
            std::string s(rows);
            out.push_back(BitMatrix::from_strings({s.substr(0, 3), s.substr(3, 3), s.substr(6, 3)}));
        }
        return out;
    }();
    return fixture;
}

std::optional<BitMatrix> find_cross_complement(const BitMatrix &a, const BitMatrix &b, uint64_t seed) {
    size_t r = a.rows();
    auto ok = [&](const BitMatrix &c) {
        return is_invertible(a + c) && is_invertible(b + c) && is_invertible(a + b + c);
    };
    if (r <= 4) {
        const auto &gl = general_linear_group(r);
        size_t start = seed % gl.size();
        for (size_t k = 0; k < gl.size(); k++) {
            const BitMatrix &c = gl[(start + k) % gl.size()];
            if (ok(c)) {
                return c;
            }
        }
        return std::nullopt;
    }
    std::mt19937_64 rng(seed ^ 0xc0c0);
    for (int attempt = 0; attempt < 200000; attempt++) {
        BitMatrix c = BitMatrix::random_invertible(r, rng);
        if (ok(c)) {
            return c;
        }
    }
    return std::nullopt;
}

namespace {

// Transports the r = 3 fixture onto D(a,b) through P·a·Q^T = E_11, P·b·Q^T ∈ {X_1, X_2}.
std::optional<SymTensorSum> transport_exception(const BitMatrix &a, const BitMatrix &b) {
    const auto &gl = general_linear_group(3);
    BitMatrix e11 = unit_diag(3, 0);
    BitMatrix x1 = BitMatrix::from_strings({"010", "100", "001"}), x2 = BitMatrix::from_strings({"110", "100", "001"});
    for (const auto &p : gl) {
        BitMatrix pa = p * a;
        for (const auto &q : gl) {
            if (pa * q.transposed() != e11) {
                continue;
            }
            BitMatrix pbq = p * b * q.transposed();
            if (pbq == x1 || pbq == x2) {
                BitMatrix pi = invert(p), qit = invert(q).transposed();
                SymTensorSum out(3);
                for (const auto &g : exceptional_cross_fixture()) {
                    out.add(pi * g * qit);
                }
                return out;
            }
        }
    }
    return std::nullopt;
}

}  // namespace

SymTensorSum cross_term_decompose(const BitMatrix &a, const BitMatrix &b, uint64_t seed) {
    size_t r = a.rows();
    SymTensorSum out(r);
    BitMatrix target = cross_term(a, b);
    if (target.is_zero()) {
        return out;
    }
    if (is_invertible(a) && is_invertible(b) && is_invertible(a + b)) {
        out.add(a + b);
        out.add(a);
        out.add(b);
        return out;
    }
    if (auto c = find_cross_complement(a, b, seed)) {
        out.add(a + *c);
        out.add(b + *c);
        out.add(a + b + *c);
        out.add(*c);
    } else if (r == 3) {
        // D(a,b) = D(b,a) = D(a,a+b) = D(b,a+b); look for a rank-one entry to normalize.
        for (const auto &[x, y] : std::vector<std::pair<BitMatrix, BitMatrix>>{
                 {a, b}, {b, a}, {a, a + b}, {a + b, a}, {b, a + b}, {a + b, b}}) {
            if (rank(x) != 1) {
                continue;
            }
            if (auto t = transport_exception(x, y)) {
                out = *t;
                break;
            }
        }
    }
    if (out.weight() == 0 || out.reconstruct() != target) {
        throw std::logic_error("cross_term_decompose: no decomposition found");
    }
    return out;
}

namespace {

// Σ terms S(A_i) + Σ e_j S(E_jj) + Σ D(E_jj, B_j), resolved with a fixed invertible X having E_jj + X invertible.
struct SymAccumulator {
    size_t r;
    std::vector<BitMatrix> terms;
    std::vector<bool> e;
    std::vector<BitMatrix> b;

    explicit SymAccumulator(size_t r) : r(r), e(r, false), b(r, BitMatrix(r, r)) {}

    std::optional<SymTensorSum> finalize(const BitMatrix &x, uint64_t seed,
                                         std::map<std::pair<size_t, std::string>, SymTensorSum> *cache) const {
        SymTensorSum out(r);
        for (const auto &t : terms) {
            out.add(t);
        }
        std::vector<BitMatrix> bs = b;
        bool parity = false;
        for (size_t j = 0; j < r; j++) {
            if (!e[j]) {
                continue;
            }
            BitMatrix ex = unit_diag(r, j) + x;
            if (!is_invertible(ex)) {
                return std::nullopt;
            }
            out.add(ex);
            parity = !parity;
            bs[j] += x;
        }
        if (parity) {
            out.add(x);
        }
        for (size_t j = 0; j < r; j++) {
            BitMatrix ejj = unit_diag(r, j);
            if (bs[j].is_zero() || bs[j] == ejj) {
                continue;
            }
            SymTensorSum cross(r);
            std::pair<size_t, std::string> key{j, bs[j].str()};
            if (cache && cache->count(key)) {
                cross = cache->at(key);
            } else {
                cross = cross_term_decompose(ejj, bs[j], seed + j);
                if (cache) {
                    cache->emplace(key, cross);
                }
            }
            for (const auto &g : cross.terms) {
                out.add(g);
            }
        }
        simplify(out);
        return out;
    }
};

}  // namespace

SymTensorSum invertible_symmetric_decompose(const BitMatrix &s, size_t r, uint64_t seed) {
    SymAccumulator acc(r);
    for (const auto &m : symmetric_tensor_decompose(s, r)) {
        BitMatrix d = diagonal_complement(m);
        BitMatrix a = m + d;
        acc.terms.push_back(a);
        // S(D) = Σ_j d_j S(E_jj) + Σ_{j<k} d_j d_k D(E_jj,E_kk) and D(A,D) = Σ_j d_j D(E_jj,A).
        for (size_t j = 0; j < r; j++) {
            if (!d.get(j, j)) {
                continue;
            }
            acc.e[j] = !acc.e[j];
            acc.b[j] += a;
            for (size_t k = j + 1; k < r; k++) {
                if (d.get(k, k)) {
                    acc.b[j].flip(k, k);
                }
            }
        }
    }
    auto out = acc.finalize(canonical_cycle(r), seed, nullptr);
    if (!out || out->reconstruct() != s) {
        throw std::logic_error("invertible_symmetric_decompose: reconstruction failed");
    }
    return *out;
}

bool in_xi(const BitMatrix &dmat, size_t r) {
    return dmat.rows() == r * r && dmat.cols() == r * r && dmat.is_diagonal() &&
           (dmat * Permutation::tau(r).matrix()).is_symmetric();
}

BitMatrix xi_from_support(const BitMatrix &v) {
    if (!v.is_symmetric()) {
        throw std::invalid_argument("xi support must be symmetric");
    }
    return BitMatrix::diagonal(flatten(v));
}

SymTensorSum xi_decompose(const BitMatrix &dmat, size_t r, uint64_t seed) {
    if (!in_xi(dmat, r)) {
        throw std::invalid_argument("xi_decompose: input is not in xi");
    }
    // r = 3 results are memoised per support and do not depend on the seed.
    static std::mutex memo_mutex;
    static std::map<std::string, SymTensorSum> memo;
    std::string key = dmat.str();
    if (r == 3) {
        seed = 0;
        std::lock_guard lock(memo_mutex);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
    }
    BitMatrix v(r, r);
    for (size_t i = 0; i < r; i++) {
        for (size_t j = 0; j < r; j++) {
            v.set(i, j, dmat.get(i * r + j, i * r + j));
        }
    }
    std::vector<std::pair<size_t, size_t>> pairs;
    std::vector<BitMatrix> xs;
    if (r == 3) {
        xs = general_linear_group(3);
    } else {
        std::mt19937_64 rng(seed ^ 0x71);
        xs.push_back(canonical_cycle(r));
        xs.push_back(canonical_cycle(r).transposed());
        for (int i = 0; i < 6; i++) {
            xs.push_back(BitMatrix::random_invertible(r, rng));
        }
    }
    std::map<std::pair<size_t, std::string>, SymTensorSum> cache;
    std::optional<SymTensorSum> best;
    std::mt19937_64 rng(seed ^ 0x0a);
    for (int complement = 0; complement < 2; complement++) {
        BitMatrix w = v;
        if (complement) {
            for (size_t i = 0; i < r; i++) {
                for (size_t j = 0; j < r; j++) {
                    w.flip(i, j);
                }
            }
        }
        std::vector<std::pair<size_t, size_t>> offd;
        for (size_t j = 0; j < r; j++) {
            for (size_t k = j + 1; k < r; k++) {
                if (w.get(j, k)) {
                    offd.emplace_back(j, k);
                }
            }
        }
        std::vector<uint64_t> owners;
        if (offd.size() <= 6) {
            for (uint64_t mask = 0; mask < (uint64_t{1} << offd.size()); mask++) {
                owners.push_back(mask);
            }
        } else {
            owners.push_back(0);
            owners.push_back(~uint64_t{0});
            for (int i = 0; i < 30; i++) {
                owners.push_back(rng());
            }
        }
        for (uint64_t mask : owners) {
            SymAccumulator acc(r);
            if (complement) {
                acc.terms.push_back(BitMatrix::identity(r));
            }
            for (size_t j = 0; j < r; j++) {
                acc.e[j] = w.get(j, j);
            }
            for (size_t p = 0; p < offd.size(); p++) {
                auto [j, k] = offd[p];
                bool high = (mask >> (p % 64)) & 1;
                if (high) {
                    acc.b[k].flip(j, j);
                } else {
                    acc.b[j].flip(k, k);
                }
            }
            for (const auto &x : xs) {
                auto cand = acc.finalize(x, seed, &cache);
                if (cand && (!best || cand->weight() < best->weight())) {
                    best = std::move(cand);
                }
            }
        }
    }
    if (!best || best->reconstruct_untwisted() != dmat) {
        throw std::logic_error("xi_decompose: reconstruction failed");
    }
    if (r == 3) {
        std::lock_guard lock(memo_mutex);
        memo.emplace(key, *best);
    }
    return *best;
}

TensorSum single_cnot_cross(size_t r, std::pair<size_t, size_t> control, std::pair<size_t, size_t> target) {
    BitMatrix m1 = BitMatrix::single(r, r, control.first, target.first);
    BitMatrix m2 = BitMatrix::single(r, r, control.second, target.second);
    TensorSum out(r);
    for (const auto &g1 : sum_two_invertibles(m1)) {
        for (const auto &g2 : sum_two_invertibles(m2)) {
            out.add(g1, g2);
        }
    }
    simplify(out);
    return out;
}

TensorSum single_cnot_in_block(size_t r, std::pair<size_t, size_t> control, std::pair<size_t, size_t> target) {
    if (control == target) {
        throw std::invalid_argument("in-block CNOT needs distinct qubits");
    }
    BitMatrix a1 = BitMatrix::single(r, r, control.first, target.first);
    BitMatrix a2 = BitMatrix::single(r, r, control.second, target.second);
    BitMatrix id = BitMatrix::identity(r);
    auto expand = [&](const std::vector<std::pair<BitMatrix, BitMatrix>> &pieces) {
        TensorSum ts(r);
        for (const auto &[x, y] : pieces) {
            for (const auto &g1 : sum_two_invertibles(x)) {
                for (const auto &g2 : sum_two_invertibles(y)) {
                    ts.add(g1, g2);
                }
            }
        }
        simplify(ts);
        return ts;
    };
    // I + A1⊗A2 = I⊗(I+A2) + (I+A1)⊗A2 = (I+A1)⊗I + A1⊗(I+A2).
    TensorSum first = expand({{id, id + a2}, {id + a1, a2}});
    TensorSum second = expand({{id + a1, id}, {a1, id + a2}});
    TensorSum &best = second.weight() < first.weight() ? second : first;
    if (best.reconstruct() != BitMatrix::identity(r * r) + kron(a1, a2)) {
        throw std::logic_error("single_cnot_in_block: reconstruction failed");
    }
    return best;
}

SymTensorSum single_s(size_t r, size_t i, size_t j, uint64_t seed) {
    BitMatrix e = BitMatrix::single(r, r, i, j);
    BitMatrix target = sym_term(e);
    auto build = [&](const BitMatrix &x, const SymTensorSum &cross) {
        // S(E) = S(E+X) + S(X) + D(E,X).
        SymTensorSum out(r);
        out.add(e + x);
        out.add(x);
        for (const auto &g : cross.terms) {
            out.add(g);
        }
        simplify(out);
        return out;
    };
    std::vector<BitMatrix> candidates;
    if (r <= 4) {
        candidates = general_linear_group(r);
    } else {
        std::mt19937_64 rng(seed ^ 0x5);
        for (int k = 0; k < 2000; k++) {
            candidates.push_back(BitMatrix::random_invertible(r, rng));
        }
    }
    std::optional<BitMatrix> fallback;
    for (const auto &x : candidates) {
        if (!is_invertible(e + x)) {
            continue;
        }
        if (!fallback) {
            fallback = x;
        }
        if (auto c = find_cross_complement(e, x, seed)) {
            SymTensorSum cross(r);
            cross.add(e + *c);
            cross.add(x + *c);
            cross.add(e + x + *c);
            cross.add(*c);
            SymTensorSum out = build(x, cross);
            if (out.reconstruct() == target) {
                return out;
            }
        }
    }
    if (!fallback) {
        throw std::logic_error("single_s: no complement found");
    }
    SymTensorSum out = build(*fallback, cross_term_decompose(e, *fallback, seed));
    if (out.reconstruct() != target) {
        throw std::logic_error("single_s: reconstruction failed");
    }
    return out;
}

SymTensorSum single_cz(size_t r, std::pair<size_t, size_t> q1, std::pair<size_t, size_t> q2, uint64_t seed) {
    if (q1 == q2) {
        throw std::invalid_argument("single_cz needs two distinct qubits");
    }
    BitMatrix a = BitMatrix::single(r, r, q1.first, q2.second);
    BitMatrix b = BitMatrix::single(r, r, q2.first, q1.second);
    return cross_term_decompose(a, b, seed);
}

}  // namespace shyps
