// SPDX-License-Identifier: Apache-2.0
#include "shyps/code.h"

#include <map>
#include <mutex>
#include <stdexcept>

namespace shyps {

ShypsCode build_shyps(size_t r) {
    ShypsCode c;
    c.simplex = build_simplex(r);
    c.r = r;
    c.nr = c.simplex.n;
    c.n = c.nr * c.nr;
    c.k = r * r;
    c.d = size_t{1} << (r - 1);
    const BitMatrix &H = c.simplex.H;
    const BitMatrix &G = c.simplex.G;
    const BitMatrix &P = c.simplex.P;
    BitMatrix I = BitMatrix::identity(c.nr);
    c.GX = kron(H, I);
    c.GZ = kron(I, H);
    c.SX = kron(H, G);
    c.SZ = kron(G, H);
    c.LX = kron(P, G);
    c.LZ = kron(G, P);
    c.gx_space = std::make_shared<RowSpace>(c.GX);
    c.gz_space = std::make_shared<RowSpace>(c.GZ);
    c.sx_space = std::make_shared<RowSpace>(c.SX);
    c.sz_space = std::make_shared<RowSpace>(c.SZ);
    return c;
}

const ShypsCode &shyps_code(size_t r) {
    static std::mutex mu;
    static std::map<size_t, std::unique_ptr<ShypsCode>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto &slot = cache[r];
    if (!slot) {
        slot = std::make_unique<ShypsCode>(build_shyps(r));
    }
    return *slot;
}

Permutation lift_automorphism(const ShypsCode &code, const BitMatrix &g1, const BitMatrix &g2) {
    return kron(aut_permutation(code.simplex, g1), aut_permutation(code.simplex, g2));
}

BitMatrix logical_action_of_lift(const ShypsCode &code, const BitMatrix &g1, const BitMatrix &g2) {
    if (!is_invertible(g1) || !is_invertible(g2)) {
        throw std::domain_error("logical_action_of_lift: singular input");
    }
    (void)code;
    return kron(invert(g1).transposed(), g2);
}

namespace {

struct Enumerator {
    const std::vector<BitVec> &columns;  // syndrome of each single-qubit error against the opposite stabilizers
    const RowSpace &gauge;
    size_t n;
    size_t target_weight;
    std::vector<size_t> chosen;
    std::optional<std::vector<size_t>> found;

    void run(size_t start, const BitVec &syndrome) {
        if (found) {
            return;
        }
        if (chosen.size() == target_weight) {
            if (!syndrome.is_zero()) {
                return;
            }
            BitVec e(n);
            for (size_t q : chosen) {
                e.set(q, true);
            }
            if (!gauge.contains(e)) {
                found = chosen;
            }
            return;
        }
        for (size_t q = start; q < n; q++) {
            chosen.push_back(q);
            run(q + 1, syndrome ^ columns[q]);
            chosen.pop_back();
            if (found) {
                return;
            }
        }
    }
};

std::vector<BitVec> column_syndromes(const BitMatrix &stabilizers) {
    BitMatrix t = stabilizers.transposed();
    std::vector<BitVec> out;
    out.reserve(t.rows());
    for (size_t q = 0; q < t.rows(); q++) {
        out.push_back(t.row(q));
    }
    return out;
}

}  // namespace

DistanceReport dressed_distance_bound(const ShypsCode &code, size_t w_max) {
    if (w_max > 6) {
        throw std::invalid_argument("dressed_distance_bound: enumeration budget exceeded (w_max > 6)");
    }
    DistanceReport report;
    report.w_max = w_max;
    report.no_logical_below = w_max + 1;
    // An X pattern is a dressed logical when it commutes with S_Z and is not in the X gauge span; Z symmetric.
    std::vector<BitVec> x_cols = column_syndromes(code.SZ);
    std::vector<BitVec> z_cols = column_syndromes(code.SX);
    for (size_t w = 1; w <= w_max; w++) {
        Enumerator ex{x_cols, *code.gx_space, code.n, w, {}, std::nullopt};
        ex.run(0, BitVec(code.SZ.rows()));
        Enumerator ez{z_cols, *code.gz_space, code.n, w, {}, std::nullopt};
        ez.run(0, BitVec(code.SX.rows()));
        if (ez.found || ex.found) {
            report.no_logical_below = w;
            report.witness = ez.found ? ez.found : ex.found;
            report.witness_type = ez.found ? 'Z' : 'X';
            return report;
        }
    }
    return report;
}

}  // namespace shyps
