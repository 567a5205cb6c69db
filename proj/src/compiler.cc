// SPDX-License-Identifier: Apache-2.0
#include "shyps/compiler.h"

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>
#include <stdexcept>

#include "shyps/simplex.h"

namespace shyps {

namespace {

BitMatrix inverse_transpose(const BitMatrix &h) { return invert(h).transposed(); }

uint32_t u32(size_t v) { return static_cast<uint32_t>(v); }

void require_invertible(const BitMatrix &h, const char *what) {
    if (!is_invertible(h)) {
        throw std::invalid_argument(std::string(what) + ": factor is singular");
    }
}

Step single_step(Generator g) {
    Step s;
    s.generators.push_back(std::move(g));
    return s;
}

/// Symmetric permutation matrix (σ⊗σ^T)·τ_{n_r} as a permutation.
Permutation phase_pairing(const ShypsCode &code, const BitMatrix &g) {
    Permutation sigma = aut_permutation(code.simplex, g);
    return compose(kron(sigma, sigma.inverse()), Permutation::tau(code.nr));
}

BitMatrix block_diagonal_of(const BitMatrix &m, size_t blocks, size_t k) {
    BitMatrix out(m.rows(), m.cols());
    for (size_t j = 0; j < blocks; j++) {
        out.set_block(j * k, j * k, m.block(j * k, j * k, k, k));
    }
    return out;
}

BitMatrix tau_blocks(size_t r, size_t blocks) {
    size_t k = r * r;
    BitMatrix t(blocks * k, blocks * k);
    BitMatrix tr = Permutation::tau(r).matrix();
    for (size_t j = 0; j < blocks; j++) {
        t.set_block(j * k, j * k, tr);
    }
    return t;
}

const TensorSum &lighter(const TensorSum &a, const TensorSum &b) { return b.weight() < a.weight() ? b : a; }

void check_reconstruct(const TensorSum &ts, const BitMatrix &target, const char *what) {
    if (ts.reconstruct() != target) {
        throw std::logic_error(std::string(what) + ": tensor decomposition does not reconstruct its input");
    }
}

}  // namespace

std::string gen_kind_name(GenKind kind) {
    switch (kind) {
        case GenKind::TransversalCnot:
            return "transversal_cnot";
        case GenKind::TransversalCz:
            return "transversal_cz";
        case GenKind::PhaseLayer:
            return "phase_layer";
        case GenKind::XPhaseLayer:
            return "x_phase_layer";
        case GenKind::FoldHadamard:
            return "fold_hadamard";
        case GenKind::Relabel:
            return "relabel";
    }
    return "?";
}

// ---------------------------------------------------------------------------------------------------------------
// Generators.

Generator gen_cross_block_cnot(const ShypsCode &code, const BitMatrix &h1, const BitMatrix &h2, size_t ctrl,
                               size_t tgt) {
    require_invertible(h1, "gen_cross_block_cnot");
    require_invertible(h2, "gen_cross_block_cnot");
    if (ctrl == tgt || h1.rows() != code.r || h2.rows() != code.r) {
        throw std::invalid_argument("gen_cross_block_cnot: needs distinct blocks and r×r factors");
    }
    return Generator{GenKind::TransversalCnot, ctrl, tgt, h1, h2};
}

Generator gen_cross_block_cz(const ShypsCode &code, const BitMatrix &h1, const BitMatrix &h2, size_t a, size_t b) {
    require_invertible(h1, "gen_cross_block_cz");
    require_invertible(h2, "gen_cross_block_cz");
    if (a == b || h1.rows() != code.r || h2.rows() != code.r) {
        throw std::invalid_argument("gen_cross_block_cz: needs distinct blocks and r×r factors");
    }
    return Generator{GenKind::TransversalCz, a, b, h1, h2};
}

Generator gen_diagonal(const ShypsCode &code, const BitMatrix &h, size_t block) {
    require_invertible(h, "gen_diagonal");
    if (h.rows() != code.r) {
        throw std::invalid_argument("gen_diagonal: expected an r×r matrix");
    }
    return Generator{GenKind::PhaseLayer, block, block, h, {}};
}

Generator gen_x_diagonal(const ShypsCode &code, const BitMatrix &h, size_t block) {
    require_invertible(h, "gen_x_diagonal");
    if (h.rows() != code.r) {
        throw std::invalid_argument("gen_x_diagonal: expected an r×r matrix");
    }
    return Generator{GenKind::XPhaseLayer, block, block, h, {}};
}

Generator gen_fold_hadamard(const ShypsCode &, size_t block) {
    return Generator{GenKind::FoldHadamard, block, block, {}, {}};
}

Generator gen_relabel(const ShypsCode &code, const BitMatrix &h1, const BitMatrix &h2, size_t block) {
    require_invertible(h1, "gen_relabel");
    require_invertible(h2, "gen_relabel");
    if (h1.rows() != code.r || h2.rows() != code.r) {
        throw std::invalid_argument("gen_relabel: expected r×r factors");
    }
    return Generator{GenKind::Relabel, block, block, h1, h2};
}

size_t generator_depth(const Generator &g) { return g.kind == GenKind::Relabel ? 0 : 1; }

Permutation physical_pairing(const ShypsCode &code, const Generator &g) {
    switch (g.kind) {
        case GenKind::TransversalCnot:
        case GenKind::Relabel:
            return lift_automorphism(code, inverse_transpose(g.h1), g.h2);
        case GenKind::TransversalCz:
            return compose(lift_automorphism(code, inverse_transpose(g.h1), g.h2), Permutation::tau(code.nr));
        case GenKind::PhaseLayer:
            return phase_pairing(code, inverse_transpose(g.h1));
        case GenKind::XPhaseLayer:
            return phase_pairing(code, g.h1);
        case GenKind::FoldHadamard:
            return Permutation::tau(code.nr);
    }
    throw std::logic_error("unknown generator kind");
}

std::vector<Gate> physical_gates(const ShypsCode &code, const Generator &g) {
    size_t n = code.n;
    std::vector<Gate> gates;
    if (g.kind == GenKind::Relabel) {
        return gates;
    }
    if (g.kind == GenKind::FoldHadamard) {
        for (size_t q = 0; q < n; q++) {
            gates.push_back({GateKind::H, u32(g.block * n + q)});
        }
        return gates;
    }
    Permutation p = physical_pairing(code, g);
    size_t a = g.block * n;
    size_t b = g.block2 * n;
    for (size_t j = 0; j < n; j++) {
        // The pairing matrix has a one at (p(j), j).
        switch (g.kind) {
            case GenKind::TransversalCnot:
                gates.push_back({GateKind::CX, u32(a + p(j)), u32(b + j)});
                break;
            case GenKind::TransversalCz:
                gates.push_back({GateKind::CZ, u32(a + p(j)), u32(b + j)});
                break;
            case GenKind::PhaseLayer:
            case GenKind::XPhaseLayer: {
                bool z = g.kind == GenKind::PhaseLayer;
                if (p(j) == j) {
                    gates.push_back({z ? GateKind::S : GateKind::SX, u32(a + j)});
                } else if (p(j) < j) {
                    gates.push_back({z ? GateKind::CZ : GateKind::XCX, u32(a + p(j)), u32(a + j)});
                }
                break;
            }
            default:
                break;
        }
    }
    return gates;
}

std::vector<std::pair<uint32_t, uint32_t>> physical_relabel(const ShypsCode &code, const Generator &g) {
    std::vector<std::pair<uint32_t, uint32_t>> moves;
    if (g.kind != GenKind::FoldHadamard && g.kind != GenKind::Relabel) {
        return moves;
    }
    Permutation p = physical_pairing(code, g);
    size_t off = g.block * code.n;
    for (size_t j = 0; j < code.n; j++) {
        if (p(j) != j) {
            moves.emplace_back(u32(off + p(j)), u32(off + j));
        }
    }
    return moves;
}

SymplecticMatrix claimed_action(const Generator &g, size_t r, size_t blocks) {
    size_t k = r * r;
    size_t m = blocks * k;
    if (g.block >= blocks || g.block2 >= blocks) {
        throw std::invalid_argument("claimed_action: generator touches a block outside the data register");
    }
    switch (g.kind) {
        case GenKind::TransversalCnot: {
            BitMatrix x = BitMatrix::identity(m);
            x.set_block(g.block * k, g.block2 * k, kron(g.h1, g.h2));
            return from_cnot(x);
        }
        case GenKind::Relabel: {
            BitMatrix x = BitMatrix::identity(m);
            x.set_block(g.block * k, g.block * k, kron(g.h1, g.h2));
            return from_cnot(x);
        }
        case GenKind::TransversalCz: {
            BitMatrix a = kron(g.h1, g.h2) * Permutation::tau(r).matrix();
            BitMatrix s(m, m);
            s.set_block(g.block * k, g.block2 * k, a);
            s.set_block(g.block2 * k, g.block * k, a.transposed());
            return from_diagonal(s);
        }
        case GenKind::PhaseLayer:
        case GenKind::XPhaseLayer: {
            BitMatrix s(m, m);
            s.set_block(g.block * k, g.block * k, sym_term(g.h1));
            return g.kind == GenKind::PhaseLayer ? from_diagonal(s) : from_x_diagonal(s);
        }
        case GenKind::FoldHadamard: {
            BitMatrix full = BitMatrix::identity(2 * m);
            BitMatrix t = Permutation::tau(r).matrix();
            size_t o = g.block * k;
            full.set_block(o, o, BitMatrix(k, k));
            full.set_block(m + o, m + o, BitMatrix(k, k));
            full.set_block(o, m + o, t);
            full.set_block(m + o, o, t);
            return SymplecticMatrix(full);
        }
    }
    throw std::logic_error("unknown generator kind");
}

// ---------------------------------------------------------------------------------------------------------------
// Sequences.

size_t Step::depth() const {
    size_t d = 0;
    for (const auto &g : generators) {
        d = std::max(d, generator_depth(g));
    }
    for (const auto &t : teleports) {
        d = std::max(d, t.inner.size());
    }
    return d;
}

size_t GeneratorSequence::depth() const {
    size_t d = 0;
    for (const auto &s : steps) {
        d += s.depth();
    }
    return d;
}

bool GeneratorSequence::uses_measurement() const {
    return std::any_of(steps.begin(), steps.end(), [](const Step &s) { return !s.teleports.empty(); });
}

void GeneratorSequence::append(const GeneratorSequence &other) {
    if (other.steps.empty()) {
        aux_blocks = std::max(aux_blocks, other.aux_blocks);
        return;
    }
    if (r != other.r || blocks != other.blocks) {
        throw std::invalid_argument("append: sequences for different registers");
    }
    steps.insert(steps.end(), other.steps.begin(), other.steps.end());
    aux_blocks = std::max(aux_blocks, other.aux_blocks);
}

void GeneratorSequence::merge_parallel(const GeneratorSequence &other) {
    if (!other.steps.empty() && (r != other.r || blocks != other.blocks)) {
        throw std::invalid_argument("merge_parallel: sequences for different registers");
    }
    if (steps.size() < other.steps.size()) {
        steps.resize(other.steps.size());
    }
    for (size_t i = 0; i < other.steps.size(); i++) {
        const Step &o = other.steps[i];
        steps[i].generators.insert(steps[i].generators.end(), o.generators.begin(), o.generators.end());
        steps[i].teleports.insert(steps[i].teleports.end(), o.teleports.begin(), o.teleports.end());
    }
    aux_blocks = std::max(aux_blocks, other.aux_blocks);
}

SymplecticMatrix claimed_product(const ShypsCode &code, const GeneratorSequence &seq) {
    size_t k = code.k;
    size_t m = seq.blocks * k;
    SymplecticMatrix acc = SymplecticMatrix::identity(m);
    for (const auto &step : seq.steps) {
        for (const auto &g : step.generators) {
            acc = acc * claimed_action(g, code.r, seq.blocks);
        }
        for (const auto &t : step.teleports) {
            BitMatrix x = BitMatrix::identity(m);
            x.set_block(t.block * k, t.block * k, t.C);
            acc = acc * from_cnot(x);
        }
    }
    return acc;
}

namespace {

/// Logical |0⟩ preparation of an auxiliary block: transversal |0⟩ followed by one round of X-gauge measurements,
/// which fixes the X stabilizers. Gates act on block qubits [0, n) and X ancillas [n, n + g).
std::vector<Layer> zero_preparation(const ShypsCode &code) {
    SESchedule se = schedule_se_structure(code);
    size_t lo = se.x_aux_offset, hi = se.x_aux_offset + code.GX.rows();
    auto is_x_aux = [&](uint32_t q) { return q >= lo && q < hi; };
    std::vector<Layer> out(1);
    for (size_t q = 0; q < code.n; q++) {
        out[0].gates.push_back({GateKind::PZ, u32(q)});
    }
    for (const Layer &layer : se.circuit.layers) {
        Layer part;
        for (const Gate &g : layer.gates) {
            if (g.kind == GateKind::PX && is_x_aux(g.a)) {
                out[0].gates.push_back({GateKind::PX, u32(code.n + g.a - lo)});
            } else if (g.kind == GateKind::MX && is_x_aux(g.a)) {
                part.gates.push_back({GateKind::MX, u32(code.n + g.a - lo)});
            } else if (g.kind == GateKind::CX && is_x_aux(g.a)) {
                part.gates.push_back({GateKind::CX, u32(code.n + g.a - lo), g.b});
            }
        }
        if (!part.gates.empty()) {
            out.push_back(std::move(part));
        }
    }
    return out;
}

}  // namespace

size_t zero_preparation_ancillas(const ShypsCode &code) { return code.GX.rows(); }

PhysicalCircuit to_circuit(const ShypsCode &code, const GeneratorSequence &seq) {
    size_t n = code.n;
    bool teleports = seq.uses_measurement();
    size_t aux_blocks = teleports ? seq.aux_blocks : 0;
    size_t anc_base = (seq.blocks + aux_blocks) * n;
    PhysicalCircuit c(anc_base + aux_blocks * zero_preparation_ancillas(code));
    std::vector<Layer> prep_template = teleports ? zero_preparation(code) : std::vector<Layer>{};
    for (const auto &step : seq.steps) {
        std::vector<Layer> prep(step.teleports.empty() ? 0 : prep_template.size());
        Layer measure, relabel;
        for (const auto &t : step.teleports) {
            size_t anc = anc_base + (t.aux - seq.blocks) * zero_preparation_ancillas(code);
            auto place = [&](uint32_t q) { return u32(q < n ? t.aux * n + q : anc + q - n); };
            for (size_t l = 0; l < prep_template.size(); l++) {
                for (Gate g : prep_template[l].gates) {
                    g.a = place(g.a);
                    if (is_two_qubit(g.kind)) {
                        g.b = place(g.b);
                    }
                    prep[l].gates.push_back(g);
                }
            }
            for (size_t q = 0; q < n; q++) {
                measure.gates.push_back({GateKind::MX, u32(t.block * n + q)});
                relabel.relabel.emplace_back(u32(t.block * n + q), u32(t.aux * n + q));
                relabel.relabel.emplace_back(u32(t.aux * n + q), u32(t.block * n + q));
            }
        }
        for (Layer &layer : prep) {
            c.layers.push_back(std::move(layer));
        }
        size_t depth = step.depth();
        for (size_t t = 0; t < depth; t++) {
            Layer layer;
            if (t == 0) {
                for (const auto &g : step.generators) {
                    auto gates = physical_gates(code, g);
                    layer.gates.insert(layer.gates.end(), gates.begin(), gates.end());
                }
            }
            for (const auto &tp : step.teleports) {
                if (t < tp.inner.size()) {
                    auto gates = physical_gates(code, tp.inner[t]);
                    layer.gates.insert(layer.gates.end(), gates.begin(), gates.end());
                }
            }
            c.layers.push_back(std::move(layer));
        }
        if (!measure.gates.empty()) {
            c.layers.push_back(std::move(measure));
        }
        for (const auto &g : step.generators) {
            auto moves = physical_relabel(code, g);
            relabel.relabel.insert(relabel.relabel.end(), moves.begin(), moves.end());
        }
        if (!relabel.relabel.empty()) {
            c.layers.push_back(std::move(relabel));
        }
    }
    return c;
}

VerifyReport verify_sequence(const ShypsCode &code, const GeneratorSequence &seq, const SymplecticMatrix &target) {
    PhysicalCircuit c = to_circuit(code, seq);
    if (auto e = check_well_formed(c)) {
        VerifyReport report;
        report.fail("malformed circuit: " + *e);
        return report;
    }
    if (seq.uses_measurement()) {
        return verify_with_reference(code, seq.blocks, c, target);
    }
    return verify_logical_action(code, seq.blocks, c, target);
}

DepthReport depth_report(const GeneratorSequence &seq, std::optional<size_t> bound, std::string bound_name) {
    DepthReport rep;
    rep.layers = seq.depth();
    rep.se_rounds = rep.layers;
    rep.bound = bound;
    rep.bound_name = std::move(bound_name);
    rep.aux_blocks = seq.uses_measurement() ? seq.aux_blocks : 0;
    return rep;
}

// ---------------------------------------------------------------------------------------------------------------
// Bounds.

size_t bound_cross_block_cnot(size_t r) { return r * r + r + 4; }
size_t bound_in_block_diagonal(size_t r) { return r == 3 ? r * r + 8 * r + 2 : r * r + 5 * r + 2; }

size_t bound_multiblock_diagonal(size_t r, size_t b) {
    if (b == 1) {
        return bound_in_block_diagonal(r);
    }
    bool even = b % 2 == 0;
    if (r == 3) {
        return even ? 16 * b + 25 : 16 * b + 41;
    }
    return even ? b * r * r + (b + 4) * r + 4 * b - 2 : (b + 1) * r * r + (b + 5) * r + 4 * b + 2;
}

size_t bound_multiblock_cnot(size_t r, size_t b) {
    size_t padded = std::bit_ceil(b);
    return (2 * padded - 1) * bound_cross_block_cnot(r);
}

size_t bound_in_block_permutation(size_t r) { return 3 * (r + 2); }
size_t bound_multiblock_permutation(size_t r) { return 36 * r * r + 3 * r + 6; }
size_t bound_all_hadamard(size_t r) { return 3 * r + 10; }
size_t bound_hadamard(size_t r) { return 11 * r + 15; }
size_t bound_single_hadamard(size_t r) { return r == 3 ? 11 : 8; }
size_t bound_single_s(size_t r) { return r == 3 ? 9 : 6; }

size_t bound_clifford_dzcx(size_t r, size_t b) {
    return r == 3 ? 64 * b + 392 : (4 * b + 35) * r * r + (4 * b + 18) * r + 16 * b + 5;
}

size_t bound_clifford(size_t r, size_t b) {
    bool even = b % 2 == 0;
    if (r == 3) {
        return even ? 64 * b + 135 : 64 * b + 199;
    }
    return even ? (4 * b + 1) * r * r + (4 * b + 21) * r + 16 * b - 6
                : (4 * b + 5) * r * r + (4 * b + 25) * r + 16 * b + 10;
}

// ---------------------------------------------------------------------------------------------------------------
// CNOT circuits.

namespace {

std::pair<size_t, size_t> grid(size_t q, size_t r) { return {q / r, q % r}; }

TensorSum best_cross_decomposition(const BitMatrix &a, size_t r, uint64_t seed) {
    TensorSum best = tensor_decompose(a, r, seed);
    if (a.weight() == 1) {
        size_t p = 0, q = 0;
        for (size_t i = 0; i < a.rows(); i++) {
            if (auto j = a.row(i).first_one()) {
                p = i;
                q = *j;
            }
        }
        best = lighter(best, single_cnot_cross(r, grid(p, r), grid(q, r)));
    }
    if (a.is_upper_triangular() && is_invertible(a)) {
        best = lighter(best, tensor_decompose_upper_triangular(a, r, seed));
    }
    return best;
}

TensorSum best_in_block_decomposition(const BitMatrix &c, size_t r, uint64_t seed) {
    TensorSum best = tensor_decompose(c, r, seed);
    BitMatrix off = c + BitMatrix::identity(c.rows());
    if (off.weight() == 1) {
        size_t p = 0, q = 0;
        for (size_t i = 0; i < off.rows(); i++) {
            if (auto j = off.row(i).first_one()) {
                p = i;
                q = *j;
            }
        }
        best = lighter(best, single_cnot_in_block(r, grid(p, r), grid(q, r)));
    }
    if (c.is_upper_triangular() && is_invertible(c)) {
        best = lighter(best, tensor_decompose_upper_triangular(c, r, seed));
    }
    return best;
}

/// Relabelling when C is a single invertible tensor product, a teleport otherwise.
GeneratorSequence in_block_cnot_from(const ShypsCode &code, const BitMatrix &c, const TensorSum &ts, size_t block,
                                     size_t blocks, size_t aux) {
    GeneratorSequence seq(code.r, blocks);
    if (c.is_identity()) {
        return seq;
    }
    check_reconstruct(ts, c, "in-block CNOT");
    if (ts.weight() == 1) {
        seq.steps.push_back(single_step(gen_relabel(code, ts.terms[0].first, ts.terms[0].second, block)));
        return seq;
    }
    if (aux < blocks) {
        throw std::invalid_argument("in-block CNOT: auxiliary block index must follow the data blocks");
    }
    Teleport t{block, aux, c, {}};
    for (const auto &[h1, h2] : ts.terms) {
        t.inner.push_back(Generator{GenKind::TransversalCnot, block, aux, h1, h2});
    }
    Step s;
    s.teleports.push_back(std::move(t));
    seq.steps.push_back(std::move(s));
    seq.aux_blocks = aux - blocks + 1;
    return seq;
}

}  // namespace

GeneratorSequence compile_cross_block_cnot(const ShypsCode &code, const BitMatrix &a, size_t ctrl, size_t tgt,
                                           size_t blocks, uint64_t seed) {
    GeneratorSequence seq(code.r, blocks);
    if (a.is_zero()) {
        return seq;
    }
    TensorSum ts = best_cross_decomposition(a, code.r, seed);
    check_reconstruct(ts, a, "cross-block CNOT");
    for (const auto &[h1, h2] : ts.terms) {
        seq.steps.push_back(single_step(gen_cross_block_cnot(code, h1, h2, ctrl, tgt)));
    }
    return seq;
}

GeneratorSequence compile_in_block_cnot(const ShypsCode &code, const BitMatrix &c, size_t block, size_t blocks,
                                        size_t aux, uint64_t seed) {
    if (!is_invertible(c)) {
        throw std::invalid_argument("compile_in_block_cnot: C is singular");
    }
    if (c.is_identity()) {
        return GeneratorSequence(code.r, blocks);
    }
    return in_block_cnot_from(code, c, best_in_block_decomposition(c, code.r, seed), block, blocks, aux);
}

namespace {

struct BlockMatrix {
    const BitMatrix &m;
    size_t k;
    BitMatrix at(size_t i, size_t j) const { return m.block(i * k, j * k, k, k); }
};

/// Unit block-lower (lower = true) or block-upper matrix over blocks [lo, hi) of a register padded to a power of
/// two; blocks ≥ real are identity padding. Lower: cross part first, then both halves. Upper: halves first.
GeneratorSequence unit_triangular(const ShypsCode &code, const BitMatrix &t, size_t lo, size_t hi, size_t real,
                                  bool lower, size_t blocks, uint64_t seed) {
    GeneratorSequence seq(code.r, blocks);
    size_t s = hi - lo;
    if (s <= 1) {
        return seq;
    }
    size_t h = s / 2;
    size_t k = code.k;
    auto clip = [&](size_t from, size_t count) { return from >= real ? size_t{0} : std::min(count, real - from); };
    size_t na = clip(lo, h), nb = clip(lo + h, h);
    GeneratorSequence halves = unit_triangular(code, t, lo, lo + h, real, lower, blocks, seed);
    halves.merge_parallel(unit_triangular(code, t, lo + h, hi, real, lower, blocks, seed));

    GeneratorSequence cross(code.r, blocks);
    if (na > 0 && nb > 0) {
        BitMatrix ta = t.block(lo * k, lo * k, na * k, na * k);
        BitMatrix mixed = lower ? t.block((lo + h) * k, lo * k, nb * k, na * k) * invert(ta)
                                : invert(ta) * t.block(lo * k, (lo + h) * k, na * k, nb * k);
        BlockMatrix bm{mixed, k};
        for (size_t shift = 0; shift < h; shift++) {
            GeneratorSequence round(code.r, blocks);
            for (size_t i = 0; i < h; i++) {
                size_t a_idx = (i + shift) % h;
                if (i >= nb || a_idx >= na) {
                    continue;
                }
                if (lower) {
                    // x_{A} += x_{B}·M'  with M' = M·L_A^{-1}.
                    round.merge_parallel(compile_cross_block_cnot(code, bm.at(i, a_idx), lo + h + i, lo + a_idx,
                                                                  blocks, seed + shift));
                } else {
                    // x_{B} += x_{A}·M'' with M'' = U_A^{-1}·M.
                    round.merge_parallel(compile_cross_block_cnot(code, bm.at(a_idx, i), lo + a_idx, lo + h + i,
                                                                  blocks, seed + shift));
                }
            }
            cross.append(round);
        }
    }
    GeneratorSequence out(code.r, blocks);
    if (lower) {
        out.append(cross);
        out.append(halves);
    } else {
        out.append(halves);
        out.append(cross);
    }
    return out;
}

}  // namespace

MultiblockCnot compile_multiblock_cnot(const ShypsCode &code, const BitMatrix &x, size_t blocks, uint64_t seed) {
    size_t k = code.k;
    if (x.rows() != blocks * k || x.cols() != blocks * k) {
        throw std::invalid_argument("compile_multiblock_cnot: dimension mismatch");
    }
    if (!is_invertible(x)) {
        throw std::invalid_argument("compile_multiblock_cnot: X is singular");
    }
    if (blocks == 1) {
        return {compile_in_block_cnot(code, x, 0, 1, 1, seed), Permutation::identity(k)};
    }
    PLU f = plu(x);
    BitMatrix dl = block_diagonal_of(f.l, blocks, k);
    BitMatrix du = block_diagonal_of(f.u, blocks, k);
    BitMatrix l_unit = f.l * invert(dl);
    BitMatrix u_unit = invert(du) * f.u;
    size_t padded = std::bit_ceil(blocks);

    GeneratorSequence seq(code.r, blocks);
    seq.append(unit_triangular(code, l_unit, 0, padded, blocks, true, blocks, seed));
    GeneratorSequence leaf(code.r, blocks);
    BitMatrix d = dl * du;
    for (size_t j = 0; j < blocks; j++) {
        BitMatrix dj = d.block(j * k, j * k, k, k);
        leaf.merge_parallel(compile_in_block_cnot(code, dj, j, blocks, blocks + j, seed + j));
    }
    seq.append(leaf);
    seq.append(unit_triangular(code, u_unit, 0, padded, blocks, false, blocks, seed));
    // from_cnot(P) moves logical qubit i to the position σ(i) with matrix(σ^{-1}) = P.
    return {seq, f.p.inverse()};
}

// ---------------------------------------------------------------------------------------------------------------
// Diagonal circuits.

GeneratorSequence compile_in_block_diagonal(const ShypsCode &code, const BitMatrix &s, size_t block, size_t blocks,
                                            uint64_t seed) {
    size_t r = code.r;
    if (!s.is_symmetric() || s.rows() != code.k) {
        throw std::invalid_argument("compile_in_block_diagonal: expected a symmetric k×k matrix");
    }
    GeneratorSequence seq(r, blocks);
    if (s.is_zero()) {
        return seq;
    }
    SymTensorSum best = invertible_symmetric_decompose(s, r, seed);
    std::vector<size_t> ones;
    for (size_t i = 0; i < s.rows(); i++) {
        for (size_t j : s.row(i).support()) {
            if (j >= i) {
                ones.push_back(i * s.cols() + j);
            }
        }
    }
    if (ones.size() == 1) {
        size_t p = ones[0] / s.cols(), q = ones[0] % s.cols();
        SymTensorSum alt = p == q ? single_s(r, p / r, p % r, seed) : single_cz(r, grid(p, r), grid(q, r), seed);
        if (alt.weight() < best.weight()) {
            best = alt;
        }
    }
    if (best.reconstruct() != s) {
        throw std::logic_error("in-block diagonal: decomposition does not reconstruct its input");
    }
    for (const BitMatrix &g : best.terms) {
        seq.steps.push_back(single_step(gen_diagonal(code, g, block)));
    }
    return seq;
}

GeneratorSequence compile_cross_block_cz(const ShypsCode &code, const BitMatrix &a, size_t i, size_t j,
                                         size_t blocks, uint64_t seed) {
    GeneratorSequence seq(code.r, blocks);
    if (a.is_zero()) {
        return seq;
    }
    BitMatrix twisted = a * Permutation::tau(code.r).matrix();
    TensorSum ts = best_cross_decomposition(twisted, code.r, seed);
    check_reconstruct(ts, twisted, "cross-block CZ");
    for (const auto &[h1, h2] : ts.terms) {
        seq.steps.push_back(single_step(gen_cross_block_cz(code, h1, h2, i, j)));
    }
    return seq;
}

namespace {

/// Circle-method round robin; each round is a list of disjoint pairs.
std::vector<std::vector<std::pair<size_t, size_t>>> round_robin(size_t b) {
    size_t players = b % 2 ? b + 1 : b;
    std::vector<size_t> ring(players);
    std::iota(ring.begin(), ring.end(), 0);
    std::vector<std::vector<std::pair<size_t, size_t>>> rounds;
    for (size_t t = 0; t + 1 < players; t++) {
        std::vector<std::pair<size_t, size_t>> round;
        for (size_t i = 0; i < players / 2; i++) {
            size_t u = ring[i], v = ring[players - 1 - i];
            if (u < b && v < b) {
                round.emplace_back(std::min(u, v), std::max(u, v));
            }
        }
        rounds.push_back(std::move(round));
        std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
    }
    return rounds;
}

GeneratorSequence fold_all(const ShypsCode &code, size_t blocks) {
    GeneratorSequence seq(code.r, blocks);
    Step s;
    for (size_t j = 0; j < blocks; j++) {
        s.generators.push_back(gen_fold_hadamard(code, j));
    }
    seq.steps.push_back(std::move(s));
    return seq;
}

}  // namespace

GeneratorSequence compile_multiblock_diagonal(const ShypsCode &code, const BitMatrix &s, size_t blocks,
                                              uint64_t seed) {
    size_t k = code.k;
    if (!s.is_symmetric() || s.rows() != blocks * k) {
        throw std::invalid_argument("compile_multiblock_diagonal: expected a symmetric bk×bk matrix");
    }
    GeneratorSequence seq(code.r, blocks);
    for (size_t j = 0; j < blocks; j++) {
        seq.merge_parallel(compile_in_block_diagonal(code, s.block(j * k, j * k, k, k), j, blocks, seed + j));
    }
    for (const auto &round : round_robin(blocks)) {
        GeneratorSequence part(code.r, blocks);
        for (const auto &[i, j] : round) {
            part.merge_parallel(compile_cross_block_cz(code, s.block(i * k, j * k, k, k), i, j, blocks, seed));
        }
        seq.append(part);
    }
    return seq;
}

GeneratorSequence compile_multiblock_x_diagonal(const ShypsCode &code, const BitMatrix &s, size_t blocks,
                                                uint64_t seed) {
    GeneratorSequence seq(code.r, blocks);
    if (s.is_zero()) {
        return seq;
    }
    BitMatrix t = tau_blocks(code.r, blocks);
    seq.append(fold_all(code, blocks));
    seq.append(compile_multiblock_diagonal(code, t * s * t, blocks, seed));
    seq.append(fold_all(code, blocks));
    return seq;
}

// ---------------------------------------------------------------------------------------------------------------
// Permutations.

std::vector<Permutation> grid_route(const Permutation &pi, size_t r) {
    size_t k = r * r;
    if (pi.size() != k) {
        throw std::invalid_argument("grid_route: permutation size must be r²");
    }
    std::vector<std::pair<size_t, size_t>> edges;
    for (size_t q = 0; q < k; q++) {
        edges.emplace_back(q / r, pi(q) / r);
    }
    auto color = bipartite_edge_coloring(r, r, edges);
    std::vector<uint32_t> s1(k), s2(k), s3(k);
    for (size_t q = 0; q < k; q++) {
        size_t mid = (q / r) * r + color[q];
        size_t col = (pi(q) / r) * r + color[q];
        s1[q] = u32(mid);
        s2[mid] = u32(col);
        s3[col] = pi(q);
    }
    std::vector<Permutation> stages = {Permutation(s1), Permutation(s2), Permutation(s3)};
    if (compose(stages[2], compose(stages[1], stages[0])) != pi) {
        throw std::logic_error("grid_route: stages do not compose to the input");
    }
    return stages;
}

namespace {

/// Structured decomposition of a stage that keeps grid rows (rows = true) or grid columns, at most r + 2 terms.
TensorSum stage_decomposition(const BitMatrix &rmat, size_t r, bool rows) {
    BitMatrix cyc = canonical_cycle(r);
    TensorSum ts(r);
    BitMatrix total(r, r);
    for (size_t i = 0; i < r; i++) {
        BitMatrix mi(r, r);
        for (size_t a = 0; a < r; a++) {
            for (size_t b = 0; b < r; b++) {
                bool v = rows ? rmat.get(i * r + a, i * r + b) : rmat.get(a * r + i, b * r + i);
                mi.set(a, b, v);
            }
        }
        BitMatrix ei = BitMatrix::single(r, r, i, i) + cyc;
        if (rows) {
            ts.add(ei, mi);
        } else {
            ts.add(mi, ei);
        }
        total += mi;
    }
    for (const BitMatrix &part : sum_two_invertibles(total)) {
        if (rows) {
            ts.add(cyc, part);
        } else {
            ts.add(part, cyc);
        }
    }
    return ts;
}

}  // namespace

GeneratorSequence compile_in_block_permutation(const ShypsCode &code, const Permutation &pi, size_t block,
                                               size_t blocks, size_t aux, uint64_t seed) {
    size_t r = code.r;
    GeneratorSequence seq(r, blocks);
    if (pi.is_identity()) {
        return seq;
    }
    auto stages = grid_route(pi, r);
    for (size_t s = 0; s < 3; s++) {
        if (stages[s].is_identity()) {
            continue;
        }
        BitMatrix c = stages[s].row_action_matrix();
        TensorSum ts = lighter(stage_decomposition(c, r, s != 1), tensor_decompose(c, r, seed + s));
        seq.append(in_block_cnot_from(code, c, ts, block, blocks, aux));
    }
    return seq;
}

std::pair<Permutation, Permutation> two_involutions(const Permutation &pi) {
    std::vector<uint32_t> a(pi.size()), b(pi.size());
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    for (const auto &cyc : pi.cycles()) {
        size_t len = cyc.size();
        for (size_t i = 0; i < len; i++) {
            b[cyc[i]] = cyc[(len - i) % len];
            a[cyc[i]] = cyc[(len + 1 - i) % len];
        }
    }
    Permutation pa(a), pb(b);
    if (compose(pa, pb) != pi || !pa.is_involution() || !pb.is_involution()) {
        throw std::logic_error("two_involutions: factorization failed");
    }
    return {pa, pb};
}

std::vector<size_t> multigraph_edge_coloring(size_t vertices, const std::vector<std::pair<size_t, size_t>> &edges,
                                             uint64_t seed) {
    std::vector<size_t> degree(vertices, 0);
    for (const auto &[u, v] : edges) {
        degree[u]++;
        degree[v]++;
    }
    size_t delta = vertices ? *std::max_element(degree.begin(), degree.end()) : 0;
    size_t cap = (3 * delta + 1) / 2;
    std::vector<size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::vector<size_t> best;
    size_t best_colors = SIZE_MAX;
    for (int attempt = 0; attempt < 64; attempt++) {
        std::vector<std::vector<bool>> used(vertices);
        std::vector<size_t> color(edges.size());
        size_t colors = 0;
        for (size_t e : order) {
            auto [u, v] = edges[e];
            size_t c = 0;
            while ((c < used[u].size() && used[u][c]) || (c < used[v].size() && used[v][c])) {
                c++;
            }
            for (size_t w : {u, v}) {
                if (used[w].size() <= c) {
                    used[w].resize(c + 1, false);
                }
                used[w][c] = true;
            }
            color[e] = c;
            colors = std::max(colors, c + 1);
        }
        if (colors < best_colors) {
            best_colors = colors;
            best = color;
        }
        if (best_colors <= cap) {
            break;
        }
        std::shuffle(order.begin(), order.end(), rng);
    }
    return best;
}

GeneratorSequence compile_multiblock_permutation(const ShypsCode &code, const Permutation &p, size_t blocks,
                                                 uint64_t seed) {
    size_t k = code.k;
    if (p.size() != blocks * k) {
        throw std::invalid_argument("compile_multiblock_permutation: dimension mismatch");
    }
    auto [a, b] = two_involutions(p);
    // Cross-block transpositions of an involution, as SWAP rounds.
    auto cross_part = [&](const Permutation &inv) {
        std::vector<std::pair<size_t, size_t>> swaps, edges;
        for (size_t x = 0; x < inv.size(); x++) {
            size_t y = inv(x);
            if (x < y && x / k != y / k) {
                swaps.emplace_back(x, y);
                edges.emplace_back(x / k, y / k);
            }
        }
        auto color = multigraph_edge_coloring(blocks, edges, seed);
        size_t rounds = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
        GeneratorSequence seq(code.r, blocks);
        for (size_t c = 0; c < rounds; c++) {
            GeneratorSequence round(code.r, blocks);
            for (size_t e = 0; e < swaps.size(); e++) {
                if (color[e] != c) {
                    continue;
                }
                auto [x, y] = swaps[e];
                size_t bx = x / k, by = y / k, qx = x % k, qy = y % k;
                GeneratorSequence sw(code.r, blocks);
                sw.append(compile_cross_block_cnot(code, BitMatrix::single(k, k, qx, qy), bx, by, blocks, seed));
                sw.append(compile_cross_block_cnot(code, BitMatrix::single(k, k, qy, qx), by, bx, blocks, seed));
                sw.append(compile_cross_block_cnot(code, BitMatrix::single(k, k, qx, qy), bx, by, blocks, seed));
                round.merge_parallel(sw);
            }
            seq.append(round);
        }
        return seq;
    };
    // In-block parts of b then a, combined per block.
    auto in_block = [&](const Permutation &inv) {
        std::vector<uint32_t> img(inv.size());
        for (size_t x = 0; x < inv.size(); x++) {
            img[x] = x / k == inv(x) / k ? inv(x) : u32(x);
        }
        return Permutation(img);
    };
    Permutation local = compose(in_block(a), in_block(b));

    GeneratorSequence seq(code.r, blocks);
    seq.append(cross_part(b));
    GeneratorSequence mid(code.r, blocks);
    for (size_t j = 0; j < blocks; j++) {
        std::vector<uint32_t> img(k);
        for (size_t q = 0; q < k; q++) {
            img[q] = local(j * k + q) - u32(j * k);
        }
        mid.merge_parallel(compile_in_block_permutation(code, Permutation(img), j, blocks, blocks + j, seed + j));
    }
    seq.append(mid);
    seq.append(cross_part(a));
    return seq;
}

// ---------------------------------------------------------------------------------------------------------------
// Hadamard circuits.

GeneratorSequence compile_fold_hadamard(const ShypsCode &code, size_t block, size_t blocks) {
    GeneratorSequence seq(code.r, blocks);
    seq.steps.push_back(single_step(gen_fold_hadamard(code, block)));
    return seq;
}

GeneratorSequence compile_all_hadamard(const ShypsCode &code, size_t block, size_t blocks) {
    GeneratorSequence seq = compile_fold_hadamard(code, block, blocks);
    seq.append(compile_in_block_permutation(code, Permutation::tau(code.r), block, blocks, blocks));
    return seq;
}

namespace {

/// Symmetric masks of the given weight: diagonal entries first, or pairs first, plus seeded random ones.
std::vector<BitMatrix> symmetric_candidates(size_t r, size_t w, uint64_t seed) {
    std::vector<BitMatrix> out;
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t i = 0; i < r; i++) {
        for (size_t j = i + 1; j < r; j++) {
            pairs.emplace_back(i, j);
        }
    }
    auto build = [&](size_t d, const std::vector<size_t> &diag, const std::vector<std::pair<size_t, size_t>> &pp) {
        BitMatrix v(r, r);
        for (size_t t = 0; t < d; t++) {
            v.set(diag[t], diag[t], true);
        }
        for (size_t t = 0; t < (w - d) / 2; t++) {
            v.set(pp[t].first, pp[t].second, true);
            v.set(pp[t].second, pp[t].first, true);
        }
        return v;
    };
    std::vector<size_t> diag(r);
    std::iota(diag.begin(), diag.end(), 0);
    std::mt19937_64 rng(seed);
    for (size_t d = w % 2; d <= std::min(r, w); d += 2) {
        if ((w - d) / 2 > pairs.size()) {
            continue;
        }
        out.push_back(build(d, diag, pairs));
        for (int extra = 0; extra < 2; extra++) {
            auto dd = diag;
            auto pp = pairs;
            std::shuffle(dd.begin(), dd.end(), rng);
            std::shuffle(pp.begin(), pp.end(), rng);
            out.push_back(build(d, dd, pp));
        }
    }
    return out;
}

/// A permutation of grid positions taking the ones of `from` onto the ones of `to`, preferring fixed points.
Permutation mask_alignment(const BitMatrix &from, const BitMatrix &to) {
    size_t r = from.rows();
    size_t k = r * r;
    std::vector<uint32_t> img(k, UINT32_MAX);
    std::vector<bool> taken(k, false);
    std::vector<size_t> src_on, src_off, dst_on, dst_off;
    for (size_t q = 0; q < k; q++) {
        bool f = from.get(q / r, q % r), t = to.get(q / r, q % r);
        if (f == t) {
            img[q] = u32(q);
            taken[q] = true;
        } else {
            (f ? src_on : src_off).push_back(q);
        }
    }
    for (size_t q = 0; q < k; q++) {
        if (!taken[q]) {
            (to.get(q / r, q % r) ? dst_on : dst_off).push_back(q);
        }
    }
    for (size_t t = 0; t < src_on.size(); t++) {
        img[src_on[t]] = u32(dst_on[t]);
    }
    for (size_t t = 0; t < src_off.size(); t++) {
        img[src_off[t]] = u32(dst_off[t]);
    }
    return Permutation(img);
}

}  // namespace

GeneratorSequence compile_hadamard(const ShypsCode &code, const BitMatrix &v, size_t block, size_t blocks,
                                   uint64_t seed) {
    size_t r = code.r;
    if (v.rows() != r || v.cols() != r) {
        throw std::invalid_argument("compile_hadamard: mask must be r×r");
    }
    GeneratorSequence seq(r, blocks);
    size_t w = v.weight();
    if (w == 0) {
        return seq;
    }
    if (w == r * r) {
        return compile_all_hadamard(code, block, blocks);
    }
    if (w == 1) {
        size_t i = 0, j = 0;
        for (size_t a = 0; a < r; a++) {
            if (auto b = v.row(a).first_one()) {
                i = a;
                j = *b;
            }
        }
        // D·XS·D with D the phase layer of a permutation h having h_ij = 1, so that D acts as S on (i, j).
        BitMatrix h = BitMatrix::identity(r);
        if (i != j) {
            std::vector<uint32_t> img(r);
            std::iota(img.begin(), img.end(), 0);
            std::swap(img[i], img[j]);
            h = Permutation(img).matrix();
        }
        seq.steps.push_back(single_step(gen_diagonal(code, h, block)));
        for (const BitMatrix &g : single_s(r, i, j, seed).terms) {
            seq.steps.push_back(single_step(gen_x_diagonal(code, g, block)));
        }
        seq.steps.push_back(single_step(gen_diagonal(code, h, block)));
        return seq;
    }
    // Move the mask onto a symmetric pattern V', apply S^τ·XΞ(V')·S^τ = H^{V'} followed by the transpose of the
    // V' pairs, then undo both permutations.
    std::vector<BitMatrix> candidates = v.is_symmetric() ? std::vector<BitMatrix>{v} : symmetric_candidates(r, w, seed);
    BitMatrix vp;
    SymTensorSum xi(r);
    size_t best = SIZE_MAX;
    for (const BitMatrix &cand : candidates) {
        SymTensorSum dec = xi_decompose(xi_from_support(cand), r, seed);
        if (dec.weight() < best) {
            best = dec.weight();
            vp = cand;
            xi = dec;
        }
    }
    Permutation q = mask_alignment(v, vp);
    std::vector<uint32_t> lam(r * r);
    for (size_t a = 0; a < r; a++) {
        for (size_t b = 0; b < r; b++) {
            lam[a * r + b] = vp.get(a, b) ? u32(b * r + a) : u32(a * r + b);
        }
    }
    seq.append(compile_in_block_permutation(code, q, block, blocks, blocks, seed));
    BitMatrix id = BitMatrix::identity(r);
    seq.steps.push_back(single_step(gen_diagonal(code, id, block)));
    for (const BitMatrix &g : xi.terms) {
        seq.steps.push_back(single_step(gen_x_diagonal(code, g, block)));
    }
    seq.steps.push_back(single_step(gen_diagonal(code, id, block)));
    seq.append(compile_in_block_permutation(code, compose(q.inverse(), Permutation(lam)), block, blocks, blocks,
                                            seed + 1));
    return seq;
}

// ---------------------------------------------------------------------------------------------------------------
// Arbitrary Clifford operators.

namespace {

/// CNOT operator whose off-diagonal blocks never feed a block that is itself a control, so all parts commute.
std::optional<GeneratorSequence> cnot_fast_path(const ShypsCode &code, const BitMatrix &x, size_t blocks,
                                                uint64_t seed) {
    size_t k = code.k;
    std::vector<bool> source(blocks, false), target(blocks, false);
    std::vector<std::pair<size_t, size_t>> ops;
    for (size_t i = 0; i < blocks; i++) {
        for (size_t j = 0; j < blocks; j++) {
            BitMatrix blk = x.block(i * k, j * k, k, k);
            if (i == j) {
                if (!blk.is_identity()) {
                    return std::nullopt;
                }
            } else if (!blk.is_zero()) {
                source[i] = true;
                target[j] = true;
                ops.emplace_back(i, j);
            }
        }
    }
    for (size_t j = 0; j < blocks; j++) {
        if (source[j] && target[j]) {
            return std::nullopt;
        }
    }
    auto color = multigraph_edge_coloring(blocks, ops, seed);
    size_t rounds = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
    GeneratorSequence seq(code.r, blocks);
    for (size_t c = 0; c < rounds; c++) {
        GeneratorSequence round(code.r, blocks);
        for (size_t e = 0; e < ops.size(); e++) {
            if (color[e] == c) {
                auto [i, j] = ops[e];
                round.merge_parallel(compile_cross_block_cnot(code, x.block(i * k, j * k, k, k), i, j, blocks, seed));
            }
        }
        seq.append(round);
    }
    return seq;
}

}  // namespace

CompiledClifford compile_clifford(const ShypsCode &code, const SymplecticMatrix &chi, size_t blocks,
                                  const CompileOptions &options) {
    size_t m = blocks * code.k;
    if (chi.m != m) {
        throw std::invalid_argument("compile_clifford: operator size does not match b·r²");
    }
    if (!chi.is_symplectic()) {
        throw std::invalid_argument("compile_clifford: operator is not symplectic");
    }
    CompiledClifford out;
    GeneratorSequence &seq = out.sequence;
    seq = GeneratorSequence(code.r, blocks);
    BitMatrix a = chi.A(), b = chi.B(), c = chi.C(), d = chi.D();
    std::optional<size_t> bound = bound_clifford(code.r, blocks);
    std::string bound_name = "clifford (dz-dx)";

    bool done = false;
    if (chi.mat.is_identity()) {
        out.audit.push_back("identity: empty sequence");
        done = true;
    } else if (options.fast_paths && a.is_identity() && d.is_identity() && c.is_zero()) {
        seq = compile_multiblock_diagonal(code, b, blocks, options.seed);
        out.audit.push_back("fast path: Z-diagonal, weight " + std::to_string(b.weight()));
        done = true;
    } else if (options.fast_paths && a.is_identity() && d.is_identity() && b.is_zero()) {
        seq = compile_multiblock_x_diagonal(code, c, blocks, options.seed);
        out.audit.push_back("fast path: X-diagonal, weight " + std::to_string(c.weight()));
        done = true;
    } else if (options.fast_paths && b.is_zero() && c.is_zero()) {
        if (auto fast = cnot_fast_path(code, a, blocks, options.seed)) {
            seq = *fast;
            out.audit.push_back("fast path: commuting cross-block CNOTs");
            done = true;
        }
    }
    if (!done && options.decomposition == Decomposition::DzDx) {
        CliffordDecomposition1 dec = clifford_decompose_1(chi, options.seed);
        if (dec.product() != chi) {
            throw std::logic_error("compile_clifford: decomposition does not reconstruct the operator");
        }
        out.audit.push_back("dz1 diagonal weight " + std::to_string(dec.dz1.weight()));
        if (block_diagonal_of(dec.dz1, blocks, code.k) != dec.dz1) {
            throw std::logic_error("compile_clifford: DZ(1) is not block diagonal");
        }
        GeneratorSequence dz1(code.r, blocks);
        for (size_t j = 0; j < blocks; j++) {
            BitMatrix part = dec.dz1.block(j * code.k, j * code.k, code.k, code.k);
            dz1.merge_parallel(compile_in_block_diagonal(code, part, j, blocks, options.seed + j));
        }
        auto note = [&](const char *name, const GeneratorSequence &part) {
            out.audit.push_back(std::string(name) + " depth " + std::to_string(part.depth()));
        };
        note("dz1", dz1);
        seq.append(dz1);
        GeneratorSequence part = compile_multiblock_x_diagonal(code, dec.dx_prime, blocks, options.seed);
        note("dx'", part);
        seq.append(part);
        part = compile_multiblock_diagonal(code, dec.dz_prime, blocks, options.seed);
        note("dz'", part);
        seq.append(part);
        part = compile_multiblock_x_diagonal(code, dec.dx, blocks, options.seed);
        note("dx", part);
        seq.append(part);
        part = compile_multiblock_diagonal(code, dec.dz, blocks, options.seed);
        note("dz", part);
        seq.append(part);
    } else if (!done) {
        CliffordDecomposition2 dec = clifford_decompose_2(chi);
        if (dec.product() != chi) {
            throw std::logic_error("compile_clifford: decomposition does not reconstruct the operator");
        }
        bound = bound_clifford_dzcx(code.r, blocks);
        bound_name = "clifford (dz-cx)";
        seq.append(compile_multiblock_diagonal(code, dec.dz1, blocks, options.seed));
        seq.append(compile_multiblock_x_diagonal(code, dec.dx, blocks, options.seed));
        MultiblockCnot mc = compile_multiblock_cnot(code, dec.cx, blocks, options.seed);
        GeneratorSequence perm = compile_multiblock_permutation(code, mc.residual, blocks, options.seed);
        out.audit.push_back("cx residual permutation depth " + std::to_string(perm.depth()));
        out.audit.push_back("cx triangular part depth " + std::to_string(mc.sequence.depth()));
        seq.append(perm);
        seq.append(mc.sequence);
        seq.append(compile_multiblock_diagonal(code, dec.dz, blocks, options.seed));
    }
    if (claimed_product(code, seq) != chi) {
        throw std::logic_error("compile_clifford: claimed actions do not multiply to the target");
    }
    out.report = depth_report(seq, bound, bound_name);
    return out;
}

}  // namespace shyps
