// SPDX-License-Identifier: Apache-2.0
#include "shyps/compiler.h"

#include <gtest/gtest.h>

#include <random>

using namespace shyps;

namespace {

/// Identity on b blocks of size k with `c` placed at block position (i, j).
BitMatrix with_block(size_t k, size_t b, size_t i, size_t j, const BitMatrix &c) {
    BitMatrix x = BitMatrix::identity(k * b);
    x.set_block(i * k, j * k, c);
    return x;
}

BitMatrix random_symmetric(size_t n, std::mt19937_64 &rng) {
    BitMatrix a = BitMatrix::random(n, n, rng);
    BitMatrix s = a + a.transposed();
    for (size_t i = 0; i < n; i++) {
        s.set(i, i, rng() & 1);
    }
    return s;
}

/// Permutation of b·k logical qubits that acts as `pi` on block j and fixes the rest.
Permutation embed(const Permutation &pi, size_t k, size_t b, size_t j) {
    std::vector<uint32_t> img(k * b);
    for (size_t q = 0; q < k * b; q++) {
        img[q] = static_cast<uint32_t>(q / k == j ? j * k + pi(q % k) : q);
    }
    return Permutation(img);
}

void expect_compiles(const ShypsCode &code, const GeneratorSequence &seq, const SymplecticMatrix &target,
                     std::optional<size_t> bound = std::nullopt) {
    EXPECT_EQ(claimed_product(code, seq), target);
    VerifyReport rep = verify_sequence(code, seq, target);
    EXPECT_TRUE(rep.pass) << (rep.mismatches.empty() ? "" : rep.mismatches[0]);
    if (bound) {
        EXPECT_LE(seq.depth(), *bound);
    }
}

GeneratorSequence single(const ShypsCode &code, size_t blocks, Generator g) {
    GeneratorSequence seq(code.r, blocks);
    Step s;
    s.generators.push_back(std::move(g));
    seq.steps.push_back(std::move(s));
    return seq;
}

}  // namespace

TEST(compiler, generator_claims_hold_physically) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 4; trial++) {
        BitMatrix h1 = BitMatrix::random_invertible(3, rng);
        BitMatrix h2 = BitMatrix::random_invertible(3, rng);
        std::vector<Generator> gens = {
            gen_cross_block_cnot(code, h1, h2, 0, 1), gen_cross_block_cnot(code, h1, h2, 1, 0),
            gen_cross_block_cz(code, h1, h2, 0, 1),   gen_diagonal(code, h1, 1),
            gen_x_diagonal(code, h2, 0),              gen_fold_hadamard(code, 1),
            gen_relabel(code, h1, h2, 0),
        };
        for (const auto &g : gens) {
            GeneratorSequence seq = single(code, 2, g);
            VerifyReport rep = verify_sequence(code, seq, claimed_action(g, 3, 2));
            EXPECT_TRUE(rep.pass) << gen_kind_name(g.kind);
        }
    }
}

TEST(compiler, claimed_actions_are_independent_of_the_physical_layer) {
    const ShypsCode &code = shyps_code(3);
    BitMatrix h = BitMatrix::from_strings({"110", "010", "001"});
    BitMatrix i3 = BitMatrix::identity(3);
    SymplecticMatrix cnot = claimed_action(gen_cross_block_cnot(code, h, i3, 0, 1), 3, 2);
    EXPECT_EQ(cnot, from_cnot(with_block(9, 2, 0, 1, kron(h, i3))));
    SymplecticMatrix phase = claimed_action(gen_diagonal(code, i3, 0), 3, 1);
    EXPECT_EQ(phase, from_diagonal(Permutation::tau(3).matrix()));
}

TEST(compiler, wrong_claims_are_rejected) {
    const ShypsCode &code = shyps_code(3);
    BitMatrix i3 = BitMatrix::identity(3);
    GeneratorSequence seq = single(code, 2, gen_cross_block_cz(code, i3, i3, 0, 1));
    EXPECT_FALSE(verify_sequence(code, seq, SymplecticMatrix::identity(18)).pass);
    GeneratorSequence phase = single(code, 1, gen_diagonal(code, i3, 0));
    EXPECT_FALSE(verify_sequence(code, phase, from_diagonal(BitMatrix::identity(9))).pass);
}

TEST(compiler, to_circuit_is_well_formed_and_round_trips) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(5);
    BitMatrix c = BitMatrix::random_invertible(9, rng);
    GeneratorSequence seq = compile_in_block_cnot(code, c, 1, 2, 2, 3);
    PhysicalCircuit circ = to_circuit(code, seq);
    EXPECT_FALSE(check_well_formed(circ).has_value());
    EXPECT_EQ(circ.num_qubits, 3 * code.n + zero_preparation_ancillas(code));
    EXPECT_EQ(parse_circuit(emit(circ)), circ);
}

TEST(compiler, auxiliary_block_needs_x_gauge_preparation) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(19);
    BitMatrix c = BitMatrix::random_invertible(9, rng);
    auto seq = compile_in_block_cnot(code, c, 0, 1, 1);
    ASSERT_GT(seq.steps[0].teleports[0].inner.size(), 1u);
    PhysicalCircuit full = to_circuit(code, seq);
    EXPECT_TRUE(verify_with_reference(code, 1, full, from_cnot(c)).pass);
    // Transversal |0⟩ alone leaves the X stabilizers of the auxiliary block undetermined.
    PhysicalCircuit bare(2 * code.n);
    for (const Layer &layer : full.layers) {
        Layer kept;
        kept.relabel = layer.relabel;
        for (const Gate &g : layer.gates) {
            if (g.a < 2 * code.n && (!is_two_qubit(g.kind) || g.b < 2 * code.n)) {
                kept.gates.push_back(g);
            }
        }
        if (!kept.gates.empty() || !kept.relabel.empty()) {
            bare.layers.push_back(kept);
        }
    }
    VerifyReport rep = verify_with_reference(code, 1, bare, from_cnot(c));
    EXPECT_FALSE(rep.pass);
    ASSERT_FALSE(rep.mismatches.empty());
    EXPECT_NE(rep.mismatches[0].find("X stabilizer"), std::string::npos);
}

TEST(compiler, cross_block_cnot_random) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 5; trial++) {
        BitMatrix a = BitMatrix::random(9, 9, rng);
        auto seq = compile_cross_block_cnot(code, a, 1, 0, 2, trial);
        expect_compiles(code, seq, from_cnot(with_block(9, 2, 1, 0, a)), bound_cross_block_cnot(3));
    }
}

TEST(compiler, cross_block_cnot_r4) {
    const ShypsCode &code = shyps_code(4);
    std::mt19937_64 rng(2);
    BitMatrix a = BitMatrix::random(16, 16, rng);
    auto seq = compile_cross_block_cnot(code, a, 0, 1, 2, 0);
    expect_compiles(code, seq, from_cnot(with_block(16, 2, 0, 1, a)), bound_cross_block_cnot(4));
}

TEST(compiler, in_block_cnot_teleport) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 3; trial++) {
        BitMatrix c = BitMatrix::random_invertible(9, rng);
        auto seq = compile_in_block_cnot(code, c, 0, 2, 2, trial);
        EXPECT_TRUE(seq.uses_measurement());
        expect_compiles(code, seq, from_cnot(with_block(9, 2, 0, 0, c)), bound_cross_block_cnot(3));
    }
}

TEST(compiler, in_block_cnot_special_cases) {
    const ShypsCode &code = shyps_code(3);
    EXPECT_TRUE(compile_in_block_cnot(code, BitMatrix::identity(9), 0, 1, 1).steps.empty());
    BitMatrix h1 = BitMatrix::from_strings({"011", "110", "100"});
    BitMatrix h2 = BitMatrix::from_strings({"100", "110", "111"});
    auto seq = compile_in_block_cnot(code, kron(h1, h2), 0, 1, 1);
    EXPECT_EQ(seq.depth(), 0u);
    EXPECT_FALSE(seq.uses_measurement());
    expect_compiles(code, seq, from_cnot(kron(h1, h2)));
}

TEST(compiler, wrong_teleport_claim_is_rejected) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(4);
    BitMatrix c = BitMatrix::random_invertible(9, rng);
    ASSERT_FALSE(c.is_identity());
    auto seq = compile_in_block_cnot(code, c, 0, 1, 1);
    ASSERT_TRUE(seq.uses_measurement());
    EXPECT_FALSE(verify_sequence(code, seq, from_cnot(c * c)).pass);
    EXPECT_FALSE(verify_sequence(code, seq, SymplecticMatrix::identity(9)).pass);
}

TEST(compiler, multiblock_cnot) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(6);
    for (size_t b : {2, 3}) {
        BitMatrix x = BitMatrix::random_invertible(9 * b, rng);
        MultiblockCnot mc = compile_multiblock_cnot(code, x, b, 1);
        EXPECT_EQ(from_permutation(mc.residual) * claimed_product(code, mc.sequence), from_cnot(x));
        PLU f = plu(x);
        BitMatrix lu = f.l * f.u;
        expect_compiles(code, mc.sequence, from_cnot(lu), bound_multiblock_cnot(3, b));
    }
}

TEST(compiler, in_block_diagonal) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 4; trial++) {
        BitMatrix s = random_symmetric(9, rng);
        auto seq = compile_in_block_diagonal(code, s, 0, 1, trial);
        expect_compiles(code, seq, from_diagonal(s), bound_in_block_diagonal(3));
    }
}

TEST(compiler, multiblock_diagonal_within_bound) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(8);
    for (size_t b : {2, 3}) {
        BitMatrix s = random_symmetric(9 * b, rng);
        auto seq = compile_multiblock_diagonal(code, s, b, 0);
        expect_compiles(code, seq, from_diagonal(s), bound_multiblock_diagonal(3, b));
        auto xseq = compile_multiblock_x_diagonal(code, s, b, 0);
        EXPECT_EQ(claimed_product(code, xseq), from_x_diagonal(s));
        EXPECT_TRUE(verify_sequence(code, xseq, from_x_diagonal(s)).pass);
    }
}

TEST(compiler, round_robin_pairs_every_cross_block) {
    const ShypsCode &code = shyps_code(3);
    for (size_t b : {2, 3, 4, 5}) {
        BitMatrix s(9 * b, 9 * b);
        for (size_t i = 0; i < b; i++) {
            for (size_t j = i + 1; j < b; j++) {
                s.set(9 * i, 9 * j, true);
                s.set(9 * j, 9 * i, true);
            }
        }
        auto seq = compile_multiblock_diagonal(code, s, b, 0);
        EXPECT_EQ(claimed_product(code, seq), from_diagonal(s)) << b;
    }
}

TEST(compiler, grid_route_and_two_involutions) {
    std::mt19937_64 rng(9);
    for (size_t r : {3, 4, 5}) {
        for (int trial = 0; trial < 10; trial++) {
            Permutation pi = Permutation::random(r * r, rng);
            auto st = grid_route(pi, r);
            EXPECT_EQ(compose(st[2], compose(st[1], st[0])), pi);
            for (size_t q = 0; q < r * r; q++) {
                EXPECT_EQ(st[0](q) / r, q / r);
                EXPECT_EQ(st[1](q) % r, q % r);
                EXPECT_EQ(st[2](q) / r, q / r);
            }
            auto [a, b] = two_involutions(pi);
            EXPECT_TRUE(a.is_involution());
            EXPECT_TRUE(b.is_involution());
            EXPECT_EQ(compose(a, b), pi);
        }
    }
}

TEST(compiler, multigraph_coloring_is_proper_and_capped) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; trial++) {
        size_t v = 2 + rng() % 6;
        std::vector<std::pair<size_t, size_t>> edges;
        std::vector<size_t> deg(v, 0);
        for (size_t e = 0; e < 3 * v; e++) {
            size_t a = rng() % v, b = rng() % v;
            if (a != b) {
                edges.emplace_back(a, b);
                deg[a]++;
                deg[b]++;
            }
        }
        auto color = multigraph_edge_coloring(v, edges, trial);
        size_t delta = *std::max_element(deg.begin(), deg.end());
        for (size_t e = 0; e < edges.size(); e++) {
            EXPECT_LT(color[e], (3 * delta + 1) / 2 + 1);
            for (size_t f = e + 1; f < edges.size(); f++) {
                bool share = edges[e].first == edges[f].first || edges[e].first == edges[f].second ||
                             edges[e].second == edges[f].first || edges[e].second == edges[f].second;
                EXPECT_FALSE(share && color[e] == color[f]);
            }
        }
    }
}

TEST(compiler, in_block_permutation) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 4; trial++) {
        Permutation pi = Permutation::random(9, rng);
        auto seq = compile_in_block_permutation(code, pi, 1, 2, 2, trial);
        expect_compiles(code, seq, from_permutation(embed(pi, 9, 2, 1)), bound_in_block_permutation(3));
    }
}

TEST(compiler, in_block_permutation_r4_depth) {
    const ShypsCode &code = shyps_code(4);
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 5; trial++) {
        Permutation pi = Permutation::random(16, rng);
        auto seq = compile_in_block_permutation(code, pi, 0, 1, 1, trial);
        EXPECT_EQ(claimed_product(code, seq), from_permutation(pi));
        EXPECT_LE(seq.depth(), bound_in_block_permutation(4));
    }
}

TEST(compiler, multiblock_permutation) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(14);
    for (size_t b : {2, 3}) {
        Permutation p = Permutation::random(9 * b, rng);
        auto seq = compile_multiblock_permutation(code, p, b, 0);
        expect_compiles(code, seq, from_permutation(p), bound_multiblock_permutation(3));
    }
}

TEST(compiler, hadamards) {
    const ShypsCode &code = shyps_code(3);
    BitVec all(9);
    for (size_t q = 0; q < 9; q++) {
        all.set(q, true);
    }
    expect_compiles(code, compile_all_hadamard(code, 0, 1), from_hadamard(all), bound_all_hadamard(3));
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 6; trial++) {
        BitMatrix v = BitMatrix::random(3, 3, rng);
        auto seq = compile_hadamard(code, v, 0, 1, trial);
        expect_compiles(code, seq, from_hadamard(flatten(v)), bound_hadamard(3));
    }
}

TEST(compiler, single_gate_costs) {
    for (size_t r : {3, 4}) {
        const ShypsCode &code = shyps_code(r);
        size_t k = r * r;
        for (size_t q : {size_t{0}, size_t{1}, k - 1}) {
            BitMatrix v(r, r);
            v.set(q / r, q % r, true);
            auto h = compile_hadamard(code, v, 0, 1, 0);
            EXPECT_EQ(claimed_product(code, h), from_hadamard(BitVec::unit(k, q)));
            EXPECT_LE(h.depth(), bound_single_hadamard(r)) << r << " " << q;
            auto s = compile_in_block_diagonal(code, BitMatrix::single(k, k, q, q), 0, 1, 0);
            EXPECT_EQ(claimed_product(code, s), from_diagonal(BitMatrix::single(k, k, q, q)));
            EXPECT_LE(s.depth(), bound_single_s(r)) << r << " " << q;
        }
    }
    const ShypsCode &code = shyps_code(3);
    auto h = compile_hadamard(code, BitMatrix::from_strings({"010", "000", "000"}), 0, 1, 0);
    EXPECT_TRUE(verify_sequence(code, h, from_hadamard(BitVec::unit(9, 1))).pass);
}

TEST(compiler, clifford_fast_paths) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(16);
    EXPECT_TRUE(compile_clifford(code, SymplecticMatrix::identity(18), 2).sequence.steps.empty());
    BitMatrix s = random_symmetric(18, rng);
    auto z = compile_clifford(code, from_diagonal(s), 2);
    EXPECT_EQ(z.audit[0].rfind("fast path", 0), 0u);
    EXPECT_TRUE(verify_sequence(code, z.sequence, from_diagonal(s)).pass);
    BitMatrix a = BitMatrix::random(9, 9, rng);
    auto cx = compile_clifford(code, from_cnot(with_block(9, 2, 0, 1, a)), 2);
    EXPECT_TRUE(verify_sequence(code, cx.sequence, from_cnot(with_block(9, 2, 0, 1, a))).pass);
    EXPECT_LE(cx.report.layers, bound_cross_block_cnot(3));
}

TEST(compiler, random_clifford_dz_dx) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(17);
    for (size_t b : {1, 2}) {
        SymplecticMatrix chi = random_symplectic(9 * b, rng);
        CompiledClifford out = compile_clifford(code, chi, b, {Decomposition::DzDx, 3, true});
        EXPECT_TRUE(out.report.within_bound()) << out.report.layers << " > " << *out.report.bound;
        expect_compiles(code, out.sequence, chi);
    }
}

TEST(compiler, random_clifford_dz_cx) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(18);
    SymplecticMatrix chi = random_symplectic(18, rng);
    CompiledClifford out = compile_clifford(code, chi, 2, {Decomposition::DzCx, 1, true});
    EXPECT_TRUE(out.report.within_bound()) << out.report.layers << " > " << *out.report.bound;
    expect_compiles(code, out.sequence, chi);
}

TEST(compiler, rejects_bad_input) {
    const ShypsCode &code = shyps_code(3);
    BitMatrix bad = BitMatrix::identity(36);
    bad.set(0, 20, true);
    EXPECT_THROW(compile_clifford(code, SymplecticMatrix(bad), 2), std::invalid_argument);
    EXPECT_THROW(compile_clifford(code, SymplecticMatrix::identity(9), 2), std::invalid_argument);
    EXPECT_THROW(compile_in_block_cnot(code, BitMatrix(9, 9), 0, 1, 1), std::invalid_argument);
}

TEST(compiler, sequences_concatenate_as_products) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(20);
    SymplecticMatrix chi1 = random_symplectic(18, rng);
    SymplecticMatrix chi2 = random_symplectic(18, rng);
    GeneratorSequence seq = compile_clifford(code, chi1, 2).sequence;
    seq.append(compile_clifford(code, chi2, 2).sequence);
    EXPECT_EQ(claimed_product(code, seq), chi1 * chi2);
    PhysicalCircuit circ = to_circuit(code, seq);
    EXPECT_FALSE(check_well_formed(circ).has_value());
    EXPECT_TRUE(verify_sequence(code, seq, chi1 * chi2).pass);
}

TEST(compiler, fast_paths_agree_with_the_generic_path) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(21);
    BitMatrix s = random_symmetric(18, rng);
    BitMatrix a = BitMatrix::random(9, 9, rng);
    for (const SymplecticMatrix &chi :
         {from_diagonal(s), from_x_diagonal(s), from_cnot(with_block(9, 2, 1, 0, a))}) {
        CompiledClifford fast = compile_clifford(code, chi, 2, {Decomposition::DzDx, 0, true});
        CompiledClifford slow = compile_clifford(code, chi, 2, {Decomposition::DzDx, 0, false});
        EXPECT_EQ(claimed_product(code, fast.sequence), claimed_product(code, slow.sequence));
        EXPECT_LE(fast.report.layers, slow.report.layers);
    }
}

TEST(compiler, compilation_is_deterministic_for_a_seed) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(22);
    SymplecticMatrix chi = random_symplectic(18, rng);
    auto a = to_circuit(code, compile_clifford(code, chi, 2, {Decomposition::DzDx, 9, true}).sequence);
    auto b = to_circuit(code, compile_clifford(code, chi, 2, {Decomposition::DzDx, 9, true}).sequence);
    EXPECT_EQ(a, b);
}
