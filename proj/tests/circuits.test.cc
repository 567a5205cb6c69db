// SPDX-License-Identifier: Apache-2.0
#include "shyps/circuits.h"

#include <gtest/gtest.h>

#include <random>

#include "shyps/simplex.h"

using namespace shyps;

namespace {

uint32_t u32(size_t v) { return static_cast<uint32_t>(v); }

PhysicalCircuit random_unitary_circuit(size_t n, size_t depth, std::mt19937_64 &rng) {
    PhysicalCircuit c(n);
    const GateKind one[] = {GateKind::H, GateKind::S, GateKind::SX, GateKind::X, GateKind::Z};
    const GateKind two[] = {GateKind::CX, GateKind::CZ, GateKind::XCX};
    for (size_t t = 0; t < depth; t++) {
        Permutation order = Permutation::random(n, rng);
        Layer layer;
        for (size_t i = 0; i + 1 < n; i += 2) {
            if (rng() % 2) {
                layer.gates.push_back({two[rng() % 3], order(i), order(i + 1)});
            } else {
                layer.gates.push_back({one[rng() % 5], order(i)});
            }
        }
        c.layers.push_back(layer);
    }
    return c;
}

BitMatrix phase_layer_rho(const ShypsCode &code, const BitMatrix &g) {
    BitMatrix sigma = aut_permutation(code.simplex, g).matrix();
    return kron(sigma, sigma.transposed()) * Permutation::tau(code.nr).matrix();
}

BitMatrix gauge_rows_xz(const ShypsCode &code) {
    BitMatrix out(2 * code.GX.rows(), 2 * code.n);
    for (size_t i = 0; i < code.GX.rows(); i++) {
        BitVec x(2 * code.n), z(2 * code.n);
        x.write_slice(0, code.GX.row(i));
        z.write_slice(code.n, code.GZ.row(i));
        out.set_row(i, x);
        out.set_row(code.GX.rows() + i, z);
    }
    return out;
}

}  // namespace

TEST(circuits, emit_single_cx_layer) {
    PhysicalCircuit c(50);
    c.layers.push_back(Layer{{{GateKind::CX, 0, 49}}, {}});
    EXPECT_EQ(emit(c), "LAYER\nCX 0 49\n");
}

TEST(circuits, emit_parse_round_trip) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; trial++) {
        size_t n = 2 + rng() % 20;
        PhysicalCircuit c = random_unitary_circuit(n, 1 + rng() % 6, rng);
        Layer prep;
        prep.gates.push_back({GateKind::PZ, 0});
        prep.gates.push_back({GateKind::MX, 1});
        c.layers.push_back(prep);
        Layer relabel;
        Permutation p = Permutation::random(n, rng);
        for (size_t q = 0; q < n; q++) {
            if (p(q) != q) {
                relabel.relabel.emplace_back(u32(q), p(q));
            }
        }
        if (!relabel.relabel.empty()) {
            c.layers.push_back(relabel);
        }
        c.num_qubits = n + rng() % 2;
        ASSERT_FALSE(check_well_formed(c).has_value());
        EXPECT_EQ(parse_circuit(emit(c)), c);
    }
}

TEST(circuits, parser_rejects_malformed_text) {
    EXPECT_THROW(parse_circuit("CX 0 1\n"), std::invalid_argument);
    EXPECT_THROW(parse_circuit("LAYER\nFOO 1\n"), std::invalid_argument);
    EXPECT_THROW(parse_circuit("LAYER\nCX 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_circuit("LAYER\nCX 0 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_circuit("LAYER\nH 1\nS 1\n"), std::invalid_argument);
    EXPECT_THROW(parse_circuit("LAYER\nRELABEL 0->1\n"), std::invalid_argument);
    EXPECT_THROW(parse_circuit("LAYER\nH x\n"), std::invalid_argument);
    EXPECT_NO_THROW(parse_circuit("# comment\nLAYER\nRELABEL 0->1 1->0\n"));
}

TEST(circuits, well_formedness_flags_reuse) {
    PhysicalCircuit c(3);
    c.layers.push_back(Layer{{{GateKind::CX, 0, 1}, {GateKind::CZ, 1, 2}}, {}});
    auto e = check_well_formed(c);
    ASSERT_TRUE(e.has_value());
    EXPECT_NE(e->find("used twice"), std::string::npos);
}

TEST(circuits, heisenberg_rules_for_single_gates) {
    // Rows X0, Z0, X1, Z1 on two qubits.
    BitMatrix rows = BitMatrix::from_strings({"1000", "0010", "0100", "0001"});
    auto image = [&](Gate g) {
        PauliBatch b(rows);
        b.apply(g);
        return b.rows();
    };
    // CX: X0 → X0X1, Z1 → Z0Z1.
    EXPECT_EQ(image({GateKind::CX, 0, 1}), BitMatrix::from_strings({"1100", "0010", "0100", "0011"}));
    // CZ: X0 → X0Z1, X1 → Z0X1.
    EXPECT_EQ(image({GateKind::CZ, 0, 1}), BitMatrix::from_strings({"1001", "0010", "0110", "0001"}));
    // S: X → Y.
    EXPECT_EQ(image({GateKind::S, 0}), BitMatrix::from_strings({"1010", "0010", "0100", "0001"}));
    // SX: Z → Y.
    EXPECT_EQ(image({GateKind::SX, 0}), BitMatrix::from_strings({"1000", "1010", "0100", "0001"}));
    // XCX: Z0 → Z0X1.
    EXPECT_EQ(image({GateKind::XCX, 0, 1}), BitMatrix::from_strings({"1000", "0110", "0100", "1001"}));
}

TEST(circuits, cz_hadamard_cubed_is_swap) {
    PhysicalCircuit c(2);
    for (int i = 0; i < 3; i++) {
        c.layers.push_back(Layer{{{GateKind::H, 0}, {GateKind::H, 1}}, {}});
        c.layers.push_back(Layer{{{GateKind::CZ, 0, 1}}, {}});
    }
    BitMatrix rows = BitMatrix::identity(4);
    PauliBatch b(rows);
    b.apply(c);
    Permutation swap({1, 0, 3, 2});
    EXPECT_EQ(b.rows(), swap.matrix());
}

TEST(circuits, batch_agrees_with_tableau_on_random_circuits) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; trial++) {
        size_t n = 2 + rng() % 12;
        PhysicalCircuit c = random_unitary_circuit(n, 10, rng);
        StabilizerTableau tab(n);
        tab.run(c);
        ASSERT_TRUE(tab.is_valid());
        BitMatrix z_rows(n, 2 * n);
        for (size_t q = 0; q < n; q++) {
            z_rows.set(q, n + q, true);
        }
        PauliBatch batch(z_rows);
        batch.apply(c);
        RowSpace a(tab.stabilizers());
        RowSpace b(batch.rows());
        EXPECT_TRUE(a.contains_rows(batch.rows()));
        EXPECT_TRUE(b.contains_rows(tab.stabilizers()));
    }
}

TEST(circuits, tableau_basic_states) {
    StabilizerTableau tab(4, 1);
    PhysicalCircuit c(4);
    Layer m;
    for (uint32_t q = 0; q < 4; q++) {
        m.gates.push_back({GateKind::MZ, q});
    }
    c.layers.push_back(m);
    auto rec = tab.run(c);
    EXPECT_EQ(rec, std::vector<bool>(4, false));

    // X flips the sign of Z; a Bell pair has deterministic ZZ and XX but random Z.
    StabilizerTableau bell(2);
    bell.apply(Gate{GateKind::X, 0});
    BitVec z0 = BitVec::from_string("10");
    EXPECT_EQ(bell.peek(BitVec(2), z0), std::optional<bool>(true));
    bell.apply(Gate{GateKind::X, 0});
    bell.apply(Gate{GateKind::H, 0});
    bell.apply(Gate{GateKind::CX, 0, 1});
    EXPECT_EQ(bell.peek(BitVec(2), BitVec::from_string("11")), std::optional<bool>(false));
    EXPECT_EQ(bell.peek(BitVec::from_string("11"), BitVec(2)), std::optional<bool>(false));
    // Y⊗Y = −(X⊗X)(Z⊗Z).
    EXPECT_EQ(bell.peek(BitVec::from_string("11"), BitVec::from_string("11")), std::optional<bool>(true));
    EXPECT_FALSE(bell.peek(BitVec(2), z0).has_value());
    bool a = bell.measure_z(0);
    bool b = bell.measure_z(1);
    EXPECT_EQ(a, b);
}

TEST(circuits, tableau_prep_resets_qubits) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; trial++) {
        PhysicalCircuit c = random_unitary_circuit(6, 6, rng);
        Layer prep;
        prep.gates = {{GateKind::PZ, 0}, {GateKind::PX, 1}};
        c.layers.push_back(prep);
        StabilizerTableau tab(6, trial);
        tab.run(c);
        EXPECT_EQ(tab.peek(BitVec(6), BitVec::unit(6, 0)), std::optional<bool>(false));
        EXPECT_EQ(tab.peek(BitVec::unit(6, 1), BitVec(6)), std::optional<bool>(false));
    }
}

TEST(circuits, verify_identity_and_fold_hadamard) {
    const ShypsCode &code = shyps_code(3);
    PhysicalCircuit empty(code.n);
    EXPECT_TRUE(verify_logical_action(code, 1, empty, SymplecticMatrix::identity(code.k)).pass);

    PhysicalCircuit fold(code.n);
    Layer h;
    for (size_t q = 0; q < code.n; q++) {
        h.gates.push_back({GateKind::H, u32(q)});
    }
    fold.layers.push_back(h);
    Layer relabel;
    Permutation tau = Permutation::tau(code.nr);
    for (size_t q = 0; q < code.n; q++) {
        if (tau(q) != q) {
            relabel.relabel.emplace_back(u32(q), tau(q));
        }
    }
    fold.layers.push_back(relabel);
    BitMatrix t = Permutation::tau(code.r).matrix();
    BitMatrix zero(code.k, code.k);
    auto claimed = SymplecticMatrix::from_blocks(zero, t, t, zero);
    EXPECT_TRUE(verify_logical_action(code, 1, fold, claimed).pass);

    // Without the relabel the transversal H is not a logical gate of this code.
    PhysicalCircuit bare(code.n);
    bare.layers.push_back(h);
    auto report = verify_logical_action(code, 1, bare, claimed);
    EXPECT_FALSE(report.pass);
    EXPECT_FALSE(report.mismatches.empty());
}

TEST(circuits, transversal_cnot_matches_lift_action) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; trial++) {
        BitMatrix g1 = BitMatrix::random_invertible(3, rng);
        BitMatrix g2 = BitMatrix::random_invertible(3, rng);
        Permutation pi = lift_automorphism(code, g1, g2);
        PhysicalCircuit c(2 * code.n);
        Layer layer;
        for (size_t j = 0; j < code.n; j++) {
            layer.gates.push_back({GateKind::CX, pi(j), u32(code.n + j)});
        }
        c.layers.push_back(layer);
        BitMatrix x = BitMatrix::identity(2 * code.k);
        x.set_block(0, code.k, kron(invert(g1).transposed(), g2));
        EXPECT_TRUE(verify_logical_action(code, 2, c, from_cnot(x)).pass);
        // Any other claimed off-diagonal block is rejected.
        x.flip(0, code.k);
        EXPECT_FALSE(verify_logical_action(code, 2, c, from_cnot(x)).pass);
    }
}

TEST(circuits, bell_reference_teleport_identity) {
    const ShypsCode &code = shyps_code(3);
    size_t n = code.n;
    PhysicalCircuit c(2 * n);
    Layer prep, cnot, meas, swap;
    for (size_t q = 0; q < n; q++) {
        prep.gates.push_back({GateKind::PZ, u32(n + q)});
        cnot.gates.push_back({GateKind::CX, u32(q), u32(n + q)});
        meas.gates.push_back({GateKind::MX, u32(q)});
        swap.relabel.emplace_back(u32(q), u32(n + q));
        swap.relabel.emplace_back(u32(n + q), u32(q));
    }
    c.layers = {prep, cnot, meas, swap};
    auto id = SymplecticMatrix::identity(code.k);
    EXPECT_TRUE(verify_with_reference(code, 1, c, id).pass);
    BitMatrix wrong = BitMatrix::identity(code.k);
    wrong.set(0, 1, true);
    EXPECT_FALSE(verify_with_reference(code, 1, c, from_cnot(wrong)).pass);
    // Dropping the relabel leaves the logical state on the auxiliary block.
    c.layers.pop_back();
    EXPECT_FALSE(verify_with_reference(code, 1, c, id).pass);
}

TEST(circuits, bell_reference_agrees_with_heisenberg_on_unitaries) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(8);
    BitMatrix g1 = BitMatrix::random_invertible(3, rng);
    BitMatrix g2 = BitMatrix::random_invertible(3, rng);
    Permutation pi = lift_automorphism(code, g1, g2);
    PhysicalCircuit c(code.n);
    Layer layer;
    for (size_t j = 0; j < code.n; j++) {
        if (pi(j) != j) {
            layer.relabel.emplace_back(pi(j), u32(j));
        }
    }
    c.layers.push_back(layer);
    auto claimed = from_cnot(logical_action_of_lift(code, g1, g2));
    EXPECT_TRUE(verify_logical_action(code, 1, c, claimed).pass);
    EXPECT_TRUE(verify_with_reference(code, 1, c, claimed).pass);
}

TEST(circuits, bipartite_coloring_is_proper) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; trial++) {
        size_t left = 1 + rng() % 8, right = 1 + rng() % 8;
        std::vector<std::pair<size_t, size_t>> edges;
        size_t m = rng() % 40;
        for (size_t e = 0; e < m; e++) {
            edges.emplace_back(rng() % left, rng() % right);
        }
        auto color = bipartite_edge_coloring(left, right, edges);
        std::vector<size_t> deg(left + right, 0);
        for (auto [u, v] : edges) {
            deg[u]++;
            deg[left + v]++;
        }
        size_t delta = edges.empty() ? 0 : *std::max_element(deg.begin(), deg.end());
        for (size_t e = 0; e < m; e++) {
            EXPECT_LT(color[e], delta);
            for (size_t f = e + 1; f < m; f++) {
                bool share = edges[e].first == edges[f].first || edges[e].second == edges[f].second;
                if (share) {
                    EXPECT_NE(color[e], color[f]);
                }
            }
        }
    }
}

TEST(circuits, se_structure_schedule_shape) {
    const ShypsCode &code = shyps_code(3);
    EXPECT_EQ(code.simplex.a, 2u);
    EXPECT_EQ(code.simplex.b, 3u);
    SESchedule s = schedule_se_structure(code);
    EXPECT_EQ(s.depth(), 8u);
    EXPECT_FALSE(check_well_formed(s.circuit).has_value());
    size_t x_cx = 0, z_cx = 0, x_aux = 0, z_aux = 0;
    for (const auto &layer : s.circuit.layers) {
        for (const auto &g : layer.gates) {
            if (g.kind == GateKind::CX) {
                (g.a >= s.x_aux_offset ? x_cx : z_cx)++;
            }
            x_aux += g.kind == GateKind::PX;
            z_aux += g.kind == GateKind::PZ;
        }
    }
    EXPECT_EQ(x_aux, 49u);
    EXPECT_EQ(z_aux, 49u);
    EXPECT_EQ(x_cx, 3u * 49);
    EXPECT_EQ(z_cx, 3u * 49);
    // X gauge (0,0) touches rows 0, 2, 3 of grid column 0.
    std::vector<size_t> touched;
    for (size_t t = 4; t < 7; t++) {
        for (const auto &g : s.circuit.layers[t].gates) {
            if (g.kind == GateKind::CX && g.a == s.x_aux_offset) {
                touched.push_back(g.b);
            }
        }
    }
    EXPECT_EQ(touched, (std::vector<size_t>{0, 2 * 7, 3 * 7}));
}

TEST(circuits, se_schedules_measure_every_gauge_support) {
    for (size_t r : {3, 4}) {
        const ShypsCode &code = shyps_code(r);
        for (const SESchedule &s : {schedule_se_structure(code), schedule_se_coloring(code)}) {
            EXPECT_EQ(s.depth(), 8u);
            EXPECT_FALSE(check_well_formed(s.circuit).has_value());
            BitMatrix gx(code.GX.rows(), code.n), gz(code.GZ.rows(), code.n);
            for (const auto &layer : s.circuit.layers) {
                for (const auto &g : layer.gates) {
                    if (g.kind != GateKind::CX) {
                        continue;
                    }
                    if (g.a >= s.x_aux_offset && g.a < s.z_aux_offset) {
                        gx.flip(g.a - s.x_aux_offset, g.b);
                    } else {
                        gz.flip(g.b - s.z_aux_offset, g.a);
                    }
                }
            }
            EXPECT_EQ(gx, code.GX);
            EXPECT_EQ(gz, code.GZ);
        }
    }
}

TEST(circuits, aggregation_is_linear) {
    const ShypsCode &code = shyps_code(3);
    size_t g = code.GX.rows();
    EXPECT_TRUE(aggregate_x_stabilizers(code, BitVec(g)).is_zero());
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; trial++) {
        BitVec a = BitVec::random(g, rng), b = BitVec::random(g, rng);
        EXPECT_EQ(aggregate_x_stabilizers(code, a ^ b), aggregate_x_stabilizers(code, a) ^ aggregate_x_stabilizers(code, b));
        EXPECT_EQ(aggregate_z_stabilizers(code, a ^ b), aggregate_z_stabilizers(code, a) ^ aggregate_z_stabilizers(code, b));
    }
    // A single gauge bit flips exactly the stabilizers whose generating combination uses it.
    BitMatrix ig = kron(BitMatrix::identity(code.nr), code.simplex.G);
    for (size_t i = 0; i < g; i += 7) {
        EXPECT_EQ(aggregate_x_stabilizers(code, BitVec::unit(g, i)), ig.col(i));
    }
    EXPECT_EQ(ig * code.GX, code.SX);
    EXPECT_EQ(kron(code.simplex.G, BitMatrix::identity(code.nr)) * code.GZ, code.SZ);
    EXPECT_THROW(aggregate_x_stabilizers(code, BitVec(g + 1)), std::invalid_argument);
}

TEST(circuits, noiseless_round_matches_direct_stabilizer_values) {
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(12);
    for (const SESchedule &s : {schedule_se_structure(code), schedule_se_coloring(code)}) {
        size_t total = s.circuit.num_qubits;
        StabilizerTableau tab(total, 77);
        for (size_t q = 0; q < code.n; q++) {
            if (rng() % 2) {
                tab.apply(Gate{GateKind::H, u32(q)});
            }
        }
        auto rec = tab.run(s.circuit);
        BitVec gx(code.GX.rows()), gz(code.GZ.rows());
        for (size_t i = 0; i < code.GX.rows(); i++) {
            gx.set(i, rec[s.x_record[i]]);
            gz.set(i, rec[s.z_record[i]]);
        }
        BitVec sx = aggregate_x_stabilizers(code, gx);
        BitVec sz = aggregate_z_stabilizers(code, gz);
        for (size_t i = 0; i < code.SX.rows(); i++) {
            BitVec x(total), z(total);
            x.write_slice(0, code.SX.row(i));
            EXPECT_EQ(tab.peek(x, BitVec(total)), std::optional<bool>(sx.get(i)));
            BitVec zz(total);
            zz.write_slice(0, code.SZ.row(i));
            EXPECT_EQ(tab.peek(BitVec(total), zz), std::optional<bool>(sz.get(i)));
        }
    }
}

TEST(circuits, diag_distance_criterion) {
    const ShypsCode &code = shyps_code(3);
    BitMatrix tau = Permutation::tau(code.nr).matrix();
    EXPECT_EQ(phase_layer_rho(code, BitMatrix::identity(3)), tau);
    EXPECT_FALSE(check_diag_circuit_distance(code, tau).has_value());
    for (const BitMatrix &g : general_linear_group(3)) {
        BitMatrix rho = phase_layer_rho(code, g);
        ASSERT_TRUE(rho.is_symmetric());
        EXPECT_FALSE(check_diag_circuit_distance(code, rho).has_value());
    }
    // CZ between (0,0) and (0,1): same grid row.
    BitMatrix bad = BitMatrix::identity(code.n);
    bad.set(0, 0, false);
    bad.set(1, 1, false);
    bad.set(0, 1, true);
    bad.set(1, 0, true);
    auto w = check_diag_circuit_distance(code, bad);
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(*w, std::make_pair(size_t{0}, size_t{1}));
}

TEST(circuits, phase_layers_preserve_the_gauge_group) {
    const ShypsCode &code = shyps_code(3);
    BitMatrix gauge = gauge_rows_xz(code);
    for (const BitMatrix &g : general_linear_group(3)) {
        BitMatrix rho = phase_layer_rho(code, g);
        PhysicalCircuit c(code.n);
        Layer layer;
        for (size_t q = 0; q < code.n; q++) {
            size_t p = *rho.row(q).first_one();
            if (p == q) {
                layer.gates.push_back({GateKind::S, u32(q)});
            } else if (q < p) {
                layer.gates.push_back({GateKind::CZ, u32(q), u32(p)});
            }
        }
        c.layers.push_back(layer);
        PauliBatch batch(gauge);
        batch.apply(c);
        BitMatrix out = batch.rows();
        for (size_t i = 0; i < out.rows(); i++) {
            BitVec row = out.row(i);
            ASSERT_TRUE(code.gx_space->contains(row.slice(0, code.n)));
            ASSERT_TRUE(code.gz_space->contains(row.slice(code.n, code.n)));
        }
    }
}
