// SPDX-License-Identifier: Apache-2.0
#include "shyps/acceptance.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include "shyps/circuits.h"
#include "shyps/code.h"
#include "shyps/compiler.h"
#include "shyps/f2decomp.h"
#include "shyps/simplex.h"
#include "shyps/symplectic.h"

namespace shyps {

namespace {

// Runtime budgets in seconds.
constexpr double kBuildBudget = 1.0;
constexpr double kDistanceBudget = 120.0;
constexpr double kDecompositionBudget = 60.0;
constexpr double kFactorizationBudget = 60.0;
constexpr double kGeneratorBudget = 300.0;
constexpr double kCompileBudget = 600.0;
constexpr double kScheduleBudget = 30.0;

// Bounds asserted with zero tolerance.
constexpr size_t kCliffordDepthR3B2 = 263;
constexpr size_t kInvertibleSymmetricR3 = 35;
constexpr size_t kInvertibleSymmetricR4 = 38;
constexpr size_t kXiR3 = 12;
constexpr size_t kXiR4 = 21;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Collects failures; the first few are kept for the detail line.
struct Failures {
    size_t count = 0;
    std::vector<std::string> first;
    void add(std::string what) {
        if (first.size() < 3) {
            first.push_back(std::move(what));
        }
        count++;
    }
    std::string summary() const {
        std::string s = std::to_string(count) + " failure(s)";
        for (const auto &f : first) {
            s += "; " + f;
        }
        return s;
    }
};

CheckResult finish(int id, std::string name, const Failures &f, std::string detail, Clock::time_point t0,
                   double budget) {
    CheckResult r;
    r.id = id;
    r.name = std::move(name);
    r.seconds = since(t0);
    r.pass = f.count == 0 && r.seconds <= budget;
    std::ostringstream out;
    if (f.count) {
        out << f.summary() << "; ";
    }
    while (!detail.empty() && (detail.back() == ';' || detail.back() == ' ')) {
        detail.pop_back();
    }
    out << detail;
    if (r.seconds > budget) {
        out << "; runtime " << r.seconds << " s exceeds " << budget << " s";
    }
    r.detail = out.str();
    return r;
}

BitMatrix random_symmetric(size_t n, std::mt19937_64 &rng) {
    BitMatrix a = BitMatrix::random(n, n, rng);
    BitMatrix s = a + a.transposed();
    for (size_t i = 0; i < n; i++) {
        s.set(i, i, rng() & 1);
    }
    return s;
}

size_t max_row_or_col_weight(const BitMatrix &m) {
    size_t w = 0;
    for (size_t i = 0; i < m.rows(); i++) {
        w = std::max(w, m.row_weight(i));
    }
    for (size_t j = 0; j < m.cols(); j++) {
        w = std::max(w, m.col_weight(j));
    }
    return w;
}

GeneratorSequence single_generator(size_t r, size_t blocks, Generator g) {
    GeneratorSequence seq(r, blocks);
    Step s;
    s.generators.push_back(std::move(g));
    seq.steps.push_back(std::move(s));
    return seq;
}

}  // namespace

AcceptanceConfig AcceptanceConfig::quick() {
    AcceptanceConfig c;
    c.decomposition_trials_r3 = 50;
    c.decomposition_trials_r4 = 10;
    c.clifford_factorizations = 10;
    c.symmetric_products = 500;
    c.all_phase_pairs = false;
    c.cnot_generators = 20;
    c.random_cliffords = 2;
    c.include_r5 = false;
    return c;
}

CheckResult check_code_parameters(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    std::ostringstream detail;
    struct Expected {
        size_t r, n, k, d;
    };
    std::vector<Expected> cases = {{3, 49, 9, 4}, {4, 225, 16, 8}};
    if (cfg.include_r5) {
        cases.push_back({5, 961, 25, 16});
    }
    double slowest = 0;
    for (const auto &e : cases) {
        auto t = Clock::now();
        ShypsCode code = build_shyps(e.r);
        slowest = std::max(slowest, since(t));
        detail << "r=" << e.r << " [" << code.n << "," << code.k << "," << code.d << "]; ";
        if (code.n != e.n || code.k != e.k || code.d != e.d) {
            f.add("r=" + std::to_string(e.r) + " parameters");
        }
        for (const BitMatrix *g : {&code.GX, &code.GZ}) {
            for (size_t i = 0; i < g->rows(); i++) {
                if (g->row_weight(i) != 3) {
                    f.add("r=" + std::to_string(e.r) + " gauge row weight");
                    break;
                }
            }
        }
        if (!code.gx_space->contains_rows(code.SX) || !code.gz_space->contains_rows(code.SZ)) {
            f.add("r=" + std::to_string(e.r) + " stabilizers outside the gauge row space");
        }
        if (code.LX * code.LZ.transposed() != BitMatrix::identity(code.k)) {
            f.add("r=" + std::to_string(e.r) + " L_X·L_Z^T ≠ I");
        }
    }
    if (slowest > kBuildBudget) {
        f.add("slowest build " + std::to_string(slowest) + " s");
    }
    detail << "slowest build " << slowest << " s";
    return finish(1, "code parameters", f, detail.str(), t0, kBuildBudget * cases.size());
}

CheckResult check_distance_oracle(const AcceptanceConfig &) {
    auto t0 = Clock::now();
    Failures f;
    const ShypsCode &code = shyps_code(3);
    DistanceReport low = dressed_distance_bound(code, 3);
    if (low.witness || low.no_logical_below != 4) {
        f.add("dressed logical of weight ≤ 3 found");
    }
    DistanceReport four = dressed_distance_bound(code, 4);
    std::ostringstream detail;
    if (!four.witness || four.witness->size() != 4) {
        f.add("no weight-4 witness");
    } else {
        // Independent confirmation: the witness commutes with the opposite stabilizers, lies outside the gauge
        // group and anticommutes with some bare logical.
        BitVec e(code.n);
        for (size_t q : *four.witness) {
            e.set(q, true);
        }
        bool z = four.witness_type == 'Z';
        const BitMatrix &opposite = z ? code.SX : code.SZ;
        const RowSpace &gauge = z ? *code.gz_space : *code.gx_space;
        const BitMatrix &logicals = z ? code.LX : code.LZ;
        if (!opposite.right_mul(e).is_zero() || gauge.contains(e) || logicals.right_mul(e).is_zero()) {
            f.add("witness is not a dressed logical");
        }
        detail << "none below weight " << low.no_logical_below << ", " << four.witness_type
               << "-type witness on qubits";
        for (size_t q : *four.witness) {
            detail << ' ' << q;
        }
    }
    return finish(2, "distance oracle r=3", f, detail.str(), t0, kDistanceBudget);
}

CheckResult check_decomposition_theorems(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    std::mt19937_64 rng(cfg.seed);
    std::ostringstream detail;
    for (size_t r : {3, 4}) {
        size_t trials = r == 3 ? cfg.decomposition_trials_r3 : cfg.decomposition_trials_r4;
        size_t k = r * r;
        size_t tensor_bound = r * r + r + 4;
        size_t sym_bound = r == 3 ? kInvertibleSymmetricR3 : kInvertibleSymmetricR4;
        size_t xi_bound = r == 3 ? kXiR3 : kXiR4;
        size_t worst_tensor = 0, worst_sym = 0, worst_xi = 0;
        for (size_t t = 0; t < trials; t++) {
            BitMatrix a = BitMatrix::random(k, k, rng);
            TensorSum ts = tensor_decompose(a, r, t);
            worst_tensor = std::max(worst_tensor, ts.weight());
            if (ts.reconstruct() != a || ts.weight() > tensor_bound) {
                f.add("tensor_decompose r=" + std::to_string(r) + " trial " + std::to_string(t));
            }
            BitMatrix s = random_symmetric(k, rng);
            SymTensorSum ss = invertible_symmetric_decompose(s, r, t);
            worst_sym = std::max(worst_sym, ss.weight());
            if (ss.reconstruct() != s || ss.weight() > sym_bound) {
                f.add("invertible_symmetric_decompose r=" + std::to_string(r) + " trial " + std::to_string(t));
            }
            BitMatrix d = xi_from_support(random_symmetric(r, rng));
            SymTensorSum xs = xi_decompose(d, r, t);
            worst_xi = std::max(worst_xi, xs.weight());
            if (xs.reconstruct_untwisted() != d || xs.weight() > xi_bound) {
                f.add("xi_decompose r=" + std::to_string(r) + " trial " + std::to_string(t));
            }
            size_t dim = 1 + rng() % (2 * k);
            BitMatrix c = random_symmetric(dim, rng);
            if (rng() % 4 == 0) {
                for (size_t i = 0; i < dim; i++) {
                    c.set(i, i, false);
                }
            }
            BitMatrix l = binary_cholesky(c);
            if (l * l.transposed() != c || l.cols() > rank(c) + 1) {
                f.add("binary_cholesky dimension " + std::to_string(dim));
            }
        }
        detail << "r=" << r << ": tensor " << worst_tensor << "/" << tensor_bound << ", symmetric " << worst_sym
               << "/" << sym_bound << ", xi " << worst_xi << "/" << xi_bound << "; ";
    }
    return finish(3, "decomposition theorems", f, detail.str(), t0, kDecompositionBudget);
}

CheckResult check_clifford_factorizations(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    std::mt19937_64 rng(cfg.seed + 1);
    for (size_t m : {9, 18}) {
        for (size_t t = 0; t < cfg.clifford_factorizations; t++) {
            SymplecticMatrix chi = random_symplectic(m, rng);
            CliffordDecomposition1 d1 = clifford_decompose_1(chi, t);
            if (d1.product() != chi) {
                f.add("decomposition 1 m=" + std::to_string(m));
            }
            if (max_row_or_col_weight(d1.dz1) > 1) {
                f.add("DZ(1) weight m=" + std::to_string(m));
            }
            if (clifford_decompose_2(chi).product() != chi) {
                f.add("decomposition 2 m=" + std::to_string(m));
            }
        }
    }
    for (size_t t = 0; t < cfg.symmetric_products; t++) {
        size_t n = 1 + t % 12;
        BitMatrix mat = BitMatrix::random(n, n, rng);
        SymmetricPair p = product_of_two_symmetrics(mat, t);
        if (!p.s1.is_symmetric() || !p.s2.is_symmetric() || p.s1 * p.s2 != mat) {
            f.add("product_of_two_symmetrics n=" + std::to_string(n));
        }
    }
    std::ostringstream detail;
    detail << 2 * cfg.clifford_factorizations << " operators, " << cfg.symmetric_products << " symmetric products";
    return finish(4, "Clifford factorizations", f, detail.str(), t0, kFactorizationBudget);
}

CheckResult check_generator_verification(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    const ShypsCode &code = shyps_code(3);
    const auto &gl = general_linear_group(3);
    // In-block phase layers: circuit-distance criterion and Heisenberg verification of the claimed action,
    // which includes gauge preservation.
    for (const BitMatrix &g : gl) {
        Generator gen = gen_diagonal(code, g, 0);
        if (check_diag_circuit_distance(code, physical_pairing(code, gen).matrix())) {
            f.add("phase layer fails the circuit-distance criterion");
        }
        if (!verify_sequence(code, single_generator(3, 1, gen), claimed_action(gen, 3, 1)).pass) {
            f.add("phase layer claim");
        }
    }
    // Cross-block phase-type generators over all automorphism pairs. Every CZ joins two blocks, so no
    // two-qubit fault lands in one grid row or column of a block.
    std::mt19937_64 rng(cfg.seed + 2);
    size_t pairs = 0;
    for (size_t i = 0; i < gl.size(); i++) {
        for (size_t j = 0; j < gl.size(); j++) {
            if (!cfg.all_phase_pairs && rng() % 400 != 0) {
                continue;
            }
            pairs++;
            Generator gen = gen_cross_block_cz(code, gl[i], gl[j], 0, 1);
            for (const Gate &gate : physical_gates(code, gen)) {
                if (gate.a / code.n == gate.b / code.n) {
                    f.add("cross-block CZ inside one block");
                }
            }
            if (!verify_sequence(code, single_generator(3, 2, gen), claimed_action(gen, 3, 2)).pass) {
                f.add("cross-block CZ claim (" + std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    // Cross-block CNOT generators on the tableau.
    for (size_t t = 0; t < cfg.cnot_generators; t++) {
        const BitMatrix &h1 = gl[rng() % gl.size()];
        const BitMatrix &h2 = gl[rng() % gl.size()];
        bool forward = rng() & 1;
        Generator gen = gen_cross_block_cnot(code, h1, h2, forward ? 0 : 1, forward ? 1 : 0);
        PhysicalCircuit c = to_circuit(code, single_generator(3, 2, gen));
        if (!verify_with_reference(code, 2, c, claimed_action(gen, 3, 2), t).pass) {
            f.add("cross-block CNOT tableau check");
        }
    }
    std::ostringstream detail;
    detail << gl.size() << " phase layers, " << pairs << " cross-block CZ pairings, " << cfg.cnot_generators
           << " CNOT generators";
    return finish(5, "generator verification r=3", f, detail.str(), t0, kGeneratorBudget);
}

CheckResult check_end_to_end_compile(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    const ShypsCode &code = shyps_code(3);
    std::mt19937_64 rng(cfg.seed + 3);
    size_t worst = 0;
    for (size_t t = 0; t < cfg.random_cliffords; t++) {
        SymplecticMatrix chi = random_symplectic(18, rng);
        CompiledClifford out = compile_clifford(code, chi, 2, {Decomposition::DzDx, t, true});
        worst = std::max(worst, out.report.layers);
        if (out.report.layers > kCliffordDepthR3B2) {
            f.add("depth " + std::to_string(out.report.layers));
        }
        if (out.report.aux_blocks != 0 || out.sequence.uses_measurement()) {
            f.add("auxiliary blocks used");
        }
        if (claimed_product(code, out.sequence) != chi) {
            f.add("claimed product differs");
        }
        VerifyReport v = verify_sequence(code, out.sequence, chi);
        if (!v.pass) {
            f.add("verification: " + v.mismatches.front());
        }
    }
    std::ostringstream detail;
    detail << cfg.random_cliffords << " operators on 2 blocks, worst depth " << worst << "/" << kCliffordDepthR3B2;
    return finish(6, "end-to-end compile and verify", f, detail.str(), t0, kCompileBudget);
}

CheckResult check_gate_costs(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    std::ostringstream detail;
    std::mt19937_64 rng(cfg.seed + 4);
    // Single-gate costs; S and H are larger at r = 3.
    for (size_t r : {3, 4}) {
        const ShypsCode &code = shyps_code(r);
        size_t k = r * r;
        size_t cross = 0, in = 0, s = 0, cz = 0, h = 0, perm = 0, had = 0, in_aux = 0;
        for (size_t p = 0; p < k; p++) {
            BitMatrix v(r, r);
            v.set(p / r, p % r, true);
            auto hs = compile_hadamard(code, v, 0, 1);
            h = std::max(h, hs.depth());
            if (claimed_product(code, hs) != from_hadamard(BitVec::unit(k, p))) {
                f.add("single H action");
            }
            BitMatrix sp = BitMatrix::single(k, k, p, p);
            auto ss = compile_in_block_diagonal(code, sp, 0, 1);
            s = std::max(s, ss.depth());
            if (claimed_product(code, ss) != from_diagonal(sp)) {
                f.add("single S action");
            }
            for (size_t q = 0; q < k; q++) {
                BitMatrix e = BitMatrix::single(k, k, p, q);
                auto cx = compile_cross_block_cnot(code, e, 0, 1, 2);
                cross = std::max(cross, cx.depth());
                BitMatrix x = BitMatrix::identity(2 * k);
                x.set_block(0, k, e);
                if (claimed_product(code, cx) != from_cnot(x)) {
                    f.add("cross-block CNOT action");
                }
                auto czx = compile_cross_block_cz(code, e, 0, 1, 2);
                cz = std::max(cz, czx.depth());
                if (p == q) {
                    continue;
                }
                BitMatrix c = BitMatrix::identity(k) + e;
                auto ic = compile_in_block_cnot(code, c, 0, 1, 1);
                in = std::max(in, ic.depth());
                in_aux = std::max(in_aux, ic.aux_blocks);
                if (claimed_product(code, ic) != from_cnot(c)) {
                    f.add("in-block CNOT action");
                }
                auto czi = compile_in_block_diagonal(code, e + e.transposed(), 0, 1);
                cz = std::max(cz, czi.depth());
            }
        }
        for (int t = 0; t < 20; t++) {
            Permutation pi = Permutation::random(k, rng);
            auto ps = compile_in_block_permutation(code, pi, 0, 1, 1, t);
            perm = std::max(perm, ps.depth());
            if (claimed_product(code, ps) != from_permutation(pi)) {
                f.add("in-block permutation action");
            }
            BitMatrix v = BitMatrix::random(r, r, rng);
            auto hs = compile_hadamard(code, v, 0, 1, t);
            had = std::max(had, hs.depth());
            if (claimed_product(code, hs) != from_hadamard(flatten(v))) {
                f.add("arbitrary Hadamard action");
            }
        }
        auto over = [&](const char *what, size_t got, size_t bound) {
            if (got > bound) {
                f.add(std::string(what) + " r=" + std::to_string(r) + " " + std::to_string(got) + " > " +
                      std::to_string(bound));
            }
        };
        over("cross-block CNOT", cross, 4);
        over("in-block CNOT", in, 4);
        over("in-block CNOT auxiliary blocks", in_aux, 1);
        over("CZ", cz, 4);
        over("S", s, bound_single_s(r));
        over("H", h, bound_single_hadamard(r));
        over("in-block permutation", perm, bound_in_block_permutation(r));
        over("arbitrary Hadamard", had, bound_hadamard(r));
        detail << "r=" << r << ": CNOT " << cross << ", in-block CNOT " << in << " (+" << in_aux * code.n
               << " qubits), CZ " << cz << ", S " << s << ", H " << h << ", permutation " << perm << "/"
               << bound_in_block_permutation(r) << ", Hadamard " << had << "/" << bound_hadamard(r) << "; ";
    }
    return finish(7, "logical gate costs", f, detail.str(), t0, kCompileBudget);
}

CheckResult check_syndrome_extraction(const AcceptanceConfig &cfg) {
    auto t0 = Clock::now();
    Failures f;
    std::mt19937_64 rng(cfg.seed + 5);
    for (size_t r : {3, 4}) {
        const ShypsCode &code = shyps_code(r);
        for (const SESchedule &s : {schedule_se_structure(code), schedule_se_coloring(code)}) {
            if (s.depth() != 8) {
                f.add("depth " + std::to_string(s.depth()) + " at r=" + std::to_string(r));
            }
            if (auto e = check_well_formed(s.circuit)) {
                f.add(*e);
            }
            size_t total = s.circuit.num_qubits;
            StabilizerTableau tab(total, rng());
            for (size_t q = 0; q < code.n; q++) {
                if (rng() & 1) {
                    tab.apply(Gate{GateKind::H, static_cast<uint32_t>(q)});
                }
                if (rng() & 1) {
                    tab.apply(Gate{GateKind::S, static_cast<uint32_t>(q)});
                }
            }
            auto rec = tab.run(s.circuit);
            BitVec gx(code.GX.rows()), gz(code.GZ.rows());
            for (size_t i = 0; i < code.GX.rows(); i++) {
                gx.set(i, rec[s.x_record[i]]);
                gz.set(i, rec[s.z_record[i]]);
            }
            BitVec sx = aggregate_x_stabilizers(code, gx), sz = aggregate_z_stabilizers(code, gz);
            for (size_t i = 0; i < code.SX.rows(); i++) {
                BitVec x(total), z(total);
                x.write_slice(0, code.SX.row(i));
                z.write_slice(0, code.SZ.row(i));
                if (tab.peek(x, BitVec(total)) != std::optional<bool>(sx.get(i)) ||
                    tab.peek(BitVec(total), z) != std::optional<bool>(sz.get(i))) {
                    f.add("aggregated stabilizer " + std::to_string(i) + " at r=" + std::to_string(r));
                }
            }
        }
    }
    return finish(8, "syndrome extraction", f, "structure and coloring schedules at r=3,4", t0, kScheduleBudget);
}

std::vector<CheckResult> run_acceptance(const AcceptanceConfig &cfg, const std::vector<int> &ids) {
    const std::vector<std::function<CheckResult(const AcceptanceConfig &)>> checks = {
        check_code_parameters,        check_distance_oracle,        check_decomposition_theorems,
        check_clifford_factorizations, check_generator_verification, check_end_to_end_compile,
        check_gate_costs,             check_syndrome_extraction,
    };
    std::vector<CheckResult> out;
    for (int id = 1; id <= static_cast<int>(checks.size()); id++) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) {
            continue;
        }
        try {
            out.push_back(checks[id - 1](cfg));
        } catch (const std::exception &e) {
            out.push_back(CheckResult{id, "criterion " + std::to_string(id), false, std::string("exception: ") + e.what(), 0});
        }
    }
    return out;
}

std::string format_result(const CheckResult &r) {
    std::ostringstream out;
    out << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << ": " << r.name << " (" << r.detail << ", "
        << r.seconds << " s)";
    return out.str();
}

}  // namespace shyps
