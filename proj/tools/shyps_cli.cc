// SPDX-License-Identifier: Apache-2.0
// shyps: build codes, compile logical Cliffords into fault-tolerant generator sequences, verify them, report
// costs against the depth bounds, schedule syndrome extraction and run the acceptance self-test.
//
// Exit codes: 0 success, 1 verification or bound failure, 2 malformed input.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "shyps/acceptance.h"
#include "shyps/circuits.h"
#include "shyps/code.h"
#include "shyps/compiler.h"
#include "shyps/compiler_json.h"

namespace {

using nlohmann::json;
using namespace shyps;

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kMalformed = 2;

struct Options {
    size_t r = 3;
    size_t blocks = 1;
    uint64_t seed = 0;
    std::string out;
    std::string format;  // empty selects the subcommand default
    std::string decomposition = "dz-dx";
    std::string bound_check = "strict";
    bool random_clifford = false;
    bool matrices = false;
    std::string target;
    std::string input = "-";
    std::string method = "structure";
    bool full = false;
    std::vector<int> criteria;
};

std::string read_input(const std::string &path) {
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), {});
    }
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

json parse_json(const std::string &text, const std::string &what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw std::invalid_argument(what + ": " + e.what());
    }
}

void write_output(const Options &o, const std::string &text) {
    if (o.out.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') {
            std::cout << '\n';
        }
        return;
    }
    std::ofstream f(o.out);
    if (!f) {
        throw std::runtime_error("cannot write " + o.out);
    }
    f << text << '\n';
}

void require_compilable_r(size_t r) {
    if (r != 3 && r != 4) {
        throw std::invalid_argument("compilation is supported for r = 3 and r = 4");
    }
}

std::string parameters(const ShypsCode &code) {
    std::ostringstream s;
    s << "[" << code.n << ", " << code.k << ", " << code.d << "]";
    return s.str();
}

int cmd_build(const Options &o) {
    if (o.r < 3 || o.r > 6) {
        throw std::invalid_argument("--r must lie in [3, 6]");
    }
    ShypsCode code = build_shyps(o.r);
    if (o.format == "json" || !o.out.empty()) {
        write_output(o, code_to_json(code, o.matrices || !o.out.empty()).dump(2));
    } else {
        std::ostringstream s;
        s << "SHYPS(" << o.r << ") " << parameters(code) << ", check polynomial 1 + x^" << code.simplex.a
          << " + x^" << code.simplex.b << ", " << code.GX.rows() << " X and " << code.GZ.rows()
          << " Z gauge generators";
        write_output(o, s.str());
    }
    return kOk;
}

int cmd_simplex_dump(const Options &o) {
    if (o.r < 2 || o.r > 10) {
        throw std::invalid_argument("--r must lie in [2, 10]");
    }
    SimplexCode code = build_simplex(o.r);
    if (o.format == "json") {
        write_output(o, simplex_to_json(code).dump(2));
    } else {
        write_output(o, "H\n" + code.H.str() + "\nG\n" + code.G.str() + "\nP\n" + code.P.str());
    }
    return kOk;
}

int cmd_compile(const Options &o) {
    require_compilable_r(o.r);
    if (o.blocks < 1 || o.blocks > 8) {
        throw std::invalid_argument("--blocks must lie in [1, 8]");
    }
    if (o.random_clifford == !o.target.empty()) {
        throw std::invalid_argument("give exactly one of --random-clifford and --target");
    }
    const ShypsCode &code = shyps_code(o.r);
    SymplecticMatrix chi;
    if (o.random_clifford) {
        std::mt19937_64 rng(o.seed);
        chi = random_symplectic(o.blocks * code.k, rng);
    } else {
        chi = target_from_json(parse_json(read_input(o.target), "target"), o.r, o.blocks);
    }
    CompileOptions opts;
    opts.decomposition = o.decomposition == "dz-cx" ? Decomposition::DzCx : Decomposition::DzDx;
    opts.seed = o.seed;
    CompiledClifford out = compile_clifford(code, chi, o.blocks, opts);
    CompiledDocument doc{o.r, o.blocks, chi, out.sequence, out.report, out.audit};
    if (o.format == "text") {
        std::ostringstream s;
        s << "depth " << out.report.layers;
        if (out.report.bound) {
            s << " (bound " << *out.report.bound << ", " << out.report.bound_name << ")";
        }
        s << ", auxiliary blocks " << out.report.aux_blocks << "\n";
        for (const auto &a : out.audit) {
            s << "  " << a << "\n";
        }
        write_output(o, s.str());
    } else {
        write_output(o, to_json(doc).dump());
    }
    if (!out.report.within_bound()) {
        std::cerr << "depth " << out.report.layers << " exceeds the bound " << *out.report.bound << "\n";
        return o.bound_check == "strict" ? kFailed : kOk;
    }
    return kOk;
}

int cmd_verify(const Options &o) {
    CompiledDocument doc = compiled_from_json(parse_json(read_input(o.input), "compiled document"));
    require_compilable_r(doc.r);
    const ShypsCode &code = shyps_code(doc.r);
    std::vector<std::string> problems;
    if (claimed_product(code, doc.sequence) != doc.target) {
        problems.push_back("claimed product of the generators differs from the target");
    }
    VerifyReport v = verify_sequence(code, doc.sequence, doc.target);
    for (const auto &m : v.mismatches) {
        problems.push_back(m);
    }
    size_t depth = doc.sequence.depth();
    if (depth != doc.report.layers) {
        problems.push_back("reported depth " + std::to_string(doc.report.layers) + " differs from " +
                           std::to_string(depth));
    }
    bool bound_ok = !doc.report.bound || depth <= *doc.report.bound;
    bool pass = problems.empty() && (bound_ok || o.bound_check == "warn");
    if (o.format == "json") {
        json j = {{"pass", pass}, {"depth", depth}, {"bound", doc.report.bound ? json(*doc.report.bound) : json()},
                  {"within_bound", bound_ok}, {"problems", problems}};
        write_output(o, j.dump(2));
    } else {
        std::ostringstream s;
        s << (pass ? "PASS" : "FAIL") << ": depth " << depth;
        if (doc.report.bound) {
            s << " (bound " << *doc.report.bound << (bound_ok ? "" : ", exceeded") << ")";
        }
        s << ", " << doc.blocks << " block(s) of SHYPS(" << doc.r << ")";
        for (const auto &p : problems) {
            s << "\n  " << p;
        }
        write_output(o, s.str());
    }
    return pass ? kOk : kFailed;
}

struct CostResult {
    size_t depth = 0;
    size_t bound = 0;
    std::string bound_name;
    size_t aux_qubits = 0;
    size_t instances = 0;
    bool action_ok = true;
};

CostResult measure_cost(const std::string &target, const ShypsCode &code, size_t blocks, uint64_t seed) {
    size_t r = code.r, k = code.k;
    CostResult c;
    std::mt19937_64 rng(seed);
    auto note = [&](const GeneratorSequence &seq, const SymplecticMatrix &want) {
        c.depth = std::max(c.depth, seq.depth());
        c.aux_qubits = std::max(c.aux_qubits, seq.aux_blocks * code.n);
        c.instances++;
        c.action_ok = c.action_ok && claimed_product(code, seq) == want;
    };
    auto pad = [&](const SymplecticMatrix &x, size_t used) {
        return used == blocks ? x : direct_sum(x, SymplecticMatrix::identity((blocks - used) * k));
    };
    if (target == "cnot-cross" || target == "cz-cross") {
        if (blocks < 2) {
            throw std::invalid_argument(target + " needs --blocks ≥ 2");
        }
        bool cz = target == "cz-cross";
        for (size_t p = 0; p < k; p++) {
            for (size_t q = 0; q < k; q++) {
                BitMatrix e = BitMatrix::single(k, k, p, q);
                BitMatrix x = BitMatrix::identity(2 * k);
                x.set_block(0, k, e);
                if (cz) {
                    BitMatrix s(2 * k, 2 * k);
                    s.set_block(0, k, e);
                    s.set_block(k, 0, e.transposed());
                    note(compile_cross_block_cz(code, e, 0, 1, blocks), pad(from_diagonal(s), 2));
                } else {
                    note(compile_cross_block_cnot(code, e, 0, 1, blocks), pad(from_cnot(x), 2));
                }
            }
        }
        c.bound = 4;
        c.bound_name = cz ? "CZ (cross-block)" : "CNOT (cross-block)";
    } else if (target == "cnot-in" || target == "cz-in") {
        bool cz = target == "cz-in";
        for (size_t p = 0; p < k; p++) {
            for (size_t q = 0; q < k; q++) {
                if (p == q) {
                    continue;
                }
                BitMatrix e = BitMatrix::single(k, k, p, q);
                if (cz) {
                    BitMatrix s = e + e.transposed();
                    note(compile_in_block_diagonal(code, s, 0, blocks), pad(from_diagonal(s), 1));
                } else {
                    BitMatrix x = BitMatrix::identity(k) + e;
                    note(compile_in_block_cnot(code, x, 0, blocks, blocks), pad(from_cnot(x), 1));
                }
            }
        }
        c.bound = 4;
        c.bound_name = cz ? "CZ (in-block)" : "CNOT (in-block)";
    } else if (target == "s" || target == "h") {
        for (size_t p = 0; p < k; p++) {
            if (target == "s") {
                BitMatrix s = BitMatrix::single(k, k, p, p);
                note(compile_in_block_diagonal(code, s, 0, blocks), pad(from_diagonal(s), 1));
            } else {
                BitMatrix v(r, r);
                v.set(p / r, p % r, true);
                note(compile_hadamard(code, v, 0, blocks), pad(from_hadamard(BitVec::unit(k, p)), 1));
            }
        }
        c.bound = target == "s" ? bound_single_s(r) : bound_single_hadamard(r);
        c.bound_name = target == "s" ? "S" : "H";
    } else if (target == "hadamard") {
        BitMatrix v = BitMatrix::random(r, r, rng);
        note(compile_hadamard(code, v, 0, blocks, seed), pad(from_hadamard(flatten(v)), 1));
        c.bound = bound_hadamard(r);
        c.bound_name = "arbitrary Hadamard";
    } else if (target == "all-hadamard") {
        BitVec all(k);
        for (size_t i = 0; i < k; i++) {
            all.set(i, true);
        }
        note(compile_all_hadamard(code, 0, blocks), pad(from_hadamard(all), 1));
        c.bound = bound_all_hadamard(r);
        c.bound_name = "H on every logical qubit";
    } else if (target == "permutation") {
        Permutation pi = Permutation::random(k, rng);
        note(compile_in_block_permutation(code, pi, 0, blocks, blocks, seed), pad(from_permutation(pi), 1));
        c.bound = bound_in_block_permutation(r);
        c.bound_name = "in-block permutation";
    } else if (target == "multiblock-permutation") {
        Permutation pi = Permutation::random(blocks * k, rng);
        note(compile_multiblock_permutation(code, pi, blocks, seed), from_permutation(pi));
        c.bound = bound_multiblock_permutation(r);
        c.bound_name = "multi-block permutation";
    } else if (target == "diagonal") {
        BitMatrix a = BitMatrix::random(blocks * k, blocks * k, rng);
        BitMatrix s = a + a.transposed();
        for (size_t i = 0; i < s.rows(); i++) {
            s.set(i, i, rng() & 1);
        }
        note(compile_multiblock_diagonal(code, s, blocks, seed), from_diagonal(s));
        c.bound = bound_multiblock_diagonal(r, blocks);
        c.bound_name = "diagonal";
    } else if (target == "cnot") {
        BitMatrix x = BitMatrix::random_invertible(blocks * k, rng);
        MultiblockCnot m = compile_multiblock_cnot(code, x, blocks, seed);
        note(m.sequence, claimed_product(code, m.sequence));
        c.action_ok = c.action_ok && from_permutation(m.residual) * claimed_product(code, m.sequence) == from_cnot(x);
        c.bound = bound_multiblock_cnot(r, blocks);
        c.bound_name = "CNOT circuit (up to a logical permutation)";
    } else if (target == "clifford") {
        SymplecticMatrix chi = random_symplectic(blocks * k, rng);
        CompiledClifford out = compile_clifford(code, chi, blocks, {Decomposition::DzDx, seed, true});
        note(out.sequence, chi);
        c.bound = bound_clifford(r, blocks);
        c.bound_name = "Clifford";
    } else {
        throw std::invalid_argument("unknown cost target '" + target + "'");
    }
    return c;
}

int cmd_cost(const Options &o) {
    require_compilable_r(o.r);
    if (o.target.empty()) {
        throw std::invalid_argument("cost needs --target");
    }
    size_t blocks = o.blocks;
    if ((o.target == "cnot-cross" || o.target == "cz-cross") && blocks < 2) {
        blocks = 2;
    }
    const ShypsCode &code = shyps_code(o.r);
    CostResult c = measure_cost(o.target, code, blocks, o.seed);
    bool ok = c.action_ok && c.depth <= c.bound;
    if (o.format == "json") {
        DepthReport rep{c.depth, c.depth, c.bound, c.bound_name, c.aux_qubits / code.n};
        json j = {{"target", o.target}, {"r", o.r},       {"blocks", blocks}, {"instances", c.instances},
                  {"report", to_json(rep)}, {"aux_qubits", c.aux_qubits}, {"action_ok", c.action_ok}};
        write_output(o, j.dump(2));
    } else {
        std::ostringstream s;
        s << o.target << " on SHYPS(" << o.r << "): depth " << c.depth << " SE rounds, bound " << c.bound << " ("
          << c.bound_name << "), auxiliary qubits " << c.aux_qubits << ", " << c.instances << " instance(s)"
          << (c.action_ok ? "" : ", logical action MISMATCH");
        write_output(o, s.str());
    }
    if (!c.action_ok) {
        return kFailed;
    }
    return ok || o.bound_check == "warn" ? kOk : kFailed;
}

int cmd_schedule(const Options &o) {
    require_compilable_r(o.r);
    const ShypsCode &code = shyps_code(o.r);
    SESchedule s;
    if (o.method == "structure") {
        s = schedule_se_structure(code);
    } else {
        s = schedule_se_coloring(code);
    }
    if (auto e = check_well_formed(s.circuit)) {
        std::cerr << "schedule is not well formed: " << *e << "\n";
        return kFailed;
    }
    if (o.format == "json") {
        json j = {{"r", o.r},           {"method", o.method},         {"depth", s.depth()},
                  {"num_qubits", s.circuit.num_qubits}, {"x_record", s.x_record}, {"z_record", s.z_record},
                  {"circuit", emit(s.circuit)}};
        write_output(o, j.dump(2));
    } else {
        write_output(o, emit(s.circuit));
    }
    return kOk;
}

int cmd_emit(const Options &o) {
    CompiledDocument doc = compiled_from_json(parse_json(read_input(o.input), "compiled document"));
    require_compilable_r(doc.r);
    PhysicalCircuit c = to_circuit(shyps_code(doc.r), doc.sequence);
    if (auto e = check_well_formed(c)) {
        std::cerr << "circuit is not well formed: " << *e << "\n";
        return kFailed;
    }
    write_output(o, emit(c));
    return kOk;
}

int cmd_selftest(const Options &o) {
    AcceptanceConfig cfg = o.full ? AcceptanceConfig::full() : AcceptanceConfig::quick();
    cfg.seed += o.seed;
    bool ok = true;
    for (const auto &r : run_acceptance(cfg, o.criteria)) {
        std::cout << format_result(r) << std::endl;
        ok = ok && r.pass;
    }
    return ok ? kOk : kFailed;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Compiler and verifier for SHYPS subsystem codes"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--r", o.r, "Simplex code rank r")->capture_default_str();
        sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
        sub->add_option("--out", o.out, "Write the output to this file");
        sub->add_option("--format", o.format, "Output format (default json for compile, text otherwise)")
            ->check(CLI::IsMember({"json", "text"}));
    };
    auto add_bound_check = [&](CLI::App *sub) {
        sub->add_option("--bound-check", o.bound_check, "Fail (strict) or only warn when a depth bound is exceeded")
            ->check(CLI::IsMember({"strict", "warn"}))
            ->capture_default_str();
    };

    auto *build = app.add_subcommand("build", "Construct SHYPS(r) and report its parameters");
    add_common(build);
    build->add_flag("--matrices", o.matrices, "Include every matrix in JSON output");

    auto *simplex = app.add_subcommand("simplex", "Classical simplex code utilities");
    simplex->require_subcommand(1);
    auto *dump = simplex->add_subcommand("dump", "Print H, G and P");
    add_common(dump);

    auto *compile = app.add_subcommand("compile", "Compile a logical Clifford into a generator sequence");
    add_common(compile);
    compile->add_option("--blocks", o.blocks, "Number of code blocks")->capture_default_str();
    compile->add_option("--decomposition", o.decomposition, "Clifford factorization")
        ->check(CLI::IsMember({"dz-dx", "dz-cx"}))
        ->capture_default_str();
    compile->add_flag("--random-clifford", o.random_clifford, "Compile a random Clifford drawn from --seed");
    compile->add_option("--target", o.target, "Target JSON file ('-' for stdin)");
    add_bound_check(compile);

    auto *verify = app.add_subcommand("verify", "Verify a compiled document against its target");
    add_common(verify);
    verify->add_option("input", o.input, "Compiled document ('-' for stdin)")->capture_default_str();
    add_bound_check(verify);

    auto *cost = app.add_subcommand("cost", "Measure the depth of a logical operation against its bound");
    add_common(cost);
    cost->add_option("--blocks", o.blocks, "Number of code blocks")->capture_default_str();
    cost->add_option("--target", o.target, "Operation")
        ->check(CLI::IsMember({"cnot-cross", "cnot-in", "cz-cross", "cz-in", "s", "h", "hadamard", "all-hadamard",
                               "permutation", "multiblock-permutation", "diagonal", "cnot", "clifford"}));
    add_bound_check(cost);

    auto *schedule = app.add_subcommand("schedule", "Emit a syndrome extraction round");
    add_common(schedule);
    schedule->add_option("--method", o.method, "Scheduler")
        ->check(CLI::IsMember({"structure", "coloring"}))
        ->capture_default_str();

    auto *emit_cmd = app.add_subcommand("emit", "Emit the physical circuit of a compiled document");
    add_common(emit_cmd);
    emit_cmd->add_option("input", o.input, "Compiled document ('-' for stdin)")->capture_default_str();

    auto *selftest = app.add_subcommand("selftest", "Run the acceptance checks");
    selftest->add_option("--seed", o.seed, "Seed offset")->capture_default_str();
    selftest->add_flag("--full", o.full, "Use the full trial counts");
    selftest->add_option("--criteria", o.criteria, "Criterion ids to run (default all)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kMalformed;
    }

    if (o.format.empty()) {
        o.format = compile->parsed() ? "json" : "text";
    }
    try {
        if (build->parsed()) {
            return cmd_build(o);
        }
        if (dump->parsed()) {
            return cmd_simplex_dump(o);
        }
        if (compile->parsed()) {
            return cmd_compile(o);
        }
        if (verify->parsed()) {
            return cmd_verify(o);
        }
        if (cost->parsed()) {
            return cmd_cost(o);
        }
        if (schedule->parsed()) {
            return cmd_schedule(o);
        }
        if (emit_cmd->parsed()) {
            return cmd_emit(o);
        }
        if (selftest->parsed()) {
            return cmd_selftest(o);
        }
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMalformed;
    } catch (const json::exception &e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return kMalformed;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailed;
    }
    return kMalformed;
}
