// SPDX-License-Identifier: Apache-2.0
#include "shyps/compiler_json.h"

#include <stdexcept>

#include "shyps/json_io.h"

namespace shyps {

using nlohmann::json;

namespace {

constexpr const char *kCompiledFormat = "shyps-compiled/1";

void require(bool ok, const std::string &what) {
    if (!ok) {
        throw std::invalid_argument(what);
    }
}

json optional_matrix(const BitMatrix &m) { return m.rows() ? to_json(m) : json(nullptr); }

BitMatrix optional_matrix_from(const json &j, const char *key) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return BitMatrix();
    }
    return matrix_from_json(j.at(key));
}

json teleport_to_json(const Teleport &t) {
    json inner = json::array();
    for (const auto &g : t.inner) {
        inner.push_back(to_json(g));
    }
    return {{"block", t.block}, {"aux", t.aux}, {"C", to_json(t.C)}, {"inner", inner}};
}

Teleport teleport_from_json(const json &j) {
    Teleport t;
    t.block = j.at("block").get<size_t>();
    t.aux = j.at("aux").get<size_t>();
    t.C = matrix_from_json(j.at("C"));
    for (const auto &g : j.at("inner")) {
        t.inner.push_back(generator_from_json(g));
    }
    return t;
}

}  // namespace

json code_to_json(const ShypsCode &code, bool matrices) {
    json j = {
        {"r", code.r},
        {"n", code.n},
        {"k", code.k},
        {"d", code.d},
        {"parameters", {code.n, code.k, code.d}},
        {"check_polynomial", {0, code.simplex.a, code.simplex.b}},
        {"gauge_generators", {{"x", code.GX.rows()}, {"z", code.GZ.rows()}}},
    };
    if (matrices) {
        j["matrices"] = {
            {"H", to_json(code.simplex.H)}, {"G", to_json(code.simplex.G)}, {"P", to_json(code.simplex.P)},
            {"GX", to_json(code.GX)},       {"GZ", to_json(code.GZ)},       {"SX", to_json(code.SX)},
            {"SZ", to_json(code.SZ)},       {"LX", to_json(code.LX)},       {"LZ", to_json(code.LZ)},
        };
    }
    return j;
}

json simplex_to_json(const SimplexCode &code) {
    return {{"r", code.r},
            {"n", code.n},
            {"check_polynomial", {0, code.a, code.b}},
            {"pivots", code.pivots},
            {"H", to_json(code.H)},
            {"G", to_json(code.G)},
            {"P", to_json(code.P)}};
}

json to_json(const SymplecticMatrix &chi) { return {{"m", chi.m}, {"matrix", to_json(chi.mat)}}; }

SymplecticMatrix symplectic_from_json(const json &j) {
    BitMatrix m = matrix_from_json(j.is_object() ? j.at("matrix") : j);
    require(m.rows() == m.cols() && m.rows() % 2 == 0 && m.rows() > 0, "symplectic matrix must be 2m×2m");
    SymplecticMatrix chi(m);
    require(chi.is_symplectic(), "matrix is not symplectic");
    if (j.is_object() && j.contains("m")) {
        require(j.at("m").get<size_t>() == chi.m, "symplectic matrix size disagrees with m");
    }
    return chi;
}

GenKind gen_kind_from_name(const std::string &name) {
    for (GenKind k : {GenKind::TransversalCnot, GenKind::TransversalCz, GenKind::PhaseLayer, GenKind::XPhaseLayer,
                      GenKind::FoldHadamard, GenKind::Relabel}) {
        if (gen_kind_name(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown generator kind '" + name + "'");
}

json to_json(const Generator &g) {
    return {{"kind", gen_kind_name(g.kind)},
            {"block", g.block},
            {"block2", g.block2},
            {"h1", optional_matrix(g.h1)},
            {"h2", optional_matrix(g.h2)}};
}

Generator generator_from_json(const json &j) {
    Generator g{gen_kind_from_name(j.at("kind").get<std::string>())};
    g.block = j.at("block").get<size_t>();
    g.block2 = j.value("block2", size_t{0});
    g.h1 = optional_matrix_from(j, "h1");
    g.h2 = optional_matrix_from(j, "h2");
    return g;
}

json to_json(const GeneratorSequence &seq) {
    json steps = json::array();
    for (const Step &s : seq.steps) {
        json gens = json::array(), tels = json::array();
        for (const auto &g : s.generators) {
            gens.push_back(to_json(g));
        }
        for (const auto &t : s.teleports) {
            tels.push_back(teleport_to_json(t));
        }
        steps.push_back({{"generators", gens}, {"teleports", tels}});
    }
    return {{"r", seq.r}, {"blocks", seq.blocks}, {"aux_blocks", seq.aux_blocks}, {"depth", seq.depth()},
            {"steps", steps}};
}

GeneratorSequence sequence_from_json(const json &j) {
    GeneratorSequence seq(j.at("r").get<size_t>(), j.at("blocks").get<size_t>());
    seq.aux_blocks = j.value("aux_blocks", size_t{0});
    for (const auto &sj : j.at("steps")) {
        Step s;
        for (const auto &g : sj.value("generators", json::array())) {
            s.generators.push_back(generator_from_json(g));
        }
        for (const auto &t : sj.value("teleports", json::array())) {
            s.teleports.push_back(teleport_from_json(t));
        }
        seq.steps.push_back(std::move(s));
    }
    size_t total = seq.blocks + seq.aux_blocks;
    for (const Step &s : seq.steps) {
        for (const auto &g : s.generators) {
            require(g.block < total && g.block2 < total, "generator block index out of range");
        }
        for (const auto &t : s.teleports) {
            require(t.block < total && t.aux < total, "teleport block index out of range");
        }
    }
    return seq;
}

json to_json(const DepthReport &report) {
    return {{"layers", report.layers},
            {"se_rounds", report.se_rounds},
            {"bound", report.bound ? json(*report.bound) : json(nullptr)},
            {"bound_name", report.bound_name},
            {"aux_blocks", report.aux_blocks},
            {"within_bound", report.within_bound()}};
}

DepthReport depth_report_from_json(const json &j) {
    DepthReport r;
    r.layers = j.at("layers").get<size_t>();
    r.se_rounds = j.value("se_rounds", r.layers);
    if (j.contains("bound") && !j.at("bound").is_null()) {
        r.bound = j.at("bound").get<size_t>();
    }
    r.bound_name = j.value("bound_name", std::string());
    r.aux_blocks = j.value("aux_blocks", size_t{0});
    return r;
}

json to_json(const CompiledDocument &doc) {
    return {{"format", kCompiledFormat},
            {"r", doc.r},
            {"blocks", doc.blocks},
            {"target", to_json(doc.target)},
            {"sequence", to_json(doc.sequence)},
            {"report", to_json(doc.report)},
            {"audit", doc.audit}};
}

CompiledDocument compiled_from_json(const json &j) {
    require(j.is_object() && j.value("format", std::string()) == kCompiledFormat,
            std::string("expected a document with format ") + kCompiledFormat);
    CompiledDocument doc;
    doc.r = j.at("r").get<size_t>();
    doc.blocks = j.at("blocks").get<size_t>();
    doc.target = symplectic_from_json(j.at("target"));
    doc.sequence = sequence_from_json(j.at("sequence"));
    doc.report = depth_report_from_json(j.at("report"));
    doc.audit = j.value("audit", std::vector<std::string>());
    require(doc.sequence.r == doc.r && doc.sequence.blocks == doc.blocks, "sequence shape disagrees with header");
    require(doc.target.m == doc.blocks * doc.r * doc.r, "target size disagrees with r and blocks");
    return doc;
}

SymplecticMatrix target_from_json(const json &j, size_t r, size_t blocks) {
    size_t m = blocks * r * r;
    std::string kind = j.at("kind").get<std::string>();
    auto square = [&](const BitMatrix &x) {
        require(x.rows() == m && x.cols() == m, kind + " matrix must be " + std::to_string(m) + "×" + std::to_string(m));
    };
    if (kind == "clifford") {
        SymplecticMatrix chi = symplectic_from_json(j.at("matrix"));
        require(chi.m == m, "clifford target must act on " + std::to_string(m) + " qubits");
        return chi;
    }
    if (kind == "cnot") {
        BitMatrix x = matrix_from_json(j.at("matrix"));
        square(x);
        require(is_invertible(x), "cnot matrix is singular");
        return from_cnot(x);
    }
    if (kind == "diagonal" || kind == "x-diagonal") {
        BitMatrix s = matrix_from_json(j.at("matrix"));
        square(s);
        require(s.is_symmetric(), kind + " matrix must be symmetric");
        return kind == "diagonal" ? from_diagonal(s) : from_x_diagonal(s);
    }
    if (kind == "hadamard") {
        BitVec v = BitVec::from_string(j.at("mask").get<std::string>());
        require(v.size() == m, "hadamard mask must have " + std::to_string(m) + " bits");
        return from_hadamard(v);
    }
    if (kind == "permutation") {
        Permutation p = permutation_from_json(j.at("images"));
        require(p.size() == m, "permutation must have " + std::to_string(m) + " images");
        return from_permutation(p);
    }
    throw std::invalid_argument("unknown target kind '" + kind + "'");
}

}  // namespace shyps
