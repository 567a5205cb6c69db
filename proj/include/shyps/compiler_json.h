// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "shyps/code.h"
#include "shyps/compiler.h"
#include "shyps/symplectic.h"

namespace shyps {

/// Code parameters, the check polynomial and, with `matrices`, every defining matrix as named 0/1 row arrays.
nlohmann::json code_to_json(const ShypsCode &code, bool matrices);
nlohmann::json simplex_to_json(const SimplexCode &code);

nlohmann::json to_json(const SymplecticMatrix &chi);
/// Throws std::invalid_argument unless the matrix is square, of even size and symplectic.
SymplecticMatrix symplectic_from_json(const nlohmann::json &j);

GenKind gen_kind_from_name(const std::string &name);
nlohmann::json to_json(const Generator &g);
Generator generator_from_json(const nlohmann::json &j);
nlohmann::json to_json(const GeneratorSequence &seq);
GeneratorSequence sequence_from_json(const nlohmann::json &j);
nlohmann::json to_json(const DepthReport &report);
DepthReport depth_report_from_json(const nlohmann::json &j);

/// The document written by `compile` and read by `verify` and `emit`.
struct CompiledDocument {
    size_t r = 0;
    size_t blocks = 0;
    SymplecticMatrix target;
    GeneratorSequence sequence;
    DepthReport report;
    std::vector<std::string> audit;
};

nlohmann::json to_json(const CompiledDocument &doc);
CompiledDocument compiled_from_json(const nlohmann::json &j);

/// Logical target from a JSON description on `blocks` blocks of SHYPS(r). Accepted kinds:
///   {"kind": "clifford", "matrix": [...]}           2bk×2bk symplectic matrix
///   {"kind": "cnot", "matrix": [...]}               invertible bk×bk matrix, x ↦ x·X
///   {"kind": "diagonal", "matrix": [...]}           symmetric bk×bk matrix
///   {"kind": "x-diagonal", "matrix": [...]}         symmetric bk×bk matrix
///   {"kind": "hadamard", "mask": "0101..."}         bk bits
///   {"kind": "permutation", "images": [...]}        logical qubit q moves to images[q]
SymplecticMatrix target_from_json(const nlohmann::json &j, size_t r, size_t blocks);

}  // namespace shyps
