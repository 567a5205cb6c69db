// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shyps/circuits.h"
#include "shyps/code.h"
#include "shyps/f2decomp.h"
#include "shyps/symplectic.h"

namespace shyps {

enum class GenKind { TransversalCnot, TransversalCz, PhaseLayer, XPhaseLayer, FoldHadamard, Relabel };

std::string gen_kind_name(GenKind kind);

/// A depth-1 logical generator. The logical parameters h1, h2 fix the claimed action:
///   TransversalCnot  x_{block2} += x_{block}·(h1⊗h2)
///   TransversalCz    Z-diagonal with off-diagonal block (h1⊗h2)·τ_r between block and block2
///   PhaseLayer       Z-diagonal S(h1) = (h1⊗h1^T)·τ_r on block
///   XPhaseLayer      X-diagonal S(h1) on block
///   FoldHadamard     X ↔ Z on block followed by the logical transpose τ_r
///   Relabel          in-block CNOT h1⊗h2 realised by relabelling qubits (depth 0)
struct Generator {
    GenKind kind;
    size_t block = 0;
    size_t block2 = 0;
    BitMatrix h1, h2;
};

Generator gen_cross_block_cnot(const ShypsCode &code, const BitMatrix &h1, const BitMatrix &h2, size_t ctrl,
                               size_t tgt);
Generator gen_cross_block_cz(const ShypsCode &code, const BitMatrix &h1, const BitMatrix &h2, size_t a, size_t b);
Generator gen_diagonal(const ShypsCode &code, const BitMatrix &h, size_t block);
Generator gen_x_diagonal(const ShypsCode &code, const BitMatrix &h, size_t block);
Generator gen_fold_hadamard(const ShypsCode &code, size_t block);
Generator gen_relabel(const ShypsCode &code, const BitMatrix &h1, const BitMatrix &h2, size_t block);

size_t generator_depth(const Generator &g);
/// Claimed logical action on `blocks` data blocks. TransversalCnot may not involve auxiliary blocks here.
SymplecticMatrix claimed_action(const Generator &g, size_t r, size_t blocks);
/// Physical gates for a gate-bearing generator and the qubit relabelling (pairs old→new) for the rest.
std::vector<Gate> physical_gates(const ShypsCode &code, const Generator &g);
std::vector<std::pair<uint32_t, uint32_t>> physical_relabel(const ShypsCode &code, const Generator &g);
/// The physical pairing: π for CNOT and relabel layers, ρ for CZ and phase layers, τ_{n_r} for the fold.
Permutation physical_pairing(const ShypsCode &code, const Generator &g);

/// Teleported in-block CNOT C on `block`: prepare `aux` in logical |0…0⟩ (transversal |0⟩ and one round of
/// X-gauge measurements), apply the cross-block CNOT x_aux += x_block·C through `inner`, measure `block`
/// transversally in the X basis and swap the roles of the two blocks. The logical outcome frame is a Pauli and is not tracked.
struct Teleport {
    size_t block = 0;
    size_t aux = 0;
    BitMatrix C;
    std::vector<Generator> inner;
};

/// One time step: either parallel generators on disjoint blocks or parallel teleports.
struct Step {
    std::vector<Generator> generators;
    std::vector<Teleport> teleports;
    size_t depth() const;
};

struct GeneratorSequence {
    size_t r = 0;
    size_t blocks = 0;
    size_t aux_blocks = 0;
    std::vector<Step> steps;

    GeneratorSequence() = default;
    GeneratorSequence(size_t r, size_t blocks) : r(r), blocks(blocks) {}
    size_t depth() const;
    bool uses_measurement() const;
    void append(const GeneratorSequence &other);
    /// Runs `other` alongside this sequence step by step; the two must act on disjoint blocks.
    void merge_parallel(const GeneratorSequence &other);
};

/// Product of the per-step claimed actions in application order.
SymplecticMatrix claimed_product(const ShypsCode &code, const GeneratorSequence &seq);
/// X-gauge ancillas used per auxiliary block for its logical |0⟩ preparation.
size_t zero_preparation_ancillas(const ShypsCode &code);
/// Physical circuit with data block j at [j·n, (j+1)·n), auxiliary blocks after the data and, for sequences with
/// teleports, the preparation ancillas at the end.
PhysicalCircuit to_circuit(const ShypsCode &code, const GeneratorSequence &seq);
/// Physical verification against `target`: Heisenberg propagation for unitary sequences, the Bell-reference
/// tableau check otherwise.
VerifyReport verify_sequence(const ShypsCode &code, const GeneratorSequence &seq, const SymplecticMatrix &target);

struct DepthReport {
    size_t layers = 0;
    size_t se_rounds = 0;
    std::optional<size_t> bound;
    std::string bound_name;
    size_t aux_blocks = 0;
    bool within_bound() const { return !bound || layers <= *bound; }
};

DepthReport depth_report(const GeneratorSequence &seq, std::optional<size_t> bound, std::string bound_name);

// Depth bounds of the construction.
size_t bound_cross_block_cnot(size_t r);
size_t bound_in_block_diagonal(size_t r);
size_t bound_multiblock_diagonal(size_t r, size_t b);
size_t bound_multiblock_cnot(size_t r, size_t b);
size_t bound_in_block_permutation(size_t r);
size_t bound_multiblock_permutation(size_t r);
size_t bound_all_hadamard(size_t r);
size_t bound_hadamard(size_t r);
size_t bound_single_hadamard(size_t r);
size_t bound_single_s(size_t r);
size_t bound_clifford(size_t r, size_t b);
size_t bound_clifford_dzcx(size_t r, size_t b);

GeneratorSequence compile_cross_block_cnot(const ShypsCode &code, const BitMatrix &a, size_t ctrl, size_t tgt,
                                           size_t blocks, uint64_t seed = 0);
/// Uses auxiliary block index `aux` (≥ blocks); an identity C compiles to the empty sequence and a product
/// h1⊗h2 of invertibles to a relabelling.
GeneratorSequence compile_in_block_cnot(const ShypsCode &code, const BitMatrix &c, size_t block, size_t blocks,
                                        size_t aux, uint64_t seed = 0);

struct MultiblockCnot {
    GeneratorSequence sequence;  // realises L·U
    Permutation residual;        // X = from_permutation(residual)·(L·U) as logical actions
};

MultiblockCnot compile_multiblock_cnot(const ShypsCode &code, const BitMatrix &x, size_t blocks, uint64_t seed = 0);

GeneratorSequence compile_in_block_diagonal(const ShypsCode &code, const BitMatrix &s, size_t block, size_t blocks,
                                            uint64_t seed = 0);
/// Z-diagonal operator whose matrix has off-diagonal block A at (i, j) and A^T at (j, i).
GeneratorSequence compile_cross_block_cz(const ShypsCode &code, const BitMatrix &a, size_t i, size_t j,
                                         size_t blocks, uint64_t seed = 0);
GeneratorSequence compile_multiblock_diagonal(const ShypsCode &code, const BitMatrix &s, size_t blocks,
                                              uint64_t seed = 0);
/// X-diagonal operator [[I,0],[S,I]] by conjugating the Z-diagonal compilation with fold Hadamards.
GeneratorSequence compile_multiblock_x_diagonal(const ShypsCode &code, const BitMatrix &s, size_t blocks,
                                                uint64_t seed = 0);

/// Stages s1, s2, s3 with π = s3∘s2∘s1: s1 and s3 keep grid rows, s2 keeps grid columns.
std::vector<Permutation> grid_route(const Permutation &pi, size_t r);
/// Logical permutation moving logical qubit q of `block` to π(q).
GeneratorSequence compile_in_block_permutation(const ShypsCode &code, const Permutation &pi, size_t block,
                                               size_t blocks, size_t aux, uint64_t seed = 0);
/// Involutions a, b with π = a∘b.
std::pair<Permutation, Permutation> two_involutions(const Permutation &pi);
/// Colours the edges of a multigraph so that edges of one colour share no vertex.
std::vector<size_t> multigraph_edge_coloring(size_t vertices, const std::vector<std::pair<size_t, size_t>> &edges,
                                             uint64_t seed = 0);
GeneratorSequence compile_multiblock_permutation(const ShypsCode &code, const Permutation &p, size_t blocks,
                                                 uint64_t seed = 0);

GeneratorSequence compile_fold_hadamard(const ShypsCode &code, size_t block, size_t blocks);
GeneratorSequence compile_all_hadamard(const ShypsCode &code, size_t block, size_t blocks);
/// H on the logical qubits (i, j) with V[i][j] = 1.
GeneratorSequence compile_hadamard(const ShypsCode &code, const BitMatrix &v, size_t block, size_t blocks,
                                   uint64_t seed = 0);

enum class Decomposition { DzDx, DzCx };

struct CompileOptions {
    Decomposition decomposition = Decomposition::DzDx;
    uint64_t seed = 0;
    bool fast_paths = true;
};

struct CompiledClifford {
    GeneratorSequence sequence;
    DepthReport report;
    std::vector<std::string> audit;  // certificates of the decomposition steps
};

CompiledClifford compile_clifford(const ShypsCode &code, const SymplecticMatrix &chi, size_t blocks,
                                  const CompileOptions &options = {});

}  // namespace shyps
