// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shyps/code.h"
#include "shyps/gf2.h"
#include "shyps/symplectic.h"

namespace shyps {

/// SX = H·S·H and XCX = (H⊗H)·CZ·(H⊗H) are the X-basis partners of S and CZ.
enum class GateKind : uint8_t { CX, CZ, S, H, SX, XCX, X, Z, PZ, PX, MZ, MX };

std::string_view gate_name(GateKind kind);
bool is_two_qubit(GateKind kind);
bool is_unitary(GateKind kind);

struct Gate {
    GateKind kind;
    uint32_t a = 0;
    uint32_t b = 0;
    bool operator==(const Gate &o) const = default;
};

/// One time step. A layer either holds gates or is a pure relabelling, where each pair (i, j)
/// moves the contents of qubit i to qubit j.
struct Layer {
    std::vector<Gate> gates;
    std::vector<std::pair<uint32_t, uint32_t>> relabel;

    bool is_relabel() const { return !relabel.empty(); }
    bool operator==(const Layer &o) const = default;
};

struct PhysicalCircuit {
    size_t num_qubits = 0;
    std::vector<Layer> layers;

    explicit PhysicalCircuit(size_t num_qubits = 0) : num_qubits(num_qubits) {}
    void append(const PhysicalCircuit &other);
    bool is_unitary() const;
    size_t gate_count() const;
    bool operator==(const PhysicalCircuit &o) const = default;
};

/// Null if every layer touches each qubit at most once and every relabel is a bijection on its support;
/// otherwise a description of the first violation.
std::optional<std::string> check_well_formed(const PhysicalCircuit &circuit);
std::optional<std::string> check_well_formed(const Layer &layer, size_t num_qubits);

std::string emit(const PhysicalCircuit &circuit);
/// Inverse of emit; throws std::invalid_argument on malformed text.
PhysicalCircuit parse_circuit(std::string_view text);

/// Heisenberg-picture propagation of many Pauli rows at once, stored column-wise per qubit.
/// Signs are not tracked; only unitary gates and relabellings are accepted.
class PauliBatch {
  public:
    /// Rows are (x|z) vectors of length 2·num_qubits.
    explicit PauliBatch(const BitMatrix &rows);
    void apply(const Gate &gate);
    void apply(const Layer &layer);
    void apply(const PhysicalCircuit &circuit);
    BitMatrix rows() const;

  private:
    size_t num_rows_;
    size_t num_qubits_;
    std::vector<BitVec> x_, z_;
};

/// Stabilizer state in the Aaronson–Gottesman representation: rows [0, n) destabilizers, [n, 2n) stabilizers.
class StabilizerTableau {
  public:
    /// The all-|0⟩ state.
    explicit StabilizerTableau(size_t num_qubits, uint64_t seed = 0);
    size_t num_qubits() const { return n_; }

    void apply(const Gate &gate);
    void apply(const Layer &layer);
    /// Measurement outcomes in program order.
    std::vector<bool> run(const PhysicalCircuit &circuit);

    bool measure_z(size_t q);
    bool measure_x(size_t q);
    /// The sign bit of ±P if ±P is in the stabilizer group; std::nullopt if P is random.
    std::optional<bool> peek(const BitVec &x, const BitVec &z) const;
    /// Stabilizer generators as (x|z) rows, without signs.
    BitMatrix stabilizers() const;
    bool is_valid() const;

  private:
    void rowsum(size_t h, size_t i);
    void apply_h(size_t q);
    void apply_s(size_t q);
    void apply_cx(size_t c, size_t t);

    size_t n_;
    std::vector<BitVec> x_, z_;
    std::vector<uint8_t> sign_;
    std::mt19937_64 rng_;
};

struct VerifyReport {
    bool pass = true;
    std::vector<std::string> mismatches;
    void fail(std::string why) {
        pass = false;
        mismatches.push_back(std::move(why));
    }
};

/// The data of logical block j occupies physical qubits [j·n, (j+1)·n).
/// Checks the circuit maps every logical X and Z basis operator to its claimed image modulo gauge operators and
/// maps every gauge generator into the gauge group. Signs are ignored, i.e. the check holds up to logical Pauli.
VerifyReport verify_logical_action(const ShypsCode &code, size_t blocks, const PhysicalCircuit &circuit,
                                   const SymplecticMatrix &claimed);

/// Verification for circuits with preparations and measurements. Each data qubit is entangled with a reference
/// qubit, the circuit runs on a tableau, and each logical basis operator P must satisfy claimed(P)⊗P ∈
/// stabilizers·gauge, with gauge allowed on both sides. Every output stabilizer of the code must be fixed up to an
/// input stabilizer on the reference. Qubits beyond the data blocks are auxiliary.
VerifyReport verify_with_reference(const ShypsCode &code, size_t blocks, const PhysicalCircuit &circuit,
                                   const SymplecticMatrix &claimed, uint64_t seed = 0);

/// Colours the edges of a bipartite multigraph with max-degree colours; edge e gets colour result[e].
std::vector<size_t> bipartite_edge_coloring(size_t left, size_t right,
                                            const std::vector<std::pair<size_t, size_t>> &edges);

/// Gauge measurement schedule. Qubits: data [0, n), X auxiliaries [n, 2n), Z auxiliaries [2n, 3n).
/// Auxiliary i measures gauge generator row i of G_X (resp. G_Z).
struct SESchedule {
    PhysicalCircuit circuit;
    size_t n = 0;
    size_t x_aux_offset = 0;
    size_t z_aux_offset = 0;
    /// Measurement record positions of each gauge outcome.
    std::vector<size_t> x_record, z_record;
    size_t depth() const { return circuit.layers.size(); }
};

SESchedule schedule_se_structure(const ShypsCode &code);
SESchedule schedule_se_coloring(const ShypsCode &code);

/// S_X outcomes from G_X outcomes via (I⊗G), S_Z from G_Z via (G⊗I). Throws std::invalid_argument on a length mismatch.
BitVec aggregate_x_stabilizers(const ShypsCode &code, const BitVec &gauge_outcomes);
BitVec aggregate_z_stabilizers(const ShypsCode &code, const BitVec &gauge_outcomes);

/// A CZ of a phase layer joining two qubits in the same grid row or grid column, if any.
/// rho must be a symmetric permutation matrix on n qubits.
std::optional<std::pair<size_t, size_t>> check_diag_circuit_distance(const ShypsCode &code, const BitMatrix &rho);

}  // namespace shyps
