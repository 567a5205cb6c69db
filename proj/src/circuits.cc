// SPDX-License-Identifier: Apache-2.0
#include "shyps/circuits.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <sstream>
#include <stdexcept>

namespace shyps {

namespace {

constexpr std::array<std::pair<GateKind, std::string_view>, 12> kGateNames = {{
    {GateKind::CX, "CX"},
    {GateKind::CZ, "CZ"},
    {GateKind::S, "S"},
    {GateKind::H, "H"},
    {GateKind::SX, "SX"},
    {GateKind::XCX, "XCX"},
    {GateKind::X, "X"},
    {GateKind::Z, "Z"},
    {GateKind::PZ, "PZ"},
    {GateKind::PX, "PX"},
    {GateKind::MZ, "MZ"},
    {GateKind::MX, "MX"},
}};

}  // namespace

std::string_view gate_name(GateKind kind) {
    for (const auto &[k, name] : kGateNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

bool is_two_qubit(GateKind kind) {
    return kind == GateKind::CX || kind == GateKind::CZ || kind == GateKind::XCX;
}

bool is_unitary(GateKind kind) {
    return kind != GateKind::PZ && kind != GateKind::PX && kind != GateKind::MZ && kind != GateKind::MX;
}

void PhysicalCircuit::append(const PhysicalCircuit &other) {
    num_qubits = std::max(num_qubits, other.num_qubits);
    layers.insert(layers.end(), other.layers.begin(), other.layers.end());
}

bool PhysicalCircuit::is_unitary() const {
    for (const auto &layer : layers) {
        for (const auto &g : layer.gates) {
            if (!shyps::is_unitary(g.kind)) {
                return false;
            }
        }
    }
    return true;
}

size_t PhysicalCircuit::gate_count() const {
    size_t total = 0;
    for (const auto &layer : layers) {
        total += layer.gates.size();
    }
    return total;
}

std::optional<std::string> check_well_formed(const Layer &layer, size_t num_qubits) {
    if (layer.is_relabel() && !layer.gates.empty()) {
        return "layer mixes gates and a relabelling";
    }
    std::vector<uint8_t> used(num_qubits, 0);
    auto touch = [&](uint32_t q) -> std::optional<std::string> {
        if (q >= num_qubits) {
            return "qubit " + std::to_string(q) + " out of range";
        }
        if (used[q]++) {
            return "qubit " + std::to_string(q) + " used twice in one layer";
        }
        return std::nullopt;
    };
    for (const auto &g : layer.gates) {
        if (auto e = touch(g.a)) {
            return e;
        }
        if (is_two_qubit(g.kind)) {
            if (auto e = touch(g.b)) {
                return e;
            }
        }
    }
    if (layer.is_relabel()) {
        std::vector<uint8_t> dst(num_qubits, 0);
        for (const auto &[i, j] : layer.relabel) {
            if (auto e = touch(i)) {
                return e;
            }
            if (j >= num_qubits || dst[j]++) {
                return "relabel target " + std::to_string(j) + " invalid";
            }
        }
        for (const auto &[i, j] : layer.relabel) {
            if (!used[j]) {
                return "relabel is not a bijection on its support";
            }
        }
    }
    return std::nullopt;
}

std::optional<std::string> check_well_formed(const PhysicalCircuit &circuit) {
    for (size_t t = 0; t < circuit.layers.size(); t++) {
        if (auto e = check_well_formed(circuit.layers[t], circuit.num_qubits)) {
            return "layer " + std::to_string(t) + ": " + *e;
        }
    }
    return std::nullopt;
}

std::string emit(const PhysicalCircuit &circuit) {
    size_t max_index = 0;
    bool any = false;
    for (const auto &layer : circuit.layers) {
        for (const auto &g : layer.gates) {
            max_index = std::max<size_t>(max_index, is_two_qubit(g.kind) ? std::max(g.a, g.b) : g.a);
            any = true;
        }
        for (const auto &[i, j] : layer.relabel) {
            max_index = std::max<size_t>(max_index, std::max(i, j));
            any = true;
        }
    }
    std::ostringstream out;
    if (circuit.num_qubits > (any ? max_index + 1 : 0)) {
        out << "QUBITS " << circuit.num_qubits << '\n';
    }
    for (const auto &layer : circuit.layers) {
        out << "LAYER\n";
        for (const auto &g : layer.gates) {
            out << gate_name(g.kind) << ' ' << g.a;
            if (is_two_qubit(g.kind)) {
                out << ' ' << g.b;
            }
            out << '\n';
        }
        if (layer.is_relabel()) {
            out << "RELABEL";
            for (const auto &[i, j] : layer.relabel) {
                out << ' ' << i << "->" << j;
            }
            out << '\n';
        }
    }
    return out.str();
}

namespace {

uint32_t parse_index(std::string_view tok, size_t line_no) {
    uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad qubit index '" + std::string(tok) + "'");
    }
    return v;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            i++;
        }
        size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') {
            j++;
        }
        if (j > i) {
            out.push_back(line.substr(i, j - i));
        }
        i = j;
    }
    return out;
}

}  // namespace

PhysicalCircuit parse_circuit(std::string_view text) {
    PhysicalCircuit circuit;
    size_t declared = 0;
    size_t max_plus_one = 0;
    size_t line_no = 0;
    while (!text.empty()) {
        size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        line_no++;
        auto toks = split_ws(line);
        if (toks.empty() || toks[0].starts_with('#')) {
            continue;
        }
        auto fail = [&](const std::string &why) {
            throw std::invalid_argument("line " + std::to_string(line_no) + ": " + why);
        };
        if (toks[0] == "QUBITS") {
            if (toks.size() != 2 || !circuit.layers.empty()) {
                fail("QUBITS must precede all layers and take one argument");
            }
            declared = parse_index(toks[1], line_no);
            continue;
        }
        if (toks[0] == "LAYER") {
            if (toks.size() != 1) {
                fail("LAYER takes no arguments");
            }
            circuit.layers.emplace_back();
            continue;
        }
        if (circuit.layers.empty()) {
            fail("instruction outside a LAYER block");
        }
        Layer &layer = circuit.layers.back();
        if (toks[0] == "RELABEL") {
            for (size_t t = 1; t < toks.size(); t++) {
                size_t arrow = toks[t].find("->");
                if (arrow == std::string_view::npos) {
                    fail("relabel entries look like i->j");
                }
                uint32_t i = parse_index(toks[t].substr(0, arrow), line_no);
                uint32_t j = parse_index(toks[t].substr(arrow + 2), line_no);
                layer.relabel.emplace_back(i, j);
                max_plus_one = std::max<size_t>(max_plus_one, std::max(i, j) + 1);
            }
            continue;
        }
        auto it = std::find_if(kGateNames.begin(), kGateNames.end(), [&](const auto &p) { return p.second == toks[0]; });
        if (it == kGateNames.end()) {
            fail("unknown instruction '" + std::string(toks[0]) + "'");
        }
        Gate g{it->first};
        size_t arity = is_two_qubit(g.kind) ? 2 : 1;
        if (toks.size() != arity + 1) {
            fail("wrong number of operands for " + std::string(toks[0]));
        }
        g.a = parse_index(toks[1], line_no);
        max_plus_one = std::max<size_t>(max_plus_one, g.a + 1);
        if (arity == 2) {
            g.b = parse_index(toks[2], line_no);
            max_plus_one = std::max<size_t>(max_plus_one, g.b + 1);
        }
        layer.gates.push_back(g);
    }
    circuit.num_qubits = std::max(declared, max_plus_one);
    if (auto e = check_well_formed(circuit)) {
        throw std::invalid_argument(*e);
    }
    return circuit;
}

// ---------------------------------------------------------------------------------------------------------------
// Heisenberg propagation.

PauliBatch::PauliBatch(const BitMatrix &rows) : num_rows_(rows.rows()), num_qubits_(rows.cols() / 2) {
    if (rows.cols() % 2) {
        throw std::invalid_argument("Pauli rows must have even length");
    }
    BitMatrix t = rows.transposed();
    x_.reserve(num_qubits_);
    z_.reserve(num_qubits_);
    for (size_t q = 0; q < num_qubits_; q++) {
        x_.push_back(t.row(q));
        z_.push_back(t.row(num_qubits_ + q));
    }
}

void PauliBatch::apply(const Gate &g) {
    switch (g.kind) {
        case GateKind::H:
            std::swap(x_[g.a], z_[g.a]);
            break;
        case GateKind::S:
            z_[g.a] ^= x_[g.a];
            break;
        case GateKind::SX:
            x_[g.a] ^= z_[g.a];
            break;
        case GateKind::CX:
            x_[g.b] ^= x_[g.a];
            z_[g.a] ^= z_[g.b];
            break;
        case GateKind::CZ:
            z_[g.a] ^= x_[g.b];
            z_[g.b] ^= x_[g.a];
            break;
        case GateKind::XCX:
            x_[g.a] ^= z_[g.b];
            x_[g.b] ^= z_[g.a];
            break;
        case GateKind::X:
        case GateKind::Z:
            break;
        default:
            throw std::invalid_argument("Heisenberg propagation only accepts unitary gates");
    }
}

void PauliBatch::apply(const Layer &layer) {
    for (const auto &g : layer.gates) {
        apply(g);
    }
    if (layer.is_relabel()) {
        std::vector<BitVec> nx, nz;
        nx.reserve(layer.relabel.size());
        nz.reserve(layer.relabel.size());
        for (const auto &[i, j] : layer.relabel) {
            nx.push_back(x_[i]);
            nz.push_back(z_[i]);
        }
        for (size_t t = 0; t < layer.relabel.size(); t++) {
            x_[layer.relabel[t].second] = std::move(nx[t]);
            z_[layer.relabel[t].second] = std::move(nz[t]);
        }
    }
}

void PauliBatch::apply(const PhysicalCircuit &circuit) {
    if (circuit.num_qubits > num_qubits_) {
        throw std::invalid_argument("circuit is wider than the Pauli rows");
    }
    for (const auto &layer : circuit.layers) {
        apply(layer);
    }
}

BitMatrix PauliBatch::rows() const {
    BitMatrix t(2 * num_qubits_, num_rows_);
    for (size_t q = 0; q < num_qubits_; q++) {
        t.set_row(q, x_[q]);
        t.set_row(num_qubits_ + q, z_[q]);
    }
    return t.transposed();
}

// ---------------------------------------------------------------------------------------------------------------
// Stabilizer tableau.

StabilizerTableau::StabilizerTableau(size_t num_qubits, uint64_t seed)
    : n_(num_qubits), x_(2 * num_qubits, BitVec(num_qubits)), z_(2 * num_qubits, BitVec(num_qubits)),
      sign_(2 * num_qubits, 0), rng_(seed) {
    for (size_t q = 0; q < n_; q++) {
        x_[q].set(q, true);
        z_[n_ + q].set(q, true);
    }
}

namespace {

/// Multiplies (hx, hz) on the right by (ix, iz) in place and returns the exponent of i picked up, mod 4.
unsigned mul_log_i(BitVec &hx, BitVec &hz, const BitVec &ix, const BitVec &iz) {
    uint64_t *x1 = hx.words();
    uint64_t *z1 = hz.words();
    const uint64_t *x2 = ix.words();
    const uint64_t *z2 = iz.words();
    unsigned total = 0;
    for (size_t w = 0; w < hx.num_words(); w++) {
        uint64_t ox = x1[w];
        uint64_t oz = z1[w];
        uint64_t nx = ox ^ x2[w];
        uint64_t nz = oz ^ z2[w];
        uint64_t x1z2 = ox & z2[w];
        uint64_t anti = (x2[w] & oz) ^ x1z2;
        uint64_t cnt2 = (nx ^ nz ^ x1z2) & anti;
        // Each anticommuting position contributes a factor i or i^3; cnt2 marks the i^3 positions.
        total += std::popcount(anti) + 2 * std::popcount(cnt2);
        x1[w] = nx;
        z1[w] = nz;
    }
    return total & 3;
}

}  // namespace

void StabilizerTableau::rowsum(size_t h, size_t i) {
    unsigned log_i = mul_log_i(x_[h], z_[h], x_[i], z_[i]);
    sign_[h] ^= sign_[i] ^ ((log_i >> 1) & 1);
}

void StabilizerTableau::apply_h(size_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        bool x = x_[r].get(q);
        bool z = z_[r].get(q);
        sign_[r] ^= x & z;
        x_[r].set(q, z);
        z_[r].set(q, x);
    }
}

void StabilizerTableau::apply_s(size_t q) {
    for (size_t r = 0; r < 2 * n_; r++) {
        bool x = x_[r].get(q);
        bool z = z_[r].get(q);
        sign_[r] ^= x & z;
        z_[r].set(q, z ^ x);
    }
}

void StabilizerTableau::apply_cx(size_t c, size_t t) {
    for (size_t r = 0; r < 2 * n_; r++) {
        bool xc = x_[r].get(c);
        bool zc = z_[r].get(c);
        bool xt = x_[r].get(t);
        bool zt = z_[r].get(t);
        sign_[r] ^= xc & zt & (xt ^ zc ^ 1);
        x_[r].set(t, xt ^ xc);
        z_[r].set(c, zc ^ zt);
    }
}

bool StabilizerTableau::measure_z(size_t q) {
    size_t p = 2 * n_;
    for (size_t r = n_; r < 2 * n_; r++) {
        if (x_[r].get(q)) {
            p = r;
            break;
        }
    }
    if (p < 2 * n_) {
        for (size_t r = 0; r < 2 * n_; r++) {
            if (r != p && x_[r].get(q)) {
                rowsum(r, p);
            }
        }
        x_[p - n_] = x_[p];
        z_[p - n_] = z_[p];
        sign_[p - n_] = sign_[p];
        x_[p] = BitVec(n_);
        z_[p] = BitVec(n_);
        z_[p].set(q, true);
        sign_[p] = static_cast<uint8_t>(rng_() & 1);
        return sign_[p];
    }
    BitVec sx(n_), sz(n_);
    uint8_t s = 0;
    for (size_t r = 0; r < n_; r++) {
        if (x_[r].get(q)) {
            unsigned log_i = mul_log_i(sx, sz, x_[r + n_], z_[r + n_]);
            s ^= sign_[r + n_] ^ ((log_i >> 1) & 1);
        }
    }
    return s;
}

bool StabilizerTableau::measure_x(size_t q) {
    apply_h(q);
    bool m = measure_z(q);
    apply_h(q);
    return m;
}

std::optional<bool> StabilizerTableau::peek(const BitVec &x, const BitVec &z) const {
    for (size_t r = n_; r < 2 * n_; r++) {
        if (x.dot(z_[r]) ^ z.dot(x_[r])) {
            return std::nullopt;
        }
    }
    BitVec sx(n_), sz(n_);
    uint8_t s = 0;
    for (size_t r = 0; r < n_; r++) {
        // Destabilizer r anticommutes with P exactly when stabilizer r appears in P's expansion.
        if (x.dot(z_[r]) ^ z.dot(x_[r])) {
            unsigned log_i = mul_log_i(sx, sz, x_[r + n_], z_[r + n_]);
            s ^= sign_[r + n_] ^ ((log_i >> 1) & 1);
        }
    }
    if (sx != x || sz != z) {
        return std::nullopt;
    }
    return s;
}

void StabilizerTableau::apply(const Gate &g) {
    switch (g.kind) {
        case GateKind::H:
            apply_h(g.a);
            break;
        case GateKind::S:
            apply_s(g.a);
            break;
        case GateKind::SX:
            apply_h(g.a);
            apply_s(g.a);
            apply_h(g.a);
            break;
        case GateKind::CX:
            apply_cx(g.a, g.b);
            break;
        case GateKind::CZ:
            apply_h(g.b);
            apply_cx(g.a, g.b);
            apply_h(g.b);
            break;
        case GateKind::XCX:
            apply_h(g.a);
            apply_cx(g.a, g.b);
            apply_h(g.a);
            break;
        case GateKind::X:
            for (size_t r = 0; r < 2 * n_; r++) {
                sign_[r] ^= z_[r].get(g.a);
            }
            break;
        case GateKind::Z:
            for (size_t r = 0; r < 2 * n_; r++) {
                sign_[r] ^= x_[r].get(g.a);
            }
            break;
        case GateKind::PZ:
            if (measure_z(g.a)) {
                apply(Gate{GateKind::X, g.a});
            }
            break;
        case GateKind::PX:
            if (measure_x(g.a)) {
                apply(Gate{GateKind::Z, g.a});
            }
            break;
        case GateKind::MZ:
            measure_z(g.a);
            break;
        case GateKind::MX:
            measure_x(g.a);
            break;
    }
}

void StabilizerTableau::apply(const Layer &layer) {
    for (const auto &g : layer.gates) {
        apply(g);
    }
    if (layer.is_relabel()) {
        std::vector<uint32_t> src(n_);
        for (size_t q = 0; q < n_; q++) {
            src[q] = q;
        }
        for (const auto &[i, j] : layer.relabel) {
            src[j] = i;
        }
        for (size_t r = 0; r < 2 * n_; r++) {
            BitVec nx(n_), nz(n_);
            for (size_t q = 0; q < n_; q++) {
                nx.set(q, x_[r].get(src[q]));
                nz.set(q, z_[r].get(src[q]));
            }
            x_[r] = std::move(nx);
            z_[r] = std::move(nz);
        }
    }
}

std::vector<bool> StabilizerTableau::run(const PhysicalCircuit &circuit) {
    if (circuit.num_qubits > n_) {
        throw std::invalid_argument("circuit is wider than the tableau");
    }
    if (auto e = check_well_formed(circuit)) {
        throw std::invalid_argument(*e);
    }
    std::vector<bool> record;
    for (const auto &layer : circuit.layers) {
        for (const auto &g : layer.gates) {
            if (g.kind == GateKind::MZ) {
                record.push_back(measure_z(g.a));
            } else if (g.kind == GateKind::MX) {
                record.push_back(measure_x(g.a));
            } else {
                apply(g);
            }
        }
        if (layer.is_relabel()) {
            Layer only;
            only.relabel = layer.relabel;
            apply(only);
        }
    }
    return record;
}

BitMatrix StabilizerTableau::stabilizers() const {
    BitMatrix out(n_, 2 * n_);
    for (size_t r = 0; r < n_; r++) {
        BitVec row(2 * n_);
        row.write_slice(0, x_[n_ + r]);
        row.write_slice(n_, z_[n_ + r]);
        out.set_row(r, row);
    }
    return out;
}

bool StabilizerTableau::is_valid() const {
    for (size_t i = 0; i < 2 * n_; i++) {
        for (size_t j = i + 1; j < 2 * n_; j++) {
            bool anti = x_[i].dot(z_[j]) ^ z_[i].dot(x_[j]);
            if (anti != (i < n_ && j == i + n_)) {
                return false;
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------------------------------------------
// Logical-action verification.

namespace {

/// Physical (x|z) of the logical Pauli (u|v) over `blocks` blocks, padded to `width` qubits.
BitVec encode_logical(const ShypsCode &code, size_t blocks, const BitVec &uv, size_t width) {
    BitVec out(2 * width);
    size_t k = code.k;
    for (size_t blk = 0; blk < blocks; blk++) {
        BitVec u = uv.slice(blk * k, k);
        BitVec v = uv.slice(blocks * k + blk * k, k);
        out.write_slice(blk * code.n, code.LX.left_mul(u));
        out.write_slice(width + blk * code.n, code.LZ.left_mul(v));
    }
    return out;
}

bool in_gauge(const ShypsCode &code, size_t blocks, const BitVec &p, size_t width, std::string *why) {
    for (size_t blk = 0; blk < blocks; blk++) {
        if (!code.gx_space->contains(p.slice(blk * code.n, code.n))) {
            if (why) {
                *why = "X part outside the gauge group on block " + std::to_string(blk);
            }
            return false;
        }
        if (!code.gz_space->contains(p.slice(width + blk * code.n, code.n))) {
            if (why) {
                *why = "Z part outside the gauge group on block " + std::to_string(blk);
            }
            return false;
        }
    }
    for (size_t q = blocks * code.n; q < width; q++) {
        if (p.get(q) || p.get(width + q)) {
            if (why) {
                *why = "support on auxiliary qubit " + std::to_string(q);
            }
            return false;
        }
    }
    return true;
}

std::string basis_name(size_t row, size_t m) {
    return std::string(row < m ? "X" : "Z") + "_" + std::to_string(row % m);
}

/// Rows: logical basis (2m) then X gauge and Z gauge generators of each block.
BitMatrix logical_and_gauge_rows(const ShypsCode &code, size_t blocks, size_t width) {
    size_t m = blocks * code.k;
    size_t g = code.GX.rows();
    BitMatrix rows(2 * m + 2 * blocks * g, 2 * width);
    for (size_t i = 0; i < 2 * m; i++) {
        rows.set_row(i, encode_logical(code, blocks, BitVec::unit(2 * m, i), width));
    }
    size_t at = 2 * m;
    for (size_t blk = 0; blk < blocks; blk++) {
        for (size_t i = 0; i < g; i++) {
            BitVec row(2 * width);
            row.write_slice(blk * code.n, code.GX.row(i));
            rows.set_row(at++, row);
        }
        for (size_t i = 0; i < g; i++) {
            BitVec row(2 * width);
            row.write_slice(width + blk * code.n, code.GZ.row(i));
            rows.set_row(at++, row);
        }
    }
    return rows;
}

}  // namespace

VerifyReport verify_logical_action(const ShypsCode &code, size_t blocks, const PhysicalCircuit &circuit,
                                   const SymplecticMatrix &claimed) {
    size_t m = blocks * code.k;
    if (claimed.m != m) {
        throw std::invalid_argument("claimed action has the wrong number of logical qubits");
    }
    if (circuit.num_qubits > blocks * code.n) {
        throw std::invalid_argument("circuit uses auxiliary qubits; use verify_with_reference");
    }
    if (!circuit.is_unitary()) {
        throw std::invalid_argument("circuit contains preparations or measurements; use verify_with_reference");
    }
    size_t width = blocks * code.n;
    BitMatrix rows = logical_and_gauge_rows(code, blocks, width);
    PauliBatch batch(rows);
    batch.apply(circuit);
    BitMatrix out = batch.rows();

    VerifyReport report;
    for (size_t i = 0; i < 2 * m; i++) {
        BitVec expected = encode_logical(code, blocks, claimed.mat.row(i), width);
        std::string why;
        if (!in_gauge(code, blocks, out.row(i) ^ expected, width, &why)) {
            report.fail("logical " + basis_name(i, m) + ": " + why);
        }
    }
    for (size_t i = 2 * m; i < rows.rows(); i++) {
        std::string why;
        if (!in_gauge(code, blocks, out.row(i), width, &why)) {
            report.fail("gauge generator " + std::to_string(i - 2 * m) + ": " + why);
        }
    }
    return report;
}

VerifyReport verify_with_reference(const ShypsCode &code, size_t blocks, const PhysicalCircuit &circuit,
                                   const SymplecticMatrix &claimed, uint64_t seed) {
    size_t m = blocks * code.k;
    if (claimed.m != m) {
        throw std::invalid_argument("claimed action has the wrong number of logical qubits");
    }
    size_t data = blocks * code.n;
    size_t width = std::max(circuit.num_qubits, data);
    size_t total = width + data;
    StabilizerTableau tab(total, seed);
    for (size_t q = 0; q < data; q++) {
        tab.apply(Gate{GateKind::H, static_cast<uint32_t>(q)});
        tab.apply(Gate{GateKind::CX, static_cast<uint32_t>(q), static_cast<uint32_t>(width + q)});
    }
    tab.run(circuit);

    // Final stabilizers plus gauge generators on the data side and on the reference side. Logical operators are
    // only defined modulo gauge, on the input as well as the output.
    BitMatrix stab = tab.stabilizers();
    size_t g = code.GX.rows();
    auto gauge_rows = [&](size_t offset) {
        BitMatrix rows(2 * blocks * g, 2 * total);
        for (size_t blk = 0; blk < blocks; blk++) {
            for (size_t i = 0; i < g; i++) {
                BitVec row(2 * total);
                row.write_slice(offset + blk * code.n, code.GX.row(i));
                rows.set_row(2 * (blk * g + i), row);
                BitVec zrow(2 * total);
                zrow.write_slice(total + offset + blk * code.n, code.GZ.row(i));
                rows.set_row(2 * (blk * g + i) + 1, zrow);
            }
        }
        return rows;
    };
    RowSpace space(vstack(vstack(stab, gauge_rows(0)), gauge_rows(width)));

    // Widens a (x|z) vector on `w` qubits into the total register starting at qubit `offset`.
    auto place = [&](const BitVec &p, size_t w, size_t offset, BitVec &dst) {
        for (size_t q : p.slice(0, w).support()) {
            dst.flip(offset + q);
        }
        for (size_t q : p.slice(w, w).support()) {
            dst.flip(total + offset + q);
        }
    };

    VerifyReport report;
    for (size_t i = 0; i < 2 * m; i++) {
        BitVec basis = BitVec::unit(2 * m, i);
        BitVec target(2 * total);
        place(encode_logical(code, blocks, claimed.mat.row(i), data), data, 0, target);
        place(encode_logical(code, blocks, basis, data), data, width, target);
        if (!space.contains(target)) {
            report.fail("logical " + basis_name(i, m) + " not carried to its claimed image");
        }
    }

    // Each output stabilizer must be fixed by the state up to an input stabilizer on the reference, so the syndrome
    // is carried through as a Pauli frame.
    BitMatrix ref_stabilizers(2 * blocks * code.SX.rows(), 2 * total);
    size_t row = 0;
    for (size_t blk = 0; blk < blocks; blk++) {
        for (size_t i = 0; i < code.SX.rows(); i++) {
            BitVec x(2 * total), z(2 * total);
            x.write_slice(width + blk * code.n, code.SX.row(i));
            z.write_slice(total + width + blk * code.n, code.SZ.row(i));
            ref_stabilizers.set_row(row++, x);
            ref_stabilizers.set_row(row++, z);
        }
    }
    RowSpace frame(vstack(stab, ref_stabilizers));
    for (size_t blk = 0; blk < blocks; blk++) {
        for (size_t i = 0; i < code.SX.rows(); i++) {
            BitVec x(2 * total), z(2 * total);
            x.write_slice(blk * code.n, code.SX.row(i));
            z.write_slice(total + blk * code.n, code.SZ.row(i));
            if (!frame.contains(x)) {
                report.fail("X stabilizer " + std::to_string(i) + " of block " + std::to_string(blk) + " not fixed");
            }
            if (!frame.contains(z)) {
                report.fail("Z stabilizer " + std::to_string(i) + " of block " + std::to_string(blk) + " not fixed");
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------------------------------------------
// Scheduling.

std::vector<size_t> bipartite_edge_coloring(size_t left, size_t right,
                                            const std::vector<std::pair<size_t, size_t>> &edges) {
    constexpr size_t kNone = SIZE_MAX;
    size_t nv = left + right;
    std::vector<size_t> degree(nv, 0);
    for (const auto &[u, v] : edges) {
        if (u >= left || v >= right) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        degree[u]++;
        degree[left + v]++;
    }
    size_t delta = edges.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
    // at[v][c]: edge of colour c at vertex v.
    std::vector<std::vector<size_t>> at(nv, std::vector<size_t>(delta, kNone));
    std::vector<size_t> color(edges.size(), kNone);
    auto other = [&](size_t e, size_t v) { return edges[e].first == v ? left + edges[e].second : edges[e].first; };
    auto free_color = [&](size_t v) {
        for (size_t c = 0; c < delta; c++) {
            if (at[v][c] == kNone) {
                return c;
            }
        }
        throw std::logic_error("no free colour");
    };
    for (size_t e = 0; e < edges.size(); e++) {
        size_t u = edges[e].first;
        size_t v = left + edges[e].second;
        size_t a = free_color(u);
        if (at[v][a] != kNone) {
            size_t b = free_color(v);
            // Swap colours a and b along the alternating path leaving v through colour a.
            std::vector<size_t> path;
            size_t w = v;
            size_t c = a;
            while (at[w][c] != kNone) {
                size_t f = at[w][c];
                path.push_back(f);
                w = other(f, w);
                c = c == a ? b : a;
            }
            for (size_t f : path) {
                at[edges[f].first][color[f]] = kNone;
                at[left + edges[f].second][color[f]] = kNone;
            }
            for (size_t f : path) {
                color[f] = color[f] == a ? b : a;
                at[edges[f].first][color[f]] = f;
                at[left + edges[f].second][color[f]] = f;
            }
        }
        color[e] = a;
        at[u][a] = e;
        at[v][a] = e;
    }
    return color;
}

namespace {

/// Eight moments: Z-side preparation, three CNOT layers, measurement, overlapped with the X side which starts
/// its preparation in moment 4. x_layers[t] and z_layers[t] list (aux, data) pairs for CNOT moment t.
SESchedule assemble_se(const ShypsCode &code, const std::vector<std::vector<std::pair<size_t, size_t>>> &x_layers,
                       const std::vector<std::vector<std::pair<size_t, size_t>>> &z_layers) {
    size_t n = code.n;
    size_t g = code.GX.rows();
    SESchedule s;
    s.n = n;
    s.x_aux_offset = n;
    s.z_aux_offset = n + g;
    s.circuit = PhysicalCircuit(n + 2 * g);
    auto u32 = [](size_t v) { return static_cast<uint32_t>(v); };
    std::vector<Layer> layers(8);
    for (size_t i = 0; i < g; i++) {
        layers[0].gates.push_back({GateKind::PZ, u32(s.z_aux_offset + i)});
    }
    for (size_t t = 0; t < 3; t++) {
        for (const auto &[aux, q] : z_layers[t]) {
            layers[1 + t].gates.push_back({GateKind::CX, u32(q), u32(s.z_aux_offset + aux)});
        }
    }
    for (size_t i = 0; i < g; i++) {
        layers[3].gates.push_back({GateKind::PX, u32(s.x_aux_offset + i)});
    }
    s.z_record.resize(g);
    for (size_t i = 0; i < g; i++) {
        s.z_record[i] = i;
        layers[4].gates.push_back({GateKind::MZ, u32(s.z_aux_offset + i)});
    }
    for (size_t t = 0; t < 3; t++) {
        for (const auto &[aux, q] : x_layers[t]) {
            layers[4 + t].gates.push_back({GateKind::CX, u32(s.x_aux_offset + aux), u32(q)});
        }
    }
    s.x_record.resize(g);
    for (size_t i = 0; i < g; i++) {
        s.x_record[i] = g + i;
        layers[7].gates.push_back({GateKind::MX, u32(s.x_aux_offset + i)});
    }
    s.circuit.layers = std::move(layers);
    return s;
}

std::vector<std::vector<std::pair<size_t, size_t>>> color_tanner(const BitMatrix &checks) {
    std::vector<std::pair<size_t, size_t>> edges;
    for (size_t i = 0; i < checks.rows(); i++) {
        for (size_t q : checks.row(i).support()) {
            edges.emplace_back(i, q);
        }
    }
    auto color = bipartite_edge_coloring(checks.rows(), checks.cols(), edges);
    size_t num_colors = color.empty() ? 0 : *std::max_element(color.begin(), color.end()) + 1;
    std::vector<std::vector<std::pair<size_t, size_t>>> layers(std::max<size_t>(num_colors, 3));
    for (size_t e = 0; e < edges.size(); e++) {
        layers[color[e]].push_back(edges[e]);
    }
    return layers;
}

}  // namespace

SESchedule schedule_se_structure(const ShypsCode &code) {
    size_t nr = code.nr;
    const std::array<size_t, 3> offsets = {0, code.simplex.a, code.simplex.b};
    std::vector<std::vector<std::pair<size_t, size_t>>> x_layers(3), z_layers(3);
    for (size_t t = 0; t < 3; t++) {
        for (size_t i = 0; i < nr; i++) {
            for (size_t j = 0; j < nr; j++) {
                size_t gauge = i * nr + j;
                x_layers[t].emplace_back(gauge, ((i + offsets[t]) % nr) * nr + j);
                z_layers[t].emplace_back(gauge, i * nr + (j + offsets[t]) % nr);
            }
        }
    }
    return assemble_se(code, x_layers, z_layers);
}

SESchedule schedule_se_coloring(const ShypsCode &code) {
    auto x_layers = color_tanner(code.GX);
    auto z_layers = color_tanner(code.GZ);
    if (x_layers.size() != 3 || z_layers.size() != 3) {
        throw std::logic_error("gauge Tanner graph is not 3-colourable");
    }
    return assemble_se(code, x_layers, z_layers);
}

BitVec aggregate_x_stabilizers(const ShypsCode &code, const BitVec &gauge_outcomes) {
    if (gauge_outcomes.size() != code.GX.rows()) {
        throw std::invalid_argument("expected one outcome per X gauge generator");
    }
    static thread_local std::vector<std::pair<size_t, BitMatrix>> cache;
    for (const auto &[r, m] : cache) {
        if (r == code.r) {
            return m.right_mul(gauge_outcomes);
        }
    }
    cache.emplace_back(code.r, kron(BitMatrix::identity(code.nr), code.simplex.G));
    return cache.back().second.right_mul(gauge_outcomes);
}

BitVec aggregate_z_stabilizers(const ShypsCode &code, const BitVec &gauge_outcomes) {
    if (gauge_outcomes.size() != code.GZ.rows()) {
        throw std::invalid_argument("expected one outcome per Z gauge generator");
    }
    static thread_local std::vector<std::pair<size_t, BitMatrix>> cache;
    for (const auto &[r, m] : cache) {
        if (r == code.r) {
            return m.right_mul(gauge_outcomes);
        }
    }
    cache.emplace_back(code.r, kron(code.simplex.G, BitMatrix::identity(code.nr)));
    return cache.back().second.right_mul(gauge_outcomes);
}

std::optional<std::pair<size_t, size_t>> check_diag_circuit_distance(const ShypsCode &code, const BitMatrix &rho) {
    size_t nr = code.nr;
    for (size_t q = 0; q < rho.rows(); q++) {
        for (size_t c : rho.row(q).support()) {
            if (c <= q) {
                continue;
            }
            if (q / nr == c / nr || q % nr == c % nr) {
                return std::make_pair(q, c);
            }
        }
    }
    return std::nullopt;
}

}  // namespace shyps
