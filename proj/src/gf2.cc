// SPDX-License-Identifier: Apache-2.0
#include "shyps/gf2.h"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace shyps {

namespace {

size_t words_for(size_t bits) { return (bits + 63) >> 6; }

uint64_t tail_mask(size_t bits) {
    size_t rem = bits & 63;
    return rem == 0 ? ~uint64_t{0} : (uint64_t{1} << rem) - 1;
}

void require(bool cond, const char *what) {
    if (!cond) {
        throw std::invalid_argument(what);
    }
}

}  // namespace

// ---------------------------------------------------------------- BitVec

BitVec::BitVec(size_t n) : n_(n), words_(words_for(n), 0) {}

BitVec BitVec::from_string(std::string_view bits) {
    BitVec v(bits.size());
    for (size_t i = 0; i < bits.size(); i++) {
        require(bits[i] == '0' || bits[i] == '1', "BitVec::from_string: expected only 0 and 1");
        v.set(i, bits[i] == '1');
    }
    return v;
}

BitVec BitVec::random(size_t n, std::mt19937_64 &rng) {
    BitVec v(n);
    for (auto &w : v.words_) {
        w = rng();
    }
    if (!v.words_.empty()) {
        v.words_.back() &= tail_mask(n);
    }
    return v;
}

BitVec BitVec::unit(size_t n, size_t i) {
    BitVec v(n);
    v.set(i, true);
    return v;
}

BitVec &BitVec::operator^=(const BitVec &other) {
    require(n_ == other.n_, "BitVec: size mismatch");
    for (size_t k = 0; k < words_.size(); k++) {
        words_[k] ^= other.words_[k];
    }
    return *this;
}

BitVec BitVec::operator^(const BitVec &other) const {
    BitVec out = *this;
    out ^= other;
    return out;
}

BitVec &BitVec::operator&=(const BitVec &other) {
    require(n_ == other.n_, "BitVec: size mismatch");
    for (size_t k = 0; k < words_.size(); k++) {
        words_[k] &= other.words_[k];
    }
    return *this;
}

bool BitVec::is_zero() const {
    return std::all_of(words_.begin(), words_.end(), [](uint64_t w) { return w == 0; });
}

size_t BitVec::weight() const {
    size_t total = 0;
    for (uint64_t w : words_) {
        total += std::popcount(w);
    }
    return total;
}

bool BitVec::dot(const BitVec &other) const {
    require(n_ == other.n_, "BitVec::dot: size mismatch");
    uint64_t acc = 0;
    for (size_t k = 0; k < words_.size(); k++) {
        acc ^= words_[k] & other.words_[k];
    }
    return std::popcount(acc) & 1;
}

std::optional<size_t> BitVec::first_one() const {
    for (size_t k = 0; k < words_.size(); k++) {
        if (words_[k]) {
            return k * 64 + std::countr_zero(words_[k]);
        }
    }
    return std::nullopt;
}

std::vector<size_t> BitVec::support() const {
    std::vector<size_t> out;
    for (size_t k = 0; k < words_.size(); k++) {
        uint64_t w = words_[k];
        while (w) {
            out.push_back(k * 64 + std::countr_zero(w));
            w &= w - 1;
        }
    }
    return out;
}

BitVec BitVec::slice(size_t start, size_t len) const {
    require(start + len <= n_, "BitVec::slice: out of range");
    BitVec out(len);
    for (size_t i = 0; i < len; i++) {
        if (get(start + i)) {
            out.set(i, true);
        }
    }
    return out;
}

void BitVec::write_slice(size_t start, const BitVec &src) {
    require(start + src.size() <= n_, "BitVec::write_slice: out of range");
    for (size_t i = 0; i < src.size(); i++) {
        set(start + i, src.get(i));
    }
}

std::string BitVec::str() const {
    std::string s(n_, '0');
    for (size_t i = 0; i < n_; i++) {
        if (get(i)) {
            s[i] = '1';
        }
    }
    return s;
}

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(size_t rows, size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), bits_(rows * words_for(cols), 0) {}

BitMatrix BitMatrix::identity(size_t n) {
    BitMatrix m(n, n);
    for (size_t i = 0; i < n; i++) {
        m.set(i, i, true);
    }
    return m;
}

BitMatrix BitMatrix::from_strings(const std::vector<std::string> &rows) {
    size_t cols = rows.empty() ? 0 : rows[0].size();
    BitMatrix m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); i++) {
        require(rows[i].size() == cols, "BitMatrix::from_strings: ragged rows");
        m.set_row(i, BitVec::from_string(rows[i]));
    }
    return m;
}

BitMatrix BitMatrix::from_rows(const std::vector<BitVec> &rows) {
    size_t cols = rows.empty() ? 0 : rows[0].size();
    BitMatrix m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); i++) {
        m.set_row(i, rows[i]);
    }
    return m;
}

BitMatrix BitMatrix::random(size_t rows, size_t cols, std::mt19937_64 &rng) {
    BitMatrix m(rows, cols);
    for (size_t i = 0; i < rows; i++) {
        m.set_row(i, BitVec::random(cols, rng));
    }
    return m;
}

BitMatrix BitMatrix::random_invertible(size_t n, std::mt19937_64 &rng) {
    while (true) {
        BitMatrix m = random(n, n, rng);
        if (is_invertible(m)) {
            return m;
        }
    }
}

BitMatrix BitMatrix::single(size_t rows, size_t cols, size_t i, size_t j) {
    BitMatrix m(rows, cols);
    m.set(i, j, true);
    return m;
}

BitMatrix BitMatrix::diagonal(const BitVec &d) {
    BitMatrix m(d.size(), d.size());
    for (size_t i : d.support()) {
        m.set(i, i, true);
    }
    return m;
}

void BitMatrix::xor_row(size_t dst, size_t src) {
    uint64_t *d = row_ptr(dst);
    const uint64_t *s = row_ptr(src);
    for (size_t k = 0; k < stride_; k++) {
        d[k] ^= s[k];
    }
}

void BitMatrix::swap_rows(size_t a, size_t b) {
    if (a == b) {
        return;
    }
    std::swap_ranges(row_ptr(a), row_ptr(a) + stride_, row_ptr(b));
}

BitVec BitMatrix::row(size_t i) const {
    BitVec v(cols_);
    std::copy(row_ptr(i), row_ptr(i) + stride_, v.words());
    return v;
}

BitVec BitMatrix::col(size_t j) const {
    BitVec v(rows_);
    for (size_t i = 0; i < rows_; i++) {
        if (get(i, j)) {
            v.set(i, true);
        }
    }
    return v;
}

void BitMatrix::set_row(size_t i, const BitVec &v) {
    require(v.size() == cols_, "BitMatrix::set_row: size mismatch");
    std::copy(v.words(), v.words() + stride_, row_ptr(i));
}

void BitMatrix::xor_into_row(size_t i, const BitVec &v) {
    require(v.size() == cols_, "BitMatrix::xor_into_row: size mismatch");
    uint64_t *d = row_ptr(i);
    for (size_t k = 0; k < stride_; k++) {
        d[k] ^= v.words()[k];
    }
}

size_t BitMatrix::row_weight(size_t i) const {
    size_t total = 0;
    for (size_t k = 0; k < stride_; k++) {
        total += std::popcount(row_ptr(i)[k]);
    }
    return total;
}

size_t BitMatrix::col_weight(size_t j) const {
    size_t total = 0;
    for (size_t i = 0; i < rows_; i++) {
        total += get(i, j);
    }
    return total;
}

BitMatrix BitMatrix::transposed() const {
    BitMatrix t(cols_, rows_);
    for (size_t i = 0; i < rows_; i++) {
        const uint64_t *r = row_ptr(i);
        for (size_t k = 0; k < stride_; k++) {
            uint64_t w = r[k];
            while (w) {
                size_t j = k * 64 + std::countr_zero(w);
                t.set(j, i, true);
                w &= w - 1;
            }
        }
    }
    return t;
}

BitMatrix BitMatrix::operator+(const BitMatrix &other) const {
    BitMatrix out = *this;
    out += other;
    return out;
}

BitMatrix &BitMatrix::operator+=(const BitMatrix &other) {
    require(rows_ == other.rows_ && cols_ == other.cols_, "BitMatrix::add: shape mismatch");
    for (size_t k = 0; k < bits_.size(); k++) {
        bits_[k] ^= other.bits_[k];
    }
    return *this;
}

BitMatrix BitMatrix::operator*(const BitMatrix &other) const {
    require(cols_ == other.rows_, "BitMatrix::mul: shape mismatch");
    BitMatrix out(rows_, other.cols_);
    for (size_t i = 0; i < rows_; i++) {
        const uint64_t *r = row_ptr(i);
        uint64_t *o = out.row_ptr(i);
        for (size_t k = 0; k < stride_; k++) {
            uint64_t w = r[k];
            while (w) {
                size_t j = k * 64 + std::countr_zero(w);
                const uint64_t *src = other.row_ptr(j);
                for (size_t q = 0; q < out.stride_; q++) {
                    o[q] ^= src[q];
                }
                w &= w - 1;
            }
        }
    }
    return out;
}

BitVec BitMatrix::left_mul(const BitVec &v) const {
    require(v.size() == rows_, "BitMatrix::left_mul: size mismatch");
    BitVec out(cols_);
    for (size_t i : v.support()) {
        const uint64_t *src = row_ptr(i);
        for (size_t q = 0; q < stride_; q++) {
            out.words()[q] ^= src[q];
        }
    }
    return out;
}

BitVec BitMatrix::right_mul(const BitVec &v) const {
    require(v.size() == cols_, "BitMatrix::right_mul: size mismatch");
    BitVec out(rows_);
    for (size_t i = 0; i < rows_; i++) {
        uint64_t acc = 0;
        const uint64_t *r = row_ptr(i);
        for (size_t q = 0; q < stride_; q++) {
            acc ^= r[q] & v.words()[q];
        }
        if (std::popcount(acc) & 1) {
            out.set(i, true);
        }
    }
    return out;
}

bool BitMatrix::operator==(const BitMatrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && bits_ == other.bits_;
}

bool BitMatrix::is_zero() const {
    return std::all_of(bits_.begin(), bits_.end(), [](uint64_t w) { return w == 0; });
}

bool BitMatrix::is_symmetric() const { return rows_ == cols_ && transposed() == *this; }

bool BitMatrix::is_diagonal() const {
    if (rows_ != cols_) {
        return false;
    }
    for (size_t i = 0; i < rows_; i++) {
        if (row_weight(i) > (get(i, i) ? 1u : 0u)) {
            return false;
        }
    }
    return true;
}

bool BitMatrix::is_identity() const { return rows_ == cols_ && *this == identity(rows_); }

bool BitMatrix::is_upper_triangular() const {
    for (size_t i = 0; i < rows_; i++) {
        for (size_t j = 0; j < std::min(i, cols_); j++) {
            if (get(i, j)) {
                return false;
            }
        }
    }
    return true;
}

size_t BitMatrix::weight() const {
    size_t total = 0;
    for (uint64_t w : bits_) {
        total += std::popcount(w);
    }
    return total;
}

BitMatrix BitMatrix::block(size_t r0, size_t c0, size_t nr, size_t nc) const {
    require(r0 + nr <= rows_ && c0 + nc <= cols_, "BitMatrix::block: out of range");
    BitMatrix out(nr, nc);
    for (size_t i = 0; i < nr; i++) {
        for (size_t j = 0; j < nc; j++) {
            if (get(r0 + i, c0 + j)) {
                out.set(i, j, true);
            }
        }
    }
    return out;
}

void BitMatrix::set_block(size_t r0, size_t c0, const BitMatrix &b) {
    require(r0 + b.rows_ <= rows_ && c0 + b.cols_ <= cols_, "BitMatrix::set_block: out of range");
    for (size_t i = 0; i < b.rows_; i++) {
        for (size_t j = 0; j < b.cols_; j++) {
            set(r0 + i, c0 + j, b.get(i, j));
        }
    }
}

std::string BitMatrix::str() const {
    std::string s;
    for (size_t i = 0; i < rows_; i++) {
        s += row(i).str();
        s += '\n';
    }
    return s;
}

// ---------------------------------------------------------------- free functions

BitMatrix kron(const BitMatrix &a, const BitMatrix &b) {
    BitMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t i = 0; i < a.rows(); i++) {
        for (size_t j = 0; j < a.cols(); j++) {
            if (a.get(i, j)) {
                out.set_block(i * b.rows(), j * b.cols(), b);
            }
        }
    }
    return out;
}

BitMatrix hstack(const BitMatrix &a, const BitMatrix &b) {
    require(a.rows() == b.rows(), "hstack: row mismatch");
    BitMatrix out(a.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(0, a.cols(), b);
    return out;
}

BitMatrix vstack(const BitMatrix &a, const BitMatrix &b) {
    require(a.cols() == b.cols(), "vstack: column mismatch");
    BitMatrix out(a.rows() + b.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); i++) {
        out.set_row(i, a.row(i));
    }
    for (size_t i = 0; i < b.rows(); i++) {
        out.set_row(a.rows() + i, b.row(i));
    }
    return out;
}

BitMatrix block_diag(const BitMatrix &a, const BitMatrix &b) {
    BitMatrix out(a.rows() + b.rows(), a.cols() + b.cols());
    out.set_block(0, 0, a);
    out.set_block(a.rows(), a.cols(), b);
    return out;
}

BitMatrix rref(const BitMatrix &m, std::vector<size_t> *pivots) {
    BitMatrix a = m;
    std::vector<size_t> piv;
    size_t row = 0;
    for (size_t c = 0; c < a.cols() && row < a.rows(); c++) {
        size_t p = row;
        while (p < a.rows() && !a.get(p, c)) {
            p++;
        }
        if (p == a.rows()) {
            continue;
        }
        a.swap_rows(row, p);
        for (size_t i = 0; i < a.rows(); i++) {
            if (i != row && a.get(i, c)) {
                a.xor_row(i, row);
            }
        }
        piv.push_back(c);
        row++;
    }
    if (pivots) {
        *pivots = std::move(piv);
    }
    return a;
}

size_t rank(const BitMatrix &m) {
    BitMatrix a = m;
    size_t row = 0;
    for (size_t c = 0; c < a.cols() && row < a.rows(); c++) {
        size_t p = row;
        while (p < a.rows() && !a.get(p, c)) {
            p++;
        }
        if (p == a.rows()) {
            continue;
        }
        a.swap_rows(row, p);
        for (size_t i = row + 1; i < a.rows(); i++) {
            if (a.get(i, c)) {
                a.xor_row(i, row);
            }
        }
        row++;
    }
    return row;
}

bool is_invertible(const BitMatrix &m) { return m.rows() == m.cols() && rank(m) == m.rows(); }

std::optional<BitMatrix> try_invert(const BitMatrix &m) {
    require(m.rows() == m.cols(), "invert: matrix must be square");
    size_t n = m.rows();
    BitMatrix a = m;
    BitMatrix inv = BitMatrix::identity(n);
    for (size_t c = 0; c < n; c++) {
        size_t p = c;
        while (p < n && !a.get(p, c)) {
            p++;
        }
        if (p == n) {
            return std::nullopt;
        }
        a.swap_rows(c, p);
        inv.swap_rows(c, p);
        for (size_t i = 0; i < n; i++) {
            if (i != c && a.get(i, c)) {
                a.xor_row(i, c);
                inv.xor_row(i, c);
            }
        }
    }
    return inv;
}

BitMatrix invert(const BitMatrix &m) {
    auto inv = try_invert(m);
    if (!inv) {
        throw std::domain_error("invert: singular matrix");
    }
    return *inv;
}

std::optional<BitVec> try_solve(const BitMatrix &a, const BitVec &b) {
    require(a.rows() == b.size(), "solve: size mismatch");
    BitMatrix aug(a.rows(), a.cols() + 1);
    aug.set_block(0, 0, a);
    for (size_t i = 0; i < a.rows(); i++) {
        aug.set(i, a.cols(), b.get(i));
    }
    std::vector<size_t> piv;
    BitMatrix red = rref(aug, &piv);
    BitVec x(a.cols());
    for (size_t k = 0; k < piv.size(); k++) {
        if (piv[k] == a.cols()) {
            return std::nullopt;
        }
        x.set(piv[k], red.get(k, a.cols()));
    }
    return x;
}

BitVec solve(const BitMatrix &a, const BitVec &b) {
    auto x = try_solve(a, b);
    if (!x) {
        throw std::domain_error("solve: inconsistent system");
    }
    return *x;
}

BitMatrix kernel(const BitMatrix &a) {
    std::vector<size_t> piv;
    BitMatrix red = rref(a, &piv);
    std::vector<bool> is_pivot(a.cols(), false);
    for (size_t p : piv) {
        is_pivot[p] = true;
    }
    std::vector<BitVec> basis;
    for (size_t f = 0; f < a.cols(); f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVec v(a.cols());
        v.set(f, true);
        for (size_t k = 0; k < piv.size(); k++) {
            if (red.get(k, f)) {
                v.set(piv[k], true);
            }
        }
        basis.push_back(v);
    }
    BitMatrix out(basis.size(), a.cols());
    for (size_t i = 0; i < basis.size(); i++) {
        out.set_row(i, basis[i]);
    }
    return out;
}

// ---------------------------------------------------------------- RowSpace

RowSpace::RowSpace(const BitMatrix &generators)
    : cols_(generators.cols()), num_generators_(generators.rows()) {
    for (size_t g = 0; g < generators.rows(); g++) {
        BitVec v = generators.row(g);
        BitVec combo(num_generators_);
        combo.set(g, true);
        for (size_t k = 0; k < basis_.size(); k++) {
            if (v.get(pivots_[k])) {
                v ^= basis_[k];
                combo ^= combos_[k];
            }
        }
        auto lead = v.first_one();
        if (!lead) {
            continue;
        }
        // Keep the basis fully reduced so reduce() needs one pass.
        for (size_t k = 0; k < basis_.size(); k++) {
            if (basis_[k].get(*lead)) {
                basis_[k] ^= v;
                combos_[k] ^= combo;
            }
        }
        basis_.push_back(v);
        combos_.push_back(combo);
        pivots_.push_back(*lead);
    }
}

BitVec RowSpace::reduce(const BitVec &v) const {
    require(v.size() == cols_, "RowSpace::reduce: size mismatch");
    BitVec out = v;
    for (size_t k = 0; k < basis_.size(); k++) {
        if (out.get(pivots_[k])) {
            out ^= basis_[k];
        }
    }
    return out;
}

bool RowSpace::contains_rows(const BitMatrix &m) const {
    for (size_t i = 0; i < m.rows(); i++) {
        if (!contains(m.row(i))) {
            return false;
        }
    }
    return true;
}

std::optional<BitVec> RowSpace::coordinates(const BitVec &v) const {
    BitVec rest = v;
    BitVec combo(num_generators_);
    for (size_t k = 0; k < basis_.size(); k++) {
        if (rest.get(pivots_[k])) {
            rest ^= basis_[k];
            combo ^= combos_[k];
        }
    }
    if (!rest.is_zero()) {
        return std::nullopt;
    }
    return combo;
}

// ---------------------------------------------------------------- Permutation

Permutation::Permutation(std::vector<uint32_t> images) : images_(std::move(images)) {
    std::vector<bool> seen(images_.size(), false);
    for (uint32_t x : images_) {
        require(x < images_.size() && !seen[x], "Permutation: images are not a bijection");
        seen[x] = true;
    }
}

Permutation Permutation::identity(size_t n) {
    std::vector<uint32_t> im(n);
    std::iota(im.begin(), im.end(), 0);
    return Permutation(std::move(im));
}

Permutation Permutation::from_matrix(const BitMatrix &m) {
    require(m.rows() == m.cols(), "Permutation::from_matrix: not square");
    std::vector<uint32_t> im(m.cols());
    for (size_t j = 0; j < m.cols(); j++) {
        require(m.col_weight(j) == 1, "Permutation::from_matrix: not a permutation matrix");
        for (size_t i = 0; i < m.rows(); i++) {
            if (m.get(i, j)) {
                im[j] = static_cast<uint32_t>(i);
            }
        }
    }
    return Permutation(std::move(im));
}

Permutation Permutation::tau(size_t a) {
    std::vector<uint32_t> im(a * a);
    for (size_t i = 0; i < a; i++) {
        for (size_t j = 0; j < a; j++) {
            im[i * a + j] = static_cast<uint32_t>(j * a + i);
        }
    }
    return Permutation(std::move(im));
}

Permutation Permutation::cycle(size_t n) {
    std::vector<uint32_t> im(n);
    for (size_t i = 0; i < n; i++) {
        im[i] = static_cast<uint32_t>((i + 1) % n);
    }
    return Permutation(std::move(im));
}

Permutation Permutation::random(size_t n, std::mt19937_64 &rng) {
    std::vector<uint32_t> im(n);
    std::iota(im.begin(), im.end(), 0);
    std::shuffle(im.begin(), im.end(), rng);
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
    std::vector<uint32_t> inv(images_.size());
    for (size_t i = 0; i < images_.size(); i++) {
        inv[images_[i]] = static_cast<uint32_t>(i);
    }
    return Permutation(std::move(inv));
}

bool Permutation::is_identity() const {
    for (size_t i = 0; i < images_.size(); i++) {
        if (images_[i] != i) {
            return false;
        }
    }
    return true;
}

bool Permutation::is_involution() const {
    for (size_t i = 0; i < images_.size(); i++) {
        if (images_[images_[i]] != i) {
            return false;
        }
    }
    return true;
}

BitMatrix Permutation::matrix() const {
    BitMatrix m(images_.size(), images_.size());
    for (size_t j = 0; j < images_.size(); j++) {
        m.set(images_[j], j, true);
    }
    return m;
}

std::vector<std::vector<uint32_t>> Permutation::cycles() const {
    std::vector<std::vector<uint32_t>> out;
    std::vector<bool> seen(images_.size(), false);
    for (uint32_t s = 0; s < images_.size(); s++) {
        if (seen[s] || images_[s] == s) {
            seen[s] = true;
            continue;
        }
        std::vector<uint32_t> cyc;
        for (uint32_t x = s; !seen[x]; x = images_[x]) {
            seen[x] = true;
            cyc.push_back(x);
        }
        out.push_back(std::move(cyc));
    }
    return out;
}

std::string Permutation::str() const {
    std::ostringstream ss;
    ss << '[';
    for (size_t i = 0; i < images_.size(); i++) {
        ss << (i ? " " : "") << images_[i];
    }
    ss << ']';
    return ss.str();
}

Permutation compose(const Permutation &a, const Permutation &b) {
    require(a.size() == b.size(), "compose: size mismatch");
    std::vector<uint32_t> im(a.size());
    for (size_t i = 0; i < a.size(); i++) {
        im[i] = a(b(i));
    }
    return Permutation(std::move(im));
}

Permutation kron(const Permutation &a, const Permutation &b) {
    size_t n2 = b.size();
    std::vector<uint32_t> im(a.size() * n2);
    for (size_t i = 0; i < a.size(); i++) {
        for (size_t j = 0; j < n2; j++) {
            im[i * n2 + j] = static_cast<uint32_t>(a(i) * n2 + b(j));
        }
    }
    return Permutation(std::move(im));
}

// ---------------------------------------------------------------- PLU

PLU plu(const BitMatrix &m) {
    require(m.rows() == m.cols(), "plu: matrix must be square");
    size_t n = m.rows();
    BitMatrix u = m;
    BitMatrix l(n, n);
    std::vector<uint32_t> order(n);  // row k of u is row order[k] of m
    std::iota(order.begin(), order.end(), 0);
    for (size_t c = 0; c < n; c++) {
        size_t p = c;
        while (p < n && !u.get(p, c)) {
            p++;
        }
        if (p == n) {
            throw std::domain_error("plu: singular matrix");
        }
        u.swap_rows(c, p);
        l.swap_rows(c, p);
        std::swap(order[c], order[p]);
        for (size_t i = c + 1; i < n; i++) {
            if (u.get(i, c)) {
                u.xor_row(i, c);
                l.set(i, c, true);
            }
        }
    }
    for (size_t i = 0; i < n; i++) {
        l.set(i, i, true);
    }
    // Rows satisfy (Q·m) = L·U where Q picks row order[k] into position k; m = Q^{-1}·L·U.
    // Q^{-1} has a one at (order[k], k), i.e. it is the matrix of the permutation k ↦ order[k].
    return PLU{Permutation(order), l, u};
}

// ---------------------------------------------------------------- flatten / reshape

BitVec flatten(const BitMatrix &m) {
    require(m.rows() == m.cols(), "flatten: matrix must be square");
    size_t r = m.rows();
    BitVec v(r * r);
    for (size_t i = 0; i < r; i++) {
        for (size_t j = 0; j < r; j++) {
            if (m.get(i, j)) {
                v.set(i * r + j, true);
            }
        }
    }
    return v;
}

BitMatrix unflatten(const BitVec &v, size_t r) {
    require(v.size() == r * r, "unflatten: size mismatch");
    BitMatrix m(r, r);
    for (size_t k : v.support()) {
        m.set(k / r, k % r, true);
    }
    return m;
}

BitMatrix reshape(const BitMatrix &m) {
    require(m.rows() == m.cols(), "reshape: matrix must be square");
    size_t n = m.rows();
    size_t r = 0;
    while (r * r < n) {
        r++;
    }
    require(r * r == n, "reshape: dimension is not a perfect square");
    BitMatrix out(n, n);
    for (size_t i1 = 0; i1 < r; i1++) {
        for (size_t j1 = 0; j1 < r; j1++) {
            for (size_t i2 = 0; i2 < r; i2++) {
                for (size_t j2 = 0; j2 < r; j2++) {
                    if (m.get(i1 * r + i2, j1 * r + j2)) {
                        out.set(i1 * r + j1, i2 * r + j2, true);
                    }
                }
            }
        }
    }
    return out;
}

const std::vector<BitMatrix> &general_linear_group(size_t r) {
    require(r >= 1 && r <= 4, "general_linear_group: enumeration supported for r ≤ 4");
    static std::mutex mu;
    static std::map<size_t, std::vector<BitMatrix>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(r);
    if (it != cache.end()) {
        return it->second;
    }
    std::vector<BitMatrix> out;
    uint64_t total = uint64_t{1} << (r * r);
    for (uint64_t code = 0; code < total; code++) {
        BitMatrix m(r, r);
        for (size_t k = 0; k < r * r; k++) {
            if ((code >> k) & 1) {
                m.set(k / r, k % r, true);
            }
        }
        if (is_invertible(m)) {
            out.push_back(std::move(m));
        }
    }
    return cache.emplace(r, std::move(out)).first->second;
}

}  // namespace shyps
