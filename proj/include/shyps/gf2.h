// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace shyps {

class BitMatrix;

/// Packed row vector over GF(2).
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(size_t n);
    static BitVec from_string(std::string_view bits);
    static BitVec random(size_t n, std::mt19937_64 &rng);
    static BitVec unit(size_t n, size_t i);

    size_t size() const { return n_; }
    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(size_t i, bool v) {
        uint64_t m = uint64_t{1} << (i & 63);
        if (v) {
            words_[i >> 6] |= m;
        } else {
            words_[i >> 6] &= ~m;
        }
    }
    void flip(size_t i) { words_[i >> 6] ^= uint64_t{1} << (i & 63); }

    BitVec &operator^=(const BitVec &other);
    BitVec operator^(const BitVec &other) const;
    BitVec &operator&=(const BitVec &other);
    bool operator==(const BitVec &other) const = default;

    bool is_zero() const;
    size_t weight() const;
    bool dot(const BitVec &other) const;
    std::optional<size_t> first_one() const;
    std::vector<size_t> support() const;
    BitVec slice(size_t start, size_t len) const;
    void write_slice(size_t start, const BitVec &src);
    std::string str() const;

    uint64_t *words() { return words_.data(); }
    const uint64_t *words() const { return words_.data(); }
    size_t num_words() const { return words_.size(); }

  private:
    size_t n_ = 0;
    std::vector<uint64_t> words_;
};

/// Dense row-major bit matrix; each row occupies a whole number of 64-bit words.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(size_t rows, size_t cols);
    static BitMatrix identity(size_t n);
    static BitMatrix from_strings(const std::vector<std::string> &rows);
    static BitMatrix from_rows(const std::vector<BitVec> &rows);
    static BitMatrix random(size_t rows, size_t cols, std::mt19937_64 &rng);
    static BitMatrix random_invertible(size_t n, std::mt19937_64 &rng);
    static BitMatrix single(size_t rows, size_t cols, size_t i, size_t j);
    static BitMatrix diagonal(const BitVec &d);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    size_t stride() const { return stride_; }
    bool get(size_t i, size_t j) const { return (bits_[i * stride_ + (j >> 6)] >> (j & 63)) & 1; }
    void set(size_t i, size_t j, bool v) {
        uint64_t &w = bits_[i * stride_ + (j >> 6)];
        uint64_t m = uint64_t{1} << (j & 63);
        w = v ? (w | m) : (w & ~m);
    }
    void flip(size_t i, size_t j) { bits_[i * stride_ + (j >> 6)] ^= uint64_t{1} << (j & 63); }

    uint64_t *row_ptr(size_t i) { return bits_.data() + i * stride_; }
    const uint64_t *row_ptr(size_t i) const { return bits_.data() + i * stride_; }
    void xor_row(size_t dst, size_t src);
    void swap_rows(size_t a, size_t b);
    BitVec row(size_t i) const;
    BitVec col(size_t j) const;
    void set_row(size_t i, const BitVec &v);
    void xor_into_row(size_t i, const BitVec &v);
    size_t row_weight(size_t i) const;
    size_t col_weight(size_t j) const;

    BitMatrix transposed() const;
    BitMatrix operator+(const BitMatrix &other) const;
    BitMatrix &operator+=(const BitMatrix &other);
    BitMatrix operator*(const BitMatrix &other) const;
    BitVec left_mul(const BitVec &v) const;   // v·M
    BitVec right_mul(const BitVec &v) const;  // M·v^T as a vector
    bool operator==(const BitMatrix &other) const;
    bool operator!=(const BitMatrix &other) const { return !(*this == other); }

    bool is_zero() const;
    bool is_symmetric() const;
    bool is_diagonal() const;
    bool is_identity() const;
    bool is_upper_triangular() const;
    size_t weight() const;
    BitMatrix block(size_t r0, size_t c0, size_t nr, size_t nc) const;
    void set_block(size_t r0, size_t c0, const BitMatrix &b);
    std::string str() const;

  private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    size_t stride_ = 0;
    std::vector<uint64_t> bits_;
};

BitMatrix kron(const BitMatrix &a, const BitMatrix &b);
BitMatrix hstack(const BitMatrix &a, const BitMatrix &b);
BitMatrix vstack(const BitMatrix &a, const BitMatrix &b);
BitMatrix block_diag(const BitMatrix &a, const BitMatrix &b);

size_t rank(const BitMatrix &m);
bool is_invertible(const BitMatrix &m);
std::optional<BitMatrix> try_invert(const BitMatrix &m);
/// Throws std::domain_error on singular input.
BitMatrix invert(const BitMatrix &m);
/// Returns some x (as a column, encoded as a BitVec) with A·x = b; std::nullopt if inconsistent.
std::optional<BitVec> try_solve(const BitMatrix &a, const BitVec &b);
BitVec solve(const BitMatrix &a, const BitVec &b);
/// Basis of {x : A·x = 0}, one vector per row of the result.
BitMatrix kernel(const BitMatrix &a);
/// Reduced row echelon form with pivot columns.
BitMatrix rref(const BitMatrix &m, std::vector<size_t> *pivots = nullptr);

/// Row space with membership and coordinate queries against the original generating rows.
class RowSpace {
  public:
    RowSpace() = default;
    explicit RowSpace(const BitMatrix &generators);
    size_t dim() const { return basis_.size(); }
    size_t ambient() const { return cols_; }
    BitVec reduce(const BitVec &v) const;
    bool contains(const BitVec &v) const { return reduce(v).is_zero(); }
    bool contains_rows(const BitMatrix &m) const;
    /// Coefficients c over the generating rows with c·generators = v, if v lies in the space.
    std::optional<BitVec> coordinates(const BitVec &v) const;

  private:
    size_t cols_ = 0;
    size_t num_generators_ = 0;
    std::vector<BitVec> basis_;
    std::vector<BitVec> combos_;
    std::vector<size_t> pivots_;
};

/// Permutation in one-line notation. Its matrix has (i,j)=1 iff i=σ(j).
class Permutation {
  public:
    Permutation() = default;
    explicit Permutation(std::vector<uint32_t> images);
    static Permutation identity(size_t n);
    static Permutation from_matrix(const BitMatrix &m);
    /// Grid transpose on an a×a grid: (i,j) ↦ (j,i) with index i·a+j.
    static Permutation tau(size_t a);
    static Permutation cycle(size_t n);  // 0→1→…→n−1→0
    static Permutation random(size_t n, std::mt19937_64 &rng);

    size_t size() const { return images_.size(); }
    uint32_t operator()(size_t i) const { return images_[i]; }
    const std::vector<uint32_t> &images() const { return images_; }
    Permutation inverse() const;
    bool is_identity() const;
    bool is_involution() const;
    BitMatrix matrix() const;
    /// Matrix R with R[i][σ(i)] = 1, i.e. the map x ↦ x·R moves entry i to position σ(i).
    BitMatrix row_action_matrix() const { return inverse().matrix(); }
    std::vector<std::vector<uint32_t>> cycles() const;
    bool operator==(const Permutation &other) const = default;
    std::string str() const;

  private:
    std::vector<uint32_t> images_;
};

/// (a∘b)(x) = a(b(x)); matrix(a∘b) = matrix(a)·matrix(b).
Permutation compose(const Permutation &a, const Permutation &b);
/// (i·n2 + j) ↦ a(i)·n2 + b(j).
Permutation kron(const Permutation &a, const Permutation &b);

struct PLU {
    Permutation p;
    BitMatrix l;
    BitMatrix u;
};
/// M = P·L·U with L unit lower triangular; throws std::domain_error on singular input.
PLU plu(const BitMatrix &m);

/// Concatenation of the rows of a square matrix.
BitVec flatten(const BitMatrix &m);
BitMatrix unflatten(const BitVec &v, size_t r);
/// Block-reshape of an r²×r² matrix: row i·r+j of the result is flatten of block (i,j).
BitMatrix reshape(const BitMatrix &m);

/// Enumerates GL_r(2) for r ≤ 4; cached.
const std::vector<BitMatrix> &general_linear_group(size_t r);

}  // namespace shyps
