#pragma once

// Dense matrices over a prime field GF(p), p <= 2^16.
//
// Every caching, coding and decoding map in the toolkit is a FieldMatrix.
// Values are immutable once built except through the explicit setters;
// all free functions are pure.  For p = 2 the elimination routines run on
// bit-packed rows; results are identical to the unpacked path.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lincache/errors.hpp"

namespace lincache {

using Residue = std::uint32_t;

constexpr std::uint32_t kMaxModulus = 1u << 16;

// Arithmetic context for one prime modulus.  Instances are shared and
// never mutated after construction.
class PrimeField {
public:
    // Throws InvalidArgument unless p is a prime in [2, 2^16].
    static std::shared_ptr<const PrimeField> get(std::uint32_t p);

    std::uint32_t modulus() const noexcept { return p_; }

    Residue add(Residue a, Residue b) const noexcept {
        Residue s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    Residue sub(Residue a, Residue b) const noexcept { return a >= b ? a - b : a + p_ - b; }
    Residue neg(Residue a) const noexcept { return a == 0 ? 0 : p_ - a; }
    Residue mul(Residue a, Residue b) const noexcept {
        return static_cast<Residue>((static_cast<std::uint64_t>(a) * b) % p_);
    }
    // Precondition: a != 0.
    Residue inv(Residue a) const noexcept { return inverse_[a]; }

    explicit PrimeField(std::uint32_t p);

private:
    std::uint32_t p_;
    std::vector<Residue> inverse_;
};

bool is_prime(std::uint32_t n) noexcept;

class FieldMatrix {
public:
    FieldMatrix() : FieldMatrix(2, 0, 0) {}
    FieldMatrix(std::uint32_t p, std::size_t rows, std::size_t cols);

    static FieldMatrix identity(std::uint32_t p, std::size_t n);
    // Row i is the unit vector e_{indices[i]} of length cols.
    static FieldMatrix unit_rows(std::uint32_t p, std::size_t cols, std::span<const std::size_t> indices);
    // Entries are reduced mod p.  All rows must have equal length.
    static FieldMatrix from_rows(std::uint32_t p, const std::vector<std::vector<std::int64_t>>& rows);

    std::uint32_t modulus() const noexcept { return field_->modulus(); }
    const PrimeField& field() const noexcept { return *field_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    Residue at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    void set(std::size_t r, std::size_t c, Residue v);

    std::span<const Residue> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    bool row_is_zero(std::size_t r) const;
    bool is_zero() const;
    // Number of nonzero entries in row r.
    std::size_t row_weight(std::size_t r) const;

    FieldMatrix transpose() const;
    // Rows [first, first + count).
    FieldMatrix row_slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const FieldMatrix& a, const FieldMatrix& b) noexcept {
        return a.modulus() == b.modulus() && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    const std::vector<Residue>& data() const noexcept { return data_; }

private:
    std::shared_ptr<const PrimeField> field_;
    std::size_t rows_;
    std::size_t cols_;
    std::vector<Residue> data_;
};

// One packet: a fixed-length block of field symbols.
using PacketBlock = std::vector<Residue>;

constexpr std::size_t kDefaultBlockSize = 64;

// ---- linear algebra ------------------------------------------------------

std::size_t rank(const FieldMatrix& m);

// Throws SingularMatrix if m is not square or not full rank.
FieldMatrix invert(const FieldMatrix& m);

// Returns D with D * s == t, or nullopt when some row of t is outside the
// row space of s.  Throws DimensionMismatch if column counts differ.
std::optional<FieldMatrix> solve_left(const FieldMatrix& s, const FieldMatrix& t);

// True iff every row of b lies in the row space of a.
bool row_space_contains(const FieldMatrix& a, const FieldMatrix& b);

// Row spaces equal.
bool same_row_space(const FieldMatrix& a, const FieldMatrix& b);

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix mat_add(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix kron(const FieldMatrix& a, const FieldMatrix& b);
FieldMatrix block_diag(std::span<const FieldMatrix> blocks);
FieldMatrix block_diag(std::span<const FieldMatrix> blocks, std::uint32_t p);
// Vertical concatenation.  All blocks must share p and column count.
FieldMatrix stack_rows(std::span<const FieldMatrix> blocks);
FieldMatrix stack_rows(const FieldMatrix& top, const FieldMatrix& bottom);

// Treats `file` as a column of m.cols() blocks; output block i is
// sum_j m[i,j] * file[j], symbol-wise mod p.
std::vector<PacketBlock> mat_apply(const FieldMatrix& m, std::span<const PacketBlock> file);

// Accumulates coeff * src into dst (symbol-wise mod p).
void axpy_block(const PrimeField& f, Residue coeff, const PacketBlock& src, PacketBlock& dst);

namespace detail {
// Elimination on unpacked residues regardless of p.  Used to cross-check the
// bit-packed GF(2) path.
std::size_t rank_unpacked(const FieldMatrix& m);
std::optional<FieldMatrix> solve_left_unpacked(const FieldMatrix& s, const FieldMatrix& t);
} // namespace detail

// ---- text format ---------------------------------------------------------
//
//   p rows cols
//   a00 a01 ...
//   ...

void write_matrix(std::ostream& os, const FieldMatrix& m);
// Reads one matrix from a whitespace-separated token stream.
FieldMatrix read_matrix(std::istream& is);
std::string to_string(const FieldMatrix& m);
FieldMatrix matrix_from_string(const std::string& text);

} // namespace lincache
