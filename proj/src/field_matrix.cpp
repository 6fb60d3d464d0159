#include "lincache/field_matrix.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

namespace lincache {

bool is_prime(std::uint32_t n) noexcept {
    if (n < 2) return false;
    for (std::uint32_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

PrimeField::PrimeField(std::uint32_t p) : p_(p), inverse_(p, 0) {
    if (p > kMaxModulus || !is_prime(p))
        throw InvalidArgument("modulus " + std::to_string(p) + " is not a prime in [2, 65536]");
    inverse_[1] = 1;
    // inv(a) = -(p / a) * inv(p mod a)
    for (std::uint32_t a = 2; a < p; ++a)
        inverse_[a] = static_cast<Residue>(
            (p - static_cast<std::uint64_t>(p / a) * inverse_[p % a] % p) % p);
}

std::shared_ptr<const PrimeField> PrimeField::get(std::uint32_t p) {
    static std::mutex mu;
    static std::map<std::uint32_t, std::shared_ptr<const PrimeField>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    auto f = std::make_shared<const PrimeField>(p);
    cache.emplace(p, f);
    return f;
}

FieldMatrix::FieldMatrix(std::uint32_t p, std::size_t rows, std::size_t cols)
    : field_(PrimeField::get(p)), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

FieldMatrix FieldMatrix::identity(std::uint32_t p, std::size_t n) {
    FieldMatrix m(p, n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1;
    return m;
}

FieldMatrix FieldMatrix::unit_rows(std::uint32_t p, std::size_t cols, std::span<const std::size_t> indices) {
    FieldMatrix m(p, indices.size(), cols);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= cols) throw DimensionMismatch("unit row index out of range");
        m.data_[i * cols + indices[i]] = 1;
    }
    return m;
}

FieldMatrix FieldMatrix::from_rows(std::uint32_t p, const std::vector<std::vector<std::int64_t>>& rows) {
    const std::size_t cols = rows.empty() ? 0 : rows.front().size();
    FieldMatrix m(p, rows.size(), cols);
    const auto mod = static_cast<std::int64_t>(p);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw DimensionMismatch("ragged rows in from_rows");
        for (std::size_t c = 0; c < cols; ++c)
            m.data_[r * cols + c] = static_cast<Residue>(((rows[r][c] % mod) + mod) % mod);
    }
    return m;
}

void FieldMatrix::set(std::size_t r, std::size_t c, Residue v) {
    if (r >= rows_ || c >= cols_) throw DimensionMismatch("set: index out of range");
    data_[r * cols_ + c] = v % modulus();
}

bool FieldMatrix::row_is_zero(std::size_t r) const {
    auto rw = row(r);
    return std::all_of(rw.begin(), rw.end(), [](Residue v) { return v == 0; });
}

bool FieldMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](Residue v) { return v == 0; });
}

std::size_t FieldMatrix::row_weight(std::size_t r) const {
    auto rw = row(r);
    return static_cast<std::size_t>(std::count_if(rw.begin(), rw.end(), [](Residue v) { return v != 0; }));
}

FieldMatrix FieldMatrix::transpose() const {
    FieldMatrix t(modulus(), cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t.data_[c * rows_ + r] = data_[r * cols_ + c];
    return t;
}

FieldMatrix FieldMatrix::row_slice(std::size_t first, std::size_t count) const {
    if (first + count > rows_) throw DimensionMismatch("row_slice out of range");
    FieldMatrix s(modulus(), count, cols_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_), count * cols_, s.data_.begin());
    return s;
}

namespace {

// Incremental echelon basis over GF(p) on unpacked residues.  Each stored
// row carries a tag: its coefficients over the rows originally inserted.
class ResidueBasis {
public:
    ResidueBasis(const PrimeField& f, std::size_t width, std::size_t tag_width)
        : f_(f), width_(width), tag_width_(tag_width) {}

    std::size_t size() const noexcept { return rows_.size(); }

    // Inserts `v` whose tag is the unit vector e_{tag_index}.  Returns true
    // if it was independent of the current basis.
    bool insert(std::vector<Residue> v, std::size_t tag_index) {
        std::vector<Residue> tag(tag_width_, 0);
        if (tag_width_ > 0) tag[tag_index] = 1;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            Residue c = v[pivots_[i]];
            if (c == 0) continue;
            sub_scaled(v, rows_[i], c);
            if (tag_width_ > 0) sub_scaled(tag, tags_[i], c);
        }
        auto it = std::find_if(v.begin(), v.end(), [](Residue x) { return x != 0; });
        if (it == v.end()) return false;
        const auto pivot = static_cast<std::size_t>(it - v.begin());
        const Residue s = f_.inv(*it);
        scale(v, s);
        if (tag_width_ > 0) scale(tag, s);
        rows_.push_back(std::move(v));
        tags_.push_back(std::move(tag));
        pivots_.push_back(pivot);
        return true;
    }

    // Expresses v in terms of the inserted rows.  Returns nullopt if v is
    // outside the span.
    std::optional<std::vector<Residue>> express(std::vector<Residue> v) const {
        std::vector<Residue> acc(tag_width_, 0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            Residue c = v[pivots_[i]];
            if (c == 0) continue;
            sub_scaled(v, rows_[i], c);
            if (tag_width_ > 0) add_scaled(acc, tags_[i], c);
        }
        if (std::any_of(v.begin(), v.end(), [](Residue x) { return x != 0; })) return std::nullopt;
        return acc;
    }

    bool contains(std::vector<Residue> v) const {
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            Residue c = v[pivots_[i]];
            if (c != 0) sub_scaled(v, rows_[i], c);
        }
        return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
    }

private:
    void sub_scaled(std::vector<Residue>& dst, const std::vector<Residue>& src, Residue c) const {
        for (std::size_t k = 0; k < dst.size(); ++k)
            if (src[k] != 0) dst[k] = f_.sub(dst[k], f_.mul(c, src[k]));
    }
    void add_scaled(std::vector<Residue>& dst, const std::vector<Residue>& src, Residue c) const {
        for (std::size_t k = 0; k < dst.size(); ++k)
            if (src[k] != 0) dst[k] = f_.add(dst[k], f_.mul(c, src[k]));
    }
    void scale(std::vector<Residue>& v, Residue s) const {
        for (auto& x : v) x = f_.mul(x, s);
    }

    const PrimeField& f_;
    std::size_t width_;
    std::size_t tag_width_;
    std::vector<std::vector<Residue>> rows_;
    std::vector<std::vector<Residue>> tags_;
    std::vector<std::size_t> pivots_;
};

using Word = std::uint64_t;
constexpr std::size_t kWordBits = 64;

std::size_t words_for(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

std::vector<Word> pack_row(std::span<const Residue> row) {
    std::vector<Word> w(words_for(row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c)
        if (row[c] & 1u) w[c / kWordBits] |= Word{1} << (c % kWordBits);
    return w;
}

std::vector<Residue> unpack_row(const std::vector<Word>& w, std::size_t bits) {
    std::vector<Residue> r(bits, 0);
    for (std::size_t c = 0; c < bits; ++c) r[c] = static_cast<Residue>((w[c / kWordBits] >> (c % kWordBits)) & 1u);
    return r;
}

bool bit(const std::vector<Word>& w, std::size_t c) { return (w[c / kWordBits] >> (c % kWordBits)) & 1u; }

void xor_into(std::vector<Word>& dst, const std::vector<Word>& src) {
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] ^= src[k];
}

bool all_zero(const std::vector<Word>& w) {
    return std::all_of(w.begin(), w.end(), [](Word x) { return x == 0; });
}

// Same contract as ResidueBasis, specialised to GF(2) with 64-bit packed rows.
class PackedBasis {
public:
    PackedBasis(std::size_t width, std::size_t tag_width) : tag_width_(tag_width) { (void)width; }

    std::size_t size() const noexcept { return rows_.size(); }

    bool insert(std::vector<Word> v, std::size_t tag_index) {
        std::vector<Word> tag(words_for(tag_width_), 0);
        if (tag_width_ > 0) tag[tag_index / kWordBits] |= Word{1} << (tag_index % kWordBits);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!bit(v, pivots_[i])) continue;
            xor_into(v, rows_[i]);
            if (tag_width_ > 0) xor_into(tag, tags_[i]);
        }
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (v[k] == 0) continue;
            pivots_.push_back(k * kWordBits + static_cast<std::size_t>(std::countr_zero(v[k])));
            rows_.push_back(std::move(v));
            tags_.push_back(std::move(tag));
            return true;
        }
        return false;
    }

    std::optional<std::vector<Word>> express(std::vector<Word> v) const {
        std::vector<Word> acc(words_for(tag_width_), 0);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!bit(v, pivots_[i])) continue;
            xor_into(v, rows_[i]);
            if (tag_width_ > 0) xor_into(acc, tags_[i]);
        }
        if (!all_zero(v)) return std::nullopt;
        return acc;
    }

    bool contains(std::vector<Word> v) const {
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (bit(v, pivots_[i])) xor_into(v, rows_[i]);
        return all_zero(v);
    }

private:
    std::size_t tag_width_;
    std::vector<std::vector<Word>> rows_;
    std::vector<std::vector<Word>> tags_;
    std::vector<std::size_t> pivots_;
};

std::vector<Residue> row_copy(const FieldMatrix& m, std::size_t r) {
    auto rw = m.row(r);
    return {rw.begin(), rw.end()};
}

std::size_t rank_packed(const FieldMatrix& m) {
    PackedBasis basis(m.cols(), 0);
    for (std::size_t r = 0; r < m.rows() && basis.size() < m.cols(); ++r) basis.insert(pack_row(m.row(r)), 0);
    return basis.size();
}

std::optional<FieldMatrix> solve_left_packed(const FieldMatrix& s, const FieldMatrix& t) {
    PackedBasis basis(s.cols(), s.rows());
    for (std::size_t r = 0; r < s.rows(); ++r) basis.insert(pack_row(s.row(r)), r);
    FieldMatrix d(2, t.rows(), s.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        auto coeffs = basis.express(pack_row(t.row(r)));
        if (!coeffs) return std::nullopt;
        auto unpacked = unpack_row(*coeffs, s.rows());
        for (std::size_t c = 0; c < s.rows(); ++c)
            if (unpacked[c]) d.set(r, c, 1);
    }
    return d;
}

bool contains_packed(const FieldMatrix& a, const FieldMatrix& b) {
    PackedBasis basis(a.cols(), 0);
    for (std::size_t r = 0; r < a.rows(); ++r) basis.insert(pack_row(a.row(r)), 0);
    for (std::size_t r = 0; r < b.rows(); ++r)
        if (!basis.contains(pack_row(b.row(r)))) return false;
    return true;
}

bool contains_unpacked(const FieldMatrix& a, const FieldMatrix& b) {
    ResidueBasis basis(a.field(), a.cols(), 0);
    for (std::size_t r = 0; r < a.rows(); ++r) basis.insert(row_copy(a, r), 0);
    for (std::size_t r = 0; r < b.rows(); ++r)
        if (!basis.contains(row_copy(b, r))) return false;
    return true;
}

void require_same_modulus(const FieldMatrix& a, const FieldMatrix& b, const char* op) {
    if (a.modulus() != b.modulus())
        throw DimensionMismatch(std::string(op) + ": modulus mismatch (" + std::to_string(a.modulus()) + " vs " +
                                std::to_string(b.modulus()) + ")");
}

} // namespace

namespace detail {

std::size_t rank_unpacked(const FieldMatrix& m) {
    ResidueBasis basis(m.field(), m.cols(), 0);
    for (std::size_t r = 0; r < m.rows() && basis.size() < m.cols(); ++r) basis.insert(row_copy(m, r), 0);
    return basis.size();
}

std::optional<FieldMatrix> solve_left_unpacked(const FieldMatrix& s, const FieldMatrix& t) {
    if (s.cols() != t.cols()) throw DimensionMismatch("solve_left: column counts differ");
    require_same_modulus(s, t, "solve_left");
    ResidueBasis basis(s.field(), s.cols(), s.rows());
    for (std::size_t r = 0; r < s.rows(); ++r) basis.insert(row_copy(s, r), r);
    FieldMatrix d(s.modulus(), t.rows(), s.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        auto coeffs = basis.express(row_copy(t, r));
        if (!coeffs) return std::nullopt;
        for (std::size_t c = 0; c < s.rows(); ++c) d.set(r, c, (*coeffs)[c]);
    }
    return d;
}

} // namespace detail

std::size_t rank(const FieldMatrix& m) {
    if (m.modulus() == 2) return rank_packed(m);
    return detail::rank_unpacked(m);
}

std::optional<FieldMatrix> solve_left(const FieldMatrix& s, const FieldMatrix& t) {
    if (s.cols() != t.cols()) throw DimensionMismatch("solve_left: column counts differ");
    require_same_modulus(s, t, "solve_left");
    if (s.modulus() == 2) return solve_left_packed(s, t);
    return detail::solve_left_unpacked(s, t);
}

FieldMatrix invert(const FieldMatrix& m) {
    if (m.rows() != m.cols())
        throw SingularMatrix("invert: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    auto d = solve_left(m, FieldMatrix::identity(m.modulus(), m.rows()));
    if (!d) throw SingularMatrix("invert: matrix is rank deficient");
    return std::move(*d);
}

bool row_space_contains(const FieldMatrix& a, const FieldMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionMismatch("row_space_contains: column counts differ");
    require_same_modulus(a, b, "row_space_contains");
    if (a.modulus() == 2) return contains_packed(a, b);
    return contains_unpacked(a, b);
}

bool same_row_space(const FieldMatrix& a, const FieldMatrix& b) {
    return row_space_contains(a, b) && row_space_contains(b, a);
}

FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_modulus(a, b, "mat_mul");
    if (a.cols() != b.rows())
        throw DimensionMismatch("mat_mul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " * " +
                                std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
    const auto& f = a.field();
    FieldMatrix out(a.modulus(), a.rows(), b.cols());
    std::vector<Residue> acc(b.cols());
    // Row-combination form: the caching and decoding maps are very sparse.
    for (std::size_t i = 0; i < a.rows(); ++i) {
        std::fill(acc.begin(), acc.end(), 0);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Residue c = a.at(i, j);
            if (c == 0) continue;
            auto brow = b.row(j);
            for (std::size_t k = 0; k < b.cols(); ++k)
                if (brow[k] != 0) acc[k] = f.add(acc[k], f.mul(c, brow[k]));
        }
        for (std::size_t k = 0; k < b.cols(); ++k)
            if (acc[k] != 0) out.set(i, k, acc[k]);
    }
    return out;
}

FieldMatrix mat_add(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_modulus(a, b, "mat_add");
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("mat_add: shape mismatch");
    FieldMatrix out(a.modulus(), a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out.set(i, j, a.field().add(a.at(i, j), b.at(i, j)));
    return out;
}

FieldMatrix kron(const FieldMatrix& a, const FieldMatrix& b) {
    require_same_modulus(a, b, "kron");
    const auto& f = a.field();
    FieldMatrix out(a.modulus(), a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const Residue c = a.at(i, j);
            if (c == 0) continue;
            for (std::size_t r = 0; r < b.rows(); ++r)
                for (std::size_t s = 0; s < b.cols(); ++s)
                    if (b.at(r, s) != 0) out.set(i * b.rows() + r, j * b.cols() + s, f.mul(c, b.at(r, s)));
        }
    return out;
}

FieldMatrix block_diag(std::span<const FieldMatrix> blocks, std::uint32_t p) {
    std::size_t rows = 0, cols = 0;
    for (const auto& b : blocks) {
        if (b.modulus() != p) throw DimensionMismatch("block_diag: modulus mismatch");
        rows += b.rows();
        cols += b.cols();
    }
    FieldMatrix out(p, rows, cols);
    std::size_t r0 = 0, c0 = 0;
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < b.cols(); ++c)
                if (b.at(r, c) != 0) out.set(r0 + r, c0 + c, b.at(r, c));
        r0 += b.rows();
        c0 += b.cols();
    }
    return out;
}

FieldMatrix block_diag(std::span<const FieldMatrix> blocks) {
    return block_diag(blocks, blocks.empty() ? 2u : blocks.front().modulus());
}

FieldMatrix stack_rows(std::span<const FieldMatrix> blocks) {
    if (blocks.empty()) return FieldMatrix(2, 0, 0);
    const auto p = blocks.front().modulus();
    const auto cols = blocks.front().cols();
    std::size_t rows = 0;
    for (const auto& b : blocks) {
        if (b.modulus() != p) throw DimensionMismatch("stack_rows: modulus mismatch");
        if (b.cols() != cols) throw DimensionMismatch("stack_rows: column counts differ");
        rows += b.rows();
    }
    FieldMatrix out(p, rows, cols);
    std::size_t r0 = 0;
    for (const auto& b : blocks) {
        for (std::size_t r = 0; r < b.rows(); ++r)
            for (std::size_t c = 0; c < cols; ++c)
                if (b.at(r, c) != 0) out.set(r0 + r, c, b.at(r, c));
        r0 += b.rows();
    }
    return out;
}

FieldMatrix stack_rows(const FieldMatrix& top, const FieldMatrix& bottom) {
    const FieldMatrix pair[] = {top, bottom};
    return stack_rows(std::span<const FieldMatrix>(pair));
}

void axpy_block(const PrimeField& f, Residue coeff, const PacketBlock& src, PacketBlock& dst) {
    if (src.size() != dst.size()) throw DimensionMismatch("packet blocks differ in length");
    if (coeff == 0) return;
    if (f.modulus() == 2) {
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] ^= src[k];
        return;
    }
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = f.add(dst[k], f.mul(coeff, src[k]));
}

std::vector<PacketBlock> mat_apply(const FieldMatrix& m, std::span<const PacketBlock> file) {
    if (file.size() != m.cols())
        throw DimensionMismatch("mat_apply: matrix has " + std::to_string(m.cols()) + " columns, file has " +
                                std::to_string(file.size()) + " packets");
    const std::size_t len = file.empty() ? 0 : file.front().size();
    std::vector<PacketBlock> out(m.rows(), PacketBlock(len, 0));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) axpy_block(m.field(), m.at(i, j), file[j], out[i]);
    return out;
}

void write_matrix(std::ostream& os, const FieldMatrix& m) {
    os << m.modulus() << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) os << ' ';
            os << m.at(r, c);
        }
        os << '\n';
    }
}

namespace {
std::uint64_t read_count(std::istream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) throw ParseError(std::string("unexpected end of input reading ") + what);
    std::uint64_t v = 0;
    std::size_t pos = 0;
    try {
        v = std::stoull(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("expected an integer for ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size() || tok.front() == '-')
        throw ParseError(std::string("expected a non-negative integer for ") + what + ", got '" + tok + "'");
    return v;
}
} // namespace

FieldMatrix read_matrix(std::istream& is) {
    const auto p = read_count(is, "matrix modulus");
    const auto rows = read_count(is, "matrix rows");
    const auto cols = read_count(is, "matrix cols");
    if (p > kMaxModulus || !is_prime(static_cast<std::uint32_t>(p)))
        throw ParseError("matrix modulus " + std::to_string(p) + " is not a supported prime");
    if (rows * cols > (std::uint64_t{1} << 28)) throw ParseError("matrix too large");
    FieldMatrix m(static_cast<std::uint32_t>(p), rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            const auto v = read_count(is, "matrix entry");
            if (v >= p) throw ParseError("matrix entry " + std::to_string(v) + " not reduced mod " + std::to_string(p));
            m.set(r, c, static_cast<Residue>(v));
        }
    return m;
}

std::string to_string(const FieldMatrix& m) {
    std::ostringstream os;
    write_matrix(os, m);
    return os.str();
}

FieldMatrix matrix_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_matrix(is);
}

} // namespace lincache
