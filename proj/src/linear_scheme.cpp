#include "lincache/linear_scheme.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "lincache/parallel.hpp"

namespace lincache {

std::string to_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::size_t integral_product(const Rational& r, std::size_t n, const char* what) {
    const Rational v = r * Rational(static_cast<std::int64_t>(n));
    if (v.denominator() != 1 || v.numerator() < 0)
        throw InvalidArgument(std::string(what) + " = " + to_string(v) + " is not a non-negative integer");
    return static_cast<std::size_t>(v.numerator());
}

void check_shape(const FieldMatrix& m, std::uint32_t p, std::size_t rows, std::size_t cols, std::size_t k,
                 const char* name) {
    if (m.modulus() != p || m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << name << "_" << k << " is " << m.rows() << "x" << m.cols() << " over GF(" << m.modulus()
           << "), expected " << rows << "x" << cols << " over GF(" << p << ")";
        throw DimensionMismatch(os.str());
    }
}

} // namespace

LinearScheme::LinearScheme(std::size_t packets, std::uint32_t p, Rational cache_fraction, Rational nominal_rate,
                           std::vector<UserMatrices> users)
    : packets_(packets), p_(p), cache_fraction_(cache_fraction), nominal_rate_(nominal_rate),
      users_(std::move(users)) {
    (void)PrimeField::get(p);
    if (cache_fraction_ < Rational(0) || cache_fraction_ > Rational(1))
        throw InvalidArgument("cache fraction " + to_string(cache_fraction_) + " outside [0, 1]");
    cached_rows_ = integral_product(cache_fraction_, packets_, "F*M/N");
    signal_rows_ = integral_product(nominal_rate_, packets_, "R*F");
    for (std::size_t k = 0; k < users_.size(); ++k) {
        const auto& u = users_[k];
        check_shape(u.caching, p_, cached_rows_, packets_, k, "S");
        check_shape(u.coding, p_, signal_rows_, packets_, k, "A");
        check_shape(u.decoding, p_, packets_ - cached_rows_, signal_rows_, k, "S'");
    }
}

bool operator==(const UserMatrices& a, const UserMatrices& b) {
    return a.caching == b.caching && a.coding == b.coding && a.decoding == b.decoding;
}

bool operator==(const LinearScheme& a, const LinearScheme& b) {
    return a.packets_ == b.packets_ && a.p_ == b.p_ && a.cache_fraction_ == b.cache_fraction_ &&
           a.nominal_rate_ == b.nominal_rate_ && a.users_ == b.users_;
}

PacketLibrary PacketLibrary::random(std::size_t files, std::size_t packets, std::uint32_t p, std::size_t block_size,
                                    std::uint64_t seed) {
    (void)PrimeField::get(p);
    PacketLibrary lib;
    lib.modulus = p;
    lib.packets = packets;
    lib.block_size = block_size;
    lib.files.assign(files, std::vector<PacketBlock>(packets, PacketBlock(block_size, 0)));
    std::mt19937_64 gen(seed);
    std::uint64_t word = 0;
    int bytes_left = 0;
    for (auto& file : lib.files)
        for (auto& block : file)
            for (auto& sym : block) {
                if (bytes_left == 0) {
                    word = gen();
                    bytes_left = 8;
                }
                sym = static_cast<Residue>(word & 0xffu) % p;
                word >>= 8;
                --bytes_left;
            }
    return lib;
}

VerifyReport verify_scheme(const LinearScheme& sch) {
    const std::size_t K = sch.users();
    const std::size_t F = sch.packets();
    const std::size_t Z = sch.cached_rows();
    std::vector<char> full_rank(K);
    for (std::size_t k = 0; k < K; ++k) full_rank[k] = rank(sch.user(k).caching) == Z;

    const auto identity = FieldMatrix::identity(sch.modulus(), F);
    std::vector<PairCheck> pairs(K * K);
    parallel_for(K * K, [&](std::size_t idx) {
        const std::size_t k = idx / K;
        const std::size_t other = idx % K;
        const auto& u = sch.user(k);
        const FieldMatrix product = mat_mul(u.decoding, sch.user(other).coding);
        const FieldMatrix stacked = stack_rows(u.caching, product);
        PairCheck c;
        c.user = k;
        c.other = other;
        c.rank = rank(stacked);
        c.expected = k == other ? F : Z;
        if (k == other)
            c.subspace_ok = full_rank[k] && row_space_contains(stacked, identity);
        else
            c.subspace_ok = full_rank[k] && row_space_contains(u.caching, product);
        pairs[idx] = c;
    });

    VerifyReport report;
    report.pass = true;
    std::vector<char> rank_user(K, 1), subspace_user(K, 1);
    for (const auto& c : pairs) {
        const bool rank_ok = c.rank == c.expected;
        if (!rank_ok) {
            report.pass = false;
            report.failures.push_back("pair (" + std::to_string(c.user) + "," + std::to_string(c.other) +
                                      "): rank " + std::to_string(c.rank) + ", expected " +
                                      std::to_string(c.expected));
        }
        rank_user[c.user] = rank_user[c.user] && rank_ok;
        subspace_user[c.user] = subspace_user[c.user] && c.subspace_ok;
    }
    // The forms match per user, not per pair: a rank-deficient S_k can still
    // give rank Z against some k', but then the (k, k) pair fails.
    report.formulations_agree = rank_user == subspace_user;
    report.pairs = std::move(pairs);
    return report;
}

std::vector<std::size_t> transmitted_rows(const LinearScheme& sch) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < sch.signal_rows(); ++i) {
        const bool used = std::any_of(sch.all_users().begin(), sch.all_users().end(),
                                      [i](const UserMatrices& u) { return !u.coding.row_is_zero(i); });
        if (used) rows.push_back(i);
    }
    return rows;
}

namespace {
void check_library(const LinearScheme& sch, const PacketLibrary& library) {
    if (library.packets != sch.packets() || library.modulus != sch.modulus())
        throw DimensionMismatch("library has F=" + std::to_string(library.packets) + " over GF(" +
                                std::to_string(library.modulus) + "), scheme expects F=" +
                                std::to_string(sch.packets()) + " over GF(" + std::to_string(sch.modulus()) + ")");
}

void check_demand(const LinearScheme& sch, std::size_t files, const DemandVector& d) {
    if (d.size() != sch.users())
        throw InvalidArgument("demand has " + std::to_string(d.size()) + " entries for " +
                              std::to_string(sch.users()) + " users");
    for (std::size_t k = 0; k < d.size(); ++k)
        if (d[k] >= files)
            throw InvalidArgument("user " + std::to_string(k) + " requests file " + std::to_string(d[k]) +
                                  " of " + std::to_string(files));
}
} // namespace

std::vector<UserCache> place(const LinearScheme& sch, const PacketLibrary& library) {
    check_library(sch, library);
    std::vector<UserCache> caches(sch.users());
    for (std::size_t k = 0; k < sch.users(); ++k) {
        caches[k].per_file.reserve(library.size());
        for (const auto& file : library.files) caches[k].per_file.push_back(mat_apply(sch.user(k).caching, file));
    }
    return caches;
}

Broadcast encode_broadcast(const LinearScheme& sch, const PacketLibrary& library, const DemandVector& d) {
    check_library(sch, library);
    check_demand(sch, library.size(), d);
    Broadcast x;
    x.signal.assign(sch.signal_rows(), PacketBlock(library.block_size, 0));
    const auto& f = *PrimeField::get(sch.modulus());
    for (std::size_t k = 0; k < sch.users(); ++k) {
        const auto& a = sch.user(k).coding;
        const auto& file = library.files[d[k]];
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j) axpy_block(f, a.at(i, j), file[j], x.signal[i]);
    }
    x.transmitted_rows = transmitted_rows(sch);
    return x;
}

UserDecoder::UserDecoder(const LinearScheme& sch, std::size_t user) : p_(sch.modulus()), user_(user) {
    if (user >= sch.users()) throw InvalidArgument("user index out of range");
    const auto& u = sch.user(user);
    transfer_.resize(sch.users());
    for (std::size_t other = 0; other < sch.users(); ++other) {
        if (other == user) continue;
        auto d = solve_left(u.caching, mat_mul(u.decoding, sch.user(other).coding));
        if (!d)
            throw Infeasible("user " + std::to_string(user) + ": S'A_" + std::to_string(other) +
                             " is not in the row space of its caching matrix");
        transfer_[other] = std::move(*d);
    }
    rows_read_ = transmitted_rows(sch);
    decoding_on_rows_ = FieldMatrix(p_, u.decoding.rows(), rows_read_.size());
    for (std::size_t r = 0; r < u.decoding.rows(); ++r)
        for (std::size_t c = 0; c < rows_read_.size(); ++c) decoding_on_rows_.set(r, c, u.decoding.at(r, rows_read_[c]));
    // Reading only transmitted rows is exact when the skipped columns of S'_k
    // face structurally zero rows of X_d, which is the definition of skipped.
    stack_inverse_ = invert(stack_rows(u.caching, mat_mul(u.decoding, u.coding)));
}

std::vector<PacketBlock> UserDecoder::decode(const UserCache& cache, const Broadcast& x,
                                             const DemandVector& d) const {
    if (d.size() != transfer_.size()) throw InvalidArgument("demand length does not match user count");
    for (auto n : d)
        if (n >= cache.per_file.size()) throw InvalidArgument("demand refers to a file outside the cache");
    const auto& f = *PrimeField::get(p_);
    std::vector<PacketBlock> received;
    received.reserve(rows_read_.size());
    for (auto r : rows_read_) {
        if (r >= x.signal.size()) throw DimensionMismatch("broadcast shorter than the scheme's signal");
        received.push_back(x.signal[r]);
    }
    auto residual = mat_apply(decoding_on_rows_, received);
    for (std::size_t other = 0; other < transfer_.size(); ++other) {
        if (other == user_) continue;
        auto known = mat_apply(transfer_[other], cache.per_file[d[other]]);
        for (std::size_t i = 0; i < residual.size(); ++i) axpy_block(f, f.neg(1), known[i], residual[i]);
    }
    std::vector<PacketBlock> stacked = cache.per_file[d[user_]];
    stacked.insert(stacked.end(), residual.begin(), residual.end());
    return mat_apply(stack_inverse_, stacked);
}

std::vector<PacketBlock> decode_user(const LinearScheme& sch, std::size_t user, const UserCache& cache,
                                     const Broadcast& x, const DemandVector& d) {
    return UserDecoder(sch, user).decode(cache, x, d);
}

std::vector<DemandVector> random_demands(std::size_t users, std::size_t files, std::size_t count,
                                         std::uint64_t seed) {
    if (files == 0) throw InvalidArgument("demands need at least one file");
    std::mt19937_64 gen(seed);
    std::vector<DemandVector> out(count, DemandVector(users));
    for (auto& d : out)
        for (auto& x : d) x = static_cast<std::size_t>(gen() % files);
    return out;
}

std::vector<DemandVector> demand_sweep(std::size_t users, std::size_t files, std::uint64_t seed) {
    if (files == 0) throw InvalidArgument("demands need at least one file");
    std::size_t total = 1;
    bool small = true;
    for (std::size_t k = 0; k < users; ++k) {
        total *= files;
        if (total > 4096) {
            small = false;
            break;
        }
    }
    if (small) {
        std::vector<DemandVector> out;
        out.reserve(total);
        DemandVector d(users, 0);
        for (std::size_t i = 0; i < total; ++i) {
            out.push_back(d);
            for (std::size_t k = users; k-- > 0;) {
                if (++d[k] < files) break;
                d[k] = 0;
            }
        }
        return out;
    }
    auto out = random_demands(users, files, 512, seed);
    DemandVector distinct(users);
    for (std::size_t k = 0; k < users; ++k) distinct[k] = k % files;
    out.push_back(std::move(distinct));
    return out;
}

RateReport measured_rate(const LinearScheme& sch, std::size_t files, std::uint64_t seed) {
    RateReport report;
    report.nominal = sch.nominal_rate();
    report.worst_observed = Rational(0);
    const auto demands = demand_sweep(sch.users(), files, seed);
    // Structural support does not depend on the demand; the sweep is kept so
    // the report states what was exercised.
    const auto sent = static_cast<std::int64_t>(transmitted_rows(sch).size());
    for (const auto& d : demands) {
        check_demand(sch, files, d);
        report.worst_observed = std::max(report.worst_observed, Rational(sent, static_cast<std::int64_t>(sch.packets())));
    }
    report.demands_checked = demands.size();
    return report;
}

void write_scheme(std::ostream& os, const LinearScheme& sch) {
    os << sch.users() << ' ' << sch.packets() << ' ' << sch.modulus() << ' ' << sch.cache_fraction().numerator()
       << ' ' << sch.cache_fraction().denominator() << ' ' << sch.nominal_rate().numerator() << ' '
       << sch.nominal_rate().denominator() << '\n';
    for (const auto& u : sch.all_users()) {
        os << '\n';
        write_matrix(os, u.caching);
        os << '\n';
        write_matrix(os, u.coding);
        os << '\n';
        write_matrix(os, u.decoding);
    }
}

namespace {
std::int64_t read_int(std::istream& is, const char* what) {
    std::string tok;
    if (!(is >> tok)) throw ParseError(std::string("unexpected end of input reading ") + what);
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
        throw ParseError(std::string("expected an integer for ") + what + ", got '" + tok + "'");
    }
    if (pos != tok.size()) throw ParseError(std::string("expected an integer for ") + what + ", got '" + tok + "'");
    return v;
}
} // namespace

LinearScheme read_scheme(std::istream& is) {
    const auto K = read_int(is, "K");
    const auto F = read_int(is, "F");
    const auto p = read_int(is, "p");
    const auto zn = read_int(is, "Znum");
    const auto zd = read_int(is, "Zden");
    const auto rn = read_int(is, "Rnum");
    const auto rd = read_int(is, "Rden");
    if (K < 0 || F < 0 || p < 2 || zd <= 0 || rd <= 0 || zn < 0 || rn < 0)
        throw ParseError("invalid scheme header");
    std::vector<UserMatrices> users;
    users.reserve(static_cast<std::size_t>(K));
    for (std::int64_t k = 0; k < K; ++k) {
        UserMatrices u;
        u.caching = read_matrix(is);
        u.coding = read_matrix(is);
        u.decoding = read_matrix(is);
        users.push_back(std::move(u));
    }
    std::string extra;
    if (is >> extra) throw ParseError("trailing data after last user: '" + extra + "'");
    try {
        return LinearScheme(static_cast<std::size_t>(F), static_cast<std::uint32_t>(p), Rational(zn, zd),
                            Rational(rn, rd), std::move(users));
    } catch (const DimensionMismatch& e) {
        throw ParseError(std::string("scheme file inconsistent: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ParseError(std::string("scheme file inconsistent: ") + e.what());
    }
}

} // namespace lincache
