#pragma once

// Linear coded caching schemes.
//
// A scheme for K users and files of F packets over GF(p) is three matrices
// per user k:
//
//   caching  S_k   (Z x F)          user k stores S_k * W_n for every file n
//   coding   A_k   (RF x F)         server sends X_d = sum_k A_k * W_{d_k}
//   decoding S'_k  ((F - Z) x RF)   user k reads S'_k * X_d
//
// with Z = F * M/N.  User k can decode every demand iff
//
//   rank [S_k ; S'_k A_k'] = F      for k' == k
//                          = Z      otherwise.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "lincache/field_matrix.hpp"

namespace lincache {

using Rational = boost::rational<std::int64_t>;

std::string to_string(const Rational& r);

struct UserMatrices {
    FieldMatrix caching;   // S_k
    FieldMatrix coding;    // A_k
    FieldMatrix decoding;  // S'_k
};

class LinearScheme {
public:
    // Throws DimensionMismatch if any matrix disagrees with (F, p, M/N, R),
    // or InvalidArgument if F * M/N or R * F is not integral.
    LinearScheme(std::size_t packets, std::uint32_t p, Rational cache_fraction, Rational nominal_rate,
                 std::vector<UserMatrices> users);

    std::size_t users() const noexcept { return users_.size(); }
    std::size_t packets() const noexcept { return packets_; }
    std::uint32_t modulus() const noexcept { return p_; }
    const Rational& cache_fraction() const noexcept { return cache_fraction_; }
    const Rational& nominal_rate() const noexcept { return nominal_rate_; }

    // Z = F * M/N
    std::size_t cached_rows() const noexcept { return cached_rows_; }
    // R * F
    std::size_t signal_rows() const noexcept { return signal_rows_; }
    // F - Z
    std::size_t decoded_rows() const noexcept { return packets_ - cached_rows_; }

    const UserMatrices& user(std::size_t k) const { return users_.at(k); }
    const std::vector<UserMatrices>& all_users() const noexcept { return users_; }

    friend bool operator==(const LinearScheme& a, const LinearScheme& b);

private:
    std::size_t packets_;
    std::uint32_t p_;
    Rational cache_fraction_;
    Rational nominal_rate_;
    std::size_t cached_rows_;
    std::size_t signal_rows_;
    std::vector<UserMatrices> users_;
};

bool operator==(const UserMatrices& a, const UserMatrices& b);

// N files, each a column of F packets of equal block length.
struct PacketLibrary {
    std::uint32_t modulus = 2;
    std::size_t packets = 0;
    std::size_t block_size = kDefaultBlockSize;
    std::vector<std::vector<PacketBlock>> files;

    std::size_t size() const noexcept { return files.size(); }

    // Symbols are successive bytes of a mt19937_64 stream seeded with
    // `seed`, reduced mod p.  Identical on every platform.
    static PacketLibrary random(std::size_t files, std::size_t packets, std::uint32_t p, std::size_t block_size,
                                std::uint64_t seed);
};

using DemandVector = std::vector<std::size_t>;

// Contents of one user's cache: entry n is S_k * W_n.
struct UserCache {
    std::vector<std::vector<PacketBlock>> per_file;
};

struct Broadcast {
    std::vector<PacketBlock> signal;           // R*F blocks
    std::vector<std::size_t> transmitted_rows; // rows where some A_k is nonzero
};

struct PairCheck {
    std::size_t user = 0;
    std::size_t other = 0;
    std::size_t rank = 0;
    std::size_t expected = 0;
    bool subspace_ok = false;  // containment / spanning form of the same condition
};

struct VerifyReport {
    bool pass = false;
    bool formulations_agree = true;
    std::vector<PairCheck> pairs;     // ordered by (user, other)
    std::vector<std::string> failures;
};

// Checks the rank condition for every ordered pair (k, k').  The subspace
// form (S'_k A_k' inside S_k for k != k', S_k + S'_k A_k = whole space for
// k == k', both with S_k of full row rank) is evaluated independently and
// the per-user verdicts compared.  Pairs run in parallel.
VerifyReport verify_scheme(const LinearScheme& sch);

// Rows of the broadcast where at least one coding matrix is nonzero.
std::vector<std::size_t> transmitted_rows(const LinearScheme& sch);

std::vector<UserCache> place(const LinearScheme& sch, const PacketLibrary& library);

Broadcast encode_broadcast(const LinearScheme& sch, const PacketLibrary& library, const DemandVector& d);

// Precomputed decoding state for one user: the transfer matrices D_{k,k'}
// with D_{k,k'} S_k = S'_k A_k', and the inverse of [S_k ; S'_k A_k].
class UserDecoder {
public:
    // Throws Infeasible or SingularMatrix if the scheme is broken for user k.
    UserDecoder(const LinearScheme& sch, std::size_t user);

    // Only the transmitted rows of the broadcast are read.
    std::vector<PacketBlock> decode(const UserCache& cache, const Broadcast& x, const DemandVector& d) const;

    std::size_t user() const noexcept { return user_; }
    const FieldMatrix& transfer(std::size_t other) const { return transfer_.at(other); }

private:
    std::uint32_t p_;
    std::size_t user_;
    std::vector<FieldMatrix> transfer_;  // index k'; empty for k' == k
    FieldMatrix decoding_on_rows_;       // S'_k restricted to transmitted columns
    std::vector<std::size_t> rows_read_;
    FieldMatrix stack_inverse_;
};

std::vector<PacketBlock> decode_user(const LinearScheme& sch, std::size_t user, const UserCache& cache,
                                     const Broadcast& x, const DemandVector& d);

struct RateReport {
    Rational nominal;
    Rational worst_observed;
    std::size_t demands_checked = 0;
};

// Worst structurally transmitted rows / F over a demand set: all N^K demands
// when that is at most 4096, otherwise 512 seeded random demands plus the
// all-distinct demand.
RateReport measured_rate(const LinearScheme& sch, std::size_t files, std::uint64_t seed = 0);

// Demand set used by measured_rate and the simulator.
std::vector<DemandVector> demand_sweep(std::size_t users, std::size_t files, std::uint64_t seed);
std::vector<DemandVector> random_demands(std::size_t users, std::size_t files, std::size_t count,
                                         std::uint64_t seed);

// ---- text format ---------------------------------------------------------
//
//   K F p Znum Zden Rnum Rden
//   <blank>
//   S_0 (matrix format) <blank> A_0 <blank> S'_0 <blank> S_1 ...

void write_scheme(std::ostream& os, const LinearScheme& sch);
LinearScheme read_scheme(std::istream& is);

} // namespace lincache
