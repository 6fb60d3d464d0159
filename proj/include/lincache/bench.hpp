#pragma once

// Closed-form rate and subpacketization of the compared schemes.
//
//   MN        R = K(1 - M/N)/(1 + K M/N),  F = C(K, K M/N)
//   YanLemma2 M/N = 1/q:     R = q - 1,      F = q^(K/q - 1)
//             M/N = (q-1)/q: R = 1/(q - 1),  F = q^(K/q - 1)
//   Theorem3  K = m(q+1)h, R = q - z, F = q^m
//   composed  Theorem3 at the largest m with m(q+1)h <= K, grown to K users

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lincache/linear_scheme.hpp"

namespace lincache {

using BigInt = boost::multiprecision::cpp_int;

struct BenchRow {
    std::string label;
    std::size_t users = 0;
    std::size_t q = 0;
    std::size_t z = 0;
    Rational cache_fraction;
    std::optional<Rational> rate;  // nullopt: formula does not apply at this K
    BigInt packets;
};

BenchRow mn_row(std::size_t users, std::size_t z, std::size_t q);
BenchRow yan_row(std::size_t users, std::size_t z, std::size_t q);
BenchRow theorem3_row(std::size_t users, std::size_t z, std::size_t q);
// nullopt when K already fits the construction exactly or is too small.
std::optional<BenchRow> composed_row(std::size_t users, std::size_t z, std::size_t q);

// Rows for every K in order: MN, YanLemma2, Theorem3, then composed if any.
std::vector<BenchRow> bench_rows(std::size_t z, std::size_t q, const std::vector<std::size_t>& users);

// 4-decimal rendering of a rational.
std::string decimal4(const Rational& r);

void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows);
// label,K,q,z,MN_num,MN_den,R_num,R_den,F ; "NA" where the formula fails
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

} // namespace lincache
