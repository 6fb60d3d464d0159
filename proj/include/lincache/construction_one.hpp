#pragma once

// The q^m-division scheme over GF(2).
//
// Packets are indexed by s in [0, q^m) with q-ary digits (s_0, ..., s_{m-1}).
// Users are triples (u, v, eps) with u < m, v <= q, eps < h where
// h = floor((q-1)/(q-z)); K = m(q+1)h, M/N = z/q, R = q - z.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lincache/linear_scheme.hpp"

namespace lincache {

std::vector<std::size_t> qary_digits(std::size_t s, std::size_t q, std::size_t m);
std::size_t from_qary_digits(const std::vector<std::size_t>& digits, std::size_t q);

// s with digit u replaced by v.
std::size_t replace_digit(std::size_t s, std::size_t q, std::size_t u, std::size_t v);

struct ConstructionParams {
    std::size_t q = 2;
    std::size_t m = 1;
    std::size_t z = 1;

    // Throws InvalidArgument unless q >= 2, m >= 1, 1 <= z < q and q^m fits.
    void validate() const;

    std::size_t packets() const;  // q^m
    std::size_t h() const { return (q - 1) / (q - z); }
    std::size_t users() const { return m * (q + 1) * h(); }
    Rational cache_fraction() const;
    Rational rate() const;
};

struct UserId {
    std::size_t u = 0;
    std::size_t v = 0;  // v == q marks the Q_u user
    std::size_t eps = 0;

    friend bool operator==(const UserId&, const UserId&) = default;
};

// k = (u(q+1) + v)h + eps
std::size_t flatten(const ConstructionParams& p, const UserId& id);
UserId unflatten(const ConstructionParams& p, std::size_t k);

// V_{u,v}: indices with digit u equal to v, ascending.
std::vector<std::size_t> partition_set(std::size_t q, std::size_t m, std::size_t u, std::size_t v);

// E_{u,v}: unit rows e_s for s in V_{u,v}.
FieldMatrix basis_matrix(std::size_t q, std::size_t m, std::size_t u, std::size_t v);

// Q_u: one row per s with s_u = 0, summing e over all values of digit u.
FieldMatrix sum_matrix(std::size_t q, std::size_t m, std::size_t u);

// C_{u,v3,v2}, q^m x q^m.  For v3 < q row s is
// [s in V_{u,v3}] e_{s with digit u -> v2} + [s in V_{u,v2}] e_s;
// for v3 == q it is the diagonal selector of V_{u,v2}.
FieldMatrix c_matrix(std::size_t q, std::size_t m, std::size_t u, std::size_t v3, std::size_t v2);

// G_{v,eps} = {v+1+eps(q-z), ..., v+(q-z)+eps(q-z)} mod q in that order.
std::vector<std::size_t> group_set(std::size_t q, std::size_t z, std::size_t v, std::size_t eps);

UserMatrices build_user(const ConstructionParams& params, const UserId& id);
LinearScheme build_scheme(const ConstructionParams& params);

using CMatrixFn = std::function<FieldMatrix(std::size_t q, std::size_t m, std::size_t u, std::size_t v3,
                                            std::size_t v2)>;

struct Lemma1Report {
    bool pass = false;
    std::size_t checks = 0;
    std::size_t failed = 0;
    std::vector<std::string> failures;  // first few only
};

// Exhaustive row-space checks of the three products E*C and Q*C for all
// (u1, u2, v1, v2, v3).  `cgen` defaults to c_matrix; tests inject broken
// generators to see the check fail.
Lemma1Report lemma1_check(std::size_t q, std::size_t m, const CMatrixFn& cgen = c_matrix);

} // namespace lincache
