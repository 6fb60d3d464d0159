#pragma once

// Growing a K1-user scheme to K1 + K2 users.
//
// With g = gcd(K1, K2), h1 = K1/g and h2 = K2/g, the label matrices A and B
// are h1 x (K1 + K2).  Row j of A's right block lists the K2 consecutive
// residues jK2, ..., jK2 + K2 - 1 mod K1; column K1 + i of A names the source
// users new user K1 + i copies.  B assigns each (j, k) one of h1 + h2 signal
// blocks.

#include <cstdint>
#include <vector>

#include "lincache/linear_scheme.hpp"

namespace lincache {

using IntMatrix = std::vector<std::vector<std::size_t>>;

struct LabelMatrices {
    std::size_t k1 = 0;
    std::size_t k2 = 0;
    std::size_t h1 = 0;
    std::size_t h2 = 0;
    IntMatrix a;
    IntMatrix b;
};

IntMatrix label_matrix_a(std::size_t k1, std::size_t k2);
IntMatrix label_matrix_b(std::size_t k1, std::size_t k2);
LabelMatrices label_matrices(std::size_t k1, std::size_t k2);

// (h1 + h2) x h1 selector with entry (x, j) = [b_{j,k} == x].
FieldMatrix gamma(const IntMatrix& b, std::size_t k, std::size_t h1, std::size_t h2, std::uint32_t p = 2);

// Lifts `sch` (K1 users) to K1 + K2 users with F' = h1 F and
// R' = (1 + h2/h1) R.  Needs 1 <= K2 <= K1.  The source is verified first
// unless `check_source` is false.
LinearScheme extend_scheme(const LinearScheme& sch, std::size_t k2, bool check_source = true);

// `copies` independent copies of the scheme side by side: same F, users
// (c, k) flattened as c K1 + k, rate multiplied by `copies`.
LinearScheme replicate_scheme(const LinearScheme& sch, std::size_t copies);

// Any K > K1: extends directly when K - K1 <= K1, otherwise replicates
// floor((K - K1)/K1) + 1 times and extends by what is left.  Rate is
// (K/K1) R.
LinearScheme compose_for_users(const LinearScheme& sch, std::size_t users);

} // namespace lincache
