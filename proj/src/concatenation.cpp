#include "lincache/concatenation.hpp"

#include <numeric>

#include "lincache/parallel.hpp"

namespace lincache {

namespace {

void check_k(std::size_t k1, std::size_t k2) {
    if (k1 == 0 || k2 == 0 || k2 > k1) throw InvalidArgument("need 1 <= K2 <= K1");
}

void put_block(FieldMatrix& dst, std::size_t r0, std::size_t c0, const FieldMatrix& src) {
    for (std::size_t r = 0; r < src.rows(); ++r)
        for (std::size_t c = 0; c < src.cols(); ++c)
            if (auto v = src.at(r, c)) dst.set(r0 + r, c0 + c, v);
}

} // namespace

IntMatrix label_matrix_a(std::size_t k1, std::size_t k2) {
    check_k(k1, k2);
    const std::size_t h1 = k1 / std::gcd(k1, k2);
    IntMatrix a(h1, std::vector<std::size_t>(k1 + k2));
    for (std::size_t j = 0; j < h1; ++j) {
        for (std::size_t k = 0; k < k1; ++k) a[j][k] = k;
        for (std::size_t i = 0; i < k2; ++i) a[j][k1 + i] = (j * k2 + i) % k1;
    }
    return a;
}

IntMatrix label_matrix_b(std::size_t k1, std::size_t k2) {
    check_k(k1, k2);
    const std::size_t h1 = k1 / std::gcd(k1, k2);
    IntMatrix b(h1, std::vector<std::size_t>(k1 + k2));
    for (std::size_t j = 0; j < h1; ++j) {
        std::vector<bool> in_a(k1, false);
        for (std::size_t i = 0; i < k2; ++i) in_a[(j * k2 + i) % k1] = true;
        for (std::size_t k = 0; k < k1 + k2; ++k) {
            if (k < k1 && in_a[k]) {
                const std::size_t off = (k + k1 - (j * k2) % k1) % k1;
                b[j][k] = h1 + (j * k2 + off) / k1;
            } else {
                b[j][k] = j;
            }
        }
    }
    return b;
}

LabelMatrices label_matrices(std::size_t k1, std::size_t k2) {
    check_k(k1, k2);
    const std::size_t g = std::gcd(k1, k2);
    return {k1, k2, k1 / g, k2 / g, label_matrix_a(k1, k2), label_matrix_b(k1, k2)};
}

FieldMatrix gamma(const IntMatrix& b, std::size_t k, std::size_t h1, std::size_t h2, std::uint32_t p) {
    if (b.size() != h1) throw DimensionMismatch("B must have h1 rows");
    FieldMatrix g(p, h1 + h2, h1);
    for (std::size_t j = 0; j < h1; ++j) {
        if (k >= b[j].size()) throw InvalidArgument("gamma: column out of range");
        const std::size_t x = b[j][k];
        if (x >= h1 + h2) throw InvalidArgument("gamma: label out of range");
        g.set(x, j, 1);
    }
    return g;
}

LinearScheme extend_scheme(const LinearScheme& sch, std::size_t k2, bool check_source) {
    const std::size_t k1 = sch.users();
    check_k(k1, k2);
    if (check_source) {
        const auto rep = verify_scheme(sch);
        if (!rep.pass) throw InvalidArgument("extend_scheme: source scheme fails verification");
    }
    const auto lm = label_matrices(k1, k2);
    const std::size_t h1 = lm.h1, h2 = lm.h2;
    const std::uint32_t p = sch.modulus();
    const std::size_t F = sch.packets(), Z = sch.cached_rows(), RF = sch.signal_rows(), D = sch.decoded_rows();

    std::vector<UserMatrices> users(k1 + k2);
    parallel_for(k1 + k2, [&](std::size_t k) {
        if (k < k1) {
            const auto& src = sch.user(k);
            const FieldMatrix g = gamma(lm.b, k, h1, h2, p);
            std::vector<FieldMatrix> caches(h1, src.caching);
            users[k] = {block_diag(caches, p), kron(g, src.coding), kron(g.transpose(), src.decoding)};
            return;
        }
        FieldMatrix cache(p, h1 * Z, h1 * F), coding(p, (h1 + h2) * RF, h1 * F), dec(p, h1 * D, (h1 + h2) * RF);
        for (std::size_t j = 0; j < h1; ++j) {
            const auto& src = sch.user(lm.a[j][k]);
            put_block(cache, j * Z, j * F, src.caching);
            put_block(coding, j * RF, j * F, src.coding);
            put_block(dec, j * D, j * RF, src.decoding);
        }
        users[k] = {std::move(cache), std::move(coding), std::move(dec)};
    });
    const Rational factor(static_cast<std::int64_t>(h1 + h2), static_cast<std::int64_t>(h1));
    return LinearScheme(h1 * F, p, sch.cache_fraction(), sch.nominal_rate() * factor, std::move(users));
}

LinearScheme replicate_scheme(const LinearScheme& sch, std::size_t copies) {
    if (copies == 0) throw InvalidArgument("replicate_scheme: need at least one copy");
    const std::size_t k1 = sch.users();
    const std::uint32_t p = sch.modulus();
    std::vector<UserMatrices> users(copies * k1);
    parallel_for(users.size(), [&](std::size_t idx) {
        const std::size_t c = idx / k1;
        const auto& src = sch.user(idx % k1);
        FieldMatrix sel(p, copies, 1);
        sel.set(c, 0, 1);
        users[idx] = {src.caching, kron(sel, src.coding), kron(sel.transpose(), src.decoding)};
    });
    return LinearScheme(sch.packets(), p, sch.cache_fraction(),
                        sch.nominal_rate() * Rational(static_cast<std::int64_t>(copies)), std::move(users));
}

LinearScheme compose_for_users(const LinearScheme& sch, std::size_t users) {
    const std::size_t k1 = sch.users();
    if (users <= k1) throw InvalidArgument("compose_for_users: target must exceed the source user count");
    const auto rep = verify_scheme(sch);
    if (!rep.pass) throw InvalidArgument("compose_for_users: source scheme fails verification");
    const std::size_t k2 = users - k1;
    if (k2 <= k1) return extend_scheme(sch, k2, false);
    const std::size_t m = k2 / k1;
    LinearScheme grouped = replicate_scheme(sch, m + 1);
    const std::size_t rest = users - (m + 1) * k1;
    if (rest == 0) return grouped;
    return extend_scheme(grouped, rest, false);
}

} // namespace lincache
