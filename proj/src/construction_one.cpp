#include "lincache/construction_one.hpp"

#include <algorithm>

#include "lincache/parallel.hpp"

namespace lincache {

namespace {

constexpr std::size_t kMaxPackets = std::size_t{1} << 16;

std::size_t ipow(std::size_t b, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (r > kMaxPackets) return kMaxPackets + 1;
        r *= b;
    }
    return r;
}

void check_qm(std::size_t q, std::size_t m) {
    if (q < 2) throw InvalidArgument("q must be at least 2");
    if (m < 1) throw InvalidArgument("m must be at least 1");
    if (ipow(q, m) > kMaxPackets) throw InvalidArgument("q^m exceeds " + std::to_string(kMaxPackets));
}

std::size_t digit(std::size_t s, std::size_t q, std::size_t u) {
    for (std::size_t i = 0; i < u; ++i) s /= q;
    return s % q;
}

} // namespace

std::vector<std::size_t> qary_digits(std::size_t s, std::size_t q, std::size_t m) {
    std::vector<std::size_t> d(m);
    for (auto& x : d) {
        x = s % q;
        s /= q;
    }
    if (s != 0) throw InvalidArgument("index does not fit in m q-ary digits");
    return d;
}

std::size_t from_qary_digits(const std::vector<std::size_t>& digits, std::size_t q) {
    std::size_t s = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (*it >= q) throw InvalidArgument("digit out of range");
        s = s * q + *it;
    }
    return s;
}

std::size_t replace_digit(std::size_t s, std::size_t q, std::size_t u, std::size_t v) {
    const std::size_t w = ipow(q, u);
    return s - digit(s, q, u) * w + v * w;
}

void ConstructionParams::validate() const {
    check_qm(q, m);
    if (z < 1 || z >= q) throw InvalidArgument("z must satisfy 1 <= z < q");
}

std::size_t ConstructionParams::packets() const { return ipow(q, m); }

Rational ConstructionParams::cache_fraction() const {
    return Rational(static_cast<std::int64_t>(z), static_cast<std::int64_t>(q));
}

Rational ConstructionParams::rate() const { return Rational(static_cast<std::int64_t>(q - z)); }

std::size_t flatten(const ConstructionParams& p, const UserId& id) {
    if (id.u >= p.m || id.v > p.q || id.eps >= p.h()) throw InvalidArgument("user tuple out of range");
    return (id.u * (p.q + 1) + id.v) * p.h() + id.eps;
}

UserId unflatten(const ConstructionParams& p, std::size_t k) {
    if (k >= p.users()) throw InvalidArgument("user index out of range");
    const std::size_t h = p.h();
    const std::size_t uv = k / h;
    return {uv / (p.q + 1), uv % (p.q + 1), k % h};
}

std::vector<std::size_t> partition_set(std::size_t q, std::size_t m, std::size_t u, std::size_t v) {
    check_qm(q, m);
    if (u >= m || v >= q) throw InvalidArgument("partition_set: need u < m and v < q");
    std::vector<std::size_t> out;
    const std::size_t F = ipow(q, m);
    for (std::size_t s = 0; s < F; ++s)
        if (digit(s, q, u) == v) out.push_back(s);
    return out;
}

FieldMatrix basis_matrix(std::size_t q, std::size_t m, std::size_t u, std::size_t v) {
    const auto idx = partition_set(q, m, u, v);
    return FieldMatrix::unit_rows(2, ipow(q, m), idx);
}

FieldMatrix sum_matrix(std::size_t q, std::size_t m, std::size_t u) {
    const auto base = partition_set(q, m, u, 0);
    FieldMatrix out(2, base.size(), ipow(q, m));
    for (std::size_t r = 0; r < base.size(); ++r)
        for (std::size_t v = 0; v < q; ++v) out.set(r, replace_digit(base[r], q, u, v), 1);
    return out;
}

FieldMatrix c_matrix(std::size_t q, std::size_t m, std::size_t u, std::size_t v3, std::size_t v2) {
    check_qm(q, m);
    if (u >= m || v2 >= q || v3 > q) throw InvalidArgument("c_matrix: index out of range");
    if (v2 == v3) throw InvalidArgument("c_matrix: v2 must differ from v3");
    const std::size_t F = ipow(q, m);
    FieldMatrix c(2, F, F);
    for (std::size_t s = 0; s < F; ++s) {
        const std::size_t d = digit(s, q, u);
        if (d == v2) c.set(s, s, 1);
        if (v3 < q && d == v3) c.set(s, replace_digit(s, q, u, v2), 1);
    }
    return c;
}

std::vector<std::size_t> group_set(std::size_t q, std::size_t z, std::size_t v, std::size_t eps) {
    if (q < 2 || z < 1 || z >= q) throw InvalidArgument("group_set: need 1 <= z < q");
    if (v >= q) throw InvalidArgument("group_set: need v < q");
    const std::size_t w = q - z;
    if (eps >= (q - 1) / w) throw InvalidArgument("group_set: eps out of range");
    std::vector<std::size_t> g(w);
    for (std::size_t i = 0; i < w; ++i) g[i] = (v + 1 + i + eps * w) % q;
    return g;
}

UserMatrices build_user(const ConstructionParams& params, const UserId& id) {
    params.validate();
    const auto [q, m, z] = params;
    const std::size_t F = params.packets();
    flatten(params, id);  // range check

    const bool qtype = id.v == q;
    const auto g = group_set(q, z, qtype ? q - 1 : id.v, id.eps);
    auto in_g = [&](std::size_t x) { return std::find(g.begin(), g.end(), x) != g.end(); };

    std::vector<FieldMatrix> cache_blocks;
    if (qtype) cache_blocks.push_back(sum_matrix(q, m, id.u));
    for (std::size_t v = 0; v < (qtype ? q - 1 : q); ++v)
        if (!in_g(v)) cache_blocks.push_back(basis_matrix(q, m, id.u, v));

    std::vector<FieldMatrix> coding_blocks;
    for (auto v2 : g) coding_blocks.push_back(c_matrix(q, m, id.u, id.v, v2));

    const FieldMatrix unit = qtype ? sum_matrix(q, m, id.u) : basis_matrix(q, m, id.u, id.v);
    std::vector<FieldMatrix> dec_blocks(q - z, unit);

    UserMatrices out{stack_rows(cache_blocks), stack_rows(coding_blocks), block_diag(dec_blocks, 2)};
    if (out.caching.cols() != F) throw DimensionMismatch("construction produced a malformed caching matrix");
    return out;
}

LinearScheme build_scheme(const ConstructionParams& params) {
    params.validate();
    const std::size_t K = params.users();
    std::vector<UserMatrices> users(K);
    parallel_for(K, [&](std::size_t k) { users[k] = build_user(params, unflatten(params, k)); });
    return LinearScheme(params.packets(), 2, params.cache_fraction(), params.rate(), std::move(users));
}

Lemma1Report lemma1_check(std::size_t q, std::size_t m, const CMatrixFn& cgen) {
    check_qm(q, m);
    if (ipow(q, m) > 1024) throw InvalidArgument("lemma1_check is exhaustive; needs q^m <= 1024");

    std::vector<std::vector<FieldMatrix>> E(m);
    std::vector<FieldMatrix> Qm(m);
    for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t v = 0; v < q; ++v) E[u].push_back(basis_matrix(q, m, u, v));
        Qm[u] = sum_matrix(q, m, u);
    }

    Lemma1Report rep;
    auto record = [&](bool ok, const std::string& what) {
        ++rep.checks;
        if (ok) return;
        ++rep.failed;
        if (rep.failures.size() < 16) rep.failures.push_back(what);
    };
    auto tag = [](const char* part, std::size_t u1, std::size_t u2, std::size_t v1, std::size_t v3,
                  std::size_t v2) {
        return std::string(part) + " u1=" + std::to_string(u1) + " u2=" + std::to_string(u2) +
               " v1=" + std::to_string(v1) + " v3=" + std::to_string(v3) + " v2=" + std::to_string(v2);
    };

    for (std::size_t u2 = 0; u2 < m; ++u2)
        for (std::size_t v3 = 0; v3 <= q; ++v3)
            for (std::size_t v2 = 0; v2 < q; ++v2) {
                if (v2 == v3) continue;
                const FieldMatrix C = cgen(q, m, u2, v3, v2);
                for (std::size_t u1 = 0; u1 < m; ++u1) {
                    for (std::size_t v1 = 0; v1 < q; ++v1) {
                        const FieldMatrix EC = mat_mul(E[u1][v1], C);
                        if (u1 != u2) {
                            record(row_space_contains(E[u1][v1], EC), tag("(I)", u1, u2, v1, v3, v2));
                        } else if (v1 == v3) {
                            record(same_row_space(EC, E[u1][v2]), tag("(II)", u1, u2, v1, v3, v2));
                        } else {
                            record(row_space_contains(E[u1][v1], EC), tag("(II)", u1, u2, v1, v3, v2));
                        }
                    }
                    const FieldMatrix QC = mat_mul(Qm[u1], C);
                    if (u1 == u2 && v3 == q)
                        record(same_row_space(QC, E[u1][v2]), tag("(III)", u1, u2, q, v3, v2));
                    else
                        record(row_space_contains(Qm[u1], QC), tag("(III)", u1, u2, q, v3, v2));
                }
            }
    rep.pass = rep.failed == 0;
    return rep;
}

} // namespace lincache
