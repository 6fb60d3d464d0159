#include "lincache/msr_bridge.hpp"

#include <bit>
#include <istream>
#include <ostream>

#include "lincache/parallel.hpp"

namespace lincache {

namespace {

void check_subspaces(const MsrCode& code, const RepairSubspaces& s) {
    const std::size_t K = code.systematic, r = code.parity, F = code.node_size;
    if (s.sub.size() != r) throw DimensionMismatch("need r rows of repair subspaces");
    for (const auto& row : s.sub) {
        if (row.size() != K) throw DimensionMismatch("need K repair subspaces per parity node");
        for (const auto& m : row)
            if (m.rows() != F / r || m.cols() != F || m.modulus() != code.modulus)
                throw DimensionMismatch("repair subspace must be (F/r) x F over GF(p)");
    }
}

} // namespace

void MsrCode::validate() const {
    if (!is_prime(modulus)) throw InvalidArgument("MSR modulus must be prime");
    if (systematic == 0 || parity == 0 || node_size == 0) throw InvalidArgument("MSR code needs K, r, F >= 1");
    if (node_size % parity != 0) throw InvalidArgument("F must be divisible by r");
    if (encoding.size() != parity) throw DimensionMismatch("need r rows of encoding matrices");
    for (const auto& row : encoding) {
        if (row.size() != systematic) throw DimensionMismatch("need K encoding matrices per parity node");
        for (const auto& a : row) {
            if (a.rows() != node_size || a.cols() != node_size || a.modulus() != modulus)
                throw DimensionMismatch("encoding matrix must be F x F over GF(p)");
            if (rank(a) != node_size) throw InvalidArgument("encoding matrices must be nonsingular");
        }
    }
}

MsrRepairReport verify_msr_repair(const MsrCode& code, const RepairSubspaces& subspaces) {
    code.validate();
    check_subspaces(code, subspaces);
    const std::size_t K = code.systematic, r = code.parity, F = code.node_size;
    MsrRepairReport rep;
    rep.pairs.resize(K * K);
    parallel_for(K * K, [&](std::size_t idx) {
        const std::size_t k = idx / K, k2 = idx % K;
        std::vector<FieldMatrix> parts;
        for (std::size_t x = 0; x < r; ++x) parts.push_back(mat_mul(subspaces.sub[x][k], code.encoding[x][k2]));
        auto& pc = rep.pairs[idx];
        pc.user = k;
        pc.other = k2;
        pc.rank = rank(stack_rows(parts));
        pc.expected = k == k2 ? F : F / r;
        pc.subspace_ok = pc.rank == pc.expected;
    });
    for (const auto& pc : rep.pairs)
        if (pc.rank != pc.expected)
            rep.failures.push_back("repair (" + std::to_string(pc.user) + "," + std::to_string(pc.other) +
                                   "): rank " + std::to_string(pc.rank) + ", expected " +
                                   std::to_string(pc.expected));
    rep.pass = rep.failures.empty();
    return rep;
}

bool verify_mds(const MsrCode& code) {
    const std::size_t K = code.systematic, r = code.parity, F = code.node_size;
    if (K + r > 12) throw InvalidArgument("verify_mds is exhaustive; needs K + r <= 12");
    if (code.encoding.size() != r) throw DimensionMismatch("need r rows of encoding matrices");
    for (const auto& row : code.encoding)
        if (row.size() != K) throw DimensionMismatch("need K encoding matrices per parity node");
    const std::uint32_t p = code.modulus;
    const std::size_t n = K + r;

    std::vector<std::uint32_t> masks;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
        if (static_cast<std::size_t>(std::popcount(mask)) == K) masks.push_back(mask);

    std::vector<char> ok(masks.size(), 0);
    parallel_for(masks.size(), [&](std::size_t idx) {
        FieldMatrix sys(p, K * F, K * F);
        std::size_t row = 0;
        for (std::size_t node = 0; node < n; ++node) {
            if (!(masks[idx] >> node & 1u)) continue;
            for (std::size_t t = 0; t < F; ++t, ++row) {
                if (node < K) {
                    sys.set(row, node * F + t, 1);
                } else {
                    for (std::size_t i = 0; i < K; ++i)
                        for (std::size_t c = 0; c < F; ++c)
                            sys.set(row, i * F + c, code.encoding[node - K][i].at(t, c));
                }
            }
        }
        ok[idx] = rank(sys) == K * F;
    });
    for (char v : ok)
        if (!v) return false;
    return true;
}

LinearScheme detail::msr_transform(const MsrCode& code, const RepairSubspaces& subspaces) {
    code.validate();
    check_subspaces(code, subspaces);
    const std::size_t K = code.systematic, r = code.parity, F = code.node_size;
    const std::uint32_t p = code.modulus;

    std::vector<UserMatrices> users(K);
    parallel_for(K, [&](std::size_t k) {
        const FieldMatrix base_inv = invert(code.encoding[0][k]);
        std::vector<FieldMatrix> coding, dec;
        for (std::size_t x = 1; x < r; ++x) {
            coding.push_back(mat_mul(code.encoding[x][k], base_inv));
            dec.push_back(subspaces.sub[x][k]);
        }
        FieldMatrix a = r > 1 ? stack_rows(coding) : FieldMatrix(p, 0, F);
        FieldMatrix s2 = r > 1 ? block_diag(dec, p) : FieldMatrix(p, 0, 0);
        users[k] = {subspaces.sub[0][k], std::move(a), std::move(s2)};
    });
    return LinearScheme(F, p, Rational(1, static_cast<std::int64_t>(r)),
                        Rational(static_cast<std::int64_t>(r - 1)), std::move(users));
}

LinearScheme msr_to_scheme(const MsrCode& code, const RepairSubspaces& subspaces) {
    const auto rep = verify_msr_repair(code, subspaces);
    if (!rep.pass) throw Infeasible("msr_to_scheme: " + rep.failures.front());
    return detail::msr_transform(code, subspaces);
}

void write_msr(std::ostream& os, const MsrCode& code, const RepairSubspaces& subspaces) {
    os << code.modulus << ' ' << code.systematic << ' ' << code.parity << ' ' << code.node_size << '\n';
    for (std::size_t x = 0; x < code.parity; ++x)
        for (std::size_t i = 0; i < code.systematic; ++i) {
            os << "\nENC " << x << ' ' << i << '\n';
            write_matrix(os, code.encoding.at(x).at(i));
        }
    for (std::size_t x = 0; x < code.parity; ++x)
        for (std::size_t k = 0; k < code.systematic; ++k) {
            os << "\nSUB " << x << ' ' << k << '\n';
            write_matrix(os, subspaces.sub.at(x).at(k));
        }
}

MsrFile read_msr(std::istream& is) {
    auto read_count = [&](const char* what) {
        long long v = -1;
        if (!(is >> v) || v < 0) throw ParseError(std::string("MSR file: bad ") + what);
        return static_cast<std::size_t>(v);
    };
    MsrFile f;
    auto& c = f.code;
    const std::size_t p = read_count("modulus");
    c.systematic = read_count("K");
    c.parity = read_count("r");
    c.node_size = read_count("F");
    if (p > kMaxModulus || !is_prime(static_cast<std::uint32_t>(p))) throw ParseError("MSR file: modulus not prime");
    if (c.systematic == 0 || c.parity == 0 || c.systematic + c.parity > 64 || c.node_size == 0 ||
        c.node_size > 4096)
        throw ParseError("MSR file: parameters out of range");
    c.modulus = static_cast<std::uint32_t>(p);
    c.encoding.assign(c.parity, std::vector<FieldMatrix>(c.systematic));
    f.subspaces.sub.assign(c.parity, std::vector<FieldMatrix>(c.systematic));
    std::vector<std::vector<bool>> seen_enc(c.parity, std::vector<bool>(c.systematic)),
        seen_sub(c.parity, std::vector<bool>(c.systematic));

    std::string tag;
    while (is >> tag) {
        if (tag != "ENC" && tag != "SUB") throw ParseError("MSR file: unexpected token '" + tag + "'");
        const std::size_t x = read_count("section index"), i = read_count("section index");
        if (x >= c.parity || i >= c.systematic) throw ParseError("MSR file: section index out of range");
        auto& seen = tag == "ENC" ? seen_enc : seen_sub;
        if (seen[x][i]) throw ParseError("MSR file: duplicate section " + tag);
        seen[x][i] = true;
        FieldMatrix m = read_matrix(is);
        if (m.modulus() != c.modulus) throw ParseError("MSR file: section modulus differs from header");
        (tag == "ENC" ? c.encoding : f.subspaces.sub)[x][i] = std::move(m);
    }
    for (std::size_t x = 0; x < c.parity; ++x)
        for (std::size_t i = 0; i < c.systematic; ++i)
            if (!seen_enc[x][i] || !seen_sub[x][i]) throw ParseError("MSR file: missing ENC or SUB section");
    try {
        c.validate();
        check_subspaces(c, f.subspaces);
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("MSR file: ") + e.what());
    }
    return f;
}

} // namespace lincache
