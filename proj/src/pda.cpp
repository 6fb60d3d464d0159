#include "lincache/pda.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace lincache {

Pda::Pda(std::size_t users, std::size_t packets, std::size_t stars, std::size_t symbols, std::vector<Cell> cells)
    : users_(users), packets_(packets), stars_(stars), symbols_(symbols), cells_(std::move(cells)) {
    if (cells_.size() != users_ * packets_)
        throw DimensionMismatch("PDA has " + std::to_string(cells_.size()) + " cells, expected " +
                                std::to_string(users_ * packets_));
}

Pda Pda::from_tokens(const std::vector<std::vector<std::string>>& rows) {
    const std::size_t F = rows.size();
    const std::size_t K = F == 0 ? 0 : rows.front().size();
    std::vector<Cell> cells;
    cells.reserve(F * K);
    std::size_t symbols = 0;
    for (const auto& row : rows) {
        if (row.size() != K) throw ParseError("PDA rows have different lengths");
        for (const auto& tok : row) {
            if (tok == "*") {
                cells.emplace_back(std::nullopt);
                continue;
            }
            std::size_t pos = 0;
            unsigned long long v = 0;
            try {
                v = std::stoull(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size() || tok.empty() || tok.front() == '-')
                throw ParseError("PDA cell '" + tok + "' is neither '*' nor a non-negative integer");
            cells.emplace_back(static_cast<std::size_t>(v));
            symbols = std::max<std::size_t>(symbols, static_cast<std::size_t>(v) + 1);
        }
    }
    std::size_t stars = 0;
    for (std::size_t j = 0; j < F && K > 0; ++j)
        if (!cells[j * K].has_value()) ++stars;
    return Pda(K, F, stars, symbols, std::move(cells));
}

std::string describe(const PdaViolation& v) {
    std::ostringstream os;
    switch (v.condition) {
    case PdaCondition::StarCount:
        os << "star count: column " << v.col << " has " << v.symbol << " stars";
        break;
    case PdaCondition::Coverage:
        os << "coverage: integer " << v.symbol << " does not occur";
        break;
    case PdaCondition::SubArray:
        os << "sub-array: integer " << v.symbol << " at (" << v.row << "," << v.col << ") and (" << v.row2 << ","
           << v.col2 << ")";
        break;
    case PdaCondition::Range:
        os << "range: cell (" << v.row << "," << v.col << ") holds " << v.symbol << " >= S";
        break;
    }
    return os.str();
}

PdaReport validate_pda(const Pda& pda) {
    PdaReport report;
    const std::size_t F = pda.packets(), K = pda.users(), S = pda.symbols();
    for (std::size_t k = 0; k < K; ++k) {
        std::size_t stars = 0;
        for (std::size_t j = 0; j < F; ++j) stars += pda.is_star(j, k);
        if (stars != pda.stars()) {
            PdaViolation v{PdaCondition::StarCount};
            v.col = k;
            v.symbol = stars;
            report.violations.push_back(v);
        }
    }
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> where(S);
    for (std::size_t j = 0; j < F; ++j)
        for (std::size_t k = 0; k < K; ++k) {
            const auto& c = pda.at(j, k);
            if (!c) continue;
            if (*c >= S) {
                PdaViolation v{PdaCondition::Range};
                v.row = j;
                v.col = k;
                v.symbol = *c;
                report.violations.push_back(v);
                continue;
            }
            where[*c].emplace_back(j, k);
        }
    for (std::size_t s = 0; s < S; ++s) {
        if (where[s].empty()) {
            PdaViolation v{PdaCondition::Coverage};
            v.symbol = s;
            report.violations.push_back(v);
        }
        const auto& cells = where[s];
        for (std::size_t a = 0; a < cells.size(); ++a)
            for (std::size_t b = a + 1; b < cells.size(); ++b) {
                const auto [j1, k1] = cells[a];
                const auto [j2, k2] = cells[b];
                const bool ok = j1 != j2 && k1 != k2 && pda.is_star(j1, k2) && pda.is_star(j2, k1);
                if (ok) continue;
                PdaViolation v{PdaCondition::SubArray};
                v.row = j1;
                v.col = k1;
                v.row2 = j2;
                v.col2 = k2;
                v.symbol = s;
                report.violations.push_back(v);
            }
    }
    report.valid = report.violations.empty();
    return report;
}

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Index of a subset (as bitmask) among subsets of the same size, colex order.
std::size_t colex_rank(std::uint64_t mask) {
    std::size_t r = 0;
    std::uint64_t i = 1;
    while (mask) {
        const auto c = static_cast<std::uint64_t>(std::countr_zero(mask));
        r += binomial(c, i);
        mask &= mask - 1;
        ++i;
    }
    return r;
}

} // namespace

Pda mn_pda(std::size_t users, std::size_t t) {
    if (t == 0 || t >= users) throw InvalidArgument("mn_pda needs 0 < t < K");
    if (users > 40) throw InvalidArgument("mn_pda: K > 40 is too large to materialise");
    const std::size_t F = binomial(users, t);
    if (F > (1u << 22)) throw InvalidArgument("mn_pda: C(K,t) too large to materialise");
    std::vector<std::uint64_t> rows;
    rows.reserve(F);
    // Gosper's hack walks t-subsets in increasing mask order, which is colex.
    std::uint64_t mask = (std::uint64_t{1} << t) - 1;
    const std::uint64_t limit = std::uint64_t{1} << users;
    while (mask < limit) {
        rows.push_back(mask);
        const std::uint64_t c = mask & (~mask + 1);
        const std::uint64_t r = mask + c;
        mask = (((r ^ mask) >> 2) / c) | r;
    }
    std::vector<Pda::Cell> cells(F * users);
    for (std::size_t j = 0; j < F; ++j)
        for (std::size_t k = 0; k < users; ++k) {
            const std::uint64_t bit = std::uint64_t{1} << k;
            if (rows[j] & bit)
                cells[j * users + k] = std::nullopt;
            else
                cells[j * users + k] = colex_rank(rows[j] | bit);
        }
    return Pda(users, F, binomial(users - 1, t - 1), binomial(users, t + 1), std::move(cells));
}

PdaDelivery run_pda_delivery(const Pda& pda, const PacketLibrary& library, const DemandVector& d) {
    const std::size_t F = pda.packets(), K = pda.users();
    if (library.packets != F) throw DimensionMismatch("library packet count differs from PDA rows");
    if (d.size() != K) throw InvalidArgument("demand length differs from PDA columns");
    for (auto n : d)
        if (n >= library.size())
            throw InvalidArgument("demand " + std::to_string(n) + " out of range for " +
                                  std::to_string(library.size()) + " files");
    const auto& f = *PrimeField::get(library.modulus);

    PdaDelivery out;
    out.caches.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        out.caches[k].resize(library.size());
        for (std::size_t i = 0; i < library.size(); ++i)
            for (std::size_t j = 0; j < F; ++j)
                if (pda.is_star(j, k)) out.caches[k][i].emplace_back(j, library.files[i][j]);
    }

    out.transmissions.resize(pda.symbols());
    for (auto& t : out.transmissions) t.block.assign(library.block_size, 0);
    for (std::size_t k = 0; k < K; ++k)
        for (std::size_t j = 0; j < F; ++j) {
            const auto& c = pda.at(j, k);
            if (!c) continue;
            if (*c >= pda.symbols()) throw InvalidArgument("PDA integer out of range");
            auto& t = out.transmissions[*c];
            t.terms.push_back({d[k], j});
            axpy_block(f, 1, library.files[d[k]][j], t.block);
        }

    auto cached = [&](std::size_t k, std::size_t file, std::size_t packet) -> const PacketBlock& {
        for (const auto& [j, block] : out.caches[k][file])
            if (j == packet) return block;
        throw Infeasible("user " + std::to_string(k) + " lacks packet " + std::to_string(packet) + " of file " +
                         std::to_string(file));
    };

    out.decoded.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        auto& file = out.decoded[k];
        file.assign(F, PacketBlock(library.block_size, 0));
        for (std::size_t j = 0; j < F; ++j) {
            const auto& c = pda.at(j, k);
            if (!c) {
                file[j] = cached(k, d[k], j);
                continue;
            }
            PacketBlock block = out.transmissions[*c].block;
            for (std::size_t k2 = 0; k2 < K; ++k2) {
                if (k2 == k) continue;
                for (std::size_t j2 = 0; j2 < F; ++j2) {
                    const auto& c2 = pda.at(j2, k2);
                    if (c2 && *c2 == *c) axpy_block(f, f.neg(1), cached(k, d[k2], j2), block);
                }
            }
            file[j] = std::move(block);
        }
    }
    return out;
}

LinearScheme pda_to_linear(const Pda& pda, std::uint32_t p) {
    const auto report = validate_pda(pda);
    if (!report.valid) throw InvalidArgument("pda_to_linear: " + describe(report.violations.front()));
    const std::size_t F = pda.packets(), K = pda.users(), S = pda.symbols();
    std::vector<UserMatrices> users;
    users.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        std::vector<std::size_t> star_rows;
        FieldMatrix coding(p, S, F);
        for (std::size_t j = 0; j < F; ++j) {
            const auto& c = pda.at(j, k);
            if (!c)
                star_rows.push_back(j);
            else
                coding.set(*c, j, 1);
        }
        std::vector<std::size_t> used;
        for (std::size_t s = 0; s < S; ++s)
            if (!coding.row_is_zero(s)) used.push_back(s);
        users.push_back({FieldMatrix::unit_rows(p, F, star_rows), std::move(coding), FieldMatrix::unit_rows(p, S, used)});
    }
    const auto Fi = static_cast<std::int64_t>(F);
    return LinearScheme(F, p, Rational(static_cast<std::int64_t>(pda.stars()), Fi),
                        Rational(static_cast<std::int64_t>(S), Fi), std::move(users));
}

void write_pda(std::ostream& os, const Pda& pda) {
    os << pda.users() << ' ' << pda.packets() << ' ' << pda.stars() << ' ' << pda.symbols() << '\n';
    for (std::size_t j = 0; j < pda.packets(); ++j) {
        for (std::size_t k = 0; k < pda.users(); ++k) {
            if (k) os << ' ';
            const auto& c = pda.at(j, k);
            if (c)
                os << *c;
            else
                os << '*';
        }
        os << '\n';
    }
}

Pda read_pda(std::istream& is) {
    std::size_t hdr[4];
    for (auto& h : hdr) {
        std::string tok;
        if (!(is >> tok)) throw ParseError("PDA header needs 'K F Z S'");
        std::size_t pos = 0;
        try {
            h = std::stoull(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size() || tok.empty() || tok.front() == '-') throw ParseError("bad PDA header token '" + tok + "'");
    }
    const auto [K, F, Z, S] = hdr;
    if (K * F > (std::size_t{1} << 26)) throw ParseError("PDA too large");
    std::vector<std::vector<std::string>> rows(F, std::vector<std::string>(K));
    for (auto& row : rows)
        for (auto& tok : row)
            if (!(is >> tok)) throw ParseError("PDA body ended early");
    std::string extra;
    if (is >> extra) throw ParseError("trailing data after PDA body: '" + extra + "'");
    auto parsed = Pda::from_tokens(rows);
    for (std::size_t j = 0; j < F; ++j)
        for (std::size_t k = 0; k < K; ++k)
            if (parsed.at(j, k) && *parsed.at(j, k) >= S)
                throw ParseError("PDA cell (" + std::to_string(j) + "," + std::to_string(k) + ") exceeds S-1");
    std::vector<Pda::Cell> cells;
    cells.reserve(K * F);
    for (std::size_t j = 0; j < F; ++j)
        for (std::size_t k = 0; k < K; ++k) cells.push_back(parsed.at(j, k));
    return Pda(K, F, Z, S, std::move(cells));
}

} // namespace lincache
