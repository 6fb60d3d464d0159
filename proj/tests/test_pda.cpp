#include <doctest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "lincache/pda.hpp"

using namespace lincache;

namespace {

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

FieldMatrix rows(std::vector<std::vector<std::int64_t>> r) { return FieldMatrix::from_rows(2, r); }

Pda with_cell(const Pda& p, std::size_t row, std::size_t col, Pda::Cell v) {
    std::vector<Pda::Cell> cells;
    for (std::size_t j = 0; j < p.packets(); ++j)
        for (std::size_t k = 0; k < p.users(); ++k) cells.push_back(j == row && k == col ? v : p.at(j, k));
    return Pda(p.users(), p.packets(), p.stars(), p.symbols(), cells);
}

// Every PDA in the corpus with F*K <= 200.
std::vector<Pda> small_corpus() {
    std::vector<Pda> out{fixtures::small_pda()};
    for (std::size_t K = 2; K <= 10; ++K)
        for (std::size_t t = 1; t < K; ++t)
            if (choose(K, t) * K <= 200) out.push_back(mn_pda(K, t));
    out.emplace_back(3, 2, 2, 0, std::vector<Pda::Cell>(6));
    return out;
}

} // namespace

TEST_CASE("example array is a (6,4,2,4) PDA") {
    const auto p = fixtures::small_pda();
    const auto rep = validate_pda(p);
    CHECK(rep.valid);
    CHECK(p.users() == 6);
    CHECK(p.packets() == 4);
    CHECK(p.stars() == 2);
    CHECK(p.symbols() == 4);
}

TEST_CASE("all-star array is valid with Z = F") {
    const Pda p(3, 4, 4, 0, std::vector<Pda::Cell>(12));
    CHECK(validate_pda(p).valid);
}

TEST_CASE("changing one cell breaks the sub-array condition") {
    const auto bad = with_cell(fixtures::small_pda(), 0, 5, 1);
    const auto rep = validate_pda(bad);
    CHECK_FALSE(rep.valid);
    bool c3 = false;
    for (const auto& v : rep.violations) c3 = c3 || v.condition == PdaCondition::SubArray;
    CHECK(c3);
}

TEST_CASE("star count and coverage violations") {
    const auto p = fixtures::small_pda();
    auto rep = validate_pda(with_cell(p, 0, 0, 0));
    CHECK_FALSE(rep.valid);
    CHECK(rep.violations.front().condition == PdaCondition::StarCount);

    const Pda gap(2, 2, 1, 3, {std::nullopt, 0, 0, std::nullopt});
    rep = validate_pda(gap);
    CHECK_FALSE(rep.valid);
    bool coverage = false;
    for (const auto& v : rep.violations) coverage = coverage || v.condition == PdaCondition::Coverage;
    CHECK(coverage);
}

TEST_CASE("MN arrays") {
    CHECK(mn_pda(12, 6).packets() == 924);
    const auto p2 = mn_pda(2, 1);
    CHECK(p2.packets() == 2);
    CHECK(p2.stars() == 1);
    CHECK(p2.symbols() == 1);
    const auto p4 = mn_pda(4, 2);
    CHECK(validate_pda(p4).valid);
    CHECK(p4.symbols() == 4);
    for (std::size_t K = 2; K <= 8; ++K)
        for (std::size_t t = 1; t < K; ++t) {
            const auto p = mn_pda(K, t);
            CHECK(p.stars() == choose(K - 1, t - 1));
            CHECK(validate_pda(p).valid);
        }
    CHECK_THROWS_AS(mn_pda(4, 0), InvalidArgument);
    CHECK_THROWS_AS(mn_pda(4, 4), InvalidArgument);
}

TEST_CASE("direct delivery reproduces the four example signals") {
    const auto p = fixtures::small_pda();
    const auto lib = PacketLibrary::random(6, 4, 2, 8, 1);
    const DemandVector d{0, 1, 2, 3, 4, 5};
    const auto run = run_pda_delivery(p, lib, d);
    REQUIRE(run.transmissions.size() == 4);
    const std::vector<std::vector<PacketRef>> expected{
        {{0, 1}, {2, 2}, {5, 0}},
        {{1, 0}, {2, 3}, {4, 1}},
        {{0, 3}, {3, 0}, {4, 2}},
        {{1, 2}, {3, 1}, {5, 3}},
    };
    for (std::size_t s = 0; s < 4; ++s) {
        CHECK(run.transmissions[s].terms == expected[s]);
        PacketBlock sum(8, 0);
        for (const auto& t : expected[s])
            for (std::size_t i = 0; i < 8; ++i) sum[i] ^= lib.files[t.file][t.packet][i];
        CHECK(run.transmissions[s].block == sum);
    }
    for (std::size_t k = 0; k < 6; ++k) CHECK(run.decoded[k] == lib.files[d[k]]);
    // cache of user 0 holds packets 0 and 2 of every file
    CHECK(run.caches[0][3].size() == 2);
    CHECK(run.caches[0][3][1].first == 2);
}

TEST_CASE("single user with everything cached") {
    const Pda p(1, 3, 3, 0, std::vector<Pda::Cell>(3));
    const auto lib = PacketLibrary::random(2, 3, 2, 4, 7);
    const auto run = run_pda_delivery(p, lib, {1});
    CHECK(run.transmissions.empty());
    CHECK(run.decoded[0] == lib.files[1]);
}

TEST_CASE("MN K=4 t=2 decodes every demand") {
    const auto p = mn_pda(4, 2);
    const auto lib = PacketLibrary::random(4, p.packets(), 2, 8, 3);
    DemandVector d(4, 0);
    for (std::size_t code = 0; code < 256; ++code) {
        for (std::size_t k = 0; k < 4; ++k) d[k] = (code >> (2 * k)) & 3;
        const auto run = run_pda_delivery(p, lib, d);
        for (std::size_t k = 0; k < 4; ++k) REQUIRE(run.decoded[k] == lib.files[d[k]]);
    }
    CHECK_THROWS_AS(run_pda_delivery(p, lib, {0, 1, 2, 4}), InvalidArgument);
}

TEST_CASE("linear form of the example array") {
    const auto s = pda_to_linear(fixtures::small_pda());
    const std::vector<FieldMatrix> S{
        rows({{1, 0, 0, 0}, {0, 0, 1, 0}}), rows({{0, 1, 0, 0}, {0, 0, 0, 1}}), rows({{1, 0, 0, 0}, {0, 1, 0, 0}}),
        rows({{0, 0, 1, 0}, {0, 0, 0, 1}}), rows({{1, 0, 0, 0}, {0, 0, 0, 1}}), rows({{0, 1, 0, 0}, {0, 0, 1, 0}}),
    };
    const std::vector<FieldMatrix> A{
        rows({{0, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}}),
        rows({{0, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 1, 0}}),
        rows({{0, 0, 1, 0}, {0, 0, 0, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}}),
        rows({{0, 0, 0, 0}, {0, 0, 0, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}}),
        rows({{0, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 0}}),
        rows({{1, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 1}}),
    };
    const std::vector<std::vector<std::size_t>> sel{{0, 2}, {1, 3}, {0, 1}, {2, 3}, {1, 2}, {0, 3}};
    for (std::size_t k = 0; k < 6; ++k) {
        CHECK(s.user(k).caching == S[k]);
        CHECK(s.user(k).coding == A[k]);
        CHECK(s.user(k).decoding == FieldMatrix::unit_rows(2, 4, sel[k]));
    }
    CHECK(s.cache_fraction() == Rational(1, 2));
    CHECK(s.nominal_rate() == Rational(1));
    CHECK(verify_scheme(s).pass);
}

TEST_CASE("all-star column gives zero coding and empty decoding") {
    const Pda p(2, 2, 1, 1, {std::nullopt, 0, 0, std::nullopt});
    REQUIRE(validate_pda(p).valid);
    const Pda q(3, 2, 1, 1, {std::nullopt, 0, std::nullopt, 0, std::nullopt, std::nullopt});
    // column 2 is all stars, so Z would be 2 there: not a PDA
    CHECK_FALSE(validate_pda(q).valid);
    const Pda full(2, 2, 2, 0, std::vector<Pda::Cell>(4));
    const auto s = pda_to_linear(full);
    CHECK(s.user(1).coding.is_zero());
    CHECK(s.user(1).decoding.rows() == 0);
    CHECK(s.user(1).decoding.cols() == 0);
    CHECK_THROWS_AS(pda_to_linear(q), InvalidArgument);
}

TEST_CASE("MN K=4 t=2 linear form verifies with rate 4/6") {
    const auto s = pda_to_linear(mn_pda(4, 2));
    CHECK(verify_scheme(s).pass);
    const auto r = measured_rate(s, 4);
    CHECK(r.worst_observed == Rational(4, 6));
    CHECK(r.nominal == Rational(4, 6));
}

TEST_CASE("direct delivery and the linear pipeline agree") {
    std::mt19937_64 g(17);
    for (const auto& p : small_corpus()) {
        REQUIRE(validate_pda(p).valid);
        const auto s = pda_to_linear(p);
        REQUIRE(verify_scheme(s).pass);
        const auto lib = PacketLibrary::random(p.users(), p.packets(), 2, 8, g());
        const auto caches = place(s, lib);
        for (const auto& d : random_demands(p.users(), p.users(), 10, g())) {
            const auto run = run_pda_delivery(p, lib, d);
            const auto x = encode_broadcast(s, lib, d);
            for (std::size_t k = 0; k < p.users(); ++k) {
                const auto lin = decode_user(s, k, caches[k], x, d);
                REQUIRE(lin == run.decoded[k]);
                REQUIRE(lin == lib.files[d[k]]);
            }
        }
    }
}

TEST_CASE("PDA text round trip and malformed input") {
    const auto p = mn_pda(5, 2);
    std::stringstream ss;
    write_pda(ss, p);
    CHECK(read_pda(ss) == p);
    std::istringstream bad1("2 2 1 1\n* 0\n0 x\n");
    CHECK_THROWS_AS(read_pda(bad1), ParseError);
    std::istringstream bad2("2 2 1 1\n* 0\n0\n");
    CHECK_THROWS_AS(read_pda(bad2), ParseError);
    std::istringstream bad3("2 2 1 1\n* 5\n0 *\n");
    CHECK_THROWS_AS(read_pda(bad3), ParseError);
}
