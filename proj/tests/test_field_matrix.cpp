#include <doctest.h>

#include <random>
#include <sstream>

#include <algorithm>
#include <cstdlib>

#include "lincache/field_matrix.hpp"
#include "lincache/parallel.hpp"
#include "oracle.hpp"

using namespace lincache;

namespace {

FieldMatrix units(std::uint32_t p, std::size_t cols, std::vector<std::size_t> idx) {
    return FieldMatrix::unit_rows(p, cols, idx);
}

} // namespace

TEST_CASE("rank of identity and of the user-0 stack with A_1") {
    CHECK(rank(FieldMatrix::identity(2, 4)) == 4);
    const auto s0 = units(2, 4, {0, 2});
    CHECK(rank(stack_rows(s0, s0)) == 2);
}

TEST_CASE("rank agrees with the independent oracle on GF(3) 8x8") {
    std::mt19937_64 g(11);
    for (int i = 0; i < 50; ++i) {
        const auto m = i % 2 ? oracle::random_matrix(g, 3, 8, 8) : oracle::random_low_rank(g, 3, 8, 8, 1 + i % 7);
        CHECK(rank(m) == oracle::rank(m));
    }
}

TEST_CASE("rank agrees with oracle across primes and shapes") {
    std::mt19937_64 g(5);
    for (std::uint32_t p : {2u, 3u, 5u, 7u, 251u, 65521u}) {
        for (int i = 0; i < 20; ++i) {
            const std::size_t r = 1 + g() % 12, c = 1 + g() % 12;
            const auto m = oracle::random_low_rank(g, p, r, c, 1 + g() % 6);
            CHECK(rank(m) == oracle::rank(m));
            CHECK(rank(m) == rank(m.transpose()));
        }
    }
}

TEST_CASE("invert") {
    CHECK(invert(FieldMatrix::identity(2, 5)) == FieldMatrix::identity(2, 5));

    const auto stack = units(2, 4, {0, 2, 1, 3});
    const auto inv = invert(stack);
    // (w0, w2, w1, w3) -> (w0, w1, w2, w3)
    const std::vector<PacketBlock> seen = {{10}, {12}, {11}, {13}};
    const auto back = mat_apply(inv, seen);
    CHECK(back == std::vector<PacketBlock>{{10}, {11}, {12}, {13}});

    std::mt19937_64 g(3);
    int done = 0;
    while (done < 10) {
        const auto m = oracle::random_matrix(g, 5, 6, 6);
        if (rank(m) < 6) {
            CHECK_THROWS_AS(invert(m), SingularMatrix);
            continue;
        }
        const auto mi = invert(m);
        CHECK(mat_mul(m, mi) == FieldMatrix::identity(5, 6));
        CHECK(mat_mul(mi, m) == FieldMatrix::identity(5, 6));
        CHECK(invert(mi) == m);
        ++done;
    }
}

TEST_CASE("solve_left") {
    const auto s = units(2, 4, {0, 2});
    auto d = solve_left(s, s);
    REQUIRE(d);
    CHECK(*d == FieldMatrix::identity(2, 2));

    const auto t = units(2, 4, {2, 2});
    d = solve_left(s, t);
    REQUIRE(d);
    CHECK(*d == FieldMatrix::from_rows(2, {{0, 1}, {0, 1}}));

    std::mt19937_64 g(9);
    for (std::uint32_t p : {2u, 3u, 7u}) {
        for (int i = 0; i < 30; ++i) {
            const auto S = oracle::random_low_rank(g, p, 5, 9, 1 + g() % 5);
            const auto R = oracle::random_matrix(g, p, 4, 5);
            const auto T = mat_mul(R, S);
            const auto D = solve_left(S, T);
            REQUIRE(D);
            CHECK(mat_mul(*D, S) == T);
            const auto T2 = oracle::random_matrix(g, p, 3, 9);
            CHECK(solve_left(S, T2).has_value() == row_space_contains(S, T2));
        }
    }
}

TEST_CASE("kron") {
    const auto b = FieldMatrix::from_rows(3, {{1, 2, 0}, {2, 2, 1}});
    const auto i2 = FieldMatrix::identity(3, 2);
    const std::vector<FieldMatrix> two{b, b};
    CHECK(kron(i2, b) == block_diag(two));
    CHECK(kron(FieldMatrix::from_rows(3, {{2}}), b) == FieldMatrix::from_rows(3, {{2, 1, 0}, {1, 1, 2}}));

    std::mt19937_64 g(4);
    for (int i = 0; i < 20; ++i) {
        const auto a = oracle::random_matrix(g, 5, 1 + g() % 4, 1 + g() % 4);
        const auto c = oracle::random_matrix(g, 5, 1 + g() % 4, 1 + g() % 4);
        const auto k = kron(a, c);
        CHECK(k.rows() == a.rows() * c.rows());
        CHECK(k.cols() == a.cols() * c.cols());
        CHECK(oracle::to_mat(k) == oracle::kron(oracle::to_mat(a), oracle::to_mat(c), 5));
    }
    CHECK_THROWS(kron(FieldMatrix::identity(2, 2), FieldMatrix::identity(3, 2)));
}

TEST_CASE("block_diag") {
    const std::vector<FieldMatrix> ids{FieldMatrix::identity(2, 2), FieldMatrix::identity(2, 3)};
    CHECK(block_diag(ids) == FieldMatrix::identity(2, 5));
    const auto e = block_diag(std::vector<FieldMatrix>{});
    CHECK(e.rows() == 0);
    CHECK(e.cols() == 0);
    // two copies of E_{0,0} for q=3, m=2
    const auto E = units(2, 9, {0, 3, 6});
    const auto d = block_diag(std::vector<FieldMatrix>{E, E});
    CHECK(d.rows() == 6);
    CHECK(d.cols() == 18);
    CHECK(d.at(3, 9) == 1);
    CHECK(d.at(0, 9) == 0);
}

TEST_CASE("mat_apply") {
    const std::vector<PacketBlock> file{{1, 0, 1, 1}, {0, 1, 1, 0}, {1, 1, 1, 1}};
    CHECK(mat_apply(FieldMatrix::identity(2, 3), file) == file);
    const auto x = mat_apply(FieldMatrix::from_rows(2, {{1, 1, 0}}), file);
    CHECK(x[0] == PacketBlock{1, 1, 0, 1});

    std::mt19937_64 g(8);
    for (std::uint32_t p : {2u, 3u, 13u}) {
        const auto m = oracle::random_matrix(g, p, 5, 7);
        std::vector<PacketBlock> f(7, PacketBlock(16));
        for (auto& b : f)
            for (auto& s : b) s = static_cast<Residue>(g() % p);
        CHECK(mat_apply(m, f) == oracle::apply(oracle::to_mat(m), f, p));
    }
}

TEST_CASE("row_space_contains") {
    std::mt19937_64 g(2);
    const auto s0 = units(2, 4, {0, 2});
    CHECK(row_space_contains(s0, s0));
    CHECK(row_space_contains(s0, FieldMatrix::from_rows(2, {{1, 0, 0, 0}, {0, 0, 0, 0}})));
    for (int i = 0; i < 20; ++i) {
        const auto a = oracle::random_low_rank(g, 3, 6, 10, 4);
        const std::size_t rk = rank(a);
        // a row outside the span: pick a unit vector that raises the rank
        for (std::size_t c = 0; c < 10; ++c) {
            const auto e = units(3, 10, {c});
            if (rank(stack_rows(a, e)) > rk) {
                CHECK_FALSE(row_space_contains(a, e));
                break;
            }
        }
        CHECK(row_space_contains(a, mat_mul(oracle::random_matrix(g, 3, 3, 6), a)));
    }
}

TEST_CASE("packed GF(2) paths agree with the unpacked reference") {
    std::mt19937_64 g(2024);
    for (int i = 0; i < 1000; ++i) {
        const std::size_t r = 1 + g() % 64, c = 1 + g() % 64;
        const auto m = (i % 3 == 0) ? oracle::random_low_rank(g, 2, r, c, 1 + g() % 20) : oracle::random_matrix(g, 2, r, c);
        const std::size_t rk = rank(m);
        REQUIRE(rk == detail::rank_unpacked(m));
        if (i % 10 == 0) CHECK(rk == oracle::rank(m));
        const auto t = (i % 2) ? mat_mul(oracle::random_matrix(g, 2, 3, r), m) : oracle::random_matrix(g, 2, 3, c);
        const auto d1 = solve_left(m, t);
        const auto d2 = detail::solve_left_unpacked(m, t);
        REQUIRE(d1.has_value() == d2.has_value());
        if (d1) {
            CHECK(mat_mul(*d1, m) == t);
            CHECK(mat_mul(*d2, m) == t);
        }
    }
}

TEST_CASE("matrix text round trip and bad input") {
    std::mt19937_64 g(1);
    const auto m = oracle::random_matrix(g, 7, 4, 5);
    CHECK(matrix_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(matrix_from_string("4 1 1\n0\n"), ParseError);
    CHECK_THROWS_AS(matrix_from_string("3 1 2\n0 3\n"), ParseError);
    CHECK_THROWS_AS(matrix_from_string("3 2 2\n0 1\n"), ParseError);
    CHECK_THROWS(FieldMatrix(4, 1, 1));
}

TEST_CASE("parallel_for covers every index, rethrows, and honours LCC_THREADS") {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) {
                        if (i == 7) throw InvalidArgument("seven");
                    }),
                    InvalidArgument);
    setenv("LCC_THREADS", "1", 1);
    CHECK(thread_count() == 1);
    unsetenv("LCC_THREADS");
    CHECK(thread_count() >= 1);
}
