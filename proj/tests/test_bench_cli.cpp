#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "lincache/bench.hpp"
#include "lincache/cli.hpp"
#include "lincache/construction_one.hpp"

using namespace lincache;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "lincache_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("bench formulas") {
    const auto mn = mn_row(12, 1, 2);
    CHECK(*mn.rate == Rational(6, 7));
    CHECK(mn.packets == 924);
    CHECK(decimal4(*mn.rate) == "0.8571");
    const auto yan = yan_row(12, 1, 2);
    CHECK(*yan.rate == Rational(1));
    CHECK(yan.packets == 32);
    const auto t3 = theorem3_row(12, 1, 2);
    CHECK(*t3.rate == Rational(1));
    CHECK(t3.packets == 16);
    CHECK(mn_row(36, 1, 2).packets == BigInt("9075135300"));
    CHECK(yan_row(36, 1, 2).packets == 131072);
    CHECK(theorem3_row(36, 1, 2).packets == 4096);
    const auto two = mn_row(2, 1, 2);
    CHECK(*two.rate == Rational(1, 2));
    CHECK(two.packets == 2);
    CHECK_FALSE(mn_row(13, 1, 2).rate);
    CHECK_FALSE(theorem3_row(13, 1, 2).rate);
    const auto c = composed_row(13, 1, 2);
    REQUIRE(c);
    CHECK(*c->rate == Rational(13, 12));
    CHECK_FALSE(composed_row(12, 1, 2));
    // the other Yan regime
    CHECK(*yan_row(12, 2, 3).rate == Rational(1, 2));
    CHECK(yan_row(12, 2, 3).packets == 27);
    CHECK_FALSE(yan_row(12, 2, 5).rate);
}

TEST_CASE("bench csv") {
    const auto r = cli({"bench", "--MN-ratio", "1/2", "--K", "12,36", "--csv"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "label,K,q,z,MN_num,MN_den,R_num,R_den,F\n"
                   "MN,12,2,1,1,2,6,7,924\n"
                   "YanLemma2,12,2,1,1,2,1,1,32\n"
                   "Theorem3,12,2,1,1,2,1,1,16\n"
                   "MN,36,2,1,1,2,18,19,9075135300\n"
                   "YanLemma2,36,2,1,1,2,1,1,131072\n"
                   "Theorem3,36,2,1,1,2,1,1,4096\n");
    CHECK(cli({"bench", "--mn-ratio", "1/x", "--K", "12"}).code == kExitInput);
    CHECK(cli({"bench", "--mn-ratio", "2/2", "--K", "12"}).code == kExitInput);
}

TEST_CASE("generate and info") {
    const auto path = tmp("t221.scheme");
    auto r = cli({"generate", "theorem3", "--q", "2", "--m", "2", "--z", "1", "-o", path});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(path);
    CHECK(read_scheme(in) == build_scheme({2, 2, 1}));
    r = cli({"info", path});
    CHECK(r.out.find("K=6 F=4") != std::string::npos);

    r = cli({"generate", "mn-pda", "--K", "4", "--t", "2"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("4 6 3 4\n", 0) == 0);

    CHECK(cli({"generate", "theorem3", "--q", "1", "--m", "2", "--z", "1"}).code == kExitInput);
    CHECK(cli({"generate", "nothing"}).code == kExitInput);
    CHECK(cli({}).code == kExitInput);
}

TEST_CASE("verify exit codes") {
    CHECK(cli({"verify", fixtures::data_path("six_users_f4.scheme")}).code == kExitOk);
    CHECK(cli({"verify", fixtures::data_path("pda_6_4_2_4.pda")}).code == kExitOk);
    CHECK(cli({"verify", fixtures::data_path("msr_gf3_k2.msr")}).code == kExitOk);

    const auto corrupt = tmp("corrupt.scheme");
    std::ofstream(corrupt) << "6 4 2 1 2 1 1\n\n2 2 4\n1 0 zero 0\n";
    CHECK(cli({"verify", corrupt}).code == kExitInput);
    CHECK(cli({"verify", tmp("does-not-exist")}).code == kExitInput);

    auto users = fixtures::six_user_scheme().all_users();
    users[2].decoding = FieldMatrix(2, 2, 4);
    const auto mutated = tmp("mutated.scheme");
    {
        std::ofstream o(mutated);
        write_scheme(o, LinearScheme(4, 2, Rational(1, 2), Rational(1), users));
    }
    const auto r = cli({"verify", mutated});
    CHECK(r.code == kExitFail);
    CHECK(r.out.find("pair (2,2)") != std::string::npos);
}

TEST_CASE("simulate") {
    auto r = cli({"simulate", fixtures::data_path("six_users_f4.scheme"), "--demands", "explicit:0,1,2,3,4,5"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("decoded 6/6 rows 4/4") != std::string::npos);
    CHECK(r.out.find("observed 1 (1.0000)") != std::string::npos);

    r = cli({"simulate", fixtures::data_path("six_users_f4.scheme"), "--demands", "explicit:0,0,0,0,0,0"});
    CHECK(r.code == kExitOk);

    const auto path = tmp("t321.scheme");
    REQUIRE(cli({"generate", "theorem3", "--q", "3", "--m", "2", "--z", "1", "-o", path}).code == kExitOk);
    r = cli({"simulate", path, "--demands", "random:20", "--seed", "4", "--block-size", "8"});
    CHECK(r.code == kExitOk);
    const auto again = cli({"simulate", path, "--demands", "random:20", "--seed", "4", "--block-size", "8"});
    CHECK(again.out == r.out);

    r = cli({"simulate", fixtures::data_path("pda_6_4_2_4.pda"), "--demands", "all", "--files", "2"});
    CHECK(r.code == kExitOk);
    CHECK(cli({"simulate", path, "--demands", "sometimes"}).code == kExitInput);
    CHECK(cli({"simulate", path, "--demands", "explicit:0,1"}).code == kExitInput);
}

TEST_CASE("convert") {
    const auto out = tmp("ex4.scheme");
    auto r = cli({"convert", fixtures::data_path("pda_6_4_2_4.pda"), "--pda-to-linear", "-o", out});
    REQUIRE(r.code == kExitOk);
    {
        std::ifstream in(out);
        CHECK(read_scheme(in) == pda_to_linear(fixtures::small_pda()));
    }

    const auto msr = tmp("msr.scheme");
    r = cli({"convert", fixtures::data_path("msr_gf3_k3.msr"), "--from-msr", "-o", msr});
    REQUIRE(r.code == kExitOk);
    CHECK(cli({"verify", msr}).code == kExitOk);

    const auto ext = tmp("ext9.scheme");
    r = cli({"convert", fixtures::data_path("six_users_f4.scheme"), "--extend-to", "9", "-o", ext});
    REQUIRE(r.code == kExitOk);
    std::ifstream in(ext);
    const auto s = read_scheme(in);
    CHECK(s.users() == 9);
    CHECK(s.packets() == 8);
    CHECK(s.nominal_rate() == Rational(3, 2));

    CHECK(cli({"convert", fixtures::data_path("six_users_f4.scheme"), "--from-msr"}).code == kExitInput);
    CHECK(cli({"convert", fixtures::data_path("six_users_f4.scheme")}).code == kExitInput);
    CHECK(cli({"convert", fixtures::data_path("six_users_f4.scheme"), "--extend-to", "6"}).code == kExitInput);
}

TEST_CASE("written files re-parse to the same value") {
    const auto p = tmp("mn.pda");
    REQUIRE(cli({"generate", "mn-pda", "--K", "5", "--t", "2", "-o", p}).code == kExitOk);
    std::ifstream in(p);
    CHECK(read_pda(in) == mn_pda(5, 2));
    const auto text = read_file(p);
    std::ostringstream again;
    write_pda(again, mn_pda(5, 2));
    CHECK(text == again.str());
}
