#include "lincache/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>

#include "lincache/bench.hpp"
#include "lincache/concatenation.hpp"
#include "lincache/construction_one.hpp"
#include "lincache/msr_bridge.hpp"
#include "lincache/pda.hpp"

namespace lincache {

namespace {

using Loaded = std::variant<Pda, LinearScheme, MsrFile>;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Loaded load(const std::string& path) {
    const std::string text = slurp(path);
    std::istringstream lines(text);
    std::string line, header;
    bool msr = false;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (header.empty()) header = line;
        if (first == "ENC" || first == "SUB") msr = true;
    }
    std::istringstream in(text);
    if (msr) return read_msr(in);
    std::istringstream hs(header);
    std::size_t tokens = 0;
    for (std::string t; hs >> t;) ++tokens;
    if (tokens == 7) return read_scheme(in);
    if (tokens == 4) return read_pda(in);
    throw ParseError("'" + path + "': unrecognised header (expected a scheme, PDA or MSR file)");
}

LinearScheme as_scheme(const Loaded& l) {
    if (auto s = std::get_if<LinearScheme>(&l)) return *s;
    if (auto p = std::get_if<Pda>(&l)) return pda_to_linear(*p);
    const auto& m = std::get<MsrFile>(l);
    return msr_to_scheme(m.code, m.subspaces);
}

template <class Writer>
void emit(const std::string& path, std::ostream& out, Writer&& write) {
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ofstream f(path);
    if (!f) throw ParseError("cannot write '" + path + "'");
    write(f);
    if (!f) throw ParseError("write to '" + path + "' failed");
}

void print_scheme_header(std::ostream& out, const LinearScheme& s) {
    out << "scheme K=" << s.users() << " F=" << s.packets() << " p=" << s.modulus()
        << " M/N=" << to_string(s.cache_fraction()) << " R=" << to_string(s.nominal_rate()) << '\n';
}

int report_scheme(std::ostream& out, const LinearScheme& s) {
    const auto rep = verify_scheme(s);
    print_scheme_header(out, s);
    const std::size_t ok =
        std::count_if(rep.pairs.begin(), rep.pairs.end(), [](const PairCheck& p) { return p.rank == p.expected; });
    out << "pairs " << ok << '/' << rep.pairs.size() << " satisfy the rank condition\n";
    if (!rep.formulations_agree) out << "warning: rank and subspace formulations disagree\n";
    for (const auto& f : rep.failures) out << "  " << f << '\n';
    out << (rep.pass ? "PASS" : "FAIL") << '\n';
    return rep.pass ? kExitOk : kExitFail;
}

std::vector<DemandVector> parse_demands(const std::string& text, std::size_t users, std::size_t files,
                                        std::uint64_t seed) {
    if (text == "all") {
        double total = 1;
        for (std::size_t k = 0; k < users; ++k) total *= static_cast<double>(files);
        if (total > 65536) throw InvalidArgument("--demands all would enumerate more than 65536 demands");
        std::vector<DemandVector> out;
        DemandVector d(users, 0);
        while (true) {
            out.push_back(d);
            std::size_t k = 0;
            while (k < users && ++d[k] == files) d[k++] = 0;
            if (k == users) break;
        }
        return out;
    }
    if (text.rfind("random:", 0) == 0) {
        std::size_t n = 0;
        try {
            n = std::stoul(text.substr(7));
        } catch (const std::exception&) {
            throw InvalidArgument("--demands random:N needs a count");
        }
        return random_demands(users, files, n, seed);
    }
    if (text.rfind("explicit:", 0) == 0) {
        std::vector<DemandVector> out;
        std::stringstream all(text.substr(9));
        for (std::string one; std::getline(all, one, ';');) {
            DemandVector d;
            std::stringstream items(one);
            for (std::string v; std::getline(items, v, ',');) {
                std::size_t pos = 0, x = 0;
                try {
                    x = std::stoul(v, &pos);
                } catch (const std::exception&) {
                    pos = 0;
                }
                if (pos == 0 || pos != v.size()) throw InvalidArgument("bad demand entry '" + v + "'");
                if (x >= files) throw InvalidArgument("demand " + v + " exceeds the file count");
                d.push_back(x);
            }
            if (d.size() != users) throw InvalidArgument("explicit demand needs " + std::to_string(users) + " entries");
            out.push_back(std::move(d));
        }
        if (out.empty()) throw InvalidArgument("explicit: needs at least one demand");
        return out;
    }
    throw InvalidArgument("--demands must be all, random:N or explicit:d0,d1,...[;...]");
}

std::string show(const DemandVector& d) {
    std::string s = "(";
    for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
    return s + ")";
}

int simulate(std::ostream& out, const LinearScheme& s, const std::string& demand_spec, std::uint64_t seed,
             std::size_t block, std::size_t files) {
    const std::size_t K = s.users(), F = s.packets();
    if (files == 0) files = K;
    if (block == 0) throw InvalidArgument("--block-size must be positive");
    const auto demands = parse_demands(demand_spec, K, files, seed);
    const auto lib = PacketLibrary::random(files, F, s.modulus(), block, seed);
    const auto caches = place(s, lib);
    std::vector<std::optional<UserDecoder>> decoders(K);
    std::vector<std::string> broken(K);
    for (std::size_t k = 0; k < K; ++k) {
        try {
            decoders[k].emplace(s, k);
        } catch (const Error& e) {
            broken[k] = e.what();
        }
    }
    print_scheme_header(out, s);
    out << "library N=" << files << " block=" << block << " seed=" << seed << '\n';
    bool all_ok = true;
    std::size_t worst = 0;
    for (const auto& d : demands) {
        const auto x = encode_broadcast(s, lib, d);
        worst = std::max(worst, x.transmitted_rows.size());
        std::size_t ok = 0;
        std::string failed;
        for (std::size_t k = 0; k < K; ++k) {
            bool good = false;
            if (decoders[k]) good = decoders[k]->decode(caches[k], x, d) == lib.files[d[k]];
            if (good)
                ++ok;
            else
                failed += " " + std::to_string(k);
        }
        all_ok = all_ok && ok == K;
        out << "d=" << show(d) << " decoded " << ok << '/' << K << " rows " << x.transmitted_rows.size() << '/'
            << s.signal_rows();
        if (!failed.empty()) out << " failed:" << failed;
        out << '\n';
    }
    for (std::size_t k = 0; k < K; ++k)
        if (!broken[k].empty()) out << "user " << k << ": " << broken[k] << '\n';
    const Rational observed(static_cast<std::int64_t>(worst), static_cast<std::int64_t>(F));
    out << "rate nominal " << to_string(s.nominal_rate()) << " observed " << to_string(observed) << " ("
        << decimal4(observed) << ")\n";
    out << (all_ok ? "PASS" : "FAIL") << '\n';
    return all_ok ? kExitOk : kExitFail;
}

std::pair<std::size_t, std::size_t> parse_ratio(const std::string& s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string::npos) throw std::invalid_argument(s);
        std::size_t p1 = 0, p2 = 0;
        const auto z = std::stoul(s.substr(0, slash), &p1);
        const auto q = std::stoul(s.substr(slash + 1), &p2);
        if (p1 != slash || p2 != s.size() - slash - 1) throw std::invalid_argument(s);
        return {z, q};
    } catch (const std::exception&) {
        throw InvalidArgument("ratio must look like z/q, got '" + s + "'");
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"linear coded caching toolkit"};
    app.require_subcommand(1);
    std::string output;

    auto* gen = app.add_subcommand("generate", "build a scheme or PDA");
    std::string kind;
    std::size_t gq = 0, gm = 0, gz = 0, gK = 0, gt = 0;
    gen->add_option("kind", kind, "theorem3 | mn-pda")->required()->check(CLI::IsMember({"theorem3", "mn-pda"}));
    gen->add_option("--q", gq, "field of digits, q >= 2");
    gen->add_option("--m", gm, "digits per packet index, m >= 1");
    gen->add_option("--z", gz, "cache size numerator, 1 <= z < q");
    gen->add_option("--K", gK, "users (mn-pda)");
    gen->add_option("--t", gt, "K M/N (mn-pda)");
    gen->add_option("-o,--output", output, "output path (default stdout)");

    auto* ver = app.add_subcommand("verify", "check a scheme, PDA or MSR file");
    std::string path;
    ver->add_option("path", path)->required();

    auto* sim = app.add_subcommand("simulate", "placement and delivery round trip");
    std::string demands = "random:20";
    std::uint64_t seed = 0;
    std::size_t block = kDefaultBlockSize, files = 0;
    sim->add_option("path", path)->required();
    sim->add_option("--demands", demands, "all | random:N | explicit:d0,d1,...[;...]");
    sim->add_option("--seed", seed);
    sim->add_option("--block-size", block);
    sim->add_option("--files", files, "library size N (default K)");

    auto* bench = app.add_subcommand("bench", "rate and subpacketization table");
    std::string ratio = "1/2";
    std::vector<std::size_t> ks;
    bool csv = false;
    bench->add_option("--MN-ratio,--mn-ratio", ratio, "cache fraction z/q");
    bench->add_option("--K", ks, "user counts")->delimiter(',')->required();
    bench->add_flag("--csv", csv);
    bench->add_option("-o,--output", output);

    auto* conv = app.add_subcommand("convert", "transform and re-verify");
    bool pda2lin = false, from_msr = false;
    std::size_t extend_to = 0;
    conv->add_option("path", path)->required();
    auto* o1 = conv->add_flag("--pda-to-linear", pda2lin);
    auto* o2 = conv->add_flag("--from-msr", from_msr);
    auto* o3 = conv->add_option("--extend-to", extend_to, "target user count");
    o1->excludes(o2)->excludes(o3);
    o2->excludes(o3);
    conv->add_option("-o,--output", output);

    auto* info = app.add_subcommand("info", "print parameters of a file");
    info->add_option("path", path)->required();

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitInput;
    }

    try {
        if (app.got_subcommand(gen)) {
            if (kind == "theorem3") {
                const ConstructionParams p{gq, gm, gz};
                p.validate();
                const auto s = build_scheme(p);
                emit(output, out, [&](std::ostream& o) { write_scheme(o, s); });
            } else {
                const auto p = mn_pda(gK, gt);
                emit(output, out, [&](std::ostream& o) { write_pda(o, p); });
            }
            return kExitOk;
        }
        if (app.got_subcommand(ver)) {
            const auto l = load(path);
            if (auto p = std::get_if<Pda>(&l)) {
                const auto rep = validate_pda(*p);
                out << "pda K=" << p->users() << " F=" << p->packets() << " Z=" << p->stars() << " S=" << p->symbols()
                    << '\n';
                for (const auto& v : rep.violations) out << "  " << describe(v) << '\n';
                out << (rep.valid ? "PASS" : "FAIL") << '\n';
                return rep.valid ? kExitOk : kExitFail;
            }
            if (auto m = std::get_if<MsrFile>(&l)) {
                const auto rep = verify_msr_repair(m->code, m->subspaces);
                out << "msr K=" << m->code.systematic << " r=" << m->code.parity << " F=" << m->code.node_size
                    << " p=" << m->code.modulus << '\n';
                for (const auto& f : rep.failures) out << "  " << f << '\n';
                bool mds_ok = true;
                if (m->code.systematic + m->code.parity <= 12) {
                    mds_ok = verify_mds(m->code);
                    out << "mds " << (mds_ok ? "yes" : "no") << '\n';
                }
                const bool pass = rep.pass && mds_ok;
                out << (pass ? "PASS" : "FAIL") << '\n';
                return pass ? kExitOk : kExitFail;
            }
            return report_scheme(out, std::get<LinearScheme>(l));
        }
        if (app.got_subcommand(sim)) {
            const auto l = load(path);
            if (std::holds_alternative<MsrFile>(l)) throw InvalidArgument("simulate needs a scheme or PDA file");
            return simulate(out, as_scheme(l), demands, seed, block, files);
        }
        if (app.got_subcommand(bench)) {
            const auto [z, q] = parse_ratio(ratio);
            const auto rows = bench_rows(z, q, ks);
            emit(output, out, [&](std::ostream& o) {
                if (csv)
                    write_bench_csv(o, rows);
                else
                    write_bench_table(o, rows);
            });
            return kExitOk;
        }
        if (app.got_subcommand(conv)) {
            const auto l = load(path);
            std::optional<LinearScheme> result;
            if (pda2lin) {
                if (!std::holds_alternative<Pda>(l)) throw InvalidArgument("--pda-to-linear needs a PDA file");
                const auto rep = validate_pda(std::get<Pda>(l));
                if (!rep.valid) {
                    err << "input PDA is invalid: " << describe(rep.violations.front()) << '\n';
                    return kExitFail;
                }
                result = pda_to_linear(std::get<Pda>(l));
            } else if (from_msr) {
                if (!std::holds_alternative<MsrFile>(l)) throw InvalidArgument("--from-msr needs an MSR file");
                const auto& m = std::get<MsrFile>(l);
                const auto rep = verify_msr_repair(m.code, m.subspaces);
                if (!rep.pass) {
                    err << "repair condition fails: " << rep.failures.front() << '\n';
                    return kExitFail;
                }
                result = msr_to_scheme(m.code, m.subspaces);
            } else if (extend_to > 0) {
                const auto src = as_scheme(l);
                if (!verify_scheme(src).pass) {
                    err << "source scheme fails verification\n";
                    return kExitFail;
                }
                result = compose_for_users(src, extend_to);
            } else {
                throw InvalidArgument("convert needs --pda-to-linear, --from-msr or --extend-to K");
            }
            const auto rep = verify_scheme(*result);
            if (!rep.pass) {
                err << "converted scheme fails verification; nothing written\n";
                return kExitFail;
            }
            emit(output, out, [&](std::ostream& o) { write_scheme(o, *result); });
            return kExitOk;
        }
        if (app.got_subcommand(info)) {
            const auto l = load(path);
            if (auto p = std::get_if<Pda>(&l)) {
                out << "pda K=" << p->users() << " F=" << p->packets() << " Z=" << p->stars() << " S=" << p->symbols()
                    << " M/N=" << to_string(Rational(static_cast<std::int64_t>(p->stars()),
                                                     static_cast<std::int64_t>(p->packets())))
                    << " R=" << to_string(Rational(static_cast<std::int64_t>(p->symbols()),
                                                   static_cast<std::int64_t>(p->packets())))
                    << '\n';
            } else if (auto m = std::get_if<MsrFile>(&l)) {
                out << "msr K=" << m->code.systematic << " r=" << m->code.parity << " F=" << m->code.node_size
                    << " p=" << m->code.modulus << '\n';
            } else {
                const auto& s = std::get<LinearScheme>(l);
                print_scheme_header(out, s);
                out << "Z=" << s.cached_rows() << " RF=" << s.signal_rows()
                    << " transmitted=" << transmitted_rows(s).size() << '\n';
            }
            return kExitOk;
        }
    } catch (const Infeasible& e) {
        err << "error: " << e.what() << '\n';
        return kExitFail;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}

} // namespace lincache
