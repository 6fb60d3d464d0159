#pragma once

#include <fstream>
#include <string>

#include "lincache/linear_scheme.hpp"
#include "lincache/msr_bridge.hpp"
#include "lincache/pda.hpp"

namespace fixtures {

inline std::string data_path(const std::string& name) { return std::string(LINCACHE_TEST_DATA) + "/" + name; }

inline lincache::Pda small_pda() {
    std::ifstream in(data_path("pda_6_4_2_4.pda"));
    return lincache::read_pda(in);
}

inline lincache::LinearScheme six_user_scheme() {
    std::ifstream in(data_path("six_users_f4.scheme"));
    return lincache::read_scheme(in);
}

inline lincache::MsrFile msr(const std::string& name) {
    std::ifstream in(data_path(name));
    return lincache::read_msr(in);
}

// Places, broadcasts and decodes every user; true iff all users recover
// their file exactly.
inline bool round_trip(const lincache::LinearScheme& s, const lincache::PacketLibrary& lib,
                       const lincache::DemandVector& d) {
    const auto caches = lincache::place(s, lib);
    const auto x = lincache::encode_broadcast(s, lib, d);
    for (std::size_t k = 0; k < s.users(); ++k)
        if (lincache::decode_user(s, k, caches[k], x, d) != lib.files[d[k]]) return false;
    return true;
}

inline bool round_trips(const lincache::LinearScheme& s, std::size_t demands, std::uint64_t seed,
                        std::size_t block = 16) {
    const std::size_t N = s.users();
    const auto lib = lincache::PacketLibrary::random(N, s.packets(), s.modulus(), block, seed);
    const auto caches = lincache::place(s, lib);
    std::vector<lincache::UserDecoder> dec;
    for (std::size_t k = 0; k < s.users(); ++k) dec.emplace_back(s, k);
    for (const auto& d : lincache::random_demands(s.users(), N, demands, seed + 1)) {
        const auto x = lincache::encode_broadcast(s, lib, d);
        for (std::size_t k = 0; k < s.users(); ++k)
            if (dec[k].decode(caches[k], x, d) != lib.files[d[k]]) return false;
    }
    return true;
}

} // namespace fixtures
