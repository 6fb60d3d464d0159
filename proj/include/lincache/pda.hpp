#pragma once

// Placement delivery arrays.
//
// An F x K array over {*, 0..S-1}.  Column k describes user k: a star in
// row j means packet j of every file is cached; integer s means packet j of
// the demanded file is delivered in transmission s.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lincache/linear_scheme.hpp"

namespace lincache {

class Pda {
public:
    using Cell = std::optional<std::size_t>;  // nullopt is the star

    Pda(std::size_t users, std::size_t packets, std::size_t stars, std::size_t symbols, std::vector<Cell> cells);

    // Builds from rows of tokens, "*" or a decimal integer.  Z is taken from
    // column 0 and S as one more than the largest integer.
    static Pda from_tokens(const std::vector<std::vector<std::string>>& rows);

    std::size_t users() const noexcept { return users_; }      // K
    std::size_t packets() const noexcept { return packets_; }  // F
    std::size_t stars() const noexcept { return stars_; }      // Z
    std::size_t symbols() const noexcept { return symbols_; }  // S

    const Cell& at(std::size_t row, std::size_t col) const { return cells_.at(row * users_ + col); }
    bool is_star(std::size_t row, std::size_t col) const { return !at(row, col).has_value(); }

    friend bool operator==(const Pda&, const Pda&) = default;

private:
    std::size_t users_;
    std::size_t packets_;
    std::size_t stars_;
    std::size_t symbols_;
    std::vector<Cell> cells_;
};

enum class PdaCondition { StarCount, Coverage, SubArray, Range };

struct PdaViolation {
    PdaCondition condition;
    // StarCount: column in `col`.  Coverage: missing integer in `symbol`.
    // SubArray: the two cells (row, col) and (row2, col2) holding `symbol`.
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t row2 = 0;
    std::size_t col2 = 0;
    std::size_t symbol = 0;
};

struct PdaReport {
    bool valid = false;
    std::vector<PdaViolation> violations;
};

std::string describe(const PdaViolation& v);

PdaReport validate_pda(const Pda& pda);

// The Maddah-Ali--Niesen array: rows are the t-subsets of [0, K) in colex
// order, integers index the (t+1)-subsets in colex order.  Requires 0 < t < K.
Pda mn_pda(std::size_t users, std::size_t t);

// One packet of file `file` taking part in a transmission.
struct PacketRef {
    std::size_t file = 0;
    std::size_t packet = 0;
    friend bool operator==(const PacketRef&, const PacketRef&) = default;
};

struct PdaTransmission {
    std::vector<PacketRef> terms;  // ordered by (column, row)
    PacketBlock block;
};

struct PdaDelivery {
    // caches[k][i] holds (packet index, block) for every starred packet of file i.
    std::vector<std::vector<std::vector<std::pair<std::size_t, PacketBlock>>>> caches;
    std::vector<PdaTransmission> transmissions;  // one per integer s
    std::vector<std::vector<PacketBlock>> decoded;  // decoded[k] == W_{d_k}
};

// Runs placement and XOR delivery straight from the array.
PdaDelivery run_pda_delivery(const Pda& pda, const PacketLibrary& library, const DemandVector& d);

// Caching rows e_j for every star, coding row s = sum_j [p_{j,k} = s] e_j,
// decoding rows selecting the nonzero rows of A_k in ascending order.
LinearScheme pda_to_linear(const Pda& pda, std::uint32_t p = 2);

// ---- text format ---------------------------------------------------------
//
//   K F Z S
//   F lines of K tokens, '*' or a decimal integer

void write_pda(std::ostream& os, const Pda& pda);
Pda read_pda(std::istream& is);

} // namespace lincache
