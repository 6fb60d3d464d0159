#pragma once

// From an MSR code with optimal-repair subspaces to a caching scheme.
//
// The code has K systematic nodes and r parity nodes of F symbols each;
// parity node x stores sum_i A_{x,i} W_i.  Repairing systematic node k
// downloads S_{x,k} times parity node x, with S_{x,k} an (F/r) x F matrix.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lincache/linear_scheme.hpp"

namespace lincache {

struct MsrCode {
    std::uint32_t modulus = 2;
    std::size_t systematic = 0;  // K
    std::size_t parity = 0;      // r
    std::size_t node_size = 0;   // F
    std::vector<std::vector<FieldMatrix>> encoding;  // [x][i], F x F

    // Shapes, moduli, r | F and nonsingular A_{x,i}.
    void validate() const;
};

struct RepairSubspaces {
    std::vector<std::vector<FieldMatrix>> sub;  // [x][k], (F/r) x F
};

struct MsrRepairReport {
    bool pass = false;
    std::vector<PairCheck> pairs;  // (k, k'), rank of stack_x S_{x,k} A_{x,k'}
    std::vector<std::string> failures;
};

MsrRepairReport verify_msr_repair(const MsrCode& code, const RepairSubspaces& subspaces);

// Every K of the K + r nodes recover the data.  Exhaustive, needs K + r <= 12.
bool verify_mds(const MsrCode& code);

// K users, M/N = 1/r, R = r - 1.  Parity node 0 is folded into the data
// basis first: A_{x,k} becomes A_{x,k} A_{0,k}^{-1}, so S_k = S_{0,k},
// A_k stacks the normalised A_{1..r-1,k} and S'_k = diag(S_{1..r-1,k}).
// Throws Infeasible when the repair check fails.
LinearScheme msr_to_scheme(const MsrCode& code, const RepairSubspaces& subspaces);

namespace detail {
// The same transform without the repair check, so tests can compare the
// two conditions on broken inputs.
LinearScheme msr_transform(const MsrCode& code, const RepairSubspaces& subspaces);
} // namespace detail

// ---- text format ---------------------------------------------------------
//
//   p K r F
//   ENC x i  followed by a matrix, for all x < r, i < K
//   SUB x k  followed by a matrix, for all x < r, k < K

struct MsrFile {
    MsrCode code;
    RepairSubspaces subspaces;
};

void write_msr(std::ostream& os, const MsrCode& code, const RepairSubspaces& subspaces);
MsrFile read_msr(std::istream& is);

} // namespace lincache
