#pragma once

#include <array>
#include <cstdint>

#include "fraudward/table.hpp"

namespace fraudward {

struct SplitSpec {
    std::array<int64_t, 3> ratio = {4, 1, 1};  // train : test : validation
    uint64_t seed = 0;
    bool stratify = true;
};

struct SplitResult {
    LabeledTable train;
    LabeledTable test;
    LabeledTable validation;
};

// Exact largest-remainder apportionment of `total` over the ratio parts.
// Ties in the remainders go to the earlier part.
std::array<int64_t, 3> apportion(int64_t total, const std::array<int64_t, 3>& ratio);

// Disjoint partition covering every row. Stratified mode apportions each
// class separately so balanced inputs stay balanced per part. Deterministic
// for a fixed (table, spec); rows inside each part keep their input order.
SplitResult split(const LabeledTable& table, const SplitSpec& spec);

}  // namespace fraudward
