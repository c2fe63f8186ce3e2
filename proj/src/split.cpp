#include "fraudward/split.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "fraudward/errors.hpp"
#include "fraudward/rng.hpp"

namespace fraudward {

namespace {

void shuffle_indices(std::vector<int64_t>& idx, Rng& rng) {
    for (size_t i = idx.size(); i > 1; --i) {
        const size_t j = static_cast<size_t>(rng.uniform_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

LabeledTable take_rows(const LabeledTable& table, const std::vector<int64_t>& rows) {
    LabeledTable out;
    out.schema = table.schema;
    const int64_t w = table.n_features();
    out.cells.reserve(rows.size() * static_cast<size_t>(w));
    out.labels.reserve(rows.size());
    for (int64_t r : rows) {
        const double* src = table.cells.data() + r * w;
        out.cells.insert(out.cells.end(), src, src + w);
        out.labels.push_back(table.labels[static_cast<size_t>(r)]);
    }
    return out;
}

// Assigns the given rows to the three parts by largest remainder; rows are
// shuffled with `rng` first so the assignment is random but seed-stable.
void assign_rows(std::vector<int64_t> rows, const std::array<int64_t, 3>& ratio, Rng& rng,
                 std::array<std::vector<int64_t>, 3>& parts) {
    shuffle_indices(rows, rng);
    const auto sizes = apportion(static_cast<int64_t>(rows.size()), ratio);
    size_t cursor = 0;
    for (int p = 0; p < 3; ++p) {
        for (int64_t i = 0; i < sizes[static_cast<size_t>(p)]; ++i) {
            parts[static_cast<size_t>(p)].push_back(rows[cursor++]);
        }
    }
}

}  // namespace

std::array<int64_t, 3> apportion(int64_t total, const std::array<int64_t, 3>& ratio) {
    const int64_t denom = ratio[0] + ratio[1] + ratio[2];
    std::array<int64_t, 3> sizes{};
    std::array<int64_t, 3> remainder{};
    int64_t assigned = 0;
    for (int p = 0; p < 3; ++p) {
        const int64_t scaled = total * ratio[static_cast<size_t>(p)];
        sizes[static_cast<size_t>(p)] = scaled / denom;
        remainder[static_cast<size_t>(p)] = scaled % denom;
        assigned += sizes[static_cast<size_t>(p)];
    }
    for (int64_t left = total - assigned; left > 0; --left) {
        int best = 0;
        for (int p = 1; p < 3; ++p) {
            if (remainder[static_cast<size_t>(p)] > remainder[static_cast<size_t>(best)]) best = p;
        }
        sizes[static_cast<size_t>(best)] += 1;
        remainder[static_cast<size_t>(best)] = -1;
    }
    return sizes;
}

SplitResult split(const LabeledTable& table, const SplitSpec& spec) {
    for (int64_t part : spec.ratio) {
        if (part < 1) raise(ErrorCode::InvalidConfig, "every ratio part must be >= 1");
    }
    const int64_t n = table.n_rows();
    const int64_t denom = spec.ratio[0] + spec.ratio[1] + spec.ratio[2];
    if (n < denom) {
        raise(ErrorCode::TooFewRows,
              std::to_string(n) + " rows cannot fill a " + std::to_string(spec.ratio[0]) + ":" +
                  std::to_string(spec.ratio[1]) + ":" + std::to_string(spec.ratio[2]) + " split");
    }

    std::array<std::vector<int64_t>, 3> parts;
    if (spec.stratify) {
        for (int32_t cls = 0; cls < 2; ++cls) {
            std::vector<int64_t> rows;
            for (int64_t r = 0; r < n; ++r) {
                if (table.labels[static_cast<size_t>(r)] == cls) rows.push_back(r);
            }
            Rng rng(derive_stream(spec.seed, static_cast<uint64_t>(cls)));
            assign_rows(std::move(rows), spec.ratio, rng, parts);
        }
    } else {
        std::vector<int64_t> rows(static_cast<size_t>(n));
        std::iota(rows.begin(), rows.end(), 0);
        Rng rng(derive_stream(spec.seed, 2));
        assign_rows(std::move(rows), spec.ratio, rng, parts);
    }

    for (auto& part : parts) std::sort(part.begin(), part.end());
    return SplitResult{take_rows(table, parts[0]), take_rows(table, parts[1]), take_rows(table, parts[2])};
}

}  // namespace fraudward
