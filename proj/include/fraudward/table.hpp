#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "fraudward/schema.hpp"

namespace fraudward {

// Row-major labeled records. Categorical cells store the index into the
// feature's declared category list; numeric cells store the value itself.
// Tables are immutable after construction and safe for concurrent reads.
struct LabeledTable {
    std::shared_ptr<const FeatureSchema> schema;
    std::vector<double> cells;    // n_rows * n_features
    std::vector<int32_t> labels;  // 0/1; 1 = fraud/overdue

    int64_t n_rows() const { return static_cast<int64_t>(labels.size()); }
    int64_t n_features() const { return schema ? schema->n_features() : 0; }

    double cell(int64_t row, int64_t feature) const {
        return cells[static_cast<size_t>(row * n_features() + feature)];
    }
    double numeric_at(int64_t row, int64_t feature) const { return cell(row, feature); }
    int32_t category_at(int64_t row, int64_t feature) const {
        return static_cast<int32_t>(cell(row, feature));
    }

    // Checks the type invariants: label domain, finite numeric cells,
    // categorical cells inside the declared universe. Throws on violation.
    void validate() const;
};

struct ClassBalance {
    int64_t n_pos = 0;
    int64_t n_neg = 0;
    double rate = 0.0;
};

ClassBalance class_balance(const LabeledTable& table);

}  // namespace fraudward
