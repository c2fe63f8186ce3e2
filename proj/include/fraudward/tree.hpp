#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudward/matrix.hpp"
#include "fraudward/rng.hpp"

namespace fraudward {

enum class Impurity { gini, variance };

struct TreeParams {
    int32_t max_depth = 1;
    int64_t min_samples_split = 2;
    Impurity impurity = Impurity::gini;
};

struct SplitCandidate {
    int32_t feature_index = -1;
    double threshold = 0.0;
    double gain = 0.0;

    bool valid() const { return feature_index >= 0; }
};

struct TreeNode {
    int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;

    bool is_leaf() const { return feature < 0; }
};

// Binary CART tree; nodes[0] is the root. Routing convention: value <=
// threshold goes left.
struct Tree {
    std::vector<TreeNode> nodes;
    int32_t depth = 0;

    // Hot path; assumes the row covers every feature index in the tree.
    double predict_row(const double* row) const {
        int32_t i = 0;
        while (!nodes[static_cast<size_t>(i)].is_leaf()) {
            const TreeNode& nd = nodes[static_cast<size_t>(i)];
            i = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        return nodes[static_cast<size_t>(i)].value;
    }

    int32_t leaf_for(const double* row) const {
        int32_t i = 0;
        while (!nodes[static_cast<size_t>(i)].is_leaf()) {
            const TreeNode& nd = nodes[static_cast<size_t>(i)];
            i = row[nd.feature] <= nd.threshold ? nd.left : nd.right;
        }
        return i;
    }
};

// Checked single-row prediction (WidthMismatch when the row is too narrow).
double predict(const Tree& tree, std::span<const double> row);

double gini(int64_t n_pos, int64_t n_neg);

// Per-column row indices sorted by ascending value, ties by ascending row.
// Built once per training matrix and shared across trees and sweep cells.
struct ColumnOrder {
    int64_t n_rows = 0;
    int64_t n_cols = 0;
    std::vector<int32_t> order;  // column-major blocks

    static ColumnOrder build(const Matrix& m);
    const int32_t* column(int64_t c) const { return order.data() + c * n_rows; }
};

enum class FeatureRule { all, sqrt_count };

// Exhaustive scan over every feature in `feature_subset` and every midpoint
// between consecutive distinct values of the rows in `row_subset` (repeats
// act as integer weights). Returns the candidate with the largest impurity
// decrease, ties broken by lower feature index then lower threshold, or an
// invalid candidate when no split has gain > 0.
SplitCandidate best_split(const Matrix& m, std::span<const double> targets,
                          std::span<const int32_t> row_subset,
                          std::span<const int32_t> feature_subset, Impurity impurity,
                          const ColumnOrder* shared_order = nullptr);

// Greedy recursive partitioning with depth and min-samples stops. Targets
// are indexed by global row; gini mode requires them to be 0/1. `rng` is
// consulted only under FeatureRule::sqrt_count (candidate-feature draws per
// node, in node creation order). `leaf_of_row`, when given, receives the
// final leaf index for every row of the subset (-1 elsewhere).
Tree fit_tree(const Matrix& m, std::span<const double> targets, const TreeParams& params,
              std::span<const int32_t> row_subset, FeatureRule rule = FeatureRule::all,
              Rng* rng = nullptr, const ColumnOrder* shared_order = nullptr,
              std::vector<int32_t>* leaf_of_row = nullptr);

}  // namespace fraudward
