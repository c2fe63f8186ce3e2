#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudward/matrix.hpp"
#include "fraudward/tree.hpp"

namespace fraudward {

struct ForestParams {
    int32_t n_trees = 1;
    int32_t max_depth = 1;
    bool bootstrap = true;
    FeatureRule feature_rule = FeatureRule::sqrt_count;
    uint64_t seed = 0;
};

struct ForestModel {
    ForestParams params;
    int64_t width = 0;
    bool single_class = false;  // training saw one class; scores are constant
    std::vector<Tree> trees;
};

// Bagged gini trees. Tree t draws its bootstrap sample and per-node feature
// subsets from a stream keyed by (seed, t), so the model is bit-identical
// no matter how many workers train it or in what order.
ForestModel fit_forest(const Matrix& m, std::span<const int32_t> labels, const ForestParams& params,
                       const ColumnOrder* shared_order = nullptr);

// Soft voting: the arithmetic mean of the trees' leaf probabilities.
std::vector<double> predict_proba(const ForestModel& model, const Matrix& m);

}  // namespace fraudward
