#include "fraudward/forest.hpp"

#include <numeric>
#include <string>

#include "fraudward/errors.hpp"
#include "fraudward/rng.hpp"

namespace fraudward {

ForestModel fit_forest(const Matrix& m, std::span<const int32_t> labels, const ForestParams& params,
                       const ColumnOrder* shared_order) {
    if (params.n_trees < 1) raise(ErrorCode::InvalidConfig, "n_trees must be >= 1");
    if (params.max_depth < 1) raise(ErrorCode::InvalidConfig, "max_depth must be >= 1");
    if (m.n_rows < 2) raise(ErrorCode::EmptyTrainingSet, "forest training needs at least 2 rows");
    if (static_cast<int64_t>(labels.size()) != m.n_rows) {
        raise(ErrorCode::WidthMismatch, "label count must equal the matrix row count");
    }

    const int64_t n = m.n_rows;
    std::vector<double> targets(static_cast<size_t>(n));
    int64_t n_pos = 0;
    for (int64_t r = 0; r < n; ++r) {
        const int32_t y = labels[static_cast<size_t>(r)];
        if (y != 0 && y != 1) raise(ErrorCode::BadLabel, "labels must be 0 or 1");
        targets[static_cast<size_t>(r)] = static_cast<double>(y);
        n_pos += y;
    }

    ColumnOrder local_order;
    if (!shared_order) {
        local_order = ColumnOrder::build(m);
        shared_order = &local_order;
    }

    ForestModel model;
    model.params = params;
    model.width = m.n_cols;
    model.single_class = (n_pos == 0 || n_pos == n);
    model.trees.resize(static_cast<size_t>(params.n_trees));

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_split = 2;
    tree_params.impurity = Impurity::gini;

#pragma omp parallel for schedule(dynamic, 1)
    for (int32_t t = 0; t < params.n_trees; ++t) {
        Rng rng(derive_stream(params.seed, static_cast<uint64_t>(t)));
        std::vector<int32_t> rows(static_cast<size_t>(n));
        if (params.bootstrap) {
            for (int64_t i = 0; i < n; ++i) {
                rows[static_cast<size_t>(i)] = static_cast<int32_t>(rng.uniform_below(static_cast<uint64_t>(n)));
            }
        } else {
            std::iota(rows.begin(), rows.end(), 0);
        }
        model.trees[static_cast<size_t>(t)] =
            fit_tree(m, targets, tree_params, rows, params.feature_rule, &rng, shared_order);
    }
    return model;
}

std::vector<double> predict_proba(const ForestModel& model, const Matrix& m) {
    if (m.n_cols != model.width) {
        raise(ErrorCode::WidthMismatch, "matrix width " + std::to_string(m.n_cols) +
                                            " does not match model width " + std::to_string(model.width));
    }
    std::vector<double> scores(static_cast<size_t>(m.n_rows), 0.0);
    const double n_trees = static_cast<double>(model.trees.size());
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < m.n_rows; ++r) {
        const double* row = m.row_ptr(r);
        double acc = 0.0;
        for (const Tree& tree : model.trees) acc += tree.predict_row(row);
        scores[static_cast<size_t>(r)] = acc / n_trees;  // unanimous trees stay exactly 0 or 1
    }
    return scores;
}

}  // namespace fraudward
