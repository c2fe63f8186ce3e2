#include "fraudward/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fraudward/errors.hpp"

namespace fraudward {

namespace {

constexpr double kRawClamp = 36.0;
constexpr double kHessianFloor = 1e-12;

void check_labels(std::span<const int32_t> labels) {
    int64_t n_pos = 0;
    for (int32_t y : labels) {
        if (y != 0 && y != 1) raise(ErrorCode::BadLabel, "labels must be 0 or 1");
        n_pos += y;
    }
    if (labels.empty()) raise(ErrorCode::EmptyTrainingSet, "no labels");
    if (n_pos == 0 || n_pos == static_cast<int64_t>(labels.size())) {
        raise(ErrorCode::SingleClassTraining, "boosting needs both classes present");
    }
}

double deviance_one(int32_t y, double raw) {
    const double p = sigmoid_clamped(raw);
    return y == 1 ? -std::log(p) : -std::log(1.0 - p);
}

}  // namespace

double sigmoid_clamped(double raw) {
    const double z = std::clamp(raw, -kRawClamp, kRawClamp);
    return 1.0 / (1.0 + std::exp(-z));
}

double mean_deviance(std::span<const int32_t> labels, std::span<const double> raw_scores) {
    if (labels.size() != raw_scores.size()) {
        raise(ErrorCode::WidthMismatch, "labels and scores differ in length");
    }
    double acc = 0.0;
    for (size_t i = 0; i < labels.size(); ++i) acc += deviance_one(labels[i], raw_scores[i]);
    return acc / static_cast<double>(labels.size());
}

double init_score(std::span<const int32_t> labels) {
    check_labels(labels);
    int64_t n_pos = 0;
    for (int32_t y : labels) n_pos += y;
    const double p = static_cast<double>(n_pos) / static_cast<double>(labels.size());
    return std::log(p / (1.0 - p));
}

std::vector<double> pseudo_residuals(std::span<const int32_t> labels, std::span<const double> raw_scores) {
    if (labels.size() != raw_scores.size()) {
        raise(ErrorCode::WidthMismatch, "labels and scores differ in length");
    }
    std::vector<double> r(labels.size());
#pragma omp parallel for schedule(static)
    for (int64_t i = 0; i < static_cast<int64_t>(labels.size()); ++i) {
        r[static_cast<size_t>(i)] =
            static_cast<double>(labels[static_cast<size_t>(i)]) - sigmoid_clamped(raw_scores[static_cast<size_t>(i)]);
    }
    return r;
}

GbdtModel fit_gbdt(const Matrix& m, std::span<const int32_t> labels, const GbdtParams& params,
                   const ColumnOrder* shared_order) {
    if (params.n_trees < 1) raise(ErrorCode::InvalidConfig, "n_trees must be >= 1");
    if (params.max_depth < 1) raise(ErrorCode::InvalidConfig, "max_depth must be >= 1");
    if (!(params.learning_rate > 0.0 && params.learning_rate <= 1.0)) {
        raise(ErrorCode::InvalidConfig, "learning_rate must lie in (0, 1]");
    }
    if (m.n_rows < 1) raise(ErrorCode::EmptyTrainingSet, "no training rows");
    if (static_cast<int64_t>(labels.size()) != m.n_rows) {
        raise(ErrorCode::WidthMismatch, "label count must equal the matrix row count");
    }
    check_labels(labels);

    ColumnOrder local_order;
    if (!shared_order) {
        local_order = ColumnOrder::build(m);
        shared_order = &local_order;
    }

    const int64_t n = m.n_rows;
    GbdtModel model;
    model.params = params;
    model.width = m.n_cols;
    model.f0 = init_score(labels);
    model.stages.reserve(static_cast<size_t>(params.n_trees));

    TreeParams tree_params;
    tree_params.max_depth = params.max_depth;
    tree_params.min_samples_split = 2;
    tree_params.impurity = Impurity::variance;

    std::vector<int32_t> all_rows(static_cast<size_t>(n));
    std::iota(all_rows.begin(), all_rows.end(), 0);

    std::vector<double> raw(static_cast<size_t>(n), model.f0);
    std::vector<double> residuals(static_cast<size_t>(n));
    std::vector<int32_t> leaf_of_row;

    for (int32_t stage = 0; stage < params.n_trees; ++stage) {
#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < n; ++i) {
            residuals[static_cast<size_t>(i)] =
                static_cast<double>(labels[static_cast<size_t>(i)]) - sigmoid_clamped(raw[static_cast<size_t>(i)]);
        }

        Tree tree = fit_tree(m, residuals, tree_params, all_rows, FeatureRule::all, nullptr,
                             shared_order, &leaf_of_row);

        // One-step Newton value per leaf: sum of residuals over sum of
        // sigmoid curvatures, accumulated in row order.
        std::vector<double> grad_sum(tree.nodes.size(), 0.0);
        std::vector<double> hess_sum(tree.nodes.size(), 0.0);
        for (int64_t i = 0; i < n; ++i) {
            const int32_t leaf = leaf_of_row[static_cast<size_t>(i)];
            const double p = sigmoid_clamped(raw[static_cast<size_t>(i)]);
            grad_sum[static_cast<size_t>(leaf)] += residuals[static_cast<size_t>(i)];
            hess_sum[static_cast<size_t>(leaf)] += p * (1.0 - p);
        }
        for (size_t node = 0; node < tree.nodes.size(); ++node) {
            if (!tree.nodes[node].is_leaf()) continue;
            tree.nodes[node].value = grad_sum[node] / std::max(hess_sum[node], kHessianFloor);
        }

#pragma omp parallel for schedule(static)
        for (int64_t i = 0; i < n; ++i) {
            raw[static_cast<size_t>(i)] +=
                params.learning_rate * tree.nodes[static_cast<size_t>(leaf_of_row[static_cast<size_t>(i)])].value;
        }
        model.stages.push_back(std::move(tree));
    }
    return model;
}

std::vector<double> predict_proba(const GbdtModel& model, const Matrix& m) {
    if (m.n_cols != model.width) {
        raise(ErrorCode::WidthMismatch, "matrix width " + std::to_string(m.n_cols) +
                                            " does not match model width " + std::to_string(model.width));
    }
    std::vector<double> scores(static_cast<size_t>(m.n_rows), 0.0);
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < m.n_rows; ++r) {
        const double* row = m.row_ptr(r);
        double acc = 0.0;
        for (const Tree& tree : model.stages) acc += tree.predict_row(row);
        scores[static_cast<size_t>(r)] = sigmoid_clamped(model.f0 + model.params.learning_rate * acc);
    }
    return scores;
}

std::vector<double> staged_deviance(const GbdtModel& model, const Matrix& m, std::span<const int32_t> labels) {
    if (m.n_cols != model.width) raise(ErrorCode::WidthMismatch, "matrix width does not match the model");
    if (static_cast<int64_t>(labels.size()) != m.n_rows) {
        raise(ErrorCode::WidthMismatch, "label count must equal the matrix row count");
    }
    const int64_t n = m.n_rows;
    const size_t n_stages = model.stages.size();
    std::vector<double> raw(static_cast<size_t>(n), model.f0);
    std::vector<double> out;
    out.reserve(n_stages + 1);
    out.push_back(mean_deviance(labels, raw));
    for (size_t s = 0; s < n_stages; ++s) {
        const Tree& tree = model.stages[s];
#pragma omp parallel for schedule(static)
        for (int64_t r = 0; r < n; ++r) {
            raw[static_cast<size_t>(r)] += model.params.learning_rate * tree.predict_row(m.row_ptr(r));
        }
        out.push_back(mean_deviance(labels, raw));
    }
    return out;
}

}  // namespace fraudward
