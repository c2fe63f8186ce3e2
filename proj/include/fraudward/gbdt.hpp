#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fraudward/matrix.hpp"
#include "fraudward/tree.hpp"

namespace fraudward {

struct GbdtParams {
    int32_t n_trees = 1;
    int32_t max_depth = 1;
    double learning_rate = 0.1;  // in (0, 1]
    uint64_t seed = 0;           // not consumed: training is deterministic; echoed in saved models
};

// Stagewise additive model under logistic deviance: constant log-odds
// initializer, pseudo-residual regression trees, one-step Newton leaf
// values, learning-rate shrinkage.
struct GbdtModel {
    GbdtParams params;
    double f0 = 0.0;
    int64_t width = 0;
    std::vector<Tree> stages;  // leaf values hold the Newton steps
};

// Raw scores are clamped to [-36, 36] before the sigmoid so the deviance
// never sees an exact 0 or 1 probability.
double sigmoid_clamped(double raw);

// Mean logistic deviance of raw scores against 0/1 labels.
double mean_deviance(std::span<const int32_t> labels, std::span<const double> raw_scores);

// Log-odds of the positive fraction; the constant minimizing total deviance.
double init_score(std::span<const int32_t> labels);

// r_i = y_i - sigmoid(F_i): the negative gradient of the deviance.
std::vector<double> pseudo_residuals(std::span<const int32_t> labels, std::span<const double> raw_scores);

GbdtModel fit_gbdt(const Matrix& m, std::span<const int32_t> labels, const GbdtParams& params,
                   const ColumnOrder* shared_order = nullptr);

std::vector<double> predict_proba(const GbdtModel& model, const Matrix& m);

// Entry k = mean deviance using stages 0..k-1 (entry 0 is f0 alone); the
// result has n_trees + 1 entries.
std::vector<double> staged_deviance(const GbdtModel& model, const Matrix& m, std::span<const int32_t> labels);

}  // namespace fraudward
