#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fraudward/models.hpp"
#include "fraudward/pipeline.hpp"
#include "fraudward/table.hpp"

namespace fraudward {

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// Starts at (0,0), ends at (1,1), both coordinates non-decreasing; one point
// per distinct score threshold in descending order, ties grouped.
struct RocCurve {
    std::vector<RocPoint> points;
};

RocCurve roc_curve(std::span<const double> scores, std::span<const int32_t> labels);

// Trapezoidal area under the ROC curve; equals pairwise concordance with
// half credit for ties.
double auc(std::span<const double> scores, std::span<const int32_t> labels);

struct SplitCounts {
    int64_t n_pos = 0;
    int64_t n_neg = 0;
};

struct EvalReport {
    double auc_test = 0.0;
    double auc_validation = 0.0;
    SplitCounts test;
    SplitCounts validation;
    std::string model_descriptor;
    std::string pipeline_descriptor;
    double seconds = 0.0;
};

// Applies the fitted pipeline (never re-fits), scores with the model, and
// reports AUC on both tables.
EvalReport evaluate(const AnyModel& model, const FittedPipeline& pipeline, const LabeledTable& test,
                    const LabeledTable& validation);

std::string describe_pipeline(const FittedPipeline& pipeline);

// JSON report, schema_version 1.
void save_report(const EvalReport& report, const std::string& path);

}  // namespace fraudward
