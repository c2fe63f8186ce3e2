#include "fraudward/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include <json.hpp>

#include "fraudward/errors.hpp"

namespace fraudward {

namespace {

struct RankedScores {
    std::vector<std::pair<double, int32_t>> entries;  // score descending
    int64_t n_pos = 0;
    int64_t n_neg = 0;
};

RankedScores rank_scores(std::span<const double> scores, std::span<const int32_t> labels) {
    if (scores.size() != labels.size()) {
        raise(ErrorCode::WidthMismatch, "scores and labels differ in length");
    }
    RankedScores ranked;
    ranked.entries.reserve(scores.size());
    for (size_t i = 0; i < scores.size(); ++i) {
        ranked.entries.emplace_back(scores[i], labels[i]);
        if (labels[i] == 1) {
            ++ranked.n_pos;
        } else {
            ++ranked.n_neg;
        }
    }
    if (ranked.n_pos == 0 || ranked.n_neg == 0) {
        raise(ErrorCode::SingleClassEval, "evaluation needs both classes present");
    }
    std::sort(ranked.entries.begin(), ranked.entries.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    return ranked;
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const int32_t> labels) {
    const RankedScores ranked = rank_scores(scores, labels);
    RocCurve curve;
    curve.points.push_back(RocPoint{0.0, 0.0});
    int64_t tp = 0, fp = 0;
    size_t i = 0;
    while (i < ranked.entries.size()) {
        const double threshold = ranked.entries[i].first;
        while (i < ranked.entries.size() && ranked.entries[i].first == threshold) {
            if (ranked.entries[i].second == 1) {
                ++tp;
            } else {
                ++fp;
            }
            ++i;
        }
        curve.points.push_back(RocPoint{static_cast<double>(fp) / static_cast<double>(ranked.n_neg),
                                        static_cast<double>(tp) / static_cast<double>(ranked.n_pos)});
    }
    return curve;
}

double auc(std::span<const double> scores, std::span<const int32_t> labels) {
    const RankedScores ranked = rank_scores(scores, labels);
    // Integer trapezoid walk: per tied block of p positives and f negatives,
    // the doubled numerator grows by f * (2*tp_before + p), which is exactly
    // 2*concordant + tied of the Mann-Whitney pair count.
    int64_t tp = 0;
    int64_t numerator2 = 0;
    size_t i = 0;
    while (i < ranked.entries.size()) {
        const double threshold = ranked.entries[i].first;
        int64_t block_pos = 0, block_neg = 0;
        while (i < ranked.entries.size() && ranked.entries[i].first == threshold) {
            if (ranked.entries[i].second == 1) {
                ++block_pos;
            } else {
                ++block_neg;
            }
            ++i;
        }
        numerator2 += block_neg * (2 * tp + block_pos);
        tp += block_pos;
    }
    return static_cast<double>(numerator2) / (2.0 * static_cast<double>(ranked.n_pos) * static_cast<double>(ranked.n_neg));
}

std::string describe_pipeline(const FittedPipeline& pipeline) {
    std::string out = "variant=";
    out += variant_name(pipeline.variant);
    out += ", encoded_width=" + std::to_string(pipeline.one_hot.width);
    if (pipeline.pca) {
        out += ", pca_components=" + std::to_string(pipeline.pca->n_components());
    }
    return out;
}

EvalReport evaluate(const AnyModel& model, const FittedPipeline& pipeline, const LabeledTable& test,
                    const LabeledTable& validation) {
    const auto start = std::chrono::steady_clock::now();
    EvalReport report;

    const Matrix test_m = apply_pipeline(test, pipeline);
    const Matrix valid_m = apply_pipeline(validation, pipeline);
    const auto test_scores = predict_proba(model, test_m);
    const auto valid_scores = predict_proba(model, valid_m);

    report.auc_test = auc(test_scores, test.labels);
    report.auc_validation = auc(valid_scores, validation.labels);
    const auto test_balance = class_balance(test);
    const auto valid_balance = class_balance(validation);
    report.test = SplitCounts{test_balance.n_pos, test_balance.n_neg};
    report.validation = SplitCounts{valid_balance.n_pos, valid_balance.n_neg};
    report.model_descriptor = describe_model(model);
    report.pipeline_descriptor = describe_pipeline(pipeline);

    const auto end = std::chrono::steady_clock::now();
    report.seconds = std::chrono::duration<double>(end - start).count();
    return report;
}

void save_report(const EvalReport& report, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["auc_test"] = report.auc_test;
    j["auc_validation"] = report.auc_validation;
    j["test"] = {{"n_pos", report.test.n_pos}, {"n_neg", report.test.n_neg}};
    j["validation"] = {{"n_pos", report.validation.n_pos}, {"n_neg", report.validation.n_neg}};
    j["model"] = report.model_descriptor;
    j["pipeline"] = report.pipeline_descriptor;
    j["seconds"] = report.seconds;
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write report '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) raise(ErrorCode::IoFailure, "failed writing report '" + path + "'");
}

}  // namespace fraudward
