#include <doctest.h>

#include <cmath>

#include "fraudward/errors.hpp"
#include "fraudward/forest.hpp"
#include "fraudward/metrics.hpp"
#include "fraudward/reference.hpp"
#include "test_support.hpp"

using namespace fraudward;

TEST_CASE("roc curve of a perfect classifier passes through (0,1)") {
    const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
    const std::vector<int32_t> labels = {1, 1, 0, 0};
    const RocCurve curve = roc_curve(scores, labels);
    REQUIRE(curve.points.size() >= 3);
    CHECK(curve.points.front().fpr == 0.0);
    CHECK(curve.points.front().tpr == 0.0);
    CHECK(curve.points.back().fpr == 1.0);
    CHECK(curve.points.back().tpr == 1.0);
    bool hits_corner = false;
    for (const RocPoint& p : curve.points) {
        if (p.fpr == 0.0 && p.tpr == 1.0) hits_corner = true;
    }
    CHECK(hits_corner);
    CHECK(auc(scores, labels) == 1.0);
}

TEST_CASE("all-equal scores trace the diagonal") {
    const std::vector<double> scores = {0.5, 0.5, 0.5, 0.5};
    const std::vector<int32_t> labels = {1, 0, 1, 0};
    const RocCurve curve = roc_curve(scores, labels);
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[1].fpr == 1.0);
    CHECK(curve.points[1].tpr == 1.0);
    CHECK(auc(scores, labels) == 0.5);
}

TEST_CASE("hand-enumerated mixed ranking") {
    const std::vector<double> scores = {0.9, 0.4, 0.5, 0.1};
    const std::vector<int32_t> labels = {1, 1, 0, 0};
    const RocCurve curve = roc_curve(scores, labels);
    const std::vector<RocPoint> expected = {{0, 0}, {0, 0.5}, {0.5, 0.5}, {0.5, 1}, {1, 1}};
    REQUIRE(curve.points.size() == expected.size());
    for (size_t i = 0; i < expected.size(); ++i) {
        CHECK(curve.points[i].fpr == expected[i].fpr);
        CHECK(curve.points[i].tpr == expected[i].tpr);
    }
    CHECK(auc(scores, labels) == 0.75);  // 3 of 4 pos/neg pairs concordant
}

TEST_CASE("roc curve coordinates never decrease") {
    Rng rng(1234);
    for (int rep = 0; rep < 50; ++rep) {
        const int64_t n = 4 + static_cast<int64_t>(rng.uniform_below(40));
        std::vector<double> scores(static_cast<size_t>(n));
        for (double& s : scores) s = 0.1 * static_cast<double>(rng.uniform_below(10));
        std::vector<int32_t> labels = testsup::random_labels(rng, n);
        labels[0] = 1;
        labels[1] = 0;
        const RocCurve curve = roc_curve(scores, labels);
        for (size_t i = 1; i < curve.points.size(); ++i) {
            CHECK(curve.points[i].fpr >= curve.points[i - 1].fpr);
            CHECK(curve.points[i].tpr >= curve.points[i - 1].tpr);
        }
        // trapezoid over the curve equals the pairwise formula
        double area = 0.0;
        for (size_t i = 1; i < curve.points.size(); ++i) {
            area += (curve.points[i].fpr - curve.points[i - 1].fpr) *
                    (curve.points[i].tpr + curve.points[i - 1].tpr) * 0.5;
        }
        CHECK(area == doctest::Approx(reference::auc_pairwise(scores, labels)).epsilon(1e-12));
    }
}

TEST_CASE("auc equals the brute-force pairwise oracle with deliberate ties") {
    Rng rng(424242);
    for (int rep = 0; rep < 1100; ++rep) {
        const int64_t n = 4 + static_cast<int64_t>(rng.uniform_below(47));
        std::vector<double> scores(static_cast<size_t>(n));
        for (double& s : scores) {
            s = rng.uniform01() < 0.5 ? 0.25 * static_cast<double>(rng.uniform_below(5)) : rng.uniform01();
        }
        std::vector<int32_t> labels = testsup::random_labels(rng, n);
        labels[0] = 1;
        labels[1] = 0;
        const double got = auc(scores, labels);
        const double want = reference::auc_pairwise(scores, labels);
        CHECK(std::abs(got - want) <= 1e-12);
    }
}

TEST_CASE("auc is exactly invariant under strictly increasing score maps") {
    Rng rng(9090);
    for (int rep = 0; rep < 50; ++rep) {
        const int64_t n = 6 + static_cast<int64_t>(rng.uniform_below(30));
        std::vector<double> scores(static_cast<size_t>(n));
        for (double& s : scores) s = 0.2 * static_cast<double>(rng.uniform_below(8));
        std::vector<int32_t> labels = testsup::random_labels(rng, n);
        labels[0] = 1;
        labels[1] = 0;
        std::vector<double> mapped(scores.size());
        for (size_t i = 0; i < scores.size(); ++i) {
            const double x = scores[i];
            mapped[i] = x * x * x + 2.0 * x + 1.0;  // strictly increasing
        }
        CHECK(auc(mapped, labels) == auc(scores, labels));
    }
}

TEST_CASE("complementing the labels flips the auc") {
    Rng rng(555);
    for (int rep = 0; rep < 50; ++rep) {
        const int64_t n = 6 + static_cast<int64_t>(rng.uniform_below(30));
        std::vector<double> scores(static_cast<size_t>(n));
        for (double& s : scores) s = rng.uniform01();
        std::vector<int32_t> labels = testsup::random_labels(rng, n);
        labels[0] = 1;
        labels[1] = 0;
        std::vector<int32_t> flipped(labels.size());
        for (size_t i = 0; i < labels.size(); ++i) flipped[i] = 1 - labels[i];
        CHECK(std::abs(auc(scores, flipped) - (1.0 - auc(scores, labels))) <= 1e-12);
    }
}

TEST_CASE("single-class evaluation is an error, not a default") {
    const std::vector<double> scores = {0.1, 0.9};
    const std::vector<int32_t> labels = {1, 1};
    CHECK_THROWS_AS(auc(scores, labels), Error);
    CHECK_THROWS_AS(roc_curve(scores, labels), Error);
}

TEST_CASE("evaluate applies the fitted pipeline and reports both splits") {
    // one numeric feature that separates the classes perfectly
    auto schema = std::make_shared<FeatureSchema>();
    schema->label_name = "label";
    schema->features = {FeatureSpec{"x", FeatureGroup::financial, FeatureKind::numeric, {}}};
    const auto make = [&](std::initializer_list<double> xs, std::initializer_list<int32_t> ys) {
        LabeledTable t;
        t.schema = schema;
        t.cells.assign(xs);
        t.labels.assign(ys);
        return t;
    };
    const LabeledTable train = make({1, 2, 3, 4, 5, 6, 7, 8}, {0, 0, 0, 0, 1, 1, 1, 1});
    const LabeledTable test = make({1.5, 2.5, 6.5, 7.5}, {0, 0, 1, 1});
    const LabeledTable validation = make({0.5, 3.5, 5.5, 8.5}, {0, 0, 1, 1});

    const FittedPipeline pipeline = fit_pipeline(train, *schema, PipelineSpec{});
    ForestParams params;
    params.n_trees = 3;
    params.max_depth = 2;
    params.bootstrap = false;
    params.feature_rule = FeatureRule::all;
    const AnyModel model = fit_forest(apply_pipeline(train, pipeline), train.labels, params);

    const EvalReport report = evaluate(model, pipeline, test, validation);
    CHECK(report.auc_test == 1.0);
    CHECK(report.auc_validation == 1.0);
    CHECK(report.test.n_pos == 2);
    CHECK(report.test.n_neg == 2);
    CHECK(report.validation.n_pos == 2);
    CHECK(report.validation.n_neg == 2);
    CHECK(report.seconds >= 0.0);

    // purity: repeated calls agree on everything but the clock
    const EvalReport again = evaluate(model, pipeline, test, validation);
    CHECK(again.auc_test == report.auc_test);
    CHECK(again.auc_validation == report.auc_validation);
    CHECK(again.model_descriptor == report.model_descriptor);

    // a constant scorer lands at exactly 0.5
    ForestParams constant_params;
    constant_params.n_trees = 1;
    constant_params.max_depth = 1;
    std::vector<int32_t> ones(train.labels.size(), 1);
    const AnyModel constant = fit_forest(apply_pipeline(train, pipeline), ones, constant_params);
    const EvalReport flat = evaluate(constant, pipeline, test, validation);
    CHECK(flat.auc_test == 0.5);
    CHECK(flat.auc_validation == 0.5);
}

TEST_CASE("evaluation reports serialize to JSON") {
    testsup::TempDir dir;
    EvalReport report;
    report.auc_test = 0.8125;
    report.auc_validation = 0.8;
    report.test = {10, 12};
    report.validation = {11, 11};
    report.model_descriptor = "rf(max_depth=2, n_trees=3)";
    report.pipeline_descriptor = "variant=raw, encoded_width=4";
    report.seconds = 0.25;
    save_report(report, dir.file("report.json"));

    std::ifstream in(dir.file("report.json"));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"schema_version\": 1") != std::string::npos);
    CHECK(text.find("\"auc_test\": 0.8125") != std::string::npos);
    CHECK(text.find("\"n_pos\": 10") != std::string::npos);
}
