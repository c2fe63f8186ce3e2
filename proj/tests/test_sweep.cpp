#include <doctest.h>

#include <fstream>

#include "fraudward/errors.hpp"
#include "fraudward/metrics.hpp"
#include "fraudward/model_io.hpp"
#include "fraudward/parallel.hpp"
#include "fraudward/split.hpp"
#include "fraudward/sweep.hpp"
#include "fraudward/synth.hpp"
#include "test_support.hpp"

using namespace fraudward;
using testsup::TempDir;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

size_t count_occurrences(const std::string& text, const std::string& needle) {
    size_t count = 0;
    for (size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++count;
    }
    return count;
}

struct SweepFixture {
    LabeledTable train, test, validation;

    SweepFixture() {
        SynthConfig cfg;
        cfg.n_rows = 1800;
        cfg.fraud_rate = 0.5;
        cfg.n_numeric = 6;
        cfg.n_categorical = 2;
        cfg.seed = 1001;
        const LabeledTable all = synthesize(cfg);
        SplitSpec spec;
        spec.seed = 5;
        SplitResult parts = split(all, spec);
        train = std::move(parts.train);
        test = std::move(parts.test);
        validation = std::move(parts.validation);
    }
};

GridSpec tiny_grid() {
    GridSpec spec;
    spec.model = ModelKind::rf;
    spec.depths = IntRange{2, 3, 1};
    spec.tree_counts = IntRange{4, 8, 4};
    spec.variant = PipelineVariant::tanh;
    spec.seed = 77;
    return spec;
}

}  // namespace

TEST_CASE("enumerate_grid walks depth-major, then trees, then learning rate") {
    GridSpec spec;  // defaults: depths 2..5, trees 5..120 step 5
    const auto cells = enumerate_grid(spec);
    REQUIRE(cells.size() == 96);
    CHECK(cells[0].depth == 2);
    CHECK(cells[0].n_trees == 5);
    CHECK(cells[1].n_trees == 10);
    CHECK(cells[23].n_trees == 120);
    CHECK(cells[24].depth == 3);
    CHECK(cells[95].depth == 5);
    CHECK(cells[95].n_trees == 120);

    GridSpec single;
    single.depths = IntRange{2, 2, 1};
    single.tree_counts = IntRange{5, 5, 1};
    CHECK(enumerate_grid(single).size() == 1);

    GridSpec gb = spec;
    gb.model = ModelKind::gbdt;
    gb.learning_rates = {0.05, 0.1};
    const auto gb_cells = enumerate_grid(gb);
    CHECK(gb_cells.size() == 192);
    CHECK(gb_cells[0].learning_rate == 0.05);
    CHECK(gb_cells[1].learning_rate == 0.1);
    CHECK(gb_cells[1].n_trees == gb_cells[0].n_trees);
}

TEST_CASE("enumerate_grid rejects empty or invalid ranges") {
    GridSpec spec;
    spec.depths = IntRange{5, 2, 1};
    CHECK_THROWS_AS(enumerate_grid(spec), Error);
    GridSpec bad_lr;
    bad_lr.model = ModelKind::gbdt;
    bad_lr.learning_rates = {};
    CHECK_THROWS_AS(enumerate_grid(bad_lr), Error);
}

TEST_CASE("sweep output is byte-identical across runs and worker counts") {
    const SweepFixture fx;
    const GridSpec spec = tiny_grid();
    TempDir dir;

    const auto rows1 = run_sweep(spec, fx.train, fx.test, fx.validation);
    emit_scatter(rows1, dir.file("a.csv"), dir.file("a.svg"));
    const auto rows2 = run_sweep(spec, fx.train, fx.test, fx.validation);
    emit_scatter(rows2, dir.file("b.csv"), dir.file("b.svg"));
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
    CHECK(slurp(dir.file("a.svg")) == slurp(dir.file("b.svg")));

    {
        ThreadLimit lock(1);
        const auto serial = run_sweep(spec, fx.train, fx.test, fx.validation);
        emit_scatter(serial, dir.file("serial.csv"), dir.file("serial.svg"));
    }
    {
        ThreadLimit lock(2);
        const auto parallel = run_sweep(spec, fx.train, fx.test, fx.validation);
        emit_scatter(parallel, dir.file("parallel.csv"), dir.file("parallel.svg"));
    }
    CHECK(slurp(dir.file("serial.csv")) == slurp(dir.file("parallel.csv")));
    CHECK(slurp(dir.file("serial.svg")) == slurp(dir.file("parallel.svg")));
    CHECK(slurp(dir.file("serial.csv")) == slurp(dir.file("a.csv")));
}

TEST_CASE("a single-cell sweep equals training and evaluating directly") {
    const SweepFixture fx;
    GridSpec spec = tiny_grid();
    spec.depths = IntRange{3, 3, 1};
    spec.tree_counts = IntRange{6, 6, 1};
    const auto rows = run_sweep(spec, fx.train, fx.test, fx.validation);
    REQUIRE(rows.size() == 1);

    PipelineSpec pipe_spec;
    pipe_spec.variant = spec.variant;
    const FittedPipeline pipeline = fit_pipeline(fx.train, *fx.train.schema, pipe_spec);
    ForestParams params;
    params.n_trees = 6;
    params.max_depth = 3;
    params.seed = derive_cell_seed(spec.seed, 0);
    const AnyModel model = fit_forest(apply_pipeline(fx.train, pipeline), fx.train.labels, params);
    const EvalReport report = evaluate(model, pipeline, fx.test, fx.validation);
    CHECK(rows[0].auc_test == report.auc_test);
    CHECK(rows[0].auc_validation == report.auc_validation);
}

TEST_CASE("a failing cell aborts the sweep with its identity") {
    SweepFixture fx;
    std::fill(fx.train.labels.begin(), fx.train.labels.end(), 0);  // gbdt cannot train on one class
    GridSpec spec = tiny_grid();
    spec.model = ModelKind::gbdt;
    try {
        run_sweep(spec, fx.train, fx.test, fx.validation);
        FAIL("expected the sweep to abort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingleClassTraining);
        CHECK(std::string(e.what()).find("cell 0") != std::string::npos);
    }
}

TEST_CASE("summarize: constant rows survive the mad filter untouched") {
    std::vector<SweepRow> rows(5);
    for (auto& r : rows) {
        r.auc_test = 0.8;
        r.auc_validation = 0.8;
    }
    const SweepSummary s = summarize(rows, OutlierRule{OutlierMethod::mad, 3.0});
    CHECK(s.removed.empty());
    CHECK(s.n_kept == 5);
    CHECK(s.test_filtered.mean == 0.8);
    CHECK(s.test_unfiltered.stddev == 0.0);
}

TEST_CASE("summarize: a lone bad cell is removed by the mad rule") {
    std::vector<SweepRow> rows(10);
    for (size_t i = 0; i < 9; ++i) {
        rows[i].auc_test = 0.88;
        rows[i].auc_validation = 0.88;
    }
    rows[9].auc_test = 0.50;
    rows[9].auc_validation = 0.51;
    rows[9].depth = 5;

    const SweepSummary s = summarize(rows, OutlierRule{OutlierMethod::mad, 3.0});
    REQUIRE(s.removed.size() == 1);
    CHECK(s.removed[0].auc_test == 0.50);
    CHECK(s.removed[0].depth == 5);
    CHECK(s.n_kept == 9);
    CHECK(s.test_filtered.mean == doctest::Approx(0.88).epsilon(1e-12));
    CHECK(s.test_unfiltered.mean == doctest::Approx(0.842).epsilon(1e-12));
}

TEST_CASE("summarize: rule none keeps everything") {
    std::vector<SweepRow> rows(4);
    rows[0].auc_test = 0.9;
    rows[1].auc_test = 0.1;
    rows[2].auc_test = 0.5;
    rows[3].auc_test = 0.7;
    const SweepSummary s = summarize(rows, OutlierRule{OutlierMethod::none, 3.0});
    CHECK(s.removed.empty());
    CHECK(s.test_filtered.mean == s.test_unfiltered.mean);
    CHECK(s.test_filtered.median == s.test_unfiltered.median);

    const std::vector<SweepRow> empty;
    CHECK_THROWS_AS(summarize(empty, OutlierRule{}), Error);
}

TEST_CASE("emit_scatter writes a parseable CSV and one marker per row") {
    const SweepFixture fx;
    const GridSpec spec = tiny_grid();
    const auto rows = run_sweep(spec, fx.train, fx.test, fx.validation);
    TempDir dir;
    emit_scatter(rows, dir.file("s.csv"), dir.file("s.svg"));

    const std::string csv = slurp(dir.file("s.csv"));
    CHECK(count_occurrences(csv, "\n") == rows.size() + 1);

    const auto parsed = read_sweep_csv(dir.file("s.csv"));
    REQUIRE(parsed.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(parsed[i].depth == rows[i].depth);
        CHECK(parsed[i].n_trees == rows[i].n_trees);
        CHECK(parsed[i].learning_rate == rows[i].learning_rate);
        CHECK(parsed[i].variant == rows[i].variant);
        CHECK(parsed[i].auc_test == rows[i].auc_test);
        CHECK(parsed[i].auc_validation == rows[i].auc_validation);
        CHECK(parsed[i].seconds == rows[i].seconds);
    }

    const std::string svg = slurp(dir.file("s.svg"));
    CHECK(svg.rfind("<?xml", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(count_occurrences(svg, "class=\"mark\"") == rows.size() + 2);  // plus one legend marker per depth
    CHECK(svg.find("number of trees") != std::string::npos);
    CHECK(svg.find("test AUC") != std::string::npos);
}

TEST_CASE("model persistence round-trips scores bit-exactly") {
    const SweepFixture fx;
    TempDir dir;

    PipelineSpec pipe_spec;
    pipe_spec.variant = PipelineVariant::tanh_pca;
    pipe_spec.pca_target = PcaTarget::variance_fraction(0.9);
    const FittedPipeline pipeline = fit_pipeline(fx.train, *fx.train.schema, pipe_spec);
    const Matrix train_m = apply_pipeline(fx.train, pipeline);

    Rng rng(31415);
    Matrix probe(1000, train_m.n_cols);
    for (double& v : probe.values) v = rng.normal();

    ForestParams rf_params;
    rf_params.n_trees = 12;
    rf_params.max_depth = 4;
    rf_params.seed = 3;
    ModelBundle rf_bundle{pipeline, fit_forest(train_m, fx.train.labels, rf_params)};
    save_model(rf_bundle, dir.file("rf.fw"));
    const ModelBundle rf_back = load_model(dir.file("rf.fw"));
    CHECK(predict_proba(rf_back.model, probe) == predict_proba(rf_bundle.model, probe));
    CHECK(rf_back.pipeline.one_hot.width == pipeline.one_hot.width);
    REQUIRE(rf_back.pipeline.pca.has_value());
    CHECK(rf_back.pipeline.pca->components.values == pipeline.pca->components.values);

    GbdtParams gb_params;
    gb_params.n_trees = 10;
    gb_params.max_depth = 3;
    gb_params.learning_rate = 0.1;
    ModelBundle gb_bundle{pipeline, fit_gbdt(train_m, fx.train.labels, gb_params)};
    save_model(gb_bundle, dir.file("gb.fw"));
    const ModelBundle gb_back = load_model(dir.file("gb.fw"));
    CHECK(predict_proba(gb_back.model, probe) == predict_proba(gb_bundle.model, probe));
    const auto& gb_orig = std::get<GbdtModel>(gb_bundle.model);
    const auto& gb_loaded = std::get<GbdtModel>(gb_back.model);
    CHECK(staged_deviance(gb_loaded, train_m, fx.train.labels) ==
          staged_deviance(gb_orig, train_m, fx.train.labels));

    // applying the loaded pipeline to raw tables also matches
    CHECK(apply_pipeline(fx.test, rf_back.pipeline).values ==
          apply_pipeline(fx.test, pipeline).values);
}

TEST_CASE("corrupt and mismatched model files are rejected") {
    const SweepFixture fx;
    TempDir dir;
    const FittedPipeline pipeline = fit_pipeline(fx.train, *fx.train.schema, PipelineSpec{});
    ForestParams params;
    params.n_trees = 3;
    params.max_depth = 2;
    ModelBundle bundle{pipeline, fit_forest(apply_pipeline(fx.train, pipeline), fx.train.labels, params)};
    save_model(bundle, dir.file("m.fw"));

    // truncation
    const std::string full = slurp(dir.file("m.fw"));
    testsup::write_text(dir.file("trunc.fw"), full.substr(0, full.size() / 2));
    try {
        load_model(dir.file("trunc.fw"));
        FAIL("expected CorruptModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptModel);
    }

    // wrong magic
    testsup::write_text(dir.file("magic.fw"), "NOPE" + full.substr(4));
    try {
        load_model(dir.file("magic.fw"));
        FAIL("expected CorruptModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptModel);
    }

    // future format version
    std::string versioned = full;
    versioned[4] = 2;  // format_version little-endian low byte
    testsup::write_text(dir.file("ver.fw"), versioned);
    try {
        load_model(dir.file("ver.fw"));
        FAIL("expected VersionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VersionMismatch);
    }

    // trailing garbage
    testsup::write_text(dir.file("tail.fw"), full + "extra");
    try {
        load_model(dir.file("tail.fw"));
        FAIL("expected CorruptModel");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CorruptModel);
    }
}
