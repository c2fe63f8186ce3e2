// fraudward: synthetic-data fraud-scoring workbench.
// Subcommands: synth, split, train, evaluate, sweep, summarize.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fraudward/csv.hpp"
#include "fraudward/errors.hpp"
#include "fraudward/metrics.hpp"
#include "fraudward/model_io.hpp"
#include "fraudward/parallel.hpp"
#include "fraudward/split.hpp"
#include "fraudward/sweep.hpp"
#include "fraudward/synth.hpp"

namespace fw = fraudward;

namespace {

struct RatioParts {
    int64_t train = 4, test = 1, validation = 1;
};

RatioParts parse_ratio(const std::string& s) {
    RatioParts out;
    int64_t parts[3];
    size_t pos = 0;
    for (int i = 0; i < 3; ++i) {
        const size_t next = i < 2 ? s.find(':', pos) : s.size();
        if (next == std::string::npos) throw CLI::ValidationError("--ratio", "expected A:B:C");
        try {
            parts[i] = std::stoll(s.substr(pos, next - pos));
        } catch (...) {
            throw CLI::ValidationError("--ratio", "expected integers A:B:C");
        }
        pos = next + 1;
    }
    out.train = parts[0];
    out.test = parts[1];
    out.validation = parts[2];
    return out;
}

fw::IntRange parse_range(const std::string& s, const char* flag, int32_t default_step) {
    fw::IntRange r;
    r.step = default_step;
    int32_t vals[3] = {0, 0, default_step};
    size_t pos = 0;
    int count = 0;
    while (count < 3) {
        const size_t next = s.find(':', pos);
        const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        try {
            vals[count] = std::stoi(tok);
        } catch (...) {
            throw CLI::ValidationError(flag, "expected LO:HI or LO:HI:STEP");
        }
        ++count;
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    if (count < 2) throw CLI::ValidationError(flag, "expected LO:HI or LO:HI:STEP");
    r.lo = vals[0];
    r.hi = vals[1];
    r.step = count == 3 ? vals[2] : default_step;
    return r;
}

std::vector<double> parse_rate_list(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        const size_t next = s.find(',', pos);
        const std::string tok = s.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        double v = 0.0;
        if (!fw::parse_double(tok, v)) {
            throw CLI::ValidationError("--learning-rates", "expected a comma-separated list of numbers");
        }
        out.push_back(v);
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

fw::LabeledTable load_table(const std::string& csv_path, const std::string& schema_path) {
    auto schema = std::make_shared<fw::FeatureSchema>(fw::load_schema(schema_path));
    return fw::read_csv(csv_path, std::move(schema));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fraud-scoring workbench: synthetic data, tree ensembles, AUC sweeps"};
    app.require_subcommand(1);

    // --- synth ---------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic borrower dataset");
    std::string synth_preset = "custom";
    int64_t synth_rows = 0;
    double synth_rate = 0.5;
    int64_t synth_numeric = 64, synth_categorical = 33;
    uint64_t synth_seed = 0;
    std::string synth_out, synth_schema;
    synth_cmd->add_option("--preset", synth_preset, "a | b | custom")->check(CLI::IsMember({"a", "b", "custom"}));
    auto* rows_opt = synth_cmd->add_option("--rows", synth_rows, "row count (custom preset)");
    auto* rate_opt = synth_cmd->add_option("--fraud-rate", synth_rate, "positive fraction in (0,1)");
    synth_cmd->add_option("--numeric", synth_numeric, "numeric feature count");
    synth_cmd->add_option("--categorical", synth_categorical, "categorical feature count");
    synth_cmd->add_option("--seed", synth_seed, "generator seed");
    synth_cmd->add_option("--out", synth_out, "output data CSV")->required();
    synth_cmd->add_option("--schema", synth_schema, "output schema JSON")->required();

    // --- split ---------------------------------------------------------
    auto* split_cmd = app.add_subcommand("split", "stratified train/test/validation split");
    std::string split_in, split_schema, split_ratio = "4:1:1", split_outdir;
    uint64_t split_seed = 0;
    bool no_stratify = false;
    split_cmd->add_option("--in", split_in, "input data CSV")->required();
    split_cmd->add_option("--schema", split_schema, "schema JSON")->required();
    split_cmd->add_option("--ratio", split_ratio, "train:test:validation (default 4:1:1)");
    split_cmd->add_option("--seed", split_seed, "shuffle seed");
    split_cmd->add_flag("--no-stratify", no_stratify, "disable per-class stratification");
    split_cmd->add_option("--out-dir", split_outdir, "directory for train/test/validation.csv")->required();

    // --- train ---------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "fit a model plus its feature pipeline");
    std::string train_model = "rf", train_variant = "raw";
    int32_t train_depth = 4, train_trees = 100;
    double train_lr = 0.1;
    int64_t train_pca_components = 0;
    double train_pca_variance = 0.0;
    uint64_t train_seed = 0;
    std::string train_csv, train_schema, train_out;
    bool train_no_bootstrap = false;
    std::string train_feature_rule = "sqrt";
    int train_threads = 0;
    train_cmd->add_option("--model", train_model, "rf | gbdt")->check(CLI::IsMember({"rf", "gbdt"}));
    train_cmd->add_option("--variant", train_variant, "raw | pca | tanh | tanh_pca")
        ->check(CLI::IsMember({"raw", "pca", "tanh", "tanh_pca"}));
    train_cmd->add_option("--max-depth", train_depth, "tree depth cap");
    train_cmd->add_option("--n-trees", train_trees, "ensemble size");
    train_cmd->add_option("--learning-rate", train_lr, "gbdt shrinkage in (0,1]");
    auto* pca_k_opt = train_cmd->add_option("--pca-components", train_pca_components, "PCA component count");
    auto* pca_f_opt = train_cmd->add_option("--pca-variance", train_pca_variance, "PCA cumulative variance target");
    pca_k_opt->excludes(pca_f_opt);
    train_cmd->add_option("--seed", train_seed, "model seed");
    train_cmd->add_option("--train", train_csv, "training data CSV")->required();
    train_cmd->add_option("--schema", train_schema, "schema JSON")->required();
    train_cmd->add_option("--out", train_out, "output model file (.fw)")->required();
    train_cmd->add_flag("--no-bootstrap", train_no_bootstrap, "rf: train every tree on the full sample");
    train_cmd->add_option("--feature-rule", train_feature_rule, "rf per-node feature subset: sqrt | all")
        ->check(CLI::IsMember({"sqrt", "all"}));
    train_cmd->add_option("--threads", train_threads, "worker cap (default: all cores)");

    // --- evaluate ------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("evaluate", "score a saved model on test + validation data");
    std::string eval_model, eval_test, eval_valid, eval_schema, eval_report;
    eval_cmd->add_option("--model", eval_model, "model file from train")->required();
    eval_cmd->add_option("--test", eval_test, "test data CSV")->required();
    eval_cmd->add_option("--validation", eval_valid, "validation data CSV")->required();
    eval_cmd->add_option("--schema", eval_schema, "schema JSON")->required();
    eval_cmd->add_option("--report", eval_report, "output report JSON")->required();

    // --- sweep ---------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "depth x tree-count grid sweep with AUC scatter output");
    std::string sweep_model = "rf", sweep_variant = "raw";
    std::string sweep_depths = "2:5", sweep_trees = "5:120:5", sweep_rates = "0.1";
    uint64_t sweep_seed = 0;
    std::string sweep_train, sweep_test, sweep_valid, sweep_schema, sweep_out, sweep_svg;
    bool sweep_timing = false, sweep_quiet = false;
    int sweep_threads = 0;
    sweep_cmd->add_option("--model", sweep_model, "rf | gbdt")->check(CLI::IsMember({"rf", "gbdt"}));
    sweep_cmd->add_option("--variant", sweep_variant, "raw | pca | tanh | tanh_pca")
        ->check(CLI::IsMember({"raw", "pca", "tanh", "tanh_pca"}));
    sweep_cmd->add_option("--depths", sweep_depths, "LO:HI (default 2:5)");
    sweep_cmd->add_option("--trees", sweep_trees, "LO:HI:STEP (default 5:120:5)");
    sweep_cmd->add_option("--learning-rates", sweep_rates, "comma list, gbdt only (default 0.1)");
    sweep_cmd->add_option("--seed", sweep_seed, "sweep seed; per-cell seeds derive from it");
    sweep_cmd->add_option("--train", sweep_train, "training data CSV")->required();
    sweep_cmd->add_option("--test", sweep_test, "test data CSV")->required();
    sweep_cmd->add_option("--validation", sweep_valid, "validation data CSV")->required();
    sweep_cmd->add_option("--schema", sweep_schema, "schema JSON")->required();
    sweep_cmd->add_option("--out", sweep_out, "output sweep CSV")->required();
    sweep_cmd->add_option("--svg", sweep_svg, "output scatter SVG")->required();
    sweep_cmd->add_flag("--timing", sweep_timing,
                        "record per-cell train seconds in the CSV (breaks byte-reproducibility)");
    sweep_cmd->add_flag("--quiet", sweep_quiet, "suppress per-cell progress on stderr");
    sweep_cmd->add_option("--threads", sweep_threads, "worker cap (default: all cores)");

    // --- summarize -----------------------------------------------------
    auto* summ_cmd = app.add_subcommand("summarize", "outlier-filtered statistics of a sweep CSV");
    std::string summ_in, summ_outliers = "mad", summ_out;
    double summ_k = 3.0;
    summ_cmd->add_option("--in", summ_in, "sweep CSV")->required();
    summ_cmd->add_option("--outliers", summ_outliers, "none | mad")->check(CLI::IsMember({"none", "mad"}));
    summ_cmd->add_option("--k", summ_k, "MAD multiplier (default 3.0)");
    summ_cmd->add_option("--out", summ_out, "output summary JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(synth_cmd)) {
            fw::SynthConfig cfg;
            if (synth_preset == "a") {
                if (*rows_opt || *rate_opt) {
                    fw::raise(fw::ErrorCode::InvalidConfig, "preset a pins --rows and --fraud-rate");
                }
                cfg = fw::SynthConfig::a_like(synth_seed);
            } else if (synth_preset == "b") {
                if (*rows_opt || *rate_opt) {
                    fw::raise(fw::ErrorCode::InvalidConfig, "preset b pins --rows and --fraud-rate");
                }
                cfg = fw::SynthConfig::b_like(synth_seed);
            } else {
                if (!*rows_opt) fw::raise(fw::ErrorCode::InvalidConfig, "custom preset requires --rows");
                cfg.n_rows = synth_rows;
                cfg.fraud_rate = synth_rate;
                cfg.seed = synth_seed;
            }
            cfg.n_numeric = synth_numeric;
            cfg.n_categorical = synth_categorical;
            const fw::LabeledTable table = fw::synthesize(cfg);
            fw::save_schema(*table.schema, synth_schema);
            fw::write_csv(table, synth_out);
            const auto balance = fw::class_balance(table);
            std::cout << "wrote " << table.n_rows() << " rows (" << balance.n_pos << " positive, rate "
                      << balance.rate << ") to " << synth_out << "\n";
        } else if (app.got_subcommand(split_cmd)) {
            const fw::LabeledTable table = load_table(split_in, split_schema);
            const RatioParts ratio = parse_ratio(split_ratio);
            fw::SplitSpec spec;
            spec.ratio = {ratio.train, ratio.test, ratio.validation};
            spec.seed = split_seed;
            spec.stratify = !no_stratify;
            const fw::SplitResult result = fw::split(table, spec);
            std::filesystem::create_directories(split_outdir);
            const std::filesystem::path dir(split_outdir);
            fw::write_csv(result.train, (dir / "train.csv").string());
            fw::write_csv(result.test, (dir / "test.csv").string());
            fw::write_csv(result.validation, (dir / "validation.csv").string());
            std::cout << "wrote " << result.train.n_rows() << "/" << result.test.n_rows() << "/"
                      << result.validation.n_rows() << " rows to " << split_outdir << "\n";
        } else if (app.got_subcommand(train_cmd)) {
            if (train_threads > 0) fw::set_threads(train_threads);
            const fw::LabeledTable table = load_table(train_csv, train_schema);
            fw::PipelineSpec pipe_spec;
            pipe_spec.variant = fw::variant_from_name(train_variant);
            if (*pca_k_opt) pipe_spec.pca_target = fw::PcaTarget::component_count(train_pca_components);
            if (*pca_f_opt) pipe_spec.pca_target = fw::PcaTarget::variance_fraction(train_pca_variance);
            const fw::FittedPipeline pipeline = fw::fit_pipeline(table, *table.schema, pipe_spec);
            const fw::Matrix m = fw::apply_pipeline(table, pipeline);

            fw::ModelBundle bundle;
            bundle.pipeline = pipeline;
            if (train_model == "rf") {
                fw::ForestParams params;
                params.n_trees = train_trees;
                params.max_depth = train_depth;
                params.bootstrap = !train_no_bootstrap;
                params.feature_rule =
                    train_feature_rule == "all" ? fw::FeatureRule::all : fw::FeatureRule::sqrt_count;
                params.seed = train_seed;
                auto model = fw::fit_forest(m, table.labels, params);
                if (model.single_class) {
                    std::cerr << "warning: training labels hold a single class; the model is constant\n";
                }
                bundle.model = std::move(model);
            } else {
                fw::GbdtParams params;
                params.n_trees = train_trees;
                params.max_depth = train_depth;
                params.learning_rate = train_lr;
                params.seed = train_seed;
                bundle.model = fw::fit_gbdt(m, table.labels, params);
            }
            fw::save_model(bundle, train_out);
            std::cout << "trained " << fw::describe_model(bundle.model) << " on " << table.n_rows()
                      << " rows; saved to " << train_out << "\n";
        } else if (app.got_subcommand(eval_cmd)) {
            const fw::ModelBundle bundle = fw::load_model(eval_model);
            const fw::LabeledTable test = load_table(eval_test, eval_schema);
            const fw::LabeledTable validation = load_table(eval_valid, eval_schema);
            const fw::EvalReport report = fw::evaluate(bundle.model, bundle.pipeline, test, validation);
            fw::save_report(report, eval_report);
            std::cout << "auc_test=" << report.auc_test << " auc_validation=" << report.auc_validation
                      << " (" << report.seconds << "s)\n";
        } else if (app.got_subcommand(sweep_cmd)) {
            if (sweep_threads > 0) fw::set_threads(sweep_threads);
            auto schema = std::make_shared<fw::FeatureSchema>(fw::load_schema(sweep_schema));
            const fw::LabeledTable train = fw::read_csv(sweep_train, schema);
            const fw::LabeledTable test = fw::read_csv(sweep_test, schema);
            const fw::LabeledTable validation = fw::read_csv(sweep_valid, schema);

            fw::GridSpec spec;
            spec.model = fw::model_kind_from_name(sweep_model);
            spec.variant = fw::variant_from_name(sweep_variant);
            spec.depths = parse_range(sweep_depths, "--depths", 1);
            spec.tree_counts = parse_range(sweep_trees, "--trees", 1);
            spec.learning_rates = parse_rate_list(sweep_rates);
            spec.seed = sweep_seed;

            fw::SweepOptions options;
            options.record_timing = sweep_timing;
            options.progress = sweep_quiet ? nullptr : &std::cerr;
            const auto rows = fw::run_sweep(spec, train, test, validation, options);
            fw::emit_scatter(rows, sweep_out, sweep_svg);
            const auto summary = fw::summarize(rows, fw::OutlierRule{});
            std::cout << rows.size() << " cells; mean auc_test=" << summary.test_unfiltered.mean
                      << " mean auc_validation=" << summary.validation_unfiltered.mean << "\n";
        } else if (app.got_subcommand(summ_cmd)) {
            const auto rows = fw::read_sweep_csv(summ_in);
            fw::OutlierRule rule;
            rule.method = summ_outliers == "mad" ? fw::OutlierMethod::mad : fw::OutlierMethod::none;
            rule.k = summ_k;
            const auto summary = fw::summarize(rows, rule);
            fw::save_summary(summary, rule, summ_out);
            std::cout << "kept " << summary.n_kept << "/" << summary.n_total
                      << " rows; filtered mean auc_test=" << summary.test_filtered.mean << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
