#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fraudward/models.hpp"
#include "fraudward/pipeline.hpp"
#include "fraudward/table.hpp"

namespace fraudward {

struct IntRange {
    int32_t lo = 0;
    int32_t hi = 0;
    int32_t step = 1;

    std::vector<int32_t> values() const;
};

struct GridSpec {
    ModelKind model = ModelKind::rf;
    IntRange depths{2, 5, 1};
    IntRange tree_counts{5, 120, 5};
    std::vector<double> learning_rates{0.1};  // used by gbdt cells only
    PipelineVariant variant = PipelineVariant::raw;
    PcaTarget pca_target = PcaTarget::variance_fraction(0.95);
    uint64_t seed = 0;

    void validate() const;
};

struct GridCell {
    int64_t index = 0;
    int32_t depth = 0;
    int32_t n_trees = 0;
    double learning_rate = 0.0;
};

// Cartesian product in lexicographic order: depth outer, tree count inner,
// learning rate innermost.
std::vector<GridCell> enumerate_grid(const GridSpec& spec);

struct SweepRow {
    int32_t depth = 0;
    int32_t n_trees = 0;
    double learning_rate = 0.0;
    PipelineVariant variant = PipelineVariant::raw;
    double auc_test = 0.0;
    double auc_validation = 0.0;
    double seconds = 0.0;
};

struct SweepOptions {
    // Wall-clock timing is off by default so the emitted CSV is a pure
    // function of (spec, data); opting in breaks byte-reproducibility.
    bool record_timing = false;
    std::ostream* progress = nullptr;
};

// One row per cell, in enumeration order regardless of execution order.
// Per-cell model seeds derive from (spec.seed, cell index); the pipeline is
// fitted once on the training table. A failing cell aborts the sweep with
// its cell identity.
std::vector<SweepRow> run_sweep(const GridSpec& spec, const LabeledTable& train,
                                const LabeledTable& test, const LabeledTable& validation,
                                const SweepOptions& options = {});

uint64_t derive_cell_seed(uint64_t sweep_seed, int64_t cell_index);

enum class OutlierMethod { none, mad };

struct OutlierRule {
    OutlierMethod method = OutlierMethod::none;
    double k = 3.0;
};

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single row
};

struct SweepSummary {
    SummaryStats test_unfiltered, validation_unfiltered;
    SummaryStats test_filtered, validation_filtered;
    std::vector<SweepRow> removed;
    int64_t n_total = 0;
    int64_t n_kept = 0;
};

// MAD rule: drop rows with |auc_test - median| > k * MAD. Filtered and
// unfiltered statistics are always co-reported.
SweepSummary summarize(std::span<const SweepRow> rows, const OutlierRule& rule);

// CSV (header depth,n_trees,learning_rate,variant,auc_test,auc_validation,
// seconds) plus a self-contained SVG scatter of test AUC vs tree count, one
// marker per row, one shape/shade per depth.
void emit_scatter(std::span<const SweepRow> rows, const std::string& csv_path,
                  const std::string& svg_path);

std::vector<SweepRow> read_sweep_csv(const std::string& path);

void save_summary(const SweepSummary& summary, const OutlierRule& rule, const std::string& path);

}  // namespace fraudward
