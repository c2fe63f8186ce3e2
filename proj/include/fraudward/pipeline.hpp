#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fraudward/matrix.hpp"
#include "fraudward/table.hpp"

namespace fraudward {

// Column layout of the one-hot encoding: one column per numeric feature,
// one column per declared category of each categorical feature (the schema
// universe, not the observed values). Offsets are contiguous in schema order.
struct OneHotMap {
    struct FeatureColumns {
        std::string name;
        FeatureKind kind = FeatureKind::numeric;
        std::vector<std::string> categories;
        int64_t offset = 0;
        int64_t width = 1;
    };
    std::vector<FeatureColumns> features;
    int64_t width = 0;

    // 1 for numeric-origin columns, 0 for one-hot indicator columns.
    std::vector<uint8_t> numeric_mask() const;
};

OneHotMap fit_one_hot(const LabeledTable& table, const FeatureSchema& schema);
Matrix encode(const LabeledTable& table, const OneHotMap& map);

// Elementwise tanh on masked columns; unmasked columns are left untouched.
Matrix tanh_transform(const Matrix& m, const std::vector<uint8_t>& numeric_mask);

struct PcaModel {
    std::vector<double> mean;                // input width
    Matrix components;                       // k rows, each an input-width unit vector
    std::vector<double> explained_variance;  // k entries, non-increasing
    double total_variance = 0.0;             // trace of the covariance

    int64_t input_width() const { return static_cast<int64_t>(mean.size()); }
    int64_t n_components() const { return components.n_rows; }
    std::vector<double> explained_fractions() const;
};

struct PcaTarget {
    bool is_count = false;
    int64_t count = 0;
    double fraction = 0.95;

    static PcaTarget component_count(int64_t k) { return {true, k, 0.0}; }
    static PcaTarget variance_fraction(double f) { return {false, 0, f}; }
};

// Column means and the unbiased sample covariance (divisor n_rows - 1).
std::vector<double> column_means(const Matrix& m);
Matrix covariance(const Matrix& m);

// Eigendecomposition of the explicit covariance (cyclic Jacobi), components
// ordered by descending explained variance. Sign convention: the entry of
// largest magnitude in each component is positive (ties: lowest index).
PcaModel fit_pca(const Matrix& m, const PcaTarget& target);
Matrix project(const Matrix& m, const PcaModel& pca);

enum class PipelineVariant { raw, pca, tanh, tanh_pca };

const char* variant_name(PipelineVariant v);
PipelineVariant variant_from_name(std::string_view s);

struct PipelineSpec {
    PipelineVariant variant = PipelineVariant::raw;
    PcaTarget pca_target = PcaTarget::variance_fraction(0.95);
};

// Stage order is fixed: one-hot, then tanh when the variant includes it,
// then PCA fitted on the post-tanh matrix.
struct FittedPipeline {
    PipelineVariant variant = PipelineVariant::raw;
    OneHotMap one_hot;
    std::vector<uint8_t> tanh_mask;  // empty unless the variant includes tanh
    std::optional<PcaModel> pca;

    bool has_tanh() const { return variant == PipelineVariant::tanh || variant == PipelineVariant::tanh_pca; }
    bool has_pca() const { return variant == PipelineVariant::pca || variant == PipelineVariant::tanh_pca; }
    int64_t output_width() const { return pca ? pca->n_components() : one_hot.width; }
};

FittedPipeline fit_pipeline(const LabeledTable& table, const FeatureSchema& schema, const PipelineSpec& spec);

// Applies the fitted stages in order; never re-fits.
Matrix apply_pipeline(const LabeledTable& table, const FittedPipeline& fitted);

}  // namespace fraudward
