#include "fraudward/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraudward/errors.hpp"

namespace fraudward {

namespace {

// Cyclic Jacobi eigendecomposition of a symmetric matrix held row-major in
// `a` (destroyed). Eigenvectors come back as columns of `vecs`. The sweep
// order is fixed, so results are bit-stable across runs and thread counts.
void jacobi_eigen(std::vector<double>& a, int64_t n, std::vector<double>& vals, std::vector<double>& vecs) {
    vecs.assign(static_cast<size_t>(n * n), 0.0);
    for (int64_t i = 0; i < n; ++i) vecs[static_cast<size_t>(i * n + i)] = 1.0;

    const auto idx = [n](int64_t r, int64_t c) { return static_cast<size_t>(r * n + c); };
    double off = 0.0;
    for (int64_t p = 0; p < n; ++p) {
        for (int64_t q = p + 1; q < n; ++q) off += a[idx(p, q)] * a[idx(p, q)];
    }
    double scale = 0.0;
    for (int64_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[idx(i, i)]));
    const double tol = std::max(off, scale * scale) * 1e-30 + 1e-300;

    for (int sweep = 0; sweep < 64 && off > tol; ++sweep) {
        for (int64_t p = 0; p < n; ++p) {
            for (int64_t q = p + 1; q < n; ++q) {
                const double apq = a[idx(p, q)];
                if (apq == 0.0) continue;
                const double app = a[idx(p, p)];
                const double aqq = a[idx(q, q)];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                a[idx(p, p)] = app - t * apq;
                a[idx(q, q)] = aqq + t * apq;
                a[idx(p, q)] = 0.0;
                a[idx(q, p)] = 0.0;
                for (int64_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = a[idx(i, p)];
                    const double aiq = a[idx(i, q)];
                    a[idx(i, p)] = c * aip - s * aiq;
                    a[idx(p, i)] = a[idx(i, p)];
                    a[idx(i, q)] = s * aip + c * aiq;
                    a[idx(q, i)] = a[idx(i, q)];
                }
                for (int64_t i = 0; i < n; ++i) {
                    const double vip = vecs[idx(i, p)];
                    const double viq = vecs[idx(i, q)];
                    vecs[idx(i, p)] = c * vip - s * viq;
                    vecs[idx(i, q)] = s * vip + c * viq;
                }
            }
        }
        off = 0.0;
        for (int64_t p = 0; p < n; ++p) {
            for (int64_t q = p + 1; q < n; ++q) off += a[idx(p, q)] * a[idx(p, q)];
        }
    }

    vals.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) vals[static_cast<size_t>(i)] = a[idx(i, i)];
}

void check_conformance(const LabeledTable& table, const OneHotMap& map) {
    if (!table.schema || table.n_features() != static_cast<int64_t>(map.features.size())) {
        raise(ErrorCode::WidthMismatch, "table feature count does not match the fitted encoding");
    }
    for (size_t f = 0; f < map.features.size(); ++f) {
        const auto& spec = table.schema->features[f];
        const auto& cols = map.features[f];
        if (spec.name != cols.name || spec.kind != cols.kind) {
            raise(ErrorCode::WidthMismatch, "feature '" + spec.name + "' does not match the fitted encoding");
        }
    }
}

}  // namespace

std::vector<uint8_t> OneHotMap::numeric_mask() const {
    std::vector<uint8_t> mask(static_cast<size_t>(width), 0);
    for (const auto& f : features) {
        if (f.kind == FeatureKind::numeric) mask[static_cast<size_t>(f.offset)] = 1;
    }
    return mask;
}

OneHotMap fit_one_hot(const LabeledTable& table, const FeatureSchema& schema) {
    schema.validate();
    if (table.schema && *table.schema != schema) {
        raise(ErrorCode::WidthMismatch, "table schema does not match the schema being fitted");
    }
    OneHotMap map;
    int64_t offset = 0;
    for (const auto& spec : schema.features) {
        OneHotMap::FeatureColumns cols;
        cols.name = spec.name;
        cols.kind = spec.kind;
        cols.categories = spec.categories;
        cols.offset = offset;
        cols.width = spec.kind == FeatureKind::numeric ? 1 : static_cast<int64_t>(spec.categories.size());
        offset += cols.width;
        map.features.push_back(std::move(cols));
    }
    map.width = offset;
    return map;
}

Matrix encode(const LabeledTable& table, const OneHotMap& map) {
    check_conformance(table, map);
    const int64_t n = table.n_rows();
    const int64_t w_in = table.n_features();
    Matrix out(n, map.width);

    // Validate categories up front so the parallel fill cannot throw.
    for (int64_t r = 0; r < n; ++r) {
        for (int64_t f = 0; f < w_in; ++f) {
            const auto& cols = map.features[static_cast<size_t>(f)];
            if (cols.kind != FeatureKind::categorical) continue;
            const int32_t c = table.category_at(r, f);
            if (c < 0 || c >= static_cast<int32_t>(cols.categories.size())) {
                raise(ErrorCode::UnknownCategory,
                      "row " + std::to_string(r) + ", feature '" + cols.name + "' has no column in the fitted encoding");
            }
        }
    }

#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < n; ++r) {
        double* dst = out.values.data() + r * map.width;
        for (int64_t f = 0; f < w_in; ++f) {
            const auto& cols = map.features[static_cast<size_t>(f)];
            if (cols.kind == FeatureKind::numeric) {
                dst[cols.offset] = table.cell(r, f);
            } else {
                dst[cols.offset + table.category_at(r, f)] = 1.0;
            }
        }
    }
    return out;
}

Matrix tanh_transform(const Matrix& m, const std::vector<uint8_t>& numeric_mask) {
    if (static_cast<int64_t>(numeric_mask.size()) != m.n_cols) {
        raise(ErrorCode::WidthMismatch, "mask length does not match column count");
    }
    Matrix out = m;
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < m.n_rows; ++r) {
        double* row = out.values.data() + r * m.n_cols;
        for (int64_t c = 0; c < m.n_cols; ++c) {
            if (numeric_mask[static_cast<size_t>(c)]) row[c] = std::tanh(row[c]);
        }
    }
    return out;
}

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> mean(static_cast<size_t>(m.n_cols), 0.0);
#pragma omp parallel for schedule(static)
    for (int64_t c = 0; c < m.n_cols; ++c) {
        double acc = 0.0;
        for (int64_t r = 0; r < m.n_rows; ++r) acc += m.at(r, c);
        mean[static_cast<size_t>(c)] = acc / static_cast<double>(m.n_rows);
    }
    return mean;
}

Matrix covariance(const Matrix& m) {
    if (m.n_rows < 2) raise(ErrorCode::DegenerateInput, "covariance needs at least 2 rows");
    const int64_t n = m.n_rows;
    const int64_t w = m.n_cols;
    const auto mean = column_means(m);

    Matrix centered(n, w);
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < n; ++r) {
        for (int64_t c = 0; c < w; ++c) centered.at(r, c) = m.at(r, c) - mean[static_cast<size_t>(c)];
    }

    Matrix cov(w, w);
    // Each (j,k) entry accumulates serially over rows in a fixed order, so
    // the result does not depend on the worker count.
#pragma omp parallel for schedule(dynamic, 4)
    for (int64_t j = 0; j < w; ++j) {
        for (int64_t k = j; k < w; ++k) {
            double acc = 0.0;
            for (int64_t r = 0; r < n; ++r) acc += centered.at(r, j) * centered.at(r, k);
            const double v = acc / static_cast<double>(n - 1);
            cov.at(j, k) = v;
            cov.at(k, j) = v;
        }
    }
    return cov;
}

std::vector<double> PcaModel::explained_fractions() const {
    std::vector<double> out(explained_variance.size(), 0.0);
    if (total_variance > 0.0) {
        for (size_t i = 0; i < out.size(); ++i) out[i] = explained_variance[i] / total_variance;
    }
    return out;
}

PcaModel fit_pca(const Matrix& m, const PcaTarget& target) {
    if (m.n_rows < 2) raise(ErrorCode::DegenerateInput, "PCA needs at least 2 rows");
    if (target.is_count && target.count < 1) raise(ErrorCode::InvalidConfig, "component count must be >= 1");
    if (!target.is_count && !(target.fraction > 0.0)) {
        raise(ErrorCode::InvalidConfig, "variance fraction target must be positive");
    }

    const int64_t w = m.n_cols;
    Matrix cov = covariance(m);
    std::vector<double> vals;
    std::vector<double> vecs;
    jacobi_eigen(cov.values, w, vals, vecs);

    std::vector<int64_t> order(static_cast<size_t>(w));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int64_t a, int64_t b) { return vals[static_cast<size_t>(a)] > vals[static_cast<size_t>(b)]; });

    double total = 0.0;
    for (double v : vals) total += std::max(v, 0.0);

    int64_t k = 0;
    if (target.is_count) {
        k = std::min<int64_t>(target.count, w);
    } else if (total <= 0.0) {
        k = 1;
    } else {
        double cum = 0.0;
        for (k = 0; k < w; ) {
            cum += std::max(vals[static_cast<size_t>(order[static_cast<size_t>(k)])], 0.0);
            ++k;
            if (cum / total >= target.fraction) break;
        }
    }

    PcaModel model;
    model.mean = column_means(m);
    model.total_variance = total;
    model.components = Matrix(k, w);
    model.explained_variance.resize(static_cast<size_t>(k));
    for (int64_t i = 0; i < k; ++i) {
        const int64_t src = order[static_cast<size_t>(i)];
        model.explained_variance[static_cast<size_t>(i)] = std::max(vals[static_cast<size_t>(src)], 0.0);
        double* dst = model.components.values.data() + i * w;
        for (int64_t j = 0; j < w; ++j) dst[j] = vecs[static_cast<size_t>(j * w + src)];
        // Fixed sign: the largest-magnitude entry is positive.
        int64_t arg = 0;
        for (int64_t j = 1; j < w; ++j) {
            if (std::abs(dst[j]) > std::abs(dst[arg])) arg = j;
        }
        if (dst[arg] < 0.0) {
            for (int64_t j = 0; j < w; ++j) dst[j] = -dst[j];
        }
    }
    return model;
}

Matrix project(const Matrix& m, const PcaModel& pca) {
    if (m.n_cols != pca.input_width()) {
        raise(ErrorCode::WidthMismatch, "matrix width does not match the PCA model");
    }
    const int64_t k = pca.n_components();
    Matrix out(m.n_rows, k);
#pragma omp parallel for schedule(static)
    for (int64_t r = 0; r < m.n_rows; ++r) {
        const double* src = m.row_ptr(r);
        double* dst = out.values.data() + r * k;
        for (int64_t c = 0; c < k; ++c) {
            const double* comp = pca.components.row_ptr(c);
            double acc = 0.0;
            for (int64_t j = 0; j < m.n_cols; ++j) acc += comp[j] * (src[j] - pca.mean[static_cast<size_t>(j)]);
            dst[c] = acc;
        }
    }
    return out;
}

const char* variant_name(PipelineVariant v) {
    switch (v) {
        case PipelineVariant::raw: return "raw";
        case PipelineVariant::pca: return "pca";
        case PipelineVariant::tanh: return "tanh";
        case PipelineVariant::tanh_pca: return "tanh_pca";
    }
    return "raw";
}

PipelineVariant variant_from_name(std::string_view s) {
    if (s == "raw") return PipelineVariant::raw;
    if (s == "pca") return PipelineVariant::pca;
    if (s == "tanh") return PipelineVariant::tanh;
    if (s == "tanh_pca" || s == "tanh+pca") return PipelineVariant::tanh_pca;
    raise(ErrorCode::InvalidConfig, "unknown pipeline variant '" + std::string(s) + "'");
}

FittedPipeline fit_pipeline(const LabeledTable& table, const FeatureSchema& schema, const PipelineSpec& spec) {
    FittedPipeline fitted;
    fitted.variant = spec.variant;
    fitted.one_hot = fit_one_hot(table, schema);
    Matrix m = encode(table, fitted.one_hot);
    if (fitted.has_tanh()) {
        fitted.tanh_mask = fitted.one_hot.numeric_mask();
        m = tanh_transform(m, fitted.tanh_mask);
    }
    if (fitted.has_pca()) {
        fitted.pca = fit_pca(m, spec.pca_target);
    }
    return fitted;
}

Matrix apply_pipeline(const LabeledTable& table, const FittedPipeline& fitted) {
    Matrix m = encode(table, fitted.one_hot);
    if (fitted.has_tanh()) m = tanh_transform(m, fitted.tanh_mask);
    if (fitted.has_pca()) m = project(m, *fitted.pca);
    return m;
}

}  // namespace fraudward
