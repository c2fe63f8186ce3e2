#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fraudward/errors.hpp"
#include "fraudward/pipeline.hpp"
#include "fraudward/synth.hpp"
#include "test_support.hpp"

using namespace fraudward;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
    Matrix m(static_cast<int64_t>(rows.size()), static_cast<int64_t>(rows[0].size()));
    for (size_t r = 0; r < rows.size(); ++r) {
        for (size_t c = 0; c < rows[r].size(); ++c) m.at(static_cast<int64_t>(r), static_cast<int64_t>(c)) = rows[r][c];
    }
    return m;
}

// Full eigendecomposition through Eigen; the independent route for PCA.
std::vector<double> eigen_descending_eigenvalues(const Matrix& m) {
    const int64_t n = m.n_rows;
    const int64_t w = m.n_cols;
    Eigen::MatrixXd x(n, w);
    for (int64_t r = 0; r < n; ++r) {
        for (int64_t c = 0; c < w; ++c) x(r, c) = m.at(r, c);
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    std::vector<double> vals(solver.eigenvalues().data(), solver.eigenvalues().data() + w);
    std::sort(vals.begin(), vals.end(), std::greater<>());
    return vals;
}

}  // namespace

TEST_CASE("fit_one_hot lays out one column per numeric feature and per category") {
    const LabeledTable t = testsup::small_table();
    const OneHotMap map = fit_one_hot(t, *t.schema);
    CHECK(map.width == 4);  // 2 numeric + 2 categories
    CHECK(map.features[0].offset == 0);
    CHECK(map.features[1].offset == 1);
    CHECK(map.features[2].offset == 2);
    CHECK(map.features[2].width == 2);

    // 2 numeric + 1 categorical with 3 declared categories -> width 5
    auto schema = std::make_shared<FeatureSchema>();
    schema->label_name = "label";
    schema->features = {
        FeatureSpec{"a", FeatureGroup::financial, FeatureKind::numeric, {}},
        FeatureSpec{"b", FeatureGroup::financial, FeatureKind::numeric, {}},
        FeatureSpec{"c", FeatureGroup::work, FeatureKind::categorical, {"x", "y", "z"}},
    };
    LabeledTable t2;
    t2.schema = schema;
    CHECK(fit_one_hot(t2, *schema).width == 5);
}

TEST_CASE("the default generator schema encodes to 64 + sum of category counts") {
    fraudward::SynthConfig cfg;
    cfg.n_rows = 5;
    cfg.fraud_rate = 0.5;
    cfg.seed = 1;  // defaults: 64 numeric + 33 categorical
    const LabeledTable t = fraudward::synthesize(cfg);
    const OneHotMap map = fit_one_hot(t, *t.schema);
    int64_t category_columns = 0;
    for (const auto& f : t.schema->features) {
        category_columns += static_cast<int64_t>(f.categories.size());
    }
    CHECK(map.width == 64 + category_columns);
    CHECK(map.width == 193);  // category counts cycle 2..6 over 33 features
}

TEST_CASE("fit_one_hot with zero categorical features is the identity on numerics") {
    auto schema = std::make_shared<FeatureSchema>();
    schema->label_name = "label";
    schema->features = {FeatureSpec{"a", FeatureGroup::financial, FeatureKind::numeric, {}},
                        FeatureSpec{"b", FeatureGroup::work, FeatureKind::numeric, {}}};
    LabeledTable t;
    t.schema = schema;
    t.cells = {1.5, -2.0, 3.25, 4.0};
    t.labels = {0, 1};
    const OneHotMap map = fit_one_hot(t, *schema);
    CHECK(map.width == 2);
    const Matrix m = encode(t, map);
    CHECK(m.values == t.cells);
}

TEST_CASE("encode sets exactly the matching category column") {
    const LabeledTable t = testsup::small_table();
    const OneHotMap map = fit_one_hot(t, *t.schema);
    const Matrix m = encode(t, map);
    // row 0: employment = employed -> columns (1, 0)
    CHECK(m.at(0, 2) == 1.0);
    CHECK(m.at(0, 3) == 0.0);
    // row 1: self_employed -> (0, 1)
    CHECK(m.at(1, 2) == 0.0);
    CHECK(m.at(1, 3) == 1.0);
    // numeric passthrough
    CHECK(m.at(0, 0) == 12500.0);

    // every categorical block sums to exactly 1 per row
    for (int64_t r = 0; r < m.n_rows; ++r) {
        CHECK(m.at(r, 2) + m.at(r, 3) == 1.0);
    }
}

TEST_CASE("encode uses the declared universe, not the observed categories") {
    auto schema = std::make_shared<FeatureSchema>();
    schema->label_name = "label";
    schema->features = {FeatureSpec{"c", FeatureGroup::work, FeatureKind::categorical, {"a", "b", "z"}}};
    LabeledTable train;
    train.schema = schema;
    train.cells = {0.0, 1.0};  // only "a" and "b" observed
    train.labels = {0, 1};
    const OneHotMap map = fit_one_hot(train, *schema);
    REQUIRE(map.width == 3);

    LabeledTable apply;
    apply.schema = schema;
    apply.cells = {2.0};  // "z": declared but never observed during fitting
    apply.labels = {0};
    const Matrix m = encode(apply, map);
    CHECK(m.at(0, 0) == 0.0);
    CHECK(m.at(0, 1) == 0.0);
    CHECK(m.at(0, 2) == 1.0);
}

TEST_CASE("tanh_transform squashes masked columns and leaves the rest alone") {
    Matrix m = from_rows({{0.0, 5.0}, {1e6, -3.0}, {0.5, 0.25}});
    const std::vector<uint8_t> mask = {1, 0};
    const Matrix out = tanh_transform(m, mask);
    CHECK(out.at(0, 0) == 0.0);
    CHECK(out.at(1, 0) == 1.0);  // saturation at double precision
    CHECK(out.at(2, 0) == doctest::Approx(testsup::tanh_reference(0.5)).epsilon(1e-12));
    CHECK(out.at(2, 0) == doctest::Approx(0.46211715726000975).epsilon(1e-12));
    // unmasked column is bit-identical
    for (int64_t r = 0; r < 3; ++r) CHECK(out.at(r, 1) == m.at(r, 1));
}

TEST_CASE("tanh_transform stays in [-1,1] and preserves strict column order") {
    Rng rng(5150);
    Matrix m(64, 3);
    for (double& v : m.values) v = -10.0 + 20.0 * rng.uniform01();
    const std::vector<uint8_t> mask = {1, 1, 1};
    const Matrix out = tanh_transform(m, mask);
    for (double v : out.values) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
    for (int64_t c = 0; c < 3; ++c) {
        for (int64_t r = 1; r < m.n_rows; ++r) {
            const bool lt = m.at(r - 1, c) < m.at(r, c);
            if (lt) CHECK(out.at(r - 1, c) < out.at(r, c));
        }
    }
}

TEST_CASE("fit_pca solves the collinear 2-D example by hand") {
    const Matrix m = from_rows({{1, 1}, {2, 2}, {3, 3}});
    const PcaModel pca = fit_pca(m, PcaTarget::component_count(2));
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(pca.components.at(0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-9));
    CHECK(pca.components.at(0, 1) == doctest::Approx(inv_sqrt2).epsilon(1e-9));
    const auto fractions = pca.explained_fractions();
    CHECK(fractions[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fractions[1] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("fit_pca rejects degenerate input") {
    const Matrix m = from_rows({{1, 2}});
    CHECK_THROWS_AS(fit_pca(m, PcaTarget::component_count(1)), Error);
}

TEST_CASE("a constant column contributes no variance and no component weight") {
    Rng rng(77);
    Matrix m(40, 3);
    for (int64_t r = 0; r < 40; ++r) {
        m.at(r, 0) = rng.normal();
        m.at(r, 1) = 7.25;  // constant
        m.at(r, 2) = rng.normal() * 2.0;
    }
    const PcaModel pca = fit_pca(m, PcaTarget::component_count(2));
    for (int64_t k = 0; k < 2; ++k) {
        CHECK(std::abs(pca.components.at(k, 1)) < 1e-9);
    }
}

TEST_CASE("pca components are orthonormal and variances non-increasing") {
    Rng rng(31337);
    const Matrix m = testsup::random_matrix(rng, 60, 6);
    const PcaModel pca = fit_pca(m, PcaTarget::component_count(6));
    for (int64_t a = 0; a < 6; ++a) {
        for (int64_t b = 0; b < 6; ++b) {
            double dot = 0.0;
            for (int64_t j = 0; j < 6; ++j) dot += pca.components.at(a, j) * pca.components.at(b, j);
            CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-9);
        }
    }
    for (size_t i = 1; i < pca.explained_variance.size(); ++i) {
        CHECK(pca.explained_variance[i] <= pca.explained_variance[i - 1]);
    }

    // total variance equals the summed column variances
    double col_var = 0.0;
    const auto mean = column_means(m);
    for (int64_t c = 0; c < 6; ++c) {
        double acc = 0.0;
        for (int64_t r = 0; r < m.n_rows; ++r) {
            const double d = m.at(r, c) - mean[static_cast<size_t>(c)];
            acc += d * d;
        }
        col_var += acc / static_cast<double>(m.n_rows - 1);
    }
    double ev_sum = 0.0;
    for (double v : pca.explained_variance) ev_sum += v;
    CHECK(ev_sum == doctest::Approx(col_var).epsilon(1e-6));
}

TEST_CASE("pca eigenvalues and fraction targets agree with the Eigen oracle") {
    Rng rng(8080);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix m = testsup::random_matrix(rng, 30 + 10 * rep, 5);
        const PcaModel full = fit_pca(m, PcaTarget::component_count(5));
        const auto oracle_vals = eigen_descending_eigenvalues(m);
        for (int64_t i = 0; i < 5; ++i) {
            CHECK(full.explained_variance[static_cast<size_t>(i)] ==
                  doctest::Approx(std::max(oracle_vals[static_cast<size_t>(i)], 0.0)).epsilon(1e-8));
        }

        const double target = 0.95;
        const PcaModel frac = fit_pca(m, PcaTarget::variance_fraction(target));
        double total = 0.0;
        for (double v : oracle_vals) total += std::max(v, 0.0);
        int64_t expected_k = 0;
        double cum = 0.0;
        for (double v : oracle_vals) {
            cum += std::max(v, 0.0);
            ++expected_k;
            if (cum / total >= target) break;
        }
        CHECK(frac.n_components() == expected_k);
    }
}

TEST_CASE("project centers rows and round-trips at full rank") {
    Rng rng(4242);
    const Matrix m = testsup::random_matrix(rng, 25, 4);
    const PcaModel pca = fit_pca(m, PcaTarget::component_count(4));

    Matrix mean_row(1, 4);
    for (int64_t c = 0; c < 4; ++c) mean_row.at(0, c) = pca.mean[static_cast<size_t>(c)];
    const Matrix z = project(mean_row, pca);
    for (double v : z.values) CHECK(std::abs(v) < 1e-12);

    const Matrix projected = project(m, pca);
    for (int64_t r = 0; r < m.n_rows; ++r) {
        for (int64_t c = 0; c < 4; ++c) {
            double rec = pca.mean[static_cast<size_t>(c)];
            for (int64_t k = 0; k < 4; ++k) rec += pca.components.at(k, c) * projected.at(r, k);
            CHECK(rec == doctest::Approx(m.at(r, c)).epsilon(1e-6));
        }
    }

    CHECK_THROWS_AS(project(from_rows({{1, 2, 3}}), pca), Error);
}

TEST_CASE("projection of 1-D embedded data preserves pairwise distances") {
    Rng rng(606);
    const int64_t n = 30;
    std::vector<double> t(static_cast<size_t>(n));
    for (double& v : t) v = rng.normal() * 3.0;
    const double dir[3] = {0.26726124191242440, 0.53452248382484879, 0.80178372573727319};  // unit
    Matrix m(n, 3);
    for (int64_t r = 0; r < n; ++r) {
        for (int64_t c = 0; c < 3; ++c) m.at(r, c) = 5.0 + t[static_cast<size_t>(r)] * dir[c];
    }
    const PcaModel pca = fit_pca(m, PcaTarget::component_count(1));
    const Matrix z = project(m, pca);
    for (int64_t a = 0; a < n; ++a) {
        for (int64_t b = a + 1; b < n; ++b) {
            const double want = std::abs(t[static_cast<size_t>(a)] - t[static_cast<size_t>(b)]);
            const double got = std::abs(z.at(a, 0) - z.at(b, 0));
            CHECK(got == doctest::Approx(want).epsilon(1e-6));
        }
    }
}

TEST_CASE("fit_pipeline composes stages in the fixed order") {
    Rng rng(12);
    LabeledTable t = testsup::small_table();

    PipelineSpec raw_spec;
    const FittedPipeline raw = fit_pipeline(t, *t.schema, raw_spec);
    CHECK_FALSE(raw.pca.has_value());
    CHECK(raw.tanh_mask.empty());
    CHECK(raw.output_width() == 4);
    const Matrix raw_m = apply_pipeline(t, raw);
    CHECK(raw_m.values == encode(t, raw.one_hot).values);

    PipelineSpec tp_spec;
    tp_spec.variant = PipelineVariant::tanh_pca;
    tp_spec.pca_target = PcaTarget::component_count(2);
    const FittedPipeline tp = fit_pipeline(t, *t.schema, tp_spec);
    REQUIRE(tp.pca.has_value());

    // PCA must have been fitted on the post-tanh matrix
    const Matrix manual = tanh_transform(encode(t, tp.one_hot), tp.one_hot.numeric_mask());
    const PcaModel expected = fit_pca(manual, tp_spec.pca_target);
    CHECK(tp.pca->components.values == expected.components.values);
    CHECK(tp.pca->mean == expected.mean);

    // fitting twice gives identical state; applying twice gives identical bits
    const FittedPipeline tp2 = fit_pipeline(t, *t.schema, tp_spec);
    CHECK(tp2.pca->components.values == tp.pca->components.values);
    const Matrix a = apply_pipeline(t, tp);
    const Matrix b = apply_pipeline(t, tp);
    CHECK(a.values == b.values);
}

TEST_CASE("apply_pipeline rejects non-conforming tables") {
    const LabeledTable t = testsup::small_table();
    const FittedPipeline fitted = fit_pipeline(t, *t.schema, PipelineSpec{});

    LabeledTable other;
    auto schema = std::make_shared<FeatureSchema>();
    schema->label_name = "label";
    schema->features = {FeatureSpec{"x", FeatureGroup::financial, FeatureKind::numeric, {}}};
    other.schema = schema;
    other.cells = {1.0};
    other.labels = {0};
    CHECK_THROWS_AS(apply_pipeline(other, fitted), Error);
}
