// Times the OpenMP kernels against their serial reference implementations
// and cross-checks that both produce identical results.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <string>
#include <vector>

#include "fraudward/forest.hpp"
#include "fraudward/metrics.hpp"
#include "fraudward/parallel.hpp"
#include "fraudward/pipeline.hpp"
#include "fraudward/reference.hpp"
#include "fraudward/rng.hpp"

using namespace fraudward;

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

template <typename F>
double time_ms(F&& fn, int repeats = 3) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const double start = now_ms();
        fn();
        best = std::min(best, now_ms() - start);
    }
    return best;
}

void print_row(const char* kernel, const char* shape, double serial_ms, double parallel_ms,
               const char* check) {
    std::printf("%-28s %-18s %10.1f %10.1f %7.2fx   %s\n", kernel, shape, serial_ms, parallel_ms,
                serial_ms / parallel_ms, check);
}

}  // namespace

int main() {
    const int workers = max_threads();
    std::printf("kernel benchmark: serial reference vs OpenMP (%d workers)\n\n", workers);
    std::printf("%-28s %-18s %10s %10s %8s   %s\n", "kernel", "shape", "serial ms", "parallel ms",
                "speedup", "result check");

    Rng rng(90210);

    {  // covariance
        const int64_t n = 20000, w = 96;
        Matrix m(n, w);
        for (double& v : m.values) v = rng.normal();
        Matrix serial_out, parallel_out;
        const double serial_ms = time_ms([&] { serial_out = reference::covariance_serial(m); });
        const double parallel_ms = time_ms([&] { parallel_out = covariance(m); });
        const bool equal = serial_out.values == parallel_out.values;
        print_row("covariance", "20000x96", serial_ms, parallel_ms,
                  equal ? "bit-identical" : "MISMATCH");
    }

    {  // split search over one large node
        const int64_t n = 120000, w = 64;
        Matrix m(n, w);
        for (double& v : m.values) v = rng.normal();
        std::vector<double> targets(static_cast<size_t>(n));
        for (double& t : targets) t = static_cast<double>(rng.uniform_below(2));
        std::vector<int32_t> rows(static_cast<size_t>(n));
        std::iota(rows.begin(), rows.end(), 0);
        std::vector<int32_t> feats(static_cast<size_t>(w));
        std::iota(feats.begin(), feats.end(), 0);
        const ColumnOrder order = ColumnOrder::build(m);

        SplitCandidate serial_cand, parallel_cand;
        const double serial_ms = time_ms([&] {
            ThreadLimit lock(1);
            serial_cand = best_split(m, targets, rows, feats, Impurity::gini, &order);
        });
        const double parallel_ms = time_ms([&] {
            parallel_cand = best_split(m, targets, rows, feats, Impurity::gini, &order);
        });
        const bool equal = serial_cand.feature_index == parallel_cand.feature_index &&
                           serial_cand.threshold == parallel_cand.threshold &&
                           serial_cand.gain == parallel_cand.gain;
        print_row("best_split (one node)", "120000x64", serial_ms, parallel_ms,
                  equal ? "bit-identical" : "MISMATCH");
    }

    {  // forest training
        const int64_t n = 20000, w = 48;
        Matrix m(n, w);
        std::vector<int32_t> labels(static_cast<size_t>(n));
        for (int64_t r = 0; r < n; ++r) {
            double score = 0.0;
            for (int64_t c = 0; c < w; ++c) {
                const double v = rng.normal();
                m.at(r, c) = v;
                if (c < 4) score += v;
            }
            labels[static_cast<size_t>(r)] = score + rng.normal() > 0 ? 1 : 0;
        }
        ForestParams params;
        params.n_trees = 40;
        params.max_depth = 5;
        params.seed = 1;
        const ColumnOrder order = ColumnOrder::build(m);

        ForestModel serial_model, parallel_model;
        const double serial_ms = time_ms(
            [&] {
                ThreadLimit lock(1);
                serial_model = fit_forest(m, labels, params, &order);
            },
            2);
        const double parallel_ms =
            time_ms([&] { parallel_model = fit_forest(m, labels, params, &order); }, 2);
        bool equal = serial_model.trees.size() == parallel_model.trees.size();
        for (size_t t = 0; equal && t < serial_model.trees.size(); ++t) {
            const auto& a = serial_model.trees[t].nodes;
            const auto& b = parallel_model.trees[t].nodes;
            equal = a.size() == b.size();
            for (size_t i = 0; equal && i < a.size(); ++i) {
                equal = a[i].feature == b[i].feature && a[i].threshold == b[i].threshold &&
                        a[i].value == b[i].value;
            }
        }
        print_row("fit_forest (40 trees, d5)", "20000x48", serial_ms, parallel_ms,
                  equal ? "bit-identical" : "MISMATCH");

        Matrix probe(100000, w);
        for (double& v : probe.values) v = rng.normal();
        std::vector<double> serial_scores, parallel_scores;
        const double pserial_ms = time_ms([&] {
            ThreadLimit lock(1);
            serial_scores = predict_proba(parallel_model, probe);
        });
        const double pparallel_ms =
            time_ms([&] { parallel_scores = predict_proba(parallel_model, probe); });
        print_row("forest predict", "100000x48", pserial_ms, pparallel_ms,
                  serial_scores == parallel_scores ? "bit-identical" : "MISMATCH");
    }

    {  // auc vs the quadratic pairwise reference
        const int64_t n = 20000;
        std::vector<double> scores(static_cast<size_t>(n));
        std::vector<int32_t> labels(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) {
            scores[static_cast<size_t>(i)] = 0.1 * static_cast<double>(rng.uniform_below(1000));
            labels[static_cast<size_t>(i)] = static_cast<int32_t>(rng.uniform_below(2));
        }
        double fast = 0.0, slow = 0.0;
        const double slow_ms = time_ms([&] { slow = reference::auc_pairwise(scores, labels); }, 2);
        const double fast_ms = time_ms([&] { fast = auc(scores, labels); }, 2);
        char check[64];
        std::snprintf(check, sizeof(check), "|diff| = %.2e", std::abs(fast - slow));
        print_row("auc (sort) vs pairwise", "n=20000", slow_ms, fast_ms, check);
    }

    return 0;
}
