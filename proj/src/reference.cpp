#include "fraudward/reference.hpp"

#include <algorithm>
#include <cmath>

#include "fraudward/errors.hpp"

namespace fraudward::reference {

double auc_pairwise(std::span<const double> scores, std::span<const int32_t> labels) {
    std::vector<double> pos, neg;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 1) {
            pos.push_back(scores[i]);
        } else {
            neg.push_back(scores[i]);
        }
    }
    if (pos.empty() || neg.empty()) {
        raise(ErrorCode::SingleClassEval, "pairwise AUC needs both classes");
    }
    double credit = 0.0;
    for (double p : pos) {
        for (double n : neg) {
            if (p > n) {
                credit += 1.0;
            } else if (p == n) {
                credit += 0.5;
            }
        }
    }
    return credit / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

namespace {

struct Stats {
    int64_t w = 0;
    int64_t wpos = 0;
    double wy = 0.0;
    double wy2 = 0.0;

    void add(int64_t weight, double y) {
        w += weight;
        if (y != 0.0) wpos += weight;
        const double wd = static_cast<double>(weight);
        wy += wd * y;
        wy2 += wd * y * y;
    }
};

double impurity_of(const Stats& s, Impurity imp) {
    const double m = static_cast<double>(s.w);
    if (imp == Impurity::gini) {
        const double p = static_cast<double>(s.wpos) / m;
        const double q = static_cast<double>(s.w - s.wpos) / m;
        return 1.0 - p * p - q * q;
    }
    const double sse = std::max(s.wy2 - (s.wy * s.wy) / m, 0.0);
    return sse / m;
}

double gain_of(const Stats& parent, const Stats& left, const Stats& right, Impurity imp) {
    const double m = static_cast<double>(parent.w);
    return impurity_of(parent, imp) -
           (static_cast<double>(left.w) * impurity_of(left, imp) +
            static_cast<double>(right.w) * impurity_of(right, imp)) /
               m;
}

}  // namespace

SplitCandidate best_split_exhaustive(const Matrix& m, std::span<const double> targets,
                                     std::span<const int32_t> row_subset,
                                     std::span<const int32_t> feature_subset, Impurity impurity) {
    std::vector<int64_t> weight(static_cast<size_t>(m.n_rows), 0);
    for (int32_t r : row_subset) weight[static_cast<size_t>(r)] += 1;

    Stats parent;
    std::vector<int32_t> members;
    for (int64_t r = 0; r < m.n_rows; ++r) {
        if (weight[static_cast<size_t>(r)] > 0) {
            members.push_back(static_cast<int32_t>(r));
            parent.add(weight[static_cast<size_t>(r)], targets[static_cast<size_t>(r)]);
        }
    }

    SplitCandidate best;
    if (parent.w < 2) return best;

    for (int32_t f : feature_subset) {
        std::vector<std::pair<double, int32_t>> ordered;
        ordered.reserve(members.size());
        for (int32_t r : members) ordered.emplace_back(m.at(r, f), r);
        std::sort(ordered.begin(), ordered.end());

        for (size_t cut = 1; cut < ordered.size(); ++cut) {
            if (ordered[cut].first == ordered[cut - 1].first) continue;
            const double threshold = (ordered[cut - 1].first + ordered[cut].first) * 0.5;
            if (!(threshold < ordered[cut].first)) continue;  // midpoint rounded up to v
            Stats left;
            for (size_t i = 0; i < cut; ++i) {
                left.add(weight[static_cast<size_t>(ordered[i].second)],
                         targets[static_cast<size_t>(ordered[i].second)]);
            }
            const Stats right{parent.w - left.w, parent.wpos - left.wpos, parent.wy - left.wy,
                              parent.wy2 - left.wy2};
            const double gain = gain_of(parent, left, right, impurity);
            if (gain <= 0.0) continue;
            const bool wins = !best.valid() || gain > best.gain ||
                              (gain == best.gain && (f < best.feature_index ||
                                                     (f == best.feature_index && threshold < best.threshold)));
            if (wins) best = SplitCandidate{f, threshold, gain};
        }
    }
    return best;
}

Matrix covariance_serial(const Matrix& m) {
    if (m.n_rows < 2) raise(ErrorCode::DegenerateInput, "covariance needs at least 2 rows");
    const int64_t n = m.n_rows;
    const int64_t w = m.n_cols;
    std::vector<double> mean(static_cast<size_t>(w), 0.0);
    for (int64_t c = 0; c < w; ++c) {
        double acc = 0.0;
        for (int64_t r = 0; r < n; ++r) acc += m.at(r, c);
        mean[static_cast<size_t>(c)] = acc / static_cast<double>(n);
    }
    Matrix cov(w, w);
    for (int64_t j = 0; j < w; ++j) {
        for (int64_t k = j; k < w; ++k) {
            double acc = 0.0;
            for (int64_t r = 0; r < n; ++r) {
                acc += (m.at(r, j) - mean[static_cast<size_t>(j)]) * (m.at(r, k) - mean[static_cast<size_t>(k)]);
            }
            const double v = acc / static_cast<double>(n - 1);
            cov.at(j, k) = v;
            cov.at(k, j) = v;
        }
    }
    return cov;
}

}  // namespace fraudward::reference
