#include "fraudward/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fraudward/errors.hpp"

namespace fraudward {

namespace {

// Node statistics. Node-level stats accumulate over member rows in
// ascending row order; scan-side prefixes accumulate in ascending
// (value, row) order and the right side is parent minus prefix. Keeping
// these conventions fixed makes independently coded scans bit-comparable.
struct Acc {
    int64_t w = 0;     // total integer weight
    int64_t wpos = 0;  // weighted positive count (gini)
    double wy = 0.0;   // weighted target sum (variance)
    double wy2 = 0.0;  // weighted squared-target sum (variance)

    void add(int64_t weight, double y) {
        w += weight;
        if (y != 0.0) wpos += weight;
        const double wd = static_cast<double>(weight);
        wy += wd * y;
        wy2 += wd * y * y;
    }
};

Acc subtract(const Acc& a, const Acc& b) {
    return Acc{a.w - b.w, a.wpos - b.wpos, a.wy - b.wy, a.wy2 - b.wy2};
}

double node_impurity(const Acc& a, Impurity imp) {
    const double m = static_cast<double>(a.w);
    if (imp == Impurity::gini) {
        const double p = static_cast<double>(a.wpos) / m;
        const double q = static_cast<double>(a.w - a.wpos) / m;
        return 1.0 - p * p - q * q;
    }
    const double sse = std::max(a.wy2 - (a.wy * a.wy) / m, 0.0);
    return sse / m;
}

double split_gain(const Acc& parent, const Acc& left, const Acc& right, Impurity imp) {
    const double m = static_cast<double>(parent.w);
    return node_impurity(parent, imp) -
           (static_cast<double>(left.w) * node_impurity(left, imp) +
            static_cast<double>(right.w) * node_impurity(right, imp)) /
               m;
}

double leaf_value(const Acc& a, Impurity imp) {
    if (imp == Impurity::gini) {
        return static_cast<double>(a.wpos) / static_cast<double>(a.w);
    }
    return a.wy / static_cast<double>(a.w);
}

// Strict total order on candidates: higher gain, then lower feature, then
// lower threshold. Any merge order yields the same winner.
bool better(const SplitCandidate& a, const SplitCandidate& b) {
    if (!a.valid()) return false;
    if (!b.valid()) return true;
    if (a.gain != b.gain) return a.gain > b.gain;
    if (a.feature_index != b.feature_index) return a.feature_index < b.feature_index;
    return a.threshold < b.threshold;
}

struct RunState {
    int64_t epoch = -1;
    Acc acc;
    double last_value = 0.0;
};

// One pass over a column in sorted order, evaluating split candidates for
// every enabled node at once. Cost is O(n_rows) per feature per level no
// matter how many nodes the level holds.
void scan_feature(const Matrix& m, const ColumnOrder& order, std::span<const double> targets,
                  const std::vector<int32_t>& node_of_row, const std::vector<int32_t>& weights,
                  const std::vector<int32_t>& local_of_node, const std::vector<Acc>& parent,
                  const std::vector<uint8_t>* enabled, int64_t n_locals, Impurity imp, int32_t f,
                  std::vector<RunState>& runs, int64_t epoch, std::vector<SplitCandidate>& best) {
    const int32_t* col = order.column(f);
    const int64_t n = order.n_rows;
    for (int64_t pos = 0; pos < n; ++pos) {
        const int32_t r = col[pos];
        const int32_t nid = node_of_row[static_cast<size_t>(r)];
        if (nid < 0) continue;
        const int32_t local = local_of_node[static_cast<size_t>(nid)];
        if (local < 0) continue;
        if (enabled && !(*enabled)[static_cast<size_t>(local) * static_cast<size_t>(m.n_cols) + static_cast<size_t>(f)]) {
            continue;
        }
        const double v = m.at(r, f);
        RunState& run = runs[static_cast<size_t>(local)];
        if (run.epoch == epoch && v != run.last_value) {
            // The midpoint of adjacent doubles can round up to v itself, in
            // which case "<= threshold goes left" would not separate the
            // groups the statistics describe; such cuts are skipped.
            const double threshold = (run.last_value + v) * 0.5;
            if (threshold < v) {
                const Acc right = subtract(parent[static_cast<size_t>(local)], run.acc);
                const double gain = split_gain(parent[static_cast<size_t>(local)], run.acc, right, imp);
                if (gain > 0.0) {
                    const SplitCandidate cand{f, threshold, gain};
                    if (better(cand, best[static_cast<size_t>(local)])) best[static_cast<size_t>(local)] = cand;
                }
            }
        } else if (run.epoch != epoch) {
            run.epoch = epoch;
            run.acc = Acc{};
        }
        run.acc.add(weights[static_cast<size_t>(r)], targets[static_cast<size_t>(r)]);
        run.last_value = v;
    }
    (void)n_locals;
}

// Candidate search for a set of sibling nodes; fills per-node winners.
void search_level(const Matrix& m, const ColumnOrder& order, std::span<const double> targets,
                  const std::vector<int32_t>& node_of_row, const std::vector<int32_t>& weights,
                  const std::vector<int32_t>& local_of_node, const std::vector<Acc>& parent,
                  const std::vector<uint8_t>* enabled, const std::vector<int32_t>& features,
                  Impurity imp, std::vector<SplitCandidate>& winners) {
    const int64_t n_locals = static_cast<int64_t>(parent.size());
    const int64_t n_feats = static_cast<int64_t>(features.size());
#pragma omp parallel
    {
        std::vector<RunState> runs(static_cast<size_t>(n_locals));
        std::vector<SplitCandidate> mine(static_cast<size_t>(n_locals));
        int64_t epoch = 0;
#pragma omp for schedule(dynamic, 1) nowait
        for (int64_t i = 0; i < n_feats; ++i) {
            ++epoch;
            scan_feature(m, order, targets, node_of_row, weights, local_of_node, parent, enabled,
                         n_locals, imp, features[static_cast<size_t>(i)], runs, epoch, mine);
        }
#pragma omp critical
        {
            for (int64_t l = 0; l < n_locals; ++l) {
                if (better(mine[static_cast<size_t>(l)], winners[static_cast<size_t>(l)])) {
                    winners[static_cast<size_t>(l)] = mine[static_cast<size_t>(l)];
                }
            }
        }
    }
}

std::vector<int32_t> all_features(int64_t n_cols) {
    std::vector<int32_t> feats(static_cast<size_t>(n_cols));
    std::iota(feats.begin(), feats.end(), 0);
    return feats;
}

}  // namespace

double predict(const Tree& tree, std::span<const double> row) {
    int32_t i = 0;
    while (!tree.nodes[static_cast<size_t>(i)].is_leaf()) {
        const TreeNode& nd = tree.nodes[static_cast<size_t>(i)];
        if (nd.feature >= static_cast<int32_t>(row.size())) {
            raise(ErrorCode::WidthMismatch, "row is narrower than the tree's feature indices");
        }
        i = row[static_cast<size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return tree.nodes[static_cast<size_t>(i)].value;
}

double gini(int64_t n_pos, int64_t n_neg) {
    if (n_pos < 0 || n_neg < 0) raise(ErrorCode::InvalidConfig, "negative class count");
    if (n_pos + n_neg < 1) raise(ErrorCode::EmptyNode, "gini of an empty node");
    const double m = static_cast<double>(n_pos + n_neg);
    const double p = static_cast<double>(n_pos) / m;
    const double q = static_cast<double>(n_neg) / m;
    return 1.0 - p * p - q * q;
}

ColumnOrder ColumnOrder::build(const Matrix& m) {
    ColumnOrder out;
    out.n_rows = m.n_rows;
    out.n_cols = m.n_cols;
    out.order.resize(static_cast<size_t>(m.n_rows * m.n_cols));
#pragma omp parallel for schedule(dynamic, 1)
    for (int64_t c = 0; c < m.n_cols; ++c) {
        int32_t* col = out.order.data() + c * m.n_rows;
        std::iota(col, col + m.n_rows, 0);
        std::sort(col, col + m.n_rows, [&m, c](int32_t a, int32_t b) {
            const double va = m.at(a, c);
            const double vb = m.at(b, c);
            if (va != vb) return va < vb;
            return a < b;
        });
    }
    return out;
}

SplitCandidate best_split(const Matrix& m, std::span<const double> targets,
                          std::span<const int32_t> row_subset,
                          std::span<const int32_t> feature_subset, Impurity impurity,
                          const ColumnOrder* shared_order) {
    ColumnOrder local_order;
    if (!shared_order) {
        local_order = ColumnOrder::build(m);
        shared_order = &local_order;
    }

    std::vector<int32_t> weights(static_cast<size_t>(m.n_rows), 0);
    std::vector<int32_t> node_of_row(static_cast<size_t>(m.n_rows), -1);
    Acc parent;
    for (int32_t r : row_subset) {
        weights[static_cast<size_t>(r)] += 1;
        node_of_row[static_cast<size_t>(r)] = 0;
    }
    for (int64_t r = 0; r < m.n_rows; ++r) {
        if (node_of_row[static_cast<size_t>(r)] == 0) parent.add(weights[static_cast<size_t>(r)], targets[static_cast<size_t>(r)]);
    }
    if (parent.w < 2) return SplitCandidate{};

    std::vector<int32_t> feats(feature_subset.begin(), feature_subset.end());
    std::sort(feats.begin(), feats.end());
    feats.erase(std::unique(feats.begin(), feats.end()), feats.end());

    std::vector<int32_t> local_of_node{0};
    std::vector<Acc> parent_acc{parent};
    std::vector<SplitCandidate> winners(1);
    search_level(m, *shared_order, targets, node_of_row, weights, local_of_node, parent_acc,
                 nullptr, feats, impurity, winners);
    return winners[0];
}

Tree fit_tree(const Matrix& m, std::span<const double> targets, const TreeParams& params,
              std::span<const int32_t> row_subset, FeatureRule rule, Rng* rng,
              const ColumnOrder* shared_order, std::vector<int32_t>* leaf_of_row) {
    if (params.max_depth < 1) raise(ErrorCode::InvalidConfig, "max_depth must be >= 1");
    if (row_subset.empty()) raise(ErrorCode::EmptyTrainingSet, "fit_tree needs at least one row");
    if (static_cast<int64_t>(targets.size()) != m.n_rows) {
        raise(ErrorCode::WidthMismatch, "targets length must equal the matrix row count");
    }
    if (rule == FeatureRule::sqrt_count && rng == nullptr) {
        raise(ErrorCode::InvalidConfig, "sqrt feature sampling needs an RNG");
    }

    ColumnOrder local_order;
    if (!shared_order) {
        local_order = ColumnOrder::build(m);
        shared_order = &local_order;
    } else if (shared_order->n_rows != m.n_rows || shared_order->n_cols != m.n_cols) {
        raise(ErrorCode::WidthMismatch, "shared column order does not match the matrix");
    }

    const int64_t n = m.n_rows;
    const int64_t w = m.n_cols;
    std::vector<int32_t> weights(static_cast<size_t>(n), 0);
    for (int32_t r : row_subset) {
        if (r < 0 || r >= n) raise(ErrorCode::WidthMismatch, "row index out of range");
        weights[static_cast<size_t>(r)] += 1;
    }

    std::vector<int32_t> node_of_row(static_cast<size_t>(n), -1);
    std::vector<int32_t> root_members;
    Acc root_acc;
    for (int64_t r = 0; r < n; ++r) {
        if (weights[static_cast<size_t>(r)] > 0) {
            if (params.impurity == Impurity::gini) {
                const double y = targets[static_cast<size_t>(r)];
                if (y != 0.0 && y != 1.0) {
                    raise(ErrorCode::InvalidConfig, "gini targets must be 0 or 1");
                }
            }
            node_of_row[static_cast<size_t>(r)] = 0;
            root_members.push_back(static_cast<int32_t>(r));
            root_acc.add(weights[static_cast<size_t>(r)], targets[static_cast<size_t>(r)]);
        }
    }

    Tree tree;
    tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(root_acc, params.impurity)});

    const int64_t subset_size =
        rule == FeatureRule::sqrt_count
            ? static_cast<int64_t>(std::ceil(std::sqrt(static_cast<double>(w))))
            : w;
    std::vector<int32_t> feature_pool = all_features(w);

    struct ActiveNode {
        int32_t id;
        int32_t depth;
        std::vector<int32_t> members;  // ascending row index
        Acc acc;
    };
    std::vector<ActiveNode> level;
    level.push_back(ActiveNode{0, 0, std::move(root_members), root_acc});

    while (!level.empty()) {
        // Splittable subset of the level, in node-id order.
        std::vector<int64_t> splittable;
        for (size_t i = 0; i < level.size(); ++i) {
            const ActiveNode& nd = level[i];
            if (nd.depth >= params.max_depth) continue;
            if (nd.acc.w < params.min_samples_split) continue;
            if (node_impurity(nd.acc, params.impurity) <= 0.0) continue;
            splittable.push_back(static_cast<int64_t>(i));
        }
        if (splittable.empty()) break;

        const int64_t n_locals = static_cast<int64_t>(splittable.size());
        std::vector<int32_t> local_of_node(tree.nodes.size(), -1);
        std::vector<Acc> parent_acc(static_cast<size_t>(n_locals));
        for (int64_t l = 0; l < n_locals; ++l) {
            const ActiveNode& nd = level[static_cast<size_t>(splittable[static_cast<size_t>(l)])];
            local_of_node[static_cast<size_t>(nd.id)] = static_cast<int32_t>(l);
            parent_acc[static_cast<size_t>(l)] = nd.acc;
        }

        // Candidate features per node, drawn in node order so the stream is
        // independent of how the scan is scheduled.
        std::vector<uint8_t> enabled;
        std::vector<int32_t> scan_feats;
        if (rule == FeatureRule::sqrt_count && subset_size < w) {
            enabled.assign(static_cast<size_t>(n_locals * w), 0);
            std::vector<uint8_t> in_union(static_cast<size_t>(w), 0);
            for (int64_t l = 0; l < n_locals; ++l) {
                for (int64_t i = 0; i < subset_size; ++i) {
                    const int64_t j = i + static_cast<int64_t>(rng->uniform_below(static_cast<uint64_t>(w - i)));
                    std::swap(feature_pool[static_cast<size_t>(i)], feature_pool[static_cast<size_t>(j)]);
                    const int32_t f = feature_pool[static_cast<size_t>(i)];
                    enabled[static_cast<size_t>(l) * static_cast<size_t>(w) + static_cast<size_t>(f)] = 1;
                    in_union[static_cast<size_t>(f)] = 1;
                }
            }
            for (int32_t f = 0; f < w; ++f) {
                if (in_union[static_cast<size_t>(f)]) scan_feats.push_back(f);
            }
        } else {
            scan_feats = feature_pool;  // identity sampler
        }

        std::vector<SplitCandidate> winners(static_cast<size_t>(n_locals));
        search_level(m, *shared_order, targets, node_of_row, weights, local_of_node, parent_acc,
                     enabled.empty() ? nullptr : &enabled, scan_feats, params.impurity, winners);

        std::vector<ActiveNode> next;
        for (int64_t l = 0; l < n_locals; ++l) {
            const SplitCandidate& win = winners[static_cast<size_t>(l)];
            if (!win.valid()) continue;
            ActiveNode& nd = level[static_cast<size_t>(splittable[static_cast<size_t>(l)])];

            ActiveNode left{static_cast<int32_t>(tree.nodes.size()), nd.depth + 1, {}, Acc{}};
            ActiveNode right{static_cast<int32_t>(tree.nodes.size()) + 1, nd.depth + 1, {}, Acc{}};
            for (int32_t r : nd.members) {
                if (m.at(r, win.feature_index) <= win.threshold) {
                    left.members.push_back(r);
                    left.acc.add(weights[static_cast<size_t>(r)], targets[static_cast<size_t>(r)]);
                    node_of_row[static_cast<size_t>(r)] = left.id;
                } else {
                    right.members.push_back(r);
                    right.acc.add(weights[static_cast<size_t>(r)], targets[static_cast<size_t>(r)]);
                    node_of_row[static_cast<size_t>(r)] = right.id;
                }
            }

            TreeNode& parent_node = tree.nodes[static_cast<size_t>(nd.id)];
            parent_node.feature = win.feature_index;
            parent_node.threshold = win.threshold;
            parent_node.left = left.id;
            parent_node.right = right.id;
            parent_node.value = 0.0;
            tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(left.acc, params.impurity)});
            tree.nodes.push_back(TreeNode{-1, 0.0, -1, -1, leaf_value(right.acc, params.impurity)});
            tree.depth = std::max(tree.depth, nd.depth + 1);
            next.push_back(std::move(left));
            next.push_back(std::move(right));
        }
        level = std::move(next);
    }

    if (leaf_of_row) *leaf_of_row = node_of_row;
    return tree;
}

}  // namespace fraudward
