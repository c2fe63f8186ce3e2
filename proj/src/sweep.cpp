#include "fraudward/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include <json.hpp>

#include "fraudward/csv.hpp"
#include "fraudward/errors.hpp"
#include "fraudward/metrics.hpp"
#include "fraudward/rng.hpp"

namespace fraudward {

std::vector<int32_t> IntRange::values() const {
    std::vector<int32_t> out;
    if (step >= 1) {
        for (int32_t v = lo; v <= hi; v += step) out.push_back(v);
    }
    return out;
}

void GridSpec::validate() const {
    if (depths.step < 1 || tree_counts.step < 1) {
        raise(ErrorCode::InvalidConfig, "range steps must be >= 1");
    }
    if (depths.values().empty()) raise(ErrorCode::InvalidConfig, "depth range is empty");
    if (tree_counts.values().empty()) raise(ErrorCode::InvalidConfig, "tree-count range is empty");
    if (depths.lo < 1) raise(ErrorCode::InvalidConfig, "depths must be >= 1");
    if (tree_counts.lo < 1) raise(ErrorCode::InvalidConfig, "tree counts must be >= 1");
    if (model == ModelKind::gbdt) {
        if (learning_rates.empty()) raise(ErrorCode::InvalidConfig, "gbdt sweeps need at least one learning rate");
        for (double nu : learning_rates) {
            if (!(nu > 0.0 && nu <= 1.0)) raise(ErrorCode::InvalidConfig, "learning rates must lie in (0, 1]");
        }
    }
}

std::vector<GridCell> enumerate_grid(const GridSpec& spec) {
    spec.validate();
    const auto depths = spec.depths.values();
    const auto counts = spec.tree_counts.values();
    const std::vector<double> rates =
        spec.model == ModelKind::gbdt ? spec.learning_rates : std::vector<double>{0.0};

    std::vector<GridCell> cells;
    cells.reserve(depths.size() * counts.size() * rates.size());
    int64_t index = 0;
    for (int32_t depth : depths) {
        for (int32_t n_trees : counts) {
            for (double nu : rates) {
                cells.push_back(GridCell{index++, depth, n_trees, nu});
            }
        }
    }
    return cells;
}

uint64_t derive_cell_seed(uint64_t sweep_seed, int64_t cell_index) {
    return derive_stream(sweep_seed, 0x63656c6cULL + static_cast<uint64_t>(cell_index));
}

std::vector<SweepRow> run_sweep(const GridSpec& spec, const LabeledTable& train,
                                const LabeledTable& test, const LabeledTable& validation,
                                const SweepOptions& options) {
    const auto cells = enumerate_grid(spec);
    if (!train.schema) raise(ErrorCode::InvalidConfig, "training table has no schema");

    PipelineSpec pipe_spec;
    pipe_spec.variant = spec.variant;
    pipe_spec.pca_target = spec.pca_target;
    const FittedPipeline pipeline = fit_pipeline(train, *train.schema, pipe_spec);

    const Matrix train_m = apply_pipeline(train, pipeline);
    const Matrix test_m = apply_pipeline(test, pipeline);
    const Matrix valid_m = apply_pipeline(validation, pipeline);
    const ColumnOrder order = ColumnOrder::build(train_m);

    const int64_t n_cells = static_cast<int64_t>(cells.size());
    std::vector<SweepRow> rows(static_cast<size_t>(n_cells));
    std::vector<std::optional<std::pair<ErrorCode, std::string>>> failures(static_cast<size_t>(n_cells));

#pragma omp parallel for schedule(dynamic, 1)
    for (int64_t i = 0; i < n_cells; ++i) {
        const GridCell& cell = cells[static_cast<size_t>(i)];
        try {
            const uint64_t cell_seed = derive_cell_seed(spec.seed, cell.index);
            const auto start = std::chrono::steady_clock::now();
            AnyModel model;
            if (spec.model == ModelKind::rf) {
                ForestParams params;
                params.n_trees = cell.n_trees;
                params.max_depth = cell.depth;
                params.seed = cell_seed;
                model = fit_forest(train_m, train.labels, params, &order);
            } else {
                GbdtParams params;
                params.n_trees = cell.n_trees;
                params.max_depth = cell.depth;
                params.learning_rate = cell.learning_rate;
                params.seed = cell_seed;
                model = fit_gbdt(train_m, train.labels, params, &order);
            }
            const auto end = std::chrono::steady_clock::now();

            SweepRow row;
            row.depth = cell.depth;
            row.n_trees = cell.n_trees;
            row.learning_rate = cell.learning_rate;
            row.variant = spec.variant;
            row.auc_test = auc(predict_proba(model, test_m), test.labels);
            row.auc_validation = auc(predict_proba(model, valid_m), validation.labels);
            row.seconds = options.record_timing ? std::chrono::duration<double>(end - start).count() : 0.0;
            rows[static_cast<size_t>(i)] = row;

            if (options.progress) {
#pragma omp critical
                {
                    *options.progress << "cell " << (cell.index + 1) << "/" << n_cells
                                      << " depth=" << cell.depth << " trees=" << cell.n_trees
                                      << " auc_test=" << row.auc_test << "\n";
                }
            }
        } catch (const Error& e) {
            failures[static_cast<size_t>(i)] = std::make_pair(e.code(), std::string(e.what()));
        } catch (const std::exception& e) {
            failures[static_cast<size_t>(i)] = std::make_pair(ErrorCode::InvalidConfig, std::string(e.what()));
        }
    }

    for (int64_t i = 0; i < n_cells; ++i) {
        if (failures[static_cast<size_t>(i)]) {
            const auto& [code, message] = *failures[static_cast<size_t>(i)];
            raise(code, "sweep cell " + std::to_string(i) + " (depth=" +
                            std::to_string(cells[static_cast<size_t>(i)].depth) + ", n_trees=" +
                            std::to_string(cells[static_cast<size_t>(i)].n_trees) + ") failed: " + message);
        }
    }
    return rows;
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SummaryStats stats_of(const std::vector<double>& v) {
    SummaryStats s;
    if (v.empty()) return s;
    double acc = 0.0;
    for (double x : v) acc += x;
    s.mean = acc / static_cast<double>(v.size());
    s.median = median_of(v);
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

nlohmann::ordered_json stats_json(const SummaryStats& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}};
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// One marker element per sweep row; shape and shade cycle by depth.
std::string marker_element(int shape, double cx, double cy, const std::string& fill) {
    const std::string x = fmt_coord(cx);
    const std::string y = fmt_coord(cy);
    const std::string attrs = "fill=\"" + fill + "\" stroke=\"#202020\" stroke-width=\"0.6\" class=\"mark\"";
    switch (shape % 4) {
        case 0:
            return "<circle cx=\"" + x + "\" cy=\"" + y + "\" r=\"4\" " + attrs + "/>";
        case 1:
            return "<rect x=\"" + fmt_coord(cx - 3.6) + "\" y=\"" + fmt_coord(cy - 3.6) +
                   "\" width=\"7.2\" height=\"7.2\" " + attrs + "/>";
        case 2:
            return "<path d=\"M" + x + " " + fmt_coord(cy - 4.8) + " L" + fmt_coord(cx + 4.8) + " " + y +
                   " L" + x + " " + fmt_coord(cy + 4.8) + " L" + fmt_coord(cx - 4.8) + " " + y + " Z\" " +
                   attrs + "/>";
        default:
            return "<path d=\"M" + x + " " + fmt_coord(cy - 4.6) + " L" + fmt_coord(cx + 4.2) + " " +
                   fmt_coord(cy + 3.6) + " L" + fmt_coord(cx - 4.2) + " " + fmt_coord(cy + 3.6) + " Z\" " +
                   attrs + "/>";
    }
}

const char* kDepthShades[4] = {"#222222", "#5a5a5a", "#909090", "#c4c4c4"};

}  // namespace

SweepSummary summarize(std::span<const SweepRow> rows, const OutlierRule& rule) {
    if (rows.empty()) raise(ErrorCode::EmptyInput, "summarize needs at least one row");
    if (!(rule.k > 0.0)) raise(ErrorCode::InvalidConfig, "outlier k must be positive");

    std::vector<double> test_all, valid_all;
    for (const SweepRow& r : rows) {
        test_all.push_back(r.auc_test);
        valid_all.push_back(r.auc_validation);
    }

    SweepSummary summary;
    summary.n_total = static_cast<int64_t>(rows.size());
    summary.test_unfiltered = stats_of(test_all);
    summary.validation_unfiltered = stats_of(valid_all);

    std::vector<char> keep(rows.size(), 1);
    if (rule.method == OutlierMethod::mad) {
        const double med = median_of(test_all);
        std::vector<double> dev;
        dev.reserve(rows.size());
        for (double v : test_all) dev.push_back(std::abs(v - med));
        const double mad = median_of(dev);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (dev[i] > rule.k * mad) keep[i] = 0;
        }
    }

    std::vector<double> test_kept, valid_kept;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (keep[i]) {
            test_kept.push_back(rows[i].auc_test);
            valid_kept.push_back(rows[i].auc_validation);
        } else {
            summary.removed.push_back(rows[i]);
        }
    }
    summary.n_kept = static_cast<int64_t>(test_kept.size());
    summary.test_filtered = stats_of(test_kept);
    summary.validation_filtered = stats_of(valid_kept);
    return summary;
}

void emit_scatter(std::span<const SweepRow> rows, const std::string& csv_path,
                  const std::string& svg_path) {
    if (rows.empty()) raise(ErrorCode::EmptyInput, "emit_scatter needs at least one row");

    {
        std::ofstream csv(csv_path);
        if (!csv) raise(ErrorCode::IoFailure, "cannot write '" + csv_path + "'");
        csv << "depth,n_trees,learning_rate,variant,auc_test,auc_validation,seconds\n";
        for (const SweepRow& r : rows) {
            csv << r.depth << ',' << r.n_trees << ',' << format_double(r.learning_rate) << ','
                << variant_name(r.variant) << ',' << format_double(r.auc_test) << ','
                << format_double(r.auc_validation) << ',' << format_double(r.seconds) << '\n';
        }
        if (!csv) raise(ErrorCode::IoFailure, "failed writing '" + csv_path + "'");
    }

    // Plot geometry
    const double left = 70, right = 640, top = 40, bottom = 500;
    double x_lo = rows[0].n_trees, x_hi = rows[0].n_trees;
    double y_lo = rows[0].auc_test, y_hi = rows[0].auc_test;
    std::vector<int32_t> depths;
    for (const SweepRow& r : rows) {
        x_lo = std::min(x_lo, static_cast<double>(r.n_trees));
        x_hi = std::max(x_hi, static_cast<double>(r.n_trees));
        y_lo = std::min(y_lo, r.auc_test);
        y_hi = std::max(y_hi, r.auc_test);
        depths.push_back(r.depth);
    }
    std::sort(depths.begin(), depths.end());
    depths.erase(std::unique(depths.begin(), depths.end()), depths.end());

    const double x_pad = x_hi > x_lo ? 0.05 * (x_hi - x_lo) : 1.0;
    const double y_pad = y_hi > y_lo ? 0.08 * (y_hi - y_lo) : 0.01;
    x_lo -= x_pad;
    x_hi += x_pad;
    y_lo -= y_pad;
    y_hi += y_pad;

    const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * (right - left); };
    const auto py = [&](double y) { return bottom - (y - y_lo) / (y_hi - y_lo) * (bottom - top); };
    const auto depth_slot = [&](int32_t d) {
        return static_cast<int>(std::lower_bound(depths.begin(), depths.end(), d) - depths.begin());
    };

    std::ofstream svg(svg_path);
    if (!svg) raise(ErrorCode::IoFailure, "cannot write '" + svg_path + "'");
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"560\" "
           "viewBox=\"0 0 880 560\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"880\" height=\"560\" fill=\"#ffffff\"/>\n";
    svg << "<line x1=\"" << fmt_coord(left) << "\" y1=\"" << fmt_coord(bottom) << "\" x2=\""
        << fmt_coord(right) << "\" y2=\"" << fmt_coord(bottom)
        << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << fmt_coord(left) << "\" y1=\"" << fmt_coord(top) << "\" x2=\""
        << fmt_coord(left) << "\" y2=\"" << fmt_coord(bottom)
        << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";

    for (int t = 0; t <= 5; ++t) {
        const double xv = x_lo + (x_hi - x_lo) * t / 5.0;
        const double xpix = px(xv);
        svg << "<line x1=\"" << fmt_coord(xpix) << "\" y1=\"" << fmt_coord(bottom) << "\" x2=\""
            << fmt_coord(xpix) << "\" y2=\"" << fmt_coord(bottom + 5)
            << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt_coord(xpix) << "\" y=\"" << fmt_coord(bottom + 20)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << static_cast<int64_t>(std::llround(xv)) << "</text>\n";
        const double yv = y_lo + (y_hi - y_lo) * t / 5.0;
        const double ypix = py(yv);
        svg << "<line x1=\"" << fmt_coord(left - 5) << "\" y1=\"" << fmt_coord(ypix) << "\" x2=\""
            << fmt_coord(left) << "\" y2=\"" << fmt_coord(ypix)
            << "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        svg << "<text x=\"" << fmt_coord(left - 9) << "\" y=\"" << fmt_coord(ypix + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">" << fmt_tick(yv)
            << "</text>\n";
    }
    svg << "<text x=\"" << fmt_coord((left + right) / 2) << "\" y=\"540\" font-family=\"sans-serif\" "
           "font-size=\"14\" text-anchor=\"middle\">number of trees</text>\n";
    svg << "<text x=\"20\" y=\"" << fmt_coord((top + bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 20 "
        << fmt_coord((top + bottom) / 2) << ")\">test AUC</text>\n";

    for (const SweepRow& r : rows) {
        const int slot = depth_slot(r.depth);
        svg << marker_element(slot, px(r.n_trees), py(r.auc_test), kDepthShades[slot % 4]) << "\n";
    }

    // Legend
    double ly = top + 12;
    svg << "<text x=\"668\" y=\"" << fmt_coord(ly - 2)
        << "\" font-family=\"sans-serif\" font-size=\"13\" font-weight=\"bold\">max depth</text>\n";
    for (size_t i = 0; i < depths.size(); ++i) {
        ly += 22;
        svg << "<g>" << marker_element(static_cast<int>(i), 676, ly - 4, kDepthShades[i % 4])
            << "<text x=\"690\" y=\"" << fmt_coord(ly)
            << "\" font-family=\"sans-serif\" font-size=\"13\">depth " << depths[i]
            << "</text></g>\n";
    }
    svg << "</svg>\n";
    if (!svg) raise(ErrorCode::IoFailure, "failed writing '" + svg_path + "'");
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) raise(ErrorCode::CorruptModel, "sweep CSV has no header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "depth,n_trees,learning_rate,variant,auc_test,auc_validation,seconds") {
        raise(ErrorCode::MissingColumn, "unexpected sweep CSV header '" + line + "'");
    }

    const auto parse_int = [](std::string_view s, int32_t& out) {
        const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        return res.ec == std::errc() && res.ptr == s.data() + s.size();
    };

    std::vector<SweepRow> rows;
    int64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        std::vector<std::string_view> fields;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == ',') {
                fields.emplace_back(line.data() + start, i - start);
                start = i + 1;
            }
        }
        if (fields.size() != 7) {
            raise(ErrorCode::MissingColumn, "sweep CSV line " + std::to_string(lineno) + " has " +
                                                std::to_string(fields.size()) + " fields, expected 7");
        }
        SweepRow r;
        bool ok = parse_int(fields[0], r.depth) && parse_int(fields[1], r.n_trees) &&
                  parse_double(fields[2], r.learning_rate) && parse_double(fields[4], r.auc_test) &&
                  parse_double(fields[5], r.auc_validation) && parse_double(fields[6], r.seconds);
        if (!ok) {
            raise(ErrorCode::NonNumericCell, "sweep CSV line " + std::to_string(lineno) + " has a bad numeric field");
        }
        r.variant = variant_from_name(fields[3]);
        rows.push_back(r);
    }
    if (rows.empty()) raise(ErrorCode::EmptyInput, "sweep CSV has no data rows");
    return rows;
}

void save_summary(const SweepSummary& summary, const OutlierRule& rule, const std::string& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["outliers"] = {{"method", rule.method == OutlierMethod::mad ? "mad" : "none"}, {"k", rule.k}};
    j["rows"] = {{"total", summary.n_total},
                 {"kept", summary.n_kept},
                 {"removed", summary.n_total - summary.n_kept}};
    j["unfiltered"] = {{"auc_test", stats_json(summary.test_unfiltered)},
                       {"auc_validation", stats_json(summary.validation_unfiltered)}};
    j["filtered"] = {{"auc_test", stats_json(summary.test_filtered)},
                     {"auc_validation", stats_json(summary.validation_filtered)}};
    auto removed = nlohmann::ordered_json::array();
    for (const SweepRow& r : summary.removed) {
        removed.push_back({{"depth", r.depth},
                           {"n_trees", r.n_trees},
                           {"learning_rate", r.learning_rate},
                           {"variant", variant_name(r.variant)},
                           {"auc_test", r.auc_test},
                           {"auc_validation", r.auc_validation}});
    }
    j["removed"] = std::move(removed);
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write summary '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) raise(ErrorCode::IoFailure, "failed writing summary '" + path + "'");
}

}  // namespace fraudward
