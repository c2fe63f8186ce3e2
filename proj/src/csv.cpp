#include "fraudward/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <vector>

#include "fraudward/errors.hpp"

namespace fraudward {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

namespace {

void split_line(const std::string& line, std::vector<std::string_view>& out) {
    out.clear();
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.emplace_back(line.data() + start, i - start);
            start = i + 1;
        }
    }
}

std::string row_loc(int64_t row, const std::string& name) {
    return "row " + std::to_string(row) + ", column '" + name + "'";
}

}  // namespace

LabeledTable read_csv(const std::string& path, std::shared_ptr<const FeatureSchema> schema) {
    schema->validate();
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open '" + path + "'");

    const int64_t w = schema->n_features();
    std::string line;
    if (!std::getline(in, line)) {
        raise(ErrorCode::MissingColumn, "file '" + path + "' has no header row");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::vector<std::string_view> fields;
    split_line(line, fields);
    for (int64_t f = 0; f < w; ++f) {
        const auto& name = schema->features[static_cast<size_t>(f)].name;
        if (static_cast<size_t>(f) >= fields.size() || fields[static_cast<size_t>(f)] != name) {
            raise(ErrorCode::MissingColumn, "header column " + std::to_string(f) + " should be '" + name + "'");
        }
    }
    if (fields.size() != static_cast<size_t>(w) + 1 || fields[static_cast<size_t>(w)] != schema->label_name) {
        raise(ErrorCode::MissingColumn, "header must end with label column '" + schema->label_name + "'");
    }

    // Category lookup per categorical feature
    std::vector<std::unordered_map<std::string_view, int32_t>> cat_maps(static_cast<size_t>(w));
    for (int64_t f = 0; f < w; ++f) {
        const auto& spec = schema->features[static_cast<size_t>(f)];
        for (size_t c = 0; c < spec.categories.size(); ++c) {
            cat_maps[static_cast<size_t>(f)].emplace(spec.categories[c], static_cast<int32_t>(c));
        }
    }

    LabeledTable table;
    table.schema = std::move(schema);
    int64_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        split_line(line, fields);
        if (fields.size() != static_cast<size_t>(w) + 1) {
            raise(ErrorCode::MissingColumn,
                  "row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                      " cells, expected " + std::to_string(w + 1));
        }
        for (int64_t f = 0; f < w; ++f) {
            const auto& spec = table.schema->features[static_cast<size_t>(f)];
            const std::string_view cell = fields[static_cast<size_t>(f)];
            if (spec.kind == FeatureKind::numeric) {
                double v = 0.0;
                if (!parse_double(cell, v) || !std::isfinite(v)) {
                    raise(ErrorCode::NonNumericCell, row_loc(row, spec.name) + ": '" + std::string(cell) + "'");
                }
                table.cells.push_back(v);
            } else {
                const auto it = cat_maps[static_cast<size_t>(f)].find(cell);
                if (it == cat_maps[static_cast<size_t>(f)].end()) {
                    raise(ErrorCode::UnknownCategory,
                          row_loc(row, spec.name) + ": '" + std::string(cell) + "' is not a declared category");
                }
                table.cells.push_back(static_cast<double>(it->second));
            }
        }
        const std::string_view label = fields[static_cast<size_t>(w)];
        if (label == "0") {
            table.labels.push_back(0);
        } else if (label == "1") {
            table.labels.push_back(1);
        } else {
            raise(ErrorCode::BadLabel, "row " + std::to_string(row) + ": label '" + std::string(label) + "' is not 0 or 1");
        }
        ++row;
    }
    return table;
}

void write_csv(const LabeledTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write '" + path + "'");

    const auto& schema = *table.schema;
    const int64_t w = schema.n_features();
    std::string line;
    for (int64_t f = 0; f < w; ++f) {
        line += schema.features[static_cast<size_t>(f)].name;
        line += ',';
    }
    line += schema.label_name;
    out << line << '\n';

    for (int64_t r = 0; r < table.n_rows(); ++r) {
        line.clear();
        for (int64_t f = 0; f < w; ++f) {
            const auto& spec = schema.features[static_cast<size_t>(f)];
            if (spec.kind == FeatureKind::numeric) {
                line += format_double(table.cell(r, f));
            } else {
                line += spec.categories[static_cast<size_t>(table.category_at(r, f))];
            }
            line += ',';
        }
        line += table.labels[static_cast<size_t>(r)] == 1 ? '1' : '0';
        out << line << '\n';
    }
    if (!out) raise(ErrorCode::IoFailure, "failed writing '" + path + "'");
}

}  // namespace fraudward
