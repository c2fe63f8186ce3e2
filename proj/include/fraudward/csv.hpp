#pragma once

#include <memory>
#include <string>

#include "fraudward/table.hpp"

namespace fraudward {

// UTF-8, comma-separated, header row = feature names then the label column.
// Numeric cells use "." as the decimal point and are printed with shortest
// round-trip-safe precision, so read(write(t)) == t bit for bit.
LabeledTable read_csv(const std::string& path, std::shared_ptr<const FeatureSchema> schema);
void write_csv(const LabeledTable& table, const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);
// Strict full-string parse; returns false on any trailing garbage.
bool parse_double(std::string_view s, double& out);

}  // namespace fraudward
