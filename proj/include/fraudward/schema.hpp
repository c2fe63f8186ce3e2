#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fraudward {

enum class FeatureGroup { financial, work, transaction, demographic };
enum class FeatureKind { numeric, categorical };

const char* group_name(FeatureGroup g);
const char* kind_name(FeatureKind k);
FeatureGroup group_from_name(std::string_view s);
FeatureKind kind_from_name(std::string_view s);

struct FeatureSpec {
    std::string name;
    FeatureGroup group = FeatureGroup::financial;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> categories;  // categorical only

    bool operator==(const FeatureSpec&) const = default;
};

// Ordered feature descriptors plus the label column name. Names and category
// labels are restricted to [A-Za-z0-9_] so the CSV format needs no quoting.
struct FeatureSchema {
    std::vector<FeatureSpec> features;
    std::string label_name = "label";

    int64_t n_features() const { return static_cast<int64_t>(features.size()); }

    // -1 when the label is not in the feature's declared universe
    int32_t category_index(int64_t feature, std::string_view label) const;

    void validate() const;  // throws InvalidConfig

    bool operator==(const FeatureSchema&) const = default;
};

// JSON sidecar, schema_version 1
FeatureSchema load_schema(const std::string& path);
void save_schema(const FeatureSchema& schema, const std::string& path);

}  // namespace fraudward
