#include "fraudward/schema.hpp"

#include <fstream>
#include <unordered_set>

#include <json.hpp>

#include "fraudward/errors.hpp"

namespace fraudward {

namespace {

constexpr int kSchemaVersion = 1;

bool valid_token(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                        (c >= '0' && c <= '9') || c == '_';
        if (!ok) return false;
    }
    return true;
}

}  // namespace

const char* group_name(FeatureGroup g) {
    switch (g) {
        case FeatureGroup::financial: return "financial";
        case FeatureGroup::work: return "work";
        case FeatureGroup::transaction: return "transaction";
        case FeatureGroup::demographic: return "demographic";
    }
    return "financial";
}

const char* kind_name(FeatureKind k) {
    return k == FeatureKind::numeric ? "numeric" : "categorical";
}

FeatureGroup group_from_name(std::string_view s) {
    if (s == "financial") return FeatureGroup::financial;
    if (s == "work") return FeatureGroup::work;
    if (s == "transaction") return FeatureGroup::transaction;
    if (s == "demographic") return FeatureGroup::demographic;
    raise(ErrorCode::InvalidConfig, "unknown feature group '" + std::string(s) + "'");
}

FeatureKind kind_from_name(std::string_view s) {
    if (s == "numeric") return FeatureKind::numeric;
    if (s == "categorical") return FeatureKind::categorical;
    raise(ErrorCode::InvalidConfig, "unknown feature kind '" + std::string(s) + "'");
}

int32_t FeatureSchema::category_index(int64_t feature, std::string_view label) const {
    const auto& cats = features[static_cast<size_t>(feature)].categories;
    for (size_t i = 0; i < cats.size(); ++i) {
        if (cats[i] == label) return static_cast<int32_t>(i);
    }
    return -1;
}

void FeatureSchema::validate() const {
    if (!valid_token(label_name)) {
        raise(ErrorCode::InvalidConfig, "label name '" + label_name + "' is empty or has characters outside [A-Za-z0-9_]");
    }
    std::unordered_set<std::string_view> seen;
    for (const auto& f : features) {
        if (!valid_token(f.name)) {
            raise(ErrorCode::InvalidConfig, "feature name '" + f.name + "' is empty or has characters outside [A-Za-z0-9_]");
        }
        if (f.name == label_name) {
            raise(ErrorCode::InvalidConfig, "feature name '" + f.name + "' collides with the label column");
        }
        if (!seen.insert(f.name).second) {
            raise(ErrorCode::InvalidConfig, "duplicate feature name '" + f.name + "'");
        }
        if (f.kind == FeatureKind::numeric) {
            if (!f.categories.empty()) {
                raise(ErrorCode::InvalidConfig, "numeric feature '" + f.name + "' declares categories");
            }
        } else {
            if (f.categories.size() < 2) {
                raise(ErrorCode::InvalidConfig, "categorical feature '" + f.name + "' needs at least 2 categories");
            }
            std::unordered_set<std::string_view> cats;
            for (const auto& c : f.categories) {
                if (!valid_token(c)) {
                    raise(ErrorCode::InvalidConfig, "category '" + c + "' of feature '" + f.name + "' is empty or has characters outside [A-Za-z0-9_]");
                }
                if (!cats.insert(c).second) {
                    raise(ErrorCode::InvalidConfig, "duplicate category '" + c + "' in feature '" + f.name + "'");
                }
            }
        }
    }
}

FeatureSchema load_schema(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorCode::IoFailure, "cannot open schema file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, "schema file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            raise(ErrorCode::VersionMismatch, "schema file '" + path + "' has unsupported schema_version");
        }
        FeatureSchema schema;
        schema.label_name = j.at("label_name").get<std::string>();
        for (const auto& jf : j.at("features")) {
            FeatureSpec spec;
            spec.name = jf.at("name").get<std::string>();
            spec.group = group_from_name(jf.at("group").get<std::string>());
            spec.kind = kind_from_name(jf.at("kind").get<std::string>());
            if (spec.kind == FeatureKind::categorical) {
                spec.categories = jf.at("categories").get<std::vector<std::string>>();
            }
            schema.features.push_back(std::move(spec));
        }
        schema.validate();
        return schema;
    } catch (const nlohmann::json::exception& e) {
        raise(ErrorCode::InvalidConfig, "schema file '" + path + "' is malformed: " + e.what());
    }
}

void save_schema(const FeatureSchema& schema, const std::string& path) {
    schema.validate();
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["label_name"] = schema.label_name;
    auto features = nlohmann::ordered_json::array();
    for (const auto& f : schema.features) {
        nlohmann::ordered_json jf;
        jf["name"] = f.name;
        jf["group"] = group_name(f.group);
        jf["kind"] = kind_name(f.kind);
        if (f.kind == FeatureKind::categorical) jf["categories"] = f.categories;
        features.push_back(std::move(jf));
    }
    j["features"] = std::move(features);
    std::ofstream out(path);
    if (!out) raise(ErrorCode::IoFailure, "cannot write schema file '" + path + "'");
    out << j.dump(2) << '\n';
    if (!out) raise(ErrorCode::IoFailure, "failed writing schema file '" + path + "'");
}

}  // namespace fraudward
