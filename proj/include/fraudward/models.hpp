#pragma once

#include <string>
#include <variant>

#include "fraudward/forest.hpp"
#include "fraudward/gbdt.hpp"

namespace fraudward {

enum class ModelKind { rf, gbdt };

const char* model_kind_name(ModelKind k);
ModelKind model_kind_from_name(std::string_view s);

using AnyModel = std::variant<ForestModel, GbdtModel>;

ModelKind model_kind(const AnyModel& model);
int64_t model_width(const AnyModel& model);
std::vector<double> predict_proba(const AnyModel& model, const Matrix& m);

// One-line parameter echo, e.g. "rf(max_depth=4, n_trees=100, seed=42)".
std::string describe_model(const AnyModel& model);

}  // namespace fraudward
