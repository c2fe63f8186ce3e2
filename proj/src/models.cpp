#include "fraudward/models.hpp"

#include "fraudward/csv.hpp"
#include "fraudward/errors.hpp"

namespace fraudward {

const char* model_kind_name(ModelKind k) { return k == ModelKind::rf ? "rf" : "gbdt"; }

ModelKind model_kind_from_name(std::string_view s) {
    if (s == "rf") return ModelKind::rf;
    if (s == "gbdt") return ModelKind::gbdt;
    raise(ErrorCode::InvalidConfig, "unknown model kind '" + std::string(s) + "'");
}

ModelKind model_kind(const AnyModel& model) {
    return std::holds_alternative<ForestModel>(model) ? ModelKind::rf : ModelKind::gbdt;
}

int64_t model_width(const AnyModel& model) {
    return std::visit([](const auto& m) { return m.width; }, model);
}

std::vector<double> predict_proba(const AnyModel& model, const Matrix& m) {
    return std::visit([&m](const auto& mod) { return predict_proba(mod, m); }, model);
}

std::string describe_model(const AnyModel& model) {
    if (const auto* rf = std::get_if<ForestModel>(&model)) {
        return "rf(max_depth=" + std::to_string(rf->params.max_depth) +
               ", n_trees=" + std::to_string(rf->params.n_trees) +
               ", bootstrap=" + (rf->params.bootstrap ? "on" : "off") +
               ", features=" + (rf->params.feature_rule == FeatureRule::sqrt_count ? "sqrt" : "all") +
               ", seed=" + std::to_string(rf->params.seed) + ")";
    }
    const auto& gb = std::get<GbdtModel>(model);
    return "gbdt(max_depth=" + std::to_string(gb.params.max_depth) +
           ", n_trees=" + std::to_string(gb.params.n_trees) +
           ", learning_rate=" + format_double(gb.params.learning_rate) +
           ", seed=" + std::to_string(gb.params.seed) + ")";
}

}  // namespace fraudward
