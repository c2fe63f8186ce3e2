#include "fraudward/table.hpp"

#include <cmath>
#include <string>

#include "fraudward/errors.hpp"

namespace fraudward {

void LabeledTable::validate() const {
    if (!schema) raise(ErrorCode::InvalidConfig, "table has no schema");
    schema->validate();
    const int64_t w = n_features();
    if (cells.size() != static_cast<size_t>(n_rows() * w)) {
        raise(ErrorCode::InvalidConfig, "cell count does not match rows x features");
    }
    for (int64_t r = 0; r < n_rows(); ++r) {
        if (labels[static_cast<size_t>(r)] != 0 && labels[static_cast<size_t>(r)] != 1) {
            raise(ErrorCode::BadLabel, "row " + std::to_string(r) + " has label outside {0,1}");
        }
        for (int64_t f = 0; f < w; ++f) {
            const auto& spec = schema->features[static_cast<size_t>(f)];
            const double v = cell(r, f);
            if (spec.kind == FeatureKind::numeric) {
                if (!std::isfinite(v)) {
                    raise(ErrorCode::NonNumericCell,
                          "row " + std::to_string(r) + ", feature '" + spec.name + "' is not finite");
                }
            } else {
                const double idx = std::floor(v);
                if (idx != v || v < 0 || v >= static_cast<double>(spec.categories.size())) {
                    raise(ErrorCode::UnknownCategory,
                          "row " + std::to_string(r) + ", feature '" + spec.name + "' has category index outside the declared universe");
                }
            }
        }
    }
}

ClassBalance class_balance(const LabeledTable& table) {
    ClassBalance b;
    for (int32_t y : table.labels) {
        if (y == 1) {
            ++b.n_pos;
        } else {
            ++b.n_neg;
        }
    }
    const int64_t n = b.n_pos + b.n_neg;
    b.rate = n == 0 ? 0.0 : static_cast<double>(b.n_pos) / static_cast<double>(n);
    return b;
}

}  // namespace fraudward
