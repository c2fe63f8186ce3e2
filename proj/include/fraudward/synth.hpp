#pragma once

#include <cstdint>

#include "fraudward/table.hpp"

namespace fraudward {

enum class SynthPreset { a_like, b_like, custom };

const char* preset_name(SynthPreset p);

// Synthetic P2P-borrower generator. Numeric features are drawn on scales
// spanning four orders of magnitude, categorical features uniformly; labels
// come from a latent score (linear term over a fixed random feature subset,
// one pairwise interaction, Gaussian noise) passed through a sigmoid whose
// offset is bisected until the empirical fraud rate hits the target.
struct SynthConfig {
    SynthPreset preset = SynthPreset::custom;
    int64_t n_rows = 0;
    double fraud_rate = 0.5;
    int64_t n_numeric = 64;
    int64_t n_categorical = 33;
    uint64_t seed = 0;

    static SynthConfig a_like(uint64_t seed);  // 60000 rows, balanced
    static SynthConfig b_like(uint64_t seed);  // 50000 rows, balanced

    void validate() const;  // throws InvalidConfig
};

// Deterministic for a fixed config. The returned table owns its schema.
LabeledTable synthesize(const SynthConfig& config);

}  // namespace fraudward
