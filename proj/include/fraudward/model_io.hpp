#pragma once

#include <string>

#include "fraudward/models.hpp"
#include "fraudward/pipeline.hpp"

namespace fraudward {

// What a model file holds: the fitted preprocessing plus the ensemble.
struct ModelBundle {
    FittedPipeline pipeline;
    AnyModel model;
};

// Binary container, magic "FRWD", format_version 1, little-endian payload.
// Doubles round-trip bit-exactly, so load(save(x)) scores identically to x.
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

}  // namespace fraudward
