#pragma once

#include <memory>
#include <string>

#include "horizonbench/model.hpp"

namespace hb::models {

// Checkpoint file: magic "HBCKPT1\n", uint32 LE JSON length, JSON model spec,
// then param_count little-endian float64 values. Round-trips bit-exactly.
void save_checkpoint(const Model& model, const std::string& path);
std::unique_ptr<Model> load_checkpoint(const std::string& path);

}  // namespace hb::models
