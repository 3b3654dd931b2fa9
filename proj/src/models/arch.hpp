#pragma once

#include <memory>

#include "horizonbench/model.hpp"

namespace hb::models::detail {

std::unique_ptr<Model> make_fnn(const ModelSpec& spec, Rng& rng);
std::unique_ptr<Model> make_rnn(const ModelSpec& spec, Rng& rng);
std::unique_ptr<Model> make_lstm(const ModelSpec& spec, Rng& rng);
std::unique_ptr<Model> make_bd_lstm(const ModelSpec& spec, Rng& rng);
std::unique_ptr<Model> make_ed_lstm(const ModelSpec& spec, Rng& rng);
std::unique_ptr<Model> make_cnn(const ModelSpec& spec, Rng& rng);

}  // namespace hb::models::detail
