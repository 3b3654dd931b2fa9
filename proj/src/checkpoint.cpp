#include "horizonbench/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace hb::models {

namespace {

constexpr char kMagic[8] = {'H', 'B', 'C', 'K', 'P', 'T', '1', '\n'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

nlohmann::ordered_json spec_to_json(const ModelSpec& spec) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = to_string(spec.kind);
    j["input_dim"] = spec.input_dim;
    j["output_dim"] = spec.output_dim;
    j["hidden"] = spec.hidden;
    j["conv_filters"] = spec.conv_filters;
    j["conv_kernel"] = spec.conv_kernel;
    j["pool_width"] = spec.pool_width;
    j["fnn_hidden_activation"] = to_string(spec.fnn_hidden_activation);
    j["cell_state_sigmoid"] = spec.cell_state_sigmoid;
    return j;
}

ModelSpec spec_from_json(const nlohmann::json& j) {
    ModelSpec spec;
    spec.kind = model_kind_from_string(j.at("kind").get<std::string>());
    spec.input_dim = j.at("input_dim").get<int>();
    spec.output_dim = j.at("output_dim").get<int>();
    spec.hidden = j.at("hidden").get<int>();
    spec.conv_filters = j.at("conv_filters").get<int>();
    spec.conv_kernel = j.at("conv_kernel").get<int>();
    spec.pool_width = j.at("pool_width").get<int>();
    spec.fnn_hidden_activation =
        activation_from_string(j.at("fnn_hidden_activation").get<std::string>());
    spec.cell_state_sigmoid = j.at("cell_state_sigmoid").get<bool>();
    return spec;
}

}  // namespace

void save_checkpoint(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);

    nlohmann::ordered_json header = spec_to_json(model.spec());
    header["param_count"] = model.param_count();
    const std::string header_text = header.dump();
    const auto header_len = static_cast<std::uint32_t>(header_text.size());

    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    const std::vector<double> params = model.parameters();
    out.write(reinterpret_cast<const char*>(params.data()),
              static_cast<std::streamsize>(params.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

std::unique_ptr<Model> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);

    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_checkpoint: " + path + " is not a checkpoint file");
    }
    std::uint32_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    std::string header_text(header_len, '\0');
    in.read(header_text.data(), header_len);
    if (!in) throw std::runtime_error("load_checkpoint: truncated header in " + path);

    const auto header = nlohmann::json::parse(header_text);
    const ModelSpec spec = spec_from_json(header);
    const auto param_count = header.at("param_count").get<std::size_t>();

    std::vector<double> params(param_count);
    in.read(reinterpret_cast<char*>(params.data()),
            static_cast<std::streamsize>(param_count * sizeof(double)));
    if (!in) throw std::runtime_error("load_checkpoint: truncated parameters in " + path);

    Rng rng(0);  // immediately overwritten
    auto model = build_model(spec, rng);
    model->load_parameters(params);
    return model;
}

}  // namespace hb::models
