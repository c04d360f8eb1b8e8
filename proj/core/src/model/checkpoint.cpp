#include <cmath>
#include <fstream>
#include <string>

#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"
#include "gibbsnet/model/model.hpp"

namespace gibbsnet::model {

using nlohmann::json;

namespace {

std::vector<double> finite_array(const json& j, const std::string& what, std::size_t expected) {
    if (!j.is_array()) {
        throw ValidationError("checkpoint: '" + what + "' must be an array");
    }
    if (j.size() != expected) {
        throw ValidationError("checkpoint: '" + what + "' has " + std::to_string(j.size()) +
                              " entries, expected " + std::to_string(expected));
    }
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) {
            throw ValidationError("checkpoint: '" + what + "'[" + std::to_string(i) + "] is not a finite number");
        }
        const double v = j[i].get<double>();
        if (!std::isfinite(v)) {
            throw ValidationError("checkpoint: '" + what + "'[" + std::to_string(i) + "] is not finite");
        }
        out.push_back(v);
    }
    return out;
}

double finite_number(const json& j, const std::string& what) {
    if (!j.is_number() || !std::isfinite(j.get<double>())) {
        throw ValidationError("checkpoint: '" + what + "' is not a finite number");
    }
    return j.get<double>();
}

}  // namespace

json to_json(const Checkpoint& c) {
    const ArchitectureConfig& cfg = c.config();
    json layers = json::array();
    for (const LayerShape& l : c.params.layers()) {
        const auto id = static_cast<Layer>(&l - c.params.layers().data());
        const auto w = c.params.weights(id);
        const auto b = c.params.bias(id);
        layers.push_back({
            {"name", l.name},
            {"shape", {l.out, l.in}},
            {"activation", l.activated ? "silu" : "linear"},
            {"weights", std::vector<double>(w.begin(), w.end())},
            {"bias", std::vector<double>(b.begin(), b.end())},
        });
    }
    return {
        {"format_version", Checkpoint::kFormatVersion},
        {"architecture",
         {
             {"descriptor_dim", cfg.descriptor_dim},
             {"hidden", cfg.hidden},
             {"theta_layers", ArchitectureConfig::theta_hidden_layers},
             {"alpha_layers", ArchitectureConfig::alpha_hidden_layers},
             {"phi_layers", ArchitectureConfig::phi_hidden_layers},
             {"activation", "silu"},
             {"variant", to_string(cfg.variant)},
         }},
        {"standardization",
         {
             {"descriptor_mean", c.stats.descriptor_mean},
             {"descriptor_std", c.stats.descriptor_std},
             {"T_mean", c.stats.T_mean},
             {"T_std", c.stats.T_std},
         }},
        {"descriptors", {{"source", c.descriptor_source}, {"seed", c.descriptor_seed}}},
        {"seed", c.seed},
        {"layers", layers},
        {"training", c.training},
    };
}

Checkpoint checkpoint_from_json(const json& j) {
    try {
        if (!j.is_object()) {
            throw ValidationError("checkpoint: top level must be an object");
        }
        const int version = j.at("format_version").get<int>();
        if (version != Checkpoint::kFormatVersion) {
            throw ValidationError("checkpoint: unsupported format_version " + std::to_string(version));
        }
        const json& arch = j.at("architecture");
        ArchitectureConfig cfg;
        cfg.descriptor_dim = arch.at("descriptor_dim").get<std::size_t>();
        cfg.hidden = arch.at("hidden").get<std::size_t>();
        cfg.variant = parse_variant(arch.at("variant").get<std::string>());
        if (arch.at("theta_layers").get<std::size_t>() != ArchitectureConfig::theta_hidden_layers ||
            arch.at("alpha_layers").get<std::size_t>() != ArchitectureConfig::alpha_hidden_layers ||
            arch.at("phi_layers").get<std::size_t>() != ArchitectureConfig::phi_hidden_layers) {
            throw ValidationError("checkpoint: unsupported layer counts");
        }
        if (arch.at("activation").get<std::string>() != "silu") {
            throw ValidationError("checkpoint: unsupported activation");
        }

        Checkpoint c;
        c.params = ModelParameters(cfg);
        const json& layers = j.at("layers");
        if (!layers.is_array() || layers.size() != kLayerCount) {
            throw ValidationError("checkpoint: expected " + std::to_string(kLayerCount) + " layers");
        }
        for (std::size_t i = 0; i < kLayerCount; ++i) {
            const auto id = static_cast<Layer>(i);
            const LayerShape& shape = c.params.layer(id);
            const json& l = layers[i];
            if (l.at("name").get<std::string>() != shape.name) {
                throw ValidationError("checkpoint: layer " + std::to_string(i) + " should be '" + shape.name + "'");
            }
            const auto dims = l.at("shape").get<std::vector<std::size_t>>();
            if (dims.size() != 2 || dims[0] != shape.out || dims[1] != shape.in) {
                throw ValidationError("checkpoint: layer '" + shape.name + "' has the wrong shape");
            }
            const auto w = finite_array(l.at("weights"), shape.name + ".weights", shape.in * shape.out);
            const auto b = finite_array(l.at("bias"), shape.name + ".bias", shape.out);
            std::copy(w.begin(), w.end(), c.params.weights(id).begin());
            std::copy(b.begin(), b.end(), c.params.bias(id).begin());
        }

        const json& st = j.at("standardization");
        c.stats.descriptor_mean = finite_array(st.at("descriptor_mean"), "descriptor_mean", cfg.descriptor_dim);
        c.stats.descriptor_std = finite_array(st.at("descriptor_std"), "descriptor_std", cfg.descriptor_dim);
        c.stats.T_mean = finite_number(st.at("T_mean"), "T_mean");
        c.stats.T_std = finite_number(st.at("T_std"), "T_std");
        c.stats.validate();

        if (j.contains("descriptors")) {
            c.descriptor_source = j["descriptors"].at("source").get<std::string>();
            c.descriptor_seed = j["descriptors"].at("seed").get<std::uint64_t>();
        }
        c.seed = j.value("seed", std::uint64_t{0});
        c.training = j.value("training", json::object());
        return c;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path) {
    io::write_file(path, to_json(c).dump(1) + "\n");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    const std::string text = io::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("checkpoint '" + path.string() + "': " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace gibbsnet::model
