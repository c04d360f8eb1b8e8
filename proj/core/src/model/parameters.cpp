#include "gibbsnet/model/parameters.hpp"

#include <cmath>
#include <random>
#include <string>

#include "gibbsnet/error.hpp"

namespace gibbsnet::model {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::hanna:
            return "hanna";
        case Variant::ablation1:
            return "ablation1";
        case Variant::ablation2:
            return "ablation2";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    if (s == "hanna") return Variant::hanna;
    if (s == "ablation1") return Variant::ablation1;
    if (s == "ablation2") return Variant::ablation2;
    throw ValidationError("unknown model variant '" + std::string(s) + "'");
}

void ArchitectureConfig::validate() const {
    if (descriptor_dim == 0) {
        throw ValidationError("architecture: descriptor_dim must be positive");
    }
    if (hidden == 0) {
        throw ValidationError("architecture: hidden must be positive");
    }
}

ModelParameters::ModelParameters(const ArchitectureConfig& config) : config_(config) {
    config_.validate();
    const std::size_t h = config_.hidden;
    struct Spec {
        const char* name;
        std::size_t in, out;
        bool activated;
    };
    const Spec specs[kLayerCount] = {
        {"theta_hidden", config_.descriptor_dim, h, true},
        {"theta_out", h, h, false},
        {"alpha_hidden1", config_.alpha_input(), h, true},
        {"alpha_hidden2", h, h, true},
        {"alpha_out", h, h, false},
        {"phi_hidden", config_.phi_input(), h, true},
        {"phi_out", h, 1, false},
    };
    std::size_t offset = 0;
    for (std::size_t i = 0; i < kLayerCount; ++i) {
        LayerShape& l = layers_[i];
        l.name = specs[i].name;
        l.in = specs[i].in;
        l.out = specs[i].out;
        l.activated = specs[i].activated;
        l.weight_offset = offset;
        offset += l.in * l.out;
        l.bias_offset = offset;
        offset += l.out;
    }
    values_.assign(offset, 0.0);
}

ModelParameters ModelParameters::random(const ArchitectureConfig& config, std::uint64_t seed) {
    ModelParameters p(config);
    std::mt19937_64 rng(seed);
    for (const LayerShape& l : p.layers_) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (std::size_t k = 0; k < l.in * l.out; ++k) {
            p.values_[l.weight_offset + k] = dist(rng);
        }
        for (std::size_t k = 0; k < l.out; ++k) {
            p.values_[l.bias_offset + k] = dist(rng);
        }
    }
    return p;
}

std::span<const double> ModelParameters::weights(Layer id) const {
    const LayerShape& l = layer(id);
    return std::span<const double>(values_).subspan(l.weight_offset, l.in * l.out);
}

std::span<const double> ModelParameters::bias(Layer id) const {
    const LayerShape& l = layer(id);
    return std::span<const double>(values_).subspan(l.bias_offset, l.out);
}

std::span<double> ModelParameters::weights(Layer id) {
    const LayerShape& l = layer(id);
    return std::span<double>(values_).subspan(l.weight_offset, l.in * l.out);
}

std::span<double> ModelParameters::bias(Layer id) {
    const LayerShape& l = layer(id);
    return std::span<double>(values_).subspan(l.bias_offset, l.out);
}

void ModelParameters::check_finite() const {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw ValidationError("model parameter " + std::to_string(i) + " is not finite");
        }
    }
}

}  // namespace gibbsnet::model
