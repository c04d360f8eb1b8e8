#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gibbsnet::model {

enum class Variant : std::uint8_t {
    hanna,      // g^E network with hard constraints, ln γ by differentiation
    ablation1,  // ln γ_i = f_φ([f_α(C_i), f_α(C_j)])
    ablation2,  // ln γ_i = f_φ(f_α(C_i))
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

/// Network widths. Depths are fixed: f_θ has one hidden layer, f_α two,
/// f_φ one; every hidden layer uses SiLU and every output layer is linear.
struct ArchitectureConfig {
    std::size_t descriptor_dim = 384;
    std::size_t hidden = 96;
    Variant variant = Variant::hanna;

    static constexpr std::size_t theta_hidden_layers = 1;
    static constexpr std::size_t alpha_hidden_layers = 2;
    static constexpr std::size_t phi_hidden_layers = 1;

    /// f_α input: component embedding plus T* and the component's own x.
    std::size_t alpha_input() const { return hidden + 2; }
    std::size_t phi_input() const { return variant == Variant::ablation1 ? 2 * hidden : hidden; }

    void validate() const;
    bool operator==(const ArchitectureConfig&) const = default;
};

enum class Layer : std::size_t {
    theta_hidden,
    theta_out,
    alpha_hidden1,
    alpha_hidden2,
    alpha_out,
    phi_hidden,
    phi_out,
};
inline constexpr std::size_t kLayerCount = 7;

struct LayerShape {
    std::string name;
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;  // row-major out × in
    std::size_t bias_offset = 0;
    bool activated = false;  // SiLU after the affine map
};

/// All weights and biases in one flat array, laid out layer by layer.
class ModelParameters {
public:
    ModelParameters() = default;
    explicit ModelParameters(const ArchitectureConfig& config);

    /// All zero.
    static ModelParameters zeros(const ArchitectureConfig& config) { return ModelParameters(config); }
    /// Uniform in ±1/√fan_in for weights and biases.
    static ModelParameters random(const ArchitectureConfig& config, std::uint64_t seed);

    const ArchitectureConfig& config() const noexcept { return config_; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    const LayerShape& layer(Layer id) const { return layers_[static_cast<std::size_t>(id)]; }
    const std::array<LayerShape, kLayerCount>& layers() const noexcept { return layers_; }

    std::span<const double> weights(Layer id) const;
    std::span<const double> bias(Layer id) const;
    std::span<double> weights(Layer id);
    std::span<double> bias(Layer id);

    /// Throws ValidationError on any non-finite entry.
    void check_finite() const;

private:
    ArchitectureConfig config_;
    std::array<LayerShape, kLayerCount> layers_;
    std::vector<double> values_;
};

}  // namespace gibbsnet::model
