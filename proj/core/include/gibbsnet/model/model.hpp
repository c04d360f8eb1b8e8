#pragma once

/**
 * @file model.hpp
 * @brief Trained-model facade: architecture, parameters and the
 * standardization that maps raw descriptors and temperatures to network
 * inputs.
 */

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gibbsnet/autodiff/dual.hpp"
#include "gibbsnet/model/network.hpp"
#include "gibbsnet/model/parameters.hpp"
#include "gibbsnet/standardization.hpp"

namespace gibbsnet::model {

/// A point at which activity coefficients are requested. Descriptors and
/// temperature are raw (unstandardized).
struct MixtureQuery {
    std::span<const double> e1;
    std::span<const double> e2;
    double temperature = 298.15;  // K
    Composition x;

    static MixtureQuery make(std::span<const double> e1, std::span<const double> e2, double temperature,
                             double x1) {
        return {e1, e2, temperature, Composition::from_x1(x1)};
    }
    /// Component order reversed: (E2, x2) becomes component 1.
    MixtureQuery swapped() const { return {e2, e1, temperature, x.swapped()}; }

    /// Throws DomainError unless 0 <= x1 <= 1 and T > 0.
    void validate() const;
};

struct GammaPrediction {
    double ln_gamma1 = 0.0;
    double ln_gamma2 = 0.0;
    double ge_over_rt = 0.0;
};

/// Query already mapped to network inputs.
struct StandardizedQuery {
    std::span<const double> e1;
    std::span<const double> e2;
    double t_star = 0.0;
    Composition x;
};

/// f_θ(E) for a standardized descriptor.
std::vector<double> embed_component(const ModelParameters& params, std::span<const double> descriptor);

/// 1 − a·b/(‖a‖‖b‖). Throws DegenerateEmbeddingError for a zero vector and
/// ShapeError for a length mismatch.
double cosine_distance(std::span<const double> a, std::span<const double> b);

/// g^E/RT with its x1-derivative. Hanna variant only.
ad::Dual forward_ge(const ModelParameters& params, const StandardizedQuery& q);

/// Dispatches on params.config().variant.
GammaPrediction predict_gammas(const ModelParameters& params, const StandardizedQuery& q);

/// Requires an ablation variant; no hard constraints are applied.
GammaPrediction predict_gammas_ablation(const ModelParameters& params, const StandardizedQuery& q);

/// Both component embeddings computed once, then evaluated at any number of
/// compositions. Gives the same bits as predict_gammas for the same query.
class PairEvaluator {
public:
    PairEvaluator(const ModelParameters& params, std::span<const double> e1, std::span<const double> e2,
                  double t_star);

    GammaPrediction at(Composition x) const;
    /// Component order reversed.
    PairEvaluator swapped() const;

private:
    PairEvaluator() = default;

    const ModelParameters* params_ = nullptr;
    std::vector<ad::Dual> theta1_;
    std::vector<ad::Dual> theta2_;
    double t_star_ = 0.0;
};

/// Architecture + weights + standardization + provenance.
struct Checkpoint {
    static constexpr int kFormatVersion = 1;

    ModelParameters params;
    StandardizationStats stats;
    std::uint64_t seed = 0;
    /// Descriptor provenance, needed to featurize new SMILES consistently.
    std::string descriptor_source = "featurizer";
    std::uint64_t descriptor_seed = 0;
    nlohmann::json training = nlohmann::json::object();

    const ArchitectureConfig& config() const { return params.config(); }

    StandardizedQuery standardize(const MixtureQuery& q, std::vector<double>& e1_buf,
                                  std::vector<double>& e2_buf) const;
    GammaPrediction predict(const MixtureQuery& q) const;
};

nlohmann::json to_json(const Checkpoint& c);
/// Validates shapes, finiteness and the format version.
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const Checkpoint& c, const std::filesystem::path& path);
/// Throws ValidationError for structurally invalid or non-finite content and
/// IoError if the file cannot be read.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gibbsnet::model
