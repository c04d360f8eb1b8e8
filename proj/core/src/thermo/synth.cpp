#include <cmath>
#include <random>
#include <string>

#include "gibbsnet/error.hpp"
#include "gibbsnet/thermo.hpp"

namespace gibbsnet::thermo {

namespace {

constexpr double kReferenceTemperature = 300.0;
constexpr double kLatentScale = 0.7;
constexpr double kNrtlAlpha = 0.3;

double project(std::span<const double> descriptor, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double s = 0.0;
    for (const double v : descriptor) {
        s += normal(rng) * v;
    }
    return kLatentScale * std::tanh(s);
}

}  // namespace

OracleKind parse_oracle_kind(std::string_view s) {
    if (s == "margules") return OracleKind::margules;
    if (s == "nrtl") return OracleKind::nrtl;
    if (s == "mixed") return OracleKind::mixed;
    throw ValidationError("unknown oracle '" + std::string(s) + "' (expected margules, nrtl or mixed)");
}

std::string_view to_string(OracleKind k) {
    switch (k) {
        case OracleKind::margules:
            return "margules";
        case OracleKind::nrtl:
            return "nrtl";
        case OracleKind::mixed:
            return "mixed";
    }
    return "?";
}

ComponentLatent component_latent(std::span<const double> descriptor, std::uint64_t seed) {
    return {project(descriptor, seed), project(descriptor, seed + 1), project(descriptor, seed + 2)};
}

ReferenceGeModel assign_reference_model(const ComponentLatent& c1, const ComponentLatent& c2, double T,
                                        OracleKind oracle) {
    if (!(T > 0.0)) {
        throw DomainError("temperature must be positive");
    }
    const double scale = kReferenceTemperature / T;
    const double spread = (c1.delta - c2.delta) * (c1.delta - c2.delta);
    bool use_nrtl = oracle == OracleKind::nrtl;
    if (oracle == OracleKind::mixed) {
        use_nrtl = (c1.kind >= 0.0) != (c2.kind >= 0.0);
    }
    if (use_nrtl) {
        const double asym = 0.5 * (c1.eta - c2.eta);
        return ReferenceGeModel::make_nrtl(scale * (spread + asym), scale * (spread - asym), kNrtlAlpha);
    }
    return ReferenceGeModel::make_margules(scale * (spread + 0.5 * c1.eta * c2.eta));
}

ReferenceGeModel synthetic_model_for(const DescriptorTable& components, std::string_view smiles_1,
                                     std::string_view smiles_2, double T, const SynthesisSpec& spec) {
    return assign_reference_model(component_latent(components.at(smiles_1), spec.latent_seed),
                                  component_latent(components.at(smiles_2), spec.latent_seed), T, spec.oracle);
}

std::vector<GammaRecord> synthesize_dataset(const DescriptorTable& components, const SynthesisSpec& spec) {
    const auto& names = components.order();
    if (names.empty()) {
        throw ValidationError("synthesize_dataset: empty component table");
    }
    if (spec.temperatures.empty() || spec.compositions.empty()) {
        throw ValidationError("synthesize_dataset: temperature and composition grids must be non-empty");
    }
    if (!(spec.noise_sigma >= 0.0)) {
        throw ValidationError("synthesize_dataset: noise sigma must be non-negative");
    }
    for (const double x : spec.compositions) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw ValidationError("synthesize_dataset: composition grid outside [0, 1]");
        }
    }

    std::vector<ComponentLatent> latent;
    latent.reserve(names.size());
    for (const auto& s : names) {
        latent.push_back(component_latent(components.at(s), spec.latent_seed));
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    auto perturb = [&](double v) { return spec.noise_sigma > 0.0 ? v + spec.noise_sigma * noise(rng) : v; };

    std::vector<GammaRecord> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = i + 1; j < names.size(); ++j) {
            const std::string id = make_system_id(names[i], names[j]);
            for (const double T : spec.temperatures) {
                const ReferenceGeModel m = assign_reference_model(latent[i], latent[j], T, spec.oracle);
                const std::string source =
                    m.kind == ReferenceGeModel::Kind::nrtl ? "synthetic:nrtl" : "synthetic:margules";
                for (const double x1 : spec.compositions) {
                    const LnGammaPair g = reference_gammas(m, x1);
                    GammaRecord r;
                    r.system_id = id;
                    r.smiles_1 = names[i];
                    r.smiles_2 = names[j];
                    r.T = T;
                    r.x1 = x1;
                    if (x1 < 1.0) {
                        r.ln_gamma1 = perturb(g.ln_gamma1);
                    }
                    if (x1 > 0.0) {
                        r.ln_gamma2 = perturb(g.ln_gamma2);
                    }
                    r.source = source;
                    out.push_back(std::move(r));
                }
            }
        }
    }
    return out;
}

}  // namespace gibbsnet::thermo
