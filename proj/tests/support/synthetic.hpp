#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gibbsnet/data.hpp"
#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/model/model.hpp"
#include "gibbsnet/thermo.hpp"

namespace support {

struct SyntheticSet {
    gibbsnet::DescriptorTable table;
    gibbsnet::thermo::SynthesisSpec spec;
    std::vector<gibbsnet::GammaRecord> records;
};

inline SyntheticSet synthetic_set(std::size_t components, std::size_t dim, gibbsnet::thermo::OracleKind oracle,
                                  double noise, std::uint64_t seed) {
    SyntheticSet s;
    s.table = gibbsnet::featurize_all(gibbsnet::builtin_smiles_corpus(components), dim);
    s.spec.oracle = oracle;
    s.spec.noise_sigma = noise;
    s.spec.seed = seed;
    s.records = gibbsnet::thermo::synthesize_dataset(s.table, s.spec);
    return s;
}

/// Mean |ln γ error| against the noise-free oracle on the given systems at
/// compositions 0.05, 0.15, ..., 0.95 (none of them on the training grid) and
/// the synthesis temperatures.
inline double composition_mae(const gibbsnet::model::Checkpoint& ck, const SyntheticSet& s,
                              std::span<const std::string> system_ids) {
    double err = 0.0;
    std::size_t n = 0;
    for (const auto& id : system_ids) {
        const auto bar = id.find('|');
        const std::string a = id.substr(0, bar);
        const std::string b = id.substr(bar + 1);
        for (const double T : s.spec.temperatures) {
            const auto oracle = gibbsnet::thermo::synthetic_model_for(s.table, a, b, T, s.spec);
            for (int k = 0; k < 10; ++k) {
                const double x = 0.05 + 0.1 * k;
                const auto p = ck.predict(gibbsnet::model::MixtureQuery::make(s.table.at(a), s.table.at(b), T, x));
                const auto g = gibbsnet::thermo::reference_gammas(oracle, x);
                err += std::abs(p.ln_gamma1 - g.ln_gamma1) + std::abs(p.ln_gamma2 - g.ln_gamma2);
                n += 2;
            }
        }
    }
    return err / static_cast<double>(n);
}

}  // namespace support
