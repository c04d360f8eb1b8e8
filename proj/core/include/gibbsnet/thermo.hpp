#pragma once

/**
 * @file thermo.hpp
 * @brief Classical binary-mixture thermodynamics: extended Raoult's law,
 * Antoine vapor pressures, isothermal bubble points and analytic g^E models
 * used as synthetic ground truth.
 *
 * Reference models (x2 = 1 − x1):
 *
 *   Two-suffix Margules   g^E/RT = A·x1·x2
 *                         ln γ1 = A·x2²,  ln γ2 = A·x1²
 *
 *   NRTL                  G12 = exp(−α·τ12),  G21 = exp(−α·τ21)
 *                         g^E/RT = x1·x2·( τ21·G21/(x1 + x2·G21) + τ12·G12/(x2 + x1·G12) )
 *                         ln γ1 = x2²·( τ21·(G21/(x1 + x2·G21))² + τ12·G12/(x2 + x1·G12)² )
 *                         ln γ2 = x1²·( τ12·(G12/(x2 + x1·G12))² + τ21·G21/(x1 + x2·G21)² )
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gibbsnet/data.hpp"
#include "gibbsnet/descriptors.hpp"

namespace gibbsnet::thermo {

enum class PressureUnit : std::uint8_t { pa, kpa, bar, mmhg };

std::string_view to_string(PressureUnit u);
PressureUnit parse_pressure_unit(std::string_view s);

/// A pressure with its unit. Arithmetic across different units is an error;
/// conversion only happens through to().
struct Pressure {
    double value = 0.0;
    PressureUnit unit = PressureUnit::kpa;

    Pressure to(PressureUnit target) const;
};

/// log10(pS) = A − B/(C + T), T in K, pS in `unit`.
struct AntoineParams {
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double T_min = 0.0;
    double T_max = 1e9;
    PressureUnit unit = PressureUnit::kpa;
};

/// Vapor pressure. Sets *out_of_range (if given) when T lies outside
/// [T_min, T_max]; throws DomainError when C + T = 0.
Pressure antoine_pressure(const AntoineParams& params, double T, bool* out_of_range = nullptr);

/// γ = p·y/(pS·x). Throws DomainError for x <= 0, non-positive pressures,
/// y outside [0, 1] or mismatched units.
double gamma_from_vle(Pressure p, double y, double x, Pressure p_sat);

struct BubblePoint {
    Pressure p;
    double y1 = 0.0;
};

/// p = x1·γ1·p1S + x2·γ2·p2S, y1 = x1·γ1·p1S/p (ideal vapor).
BubblePoint bubble_point_isothermal(double x1, double gamma1, double gamma2, Pressure p1_sat, Pressure p2_sat);

struct MargulesParams {
    double A12 = 0.0;
};

struct NrtlParams {
    double tau12 = 0.0;
    double tau21 = 0.0;
    double alpha = 0.3;
};

struct ReferenceGeModel {
    enum class Kind : std::uint8_t { margules, nrtl } kind = Kind::margules;
    MargulesParams margules;
    NrtlParams nrtl;

    static ReferenceGeModel make_margules(double A12);
    static ReferenceGeModel make_nrtl(double tau12, double tau21, double alpha);
    /// The same mixture with components listed in reverse order.
    ReferenceGeModel swapped() const;
    void validate() const;
};

struct LnGammaPair {
    double ln_gamma1 = 0.0;
    double ln_gamma2 = 0.0;
};

LnGammaPair reference_gammas(const ReferenceGeModel& m, double x1);
double reference_ge_over_rt(const ReferenceGeModel& m, double x1);

/// Loads `smiles,A,B,C,Tmin_K,Tmax_K,unit`. Throws ParseError with line.
std::map<std::string, AntoineParams, std::less<>> load_antoine_table(const std::filesystem::path& path);
std::map<std::string, AntoineParams, std::less<>> parse_antoine_table(std::string_view text);

/// How synthetic pairs are assigned a reference model.
enum class OracleKind : std::uint8_t { margules, nrtl, mixed };
OracleKind parse_oracle_kind(std::string_view s);
std::string_view to_string(OracleKind k);

/// Per-component latent properties from which synthetic pair parameters
/// are derived. Each coordinate is 0.7·tanh(u·E) for a fixed Gaussian
/// direction u drawn from `seed`, so it is a smooth function of the
/// descriptor E.
struct ComponentLatent {
    double delta = 0.0;  // cohesion-like scale
    double eta = 0.0;    // polarity-like asymmetry
    double kind = 0.0;   // sign selects the model family under `mixed`
};

ComponentLatent component_latent(std::span<const double> descriptor, std::uint64_t seed);

/// Parameter rule at T_ref = 300 K, scaled by T_ref/T:
///   margules  A12   = (δ1 − δ2)² + 0.5·η1·η2
///   nrtl      τ12   = (δ1 − δ2)² + 0.5·(η1 − η2),  τ21 = (δ1 − δ2)² − 0.5·(η1 − η2),  α = 0.3
///   mixed     nrtl when sign(kind1) ≠ sign(kind2), margules otherwise
/// Listing the components in the other order yields the swapped model.
ReferenceGeModel assign_reference_model(const ComponentLatent& c1, const ComponentLatent& c2, double T,
                                        OracleKind oracle);

struct SynthesisSpec {
    OracleKind oracle = OracleKind::mixed;
    std::vector<double> temperatures{298.15, 323.15, 348.15};
    /// Interior points get both ln γ; x1 = 0 carries only ln γ1∞ and x1 = 1
    /// only ln γ2∞.
    std::vector<double> compositions{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    /// Seed of the latent projection; independent of the noise seed.
    std::uint64_t latent_seed = 0x1a7e'0075'eedULL;
};

/// One record per (pair, T, x1) over all unordered pairs of table entries
/// (first-insertion order). Gaussian noise with σ = noise_sigma is added to
/// each available ln γ. Deterministic in (table, spec).
std::vector<GammaRecord> synthesize_dataset(const DescriptorTable& components, const SynthesisSpec& spec);

/// Noise-free reference model of the pair (smiles_1, smiles_2) at T.
ReferenceGeModel synthetic_model_for(const DescriptorTable& components, std::string_view smiles_1,
                                     std::string_view smiles_2, double T, const SynthesisSpec& spec);

}  // namespace gibbsnet::thermo
