#pragma once

/**
 * @file data.hpp
 * @brief Activity-coefficient records, CSV ingestion, system-wise splitting
 * and standardization.
 *
 * Dataset CSV header:
 *   system_id,smiles_1,smiles_2,T_K,x1,ln_gamma_1,ln_gamma_2,source[,p_bar]
 * Missing ln γ values are empty cells. The optional p_bar column holds the
 * total pressure of VLE-derived points; rows above 10 bar are dropped.
 */

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/standardization.hpp"

namespace gibbsnet {

/// VLE points measured above this total pressure are excluded.
inline constexpr double kMaxVlePressureBar = 10.0;

struct GammaRecord {
    std::string system_id;
    std::string smiles_1;
    std::string smiles_2;
    double T = 0.0;   // K
    double x1 = 0.0;  // liquid mole fraction of component 1
    std::optional<double> ln_gamma1;
    std::optional<double> ln_gamma2;
    std::string source;
    std::optional<double> pressure_bar;

    std::size_t target_count() const { return (ln_gamma1 ? 1u : 0u) + (ln_gamma2 ? 1u : 0u); }
    /// Throws ValidationError naming the violated invariant.
    void validate() const;
};

/// Unordered pair key: the two SMILES sorted lexicographically, joined by
/// '|'. (A, B) and (B, A) map to the same system.
std::string make_system_id(std::string_view smiles_1, std::string_view smiles_2);

struct RowRejection {
    std::size_t line = 0;
    std::string reason;
};

struct IngestResult {
    std::vector<GammaRecord> records;
    std::vector<RowRejection> rejected;
    std::size_t dropped_high_pressure = 0;
};

/// Parses the dataset CSV. Throws ParseError (line number) on a wrong header,
/// wrong column count or unparsable number. Rows that parse but violate a
/// record invariant are collected in `rejected`.
IngestResult ingest_csv(const std::filesystem::path& path);
IngestResult parse_dataset_csv(std::string_view text);

std::string format_dataset_csv(std::span<const GammaRecord> records);
void write_dataset_csv(std::span<const GammaRecord> records, const std::filesystem::path& path);

/// SMILES referenced by `records` but absent from `table`, sorted, unique.
std::vector<std::string> missing_descriptors(std::span<const GammaRecord> records, const DescriptorTable& table);

struct SplitSpec {
    double train = 0.8;
    double val = 0.1;
    double test = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// System counts for n systems: train = ⌊f_train·n⌋, val = ⌊f_val·n⌋,
/// test = remainder. A split with a positive fraction that would be empty
/// takes one system from train. Throws for n < 3.
std::array<std::size_t, 3> split_sizes(std::size_t n_systems, const SplitSpec& spec);

/// Sorted unique system ids.
std::vector<std::string> system_ids(std::span<const GammaRecord> records);

enum class SplitPart : std::uint8_t { train, val, test };
std::string_view to_string(SplitPart p);

struct SystemSplit {
    std::vector<std::string> train;
    std::vector<std::string> val;
    std::vector<std::string> test;

    std::optional<SplitPart> part_of(std::string_view system_id) const;
};

/// Sorts `ids`, shuffles with a seeded mt19937_64 and cuts by split_sizes.
/// Independent of the input order.
SystemSplit split_system_ids(std::vector<std::string> ids, const SplitSpec& spec);

struct DatasetSplit {
    SystemSplit systems;
    std::vector<GammaRecord> train;
    std::vector<GammaRecord> val;
    std::vector<GammaRecord> test;
};

/// Every record of a system lands in the same part; record order within a
/// part follows the input order.
DatasetSplit split_systems(std::span<const GammaRecord> records, const SplitSpec& spec);

/// `system_id,split` lines, one per system.
std::string format_split_csv(const SystemSplit& split);
SystemSplit parse_split_csv(std::string_view text);

struct StandardizerFit {
    StandardizationStats stats;
    /// Descriptor dimensions with zero variance (std clamped to 1).
    std::vector<std::size_t> constant_features;
    bool constant_temperature = false;
};

/// z-score statistics over the training records: each record contributes
/// both of its component descriptors once, and its temperature once.
StandardizerFit fit_standardizer(std::span<const GammaRecord> train, const DescriptorTable& table);

/// Records resolved against a descriptor table and standardized, ready for
/// the network. Components are stored once and referenced by index.
struct PreparedDataset {
    struct Sample {
        std::uint32_t c1 = 0;
        std::uint32_t c2 = 0;
        double t_star = 0.0;
        double x1 = 0.0;
        double x2 = 1.0;
        std::optional<double> ln_gamma1;
        std::optional<double> ln_gamma2;
        std::uint32_t record = 0;  // index into the source record span
    };

    std::vector<std::string> component_smiles;
    std::vector<std::vector<double>> components;  // standardized
    std::vector<Sample> samples;

    std::size_t target_count() const;
};

PreparedDataset prepare_dataset(std::span<const GammaRecord> records, const DescriptorTable& table,
                                const StandardizationStats& stats);

}  // namespace gibbsnet
