#pragma once

/**
 * @file descriptors.hpp
 * @brief Fixed-width component descriptor vectors keyed by SMILES.
 *
 * Descriptors come either from an external embedding file (CSV, see
 * load_descriptor_table) or from the built-in hashed SMILES featurizer.
 * Components are keyed by the SMILES text exactly as written; no
 * canonicalization is performed.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace gibbsnet {

inline constexpr std::size_t kDefaultDescriptorDim = 384;
inline constexpr std::uint64_t kDefaultFeaturizerSeed = 0x5eed'cafe'f00d'2024ULL;

enum class TokenKind : std::uint8_t {
    atom,           // organic-subset symbol, aromatic lowercase, '*'
    bracket_atom,   // [..] including isotope, H count, charge, class
    bond,           // - = # $ : / \ and the '.' disconnection
    ring_closure,   // single digit or %nn
    branch_open,
    branch_close,
};

struct SmilesToken {
    TokenKind kind;
    std::string text;       // exact source slice
    std::size_t offset;     // byte offset in the input
    bool aromatic = false;  // lowercase atom symbol
    int isotope = 0;        // bracket atoms only
    int charge = 0;         // bracket atoms only
};

/// Lossless tokenization. Throws ParseError (byte offset) on unknown
/// characters, unterminated bracket atoms and unbalanced branches.
std::vector<SmilesToken> tokenize_smiles(std::string_view smiles);

struct ComponentDescriptor {
    std::string smiles;
    std::vector<double> vector;
};

/// Deterministic hashed fingerprint of a SMILES string, L2-normalized.
/// Features: per-token-text counts, per-kind counts, bonded atom pairs,
/// ring count, branch depth statistics, aromatic atom count, atom count.
/// Each feature is hashed into one of `dim` buckets with `seed`.
ComponentDescriptor featurize(std::string_view smiles, std::size_t dim = kDefaultDescriptorDim,
                              std::uint64_t seed = kDefaultFeaturizerSeed);

/// In-memory descriptor file; all vectors share `dim`.
struct DescriptorTable {
    std::size_t dim = 0;
    std::string source;
    std::uint64_t seed = 0;
    std::map<std::string, std::vector<double>, std::less<>> entries;

    const std::vector<double>* find(std::string_view smiles) const;
    const std::vector<double>& at(std::string_view smiles) const;
    void insert(std::string smiles, std::vector<double> vector);
    /// Rows in first-insertion order, for stable file output.
    const std::vector<std::string>& order() const { return order_; }

private:
    std::vector<std::string> order_;
};

/// Builds a table with the featurizer. Duplicate SMILES are an error.
DescriptorTable featurize_all(const std::vector<std::string>& smiles, std::size_t dim,
                              std::uint64_t seed = kDefaultFeaturizerSeed);

/// Parses `smiles,dim=<D>,source=<tag>,seed=<int>` followed by
/// `SMILES,v1,...,vD` rows. Throws ParseError with the 1-based line number.
DescriptorTable load_descriptor_table(const std::filesystem::path& path);
DescriptorTable parse_descriptor_table(std::string_view text);

/// Writes with 17 significant digits.
void write_descriptor_table(const DescriptorTable& table, const std::filesystem::path& path);
std::string format_descriptor_table(const DescriptorTable& table);

/// Deterministic corpus of distinct small-molecule SMILES (solvent-like
/// homologous series). Throws if more are requested than it can produce.
std::vector<std::string> builtin_smiles_corpus(std::size_t count);

/// 64-bit FNV-1a over `text`, mixed with `seed`. Stable across platforms.
std::uint64_t stable_hash(std::string_view text, std::uint64_t seed);

}  // namespace gibbsnet
