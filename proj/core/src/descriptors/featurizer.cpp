#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/error.hpp"

namespace gibbsnet {
namespace {

std::string_view kind_name(TokenKind k) {
    switch (k) {
        case TokenKind::atom:
            return "atom";
        case TokenKind::bracket_atom:
            return "bracket_atom";
        case TokenKind::bond:
            return "bond";
        case TokenKind::ring_closure:
            return "ring";
        case TokenKind::branch_open:
            return "branch_open";
        case TokenKind::branch_close:
            return "branch_close";
    }
    return "?";
}

bool is_atom(const SmilesToken& t) {
    return t.kind == TokenKind::atom || t.kind == TokenKind::bracket_atom;
}

}  // namespace

std::uint64_t stable_hash(std::string_view text, std::uint64_t seed) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    // splitmix64 finalizer spreads FNV's weak low bits across buckets.
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

ComponentDescriptor featurize(std::string_view smiles, std::size_t dim, std::uint64_t seed) {
    if (dim < 16) {
        throw DomainError("featurize: descriptor dimension must be at least 16");
    }
    const std::vector<SmilesToken> tokens = tokenize_smiles(smiles);

    std::unordered_map<std::string, double> features;
    auto bump = [&features](std::string key, double v) { features[std::move(key)] += v; };

    // Previous atom on the current chain; branches restore it on ')'.
    std::vector<std::string> branch_anchor;
    std::string previous_atom;
    int depth = 0;
    int max_depth = 0;
    double depth_sum = 0.0;
    int atoms = 0;
    int aromatic = 0;
    int ring_digits = 0;
    int branches = 0;

    for (const SmilesToken& t : tokens) {
        bump("tok:" + t.text, 1.0);
        bump(std::string("kind:").append(kind_name(t.kind)), 1.0);
        switch (t.kind) {
            case TokenKind::atom:
            case TokenKind::bracket_atom: {
                ++atoms;
                depth_sum += depth;
                if (t.aromatic) {
                    ++aromatic;
                }
                if (t.charge != 0) {
                    bump("charge", static_cast<double>(t.charge));
                }
                if (t.isotope != 0) {
                    bump("isotope", 1.0);
                }
                if (!previous_atom.empty()) {
                    const auto [lo, hi] = std::minmax(previous_atom, t.text);
                    bump("pair:" + lo + "|" + hi, 1.0);
                }
                previous_atom = t.text;
                break;
            }
            case TokenKind::branch_open:
                branch_anchor.push_back(previous_atom);
                ++depth;
                ++branches;
                max_depth = std::max(max_depth, depth);
                break;
            case TokenKind::branch_close:
                previous_atom = branch_anchor.back();
                branch_anchor.pop_back();
                --depth;
                break;
            case TokenKind::ring_closure:
                ++ring_digits;
                break;
            case TokenKind::bond:
                if (t.text == ".") {
                    previous_atom.clear();
                }
                break;
        }
    }

    bump("atoms", atoms);
    bump("aromatic_atoms", aromatic);
    bump("rings", ring_digits / 2);
    bump("branches", branches);
    bump("branch_max_depth", max_depth);
    if (atoms > 0) {
        bump("branch_mean_depth", depth_sum / atoms);
    }

    ComponentDescriptor out{std::string(smiles), std::vector<double>(dim, 0.0)};
    // Iterate in sorted key order so floating-point accumulation is
    // independent of hash-map layout.
    std::vector<std::pair<std::string, double>> sorted(features.begin(), features.end());
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [key, value] : sorted) {
        out.vector[stable_hash(key, seed) % dim] += value;
    }
    double norm2 = 0.0;
    for (const double v : out.vector) {
        norm2 += v * v;
    }
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : out.vector) {
            v *= inv;
        }
    }
    return out;
}

DescriptorTable featurize_all(const std::vector<std::string>& smiles, std::size_t dim,
                              std::uint64_t seed) {
    DescriptorTable table;
    table.dim = dim;
    table.source = "featurizer";
    table.seed = seed;
    for (const std::string& s : smiles) {
        table.insert(s, featurize(s, dim, seed).vector);
    }
    return table;
}

std::vector<std::string> builtin_smiles_corpus(std::size_t count) {
    // Homologous series: chain prefix of n carbons plus a functional group.
    struct Family {
        std::string_view prefix;
        std::string_view suffix;
    };
    static constexpr Family families[] = {
        {"", ""},            // alkanes (chain only)
        {"", "O"},           // alcohols
        {"", "C(C)=O"},      // methyl ketones
        {"", "c1ccccc1"},    // alkylbenzenes
        {"", "Cl"},          // chlorides
        {"", "N"},           // amines
        {"", "C(=O)O"},      // carboxylic acids
        {"CO", ""},          // methyl ethers
        {"", "C#N"},         // nitriles
        {"", "OC(C)=O"},     // acetates
        {"", "S"},           // thiols
        {"", "C=O"},         // aldehydes
        {"", "F"},           // fluorides
        {"", "Br"},          // bromides
        {"", "C(C)C"},       // iso-alkanes
        {"", "N(C)C"},       // dimethylamines
        {"", "C(F)(F)F"},    // trifluoro
        {"", "c1ccncc1"},    // alkylpyridines
    };
    static constexpr std::size_t max_chain = 14;

    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const char* extra : {"O", "c1ccccc1", "C1CCCCC1", "ClC(Cl)Cl", "CS(C)=O", "C1CCOC1"}) {
        if (out.size() < count && seen.insert(extra).second) {
            out.emplace_back(extra);
        }
    }
    for (std::size_t n = 1; n <= max_chain && out.size() < count; ++n) {
        for (const Family& f : families) {
            if (out.size() >= count) {
                break;
            }
            std::string s(f.prefix);
            s.append(n, 'C');
            s.append(f.suffix);
            if (seen.insert(s).second) {
                out.push_back(std::move(s));
            }
        }
    }
    if (out.size() < count) {
        throw DomainError("builtin_smiles_corpus: at most " + std::to_string(out.size()) +
                          " components available");
    }
    return out;
}

}  // namespace gibbsnet
