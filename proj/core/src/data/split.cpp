#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "gibbsnet/data.hpp"
#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"

namespace gibbsnet {

void SplitSpec::validate() const {
    for (const double f : {train, val, test}) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ValidationError("split fractions must lie in [0, 1]");
        }
    }
    if (std::abs(train + val + test - 1.0) > 1e-9) {
        throw ValidationError("split fractions must sum to 1");
    }
}

std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitSpec& spec) {
    spec.validate();
    if (n < 3) {
        throw ValidationError("need at least 3 systems to split, got " + std::to_string(n));
    }
    const auto floor_count = [n](double f) {
        return static_cast<std::size_t>(std::floor(f * static_cast<double>(n) + 1e-9));
    };
    std::size_t n_train = floor_count(spec.train);
    std::size_t n_val = floor_count(spec.val);
    std::size_t n_test = n - n_train - n_val;
    if (spec.test == 0.0 && n_test > 0) {
        n_train += n_test;
        n_test = 0;
    }
    for (auto [count, frac] : {std::pair{&n_val, spec.val}, std::pair{&n_test, spec.test}}) {
        if (frac > 0.0 && *count == 0 && n_train > 1) {
            --n_train;
            ++*count;
        }
    }
    return {n_train, n_val, n_test};
}

std::vector<std::string> system_ids(std::span<const GammaRecord> records) {
    std::set<std::string> ids;
    for (const GammaRecord& r : records) {
        ids.insert(r.system_id);
    }
    return {ids.begin(), ids.end()};
}

std::string_view to_string(SplitPart p) {
    switch (p) {
        case SplitPart::train:
            return "train";
        case SplitPart::val:
            return "val";
        case SplitPart::test:
            return "test";
    }
    return "?";
}

std::optional<SplitPart> SystemSplit::part_of(std::string_view system_id) const {
    const auto has = [system_id](const std::vector<std::string>& v) {
        return std::binary_search(v.begin(), v.end(), system_id);
    };
    if (has(train)) return SplitPart::train;
    if (has(val)) return SplitPart::val;
    if (has(test)) return SplitPart::test;
    return std::nullopt;
}

SystemSplit split_system_ids(std::vector<std::string> ids, const SplitSpec& spec) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const auto [n_train, n_val, n_test] = split_sizes(ids.size(), spec);
    std::mt19937_64 rng(spec.seed);
    std::shuffle(ids.begin(), ids.end(), rng);

    SystemSplit out;
    const auto first = ids.begin();
    out.train.assign(first, first + static_cast<std::ptrdiff_t>(n_train));
    out.val.assign(first + static_cast<std::ptrdiff_t>(n_train),
                   first + static_cast<std::ptrdiff_t>(n_train + n_val));
    out.test.assign(first + static_cast<std::ptrdiff_t>(n_train + n_val), ids.end());
    // Kept sorted for lookup; membership is what matters.
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    (void)n_test;
    return out;
}

DatasetSplit split_systems(std::span<const GammaRecord> records, const SplitSpec& spec) {
    DatasetSplit out;
    out.systems = split_system_ids(system_ids(records), spec);
    std::map<std::string_view, SplitPart> part;
    for (const auto& id : out.systems.train) part.emplace(id, SplitPart::train);
    for (const auto& id : out.systems.val) part.emplace(id, SplitPart::val);
    for (const auto& id : out.systems.test) part.emplace(id, SplitPart::test);
    for (const GammaRecord& r : records) {
        switch (part.at(r.system_id)) {
            case SplitPart::train:
                out.train.push_back(r);
                break;
            case SplitPart::val:
                out.val.push_back(r);
                break;
            case SplitPart::test:
                out.test.push_back(r);
                break;
        }
    }
    return out;
}

std::string format_split_csv(const SystemSplit& split) {
    std::string out = "system_id,split\n";
    for (const auto& [ids, name] : {std::pair{&split.train, "train"}, std::pair{&split.val, "val"},
                                    std::pair{&split.test, "test"}}) {
        for (const auto& id : *ids) {
            out += id + ',' + name + '\n';
        }
    }
    return out;
}

SystemSplit parse_split_csv(std::string_view text) {
    io::LineReader lines(text);
    std::string_view line;
    if (!lines.next(line) || line != "system_id,split") {
        throw ParseError("split file line 1: expected header 'system_id,split'", 1);
    }
    SystemSplit out;
    while (lines.next(line)) {
        if (line.empty()) {
            continue;
        }
        // System ids contain no commas; the split name is after the last one.
        const std::size_t comma = line.rfind(',');
        if (comma == std::string_view::npos) {
            throw ParseError("split file line " + std::to_string(lines.line_number()) + ": missing split column",
                             lines.line_number());
        }
        const std::string id(line.substr(0, comma));
        const std::string_view part = line.substr(comma + 1);
        if (part == "train") {
            out.train.push_back(id);
        } else if (part == "val") {
            out.val.push_back(id);
        } else if (part == "test") {
            out.test.push_back(id);
        } else {
            throw ParseError("split file line " + std::to_string(lines.line_number()) + ": unknown split '" +
                                 std::string(part) + "'",
                             lines.line_number());
        }
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

StandardizerFit fit_standardizer(std::span<const GammaRecord> train, const DescriptorTable& table) {
    if (train.empty()) {
        throw ValidationError("fit_standardizer: empty training set");
    }
    const std::size_t dim = table.dim;
    // Two-pass mean/variance; population std like a z-score scaler.
    std::vector<double> mean(dim, 0.0);
    double t_mean = 0.0;
    const double n_desc = 2.0 * static_cast<double>(train.size());
    const double n_rec = static_cast<double>(train.size());
    for (const GammaRecord& r : train) {
        for (const std::string* s : {&r.smiles_1, &r.smiles_2}) {
            const auto& v = table.at(*s);
            for (std::size_t k = 0; k < dim; ++k) {
                mean[k] += v[k];
            }
        }
        t_mean += r.T;
    }
    for (double& m : mean) {
        m /= n_desc;
    }
    t_mean /= n_rec;

    std::vector<double> var(dim, 0.0);
    double t_var = 0.0;
    for (const GammaRecord& r : train) {
        for (const std::string* s : {&r.smiles_1, &r.smiles_2}) {
            const auto& v = table.at(*s);
            for (std::size_t k = 0; k < dim; ++k) {
                const double d = v[k] - mean[k];
                var[k] += d * d;
            }
        }
        t_var += (r.T - t_mean) * (r.T - t_mean);
    }

    StandardizerFit fit;
    fit.stats.descriptor_mean = mean;
    fit.stats.descriptor_std.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        const double sd = std::sqrt(var[k] / n_desc);
        if (sd > 0.0) {
            fit.stats.descriptor_std[k] = sd;
        } else {
            fit.stats.descriptor_std[k] = 1.0;
            fit.constant_features.push_back(k);
        }
    }
    fit.stats.T_mean = t_mean;
    const double t_sd = std::sqrt(t_var / n_rec);
    fit.stats.T_std = t_sd > 0.0 ? t_sd : 1.0;
    fit.constant_temperature = !(t_sd > 0.0);
    return fit;
}

}  // namespace gibbsnet
