#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "gibbsnet/data.hpp"
#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"

namespace gibbsnet {

namespace {

constexpr std::string_view kHeader = "system_id,smiles_1,smiles_2,T_K,x1,ln_gamma_1,ln_gamma_2,source";
constexpr std::string_view kHeaderWithPressure =
    "system_id,smiles_1,smiles_2,T_K,x1,ln_gamma_1,ln_gamma_2,source,p_bar";

std::optional<double> optional_number(std::string_view cell) {
    if (cell.empty()) {
        return std::nullopt;
    }
    return io::parse_double(cell);
}

}  // namespace

std::string make_system_id(std::string_view smiles_1, std::string_view smiles_2) {
    const auto [lo, hi] = std::minmax(smiles_1, smiles_2);
    std::string id(lo);
    id += '|';
    id += hi;
    return id;
}

void GammaRecord::validate() const {
    if (smiles_1.empty() || smiles_2.empty()) {
        throw ValidationError("empty SMILES");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw ValidationError("temperature must be positive");
    }
    if (!(x1 >= 0.0 && x1 <= 1.0)) {
        throw ValidationError("x1 = " + io::format_double(x1) + " outside [0, 1]");
    }
    if (!ln_gamma1 && !ln_gamma2) {
        throw ValidationError("no ln gamma value present");
    }
    if ((ln_gamma1 && !std::isfinite(*ln_gamma1)) || (ln_gamma2 && !std::isfinite(*ln_gamma2))) {
        throw ValidationError("ln gamma is not finite");
    }
    if (system_id != make_system_id(smiles_1, smiles_2)) {
        throw ValidationError("system_id '" + system_id + "' does not match its SMILES pair");
    }
}

IngestResult parse_dataset_csv(std::string_view text) {
    io::LineReader lines(text);
    std::string_view header;
    if (!lines.next(header)) {
        throw ParseError("dataset: missing header", 1);
    }
    bool with_pressure = false;
    if (header == kHeaderWithPressure) {
        with_pressure = true;
    } else if (header != kHeader) {
        throw ParseError("dataset line 1: expected header '" + std::string(kHeader) + "[,p_bar]'", 1);
    }
    const std::size_t columns = with_pressure ? 9 : 8;

    IngestResult result;
    std::string_view line;
    while (lines.next(line)) {
        const std::size_t lineno = lines.line_number();
        if (line.empty()) {
            continue;
        }
        const auto cells = io::split_csv(line);
        if (cells.size() != columns) {
            throw ParseError("dataset line " + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                                 " columns, found " + std::to_string(cells.size()),
                             lineno);
        }
        GammaRecord r;
        try {
            r.system_id = std::string(cells[0]);
            r.smiles_1 = std::string(cells[1]);
            r.smiles_2 = std::string(cells[2]);
            r.T = io::parse_double(cells[3]);
            r.x1 = io::parse_double(cells[4]);
            r.ln_gamma1 = optional_number(cells[5]);
            r.ln_gamma2 = optional_number(cells[6]);
            r.source = std::string(cells[7]);
            if (with_pressure) {
                r.pressure_bar = optional_number(cells[8]);
            }
        } catch (const ValidationError& e) {
            throw ParseError("dataset line " + std::to_string(lineno) + ": " + e.what(), lineno);
        }
        if (r.system_id.empty()) {
            r.system_id = make_system_id(r.smiles_1, r.smiles_2);
        }
        try {
            r.validate();
        } catch (const ValidationError& e) {
            result.rejected.push_back({lineno, e.what()});
            continue;
        }
        if (r.pressure_bar && *r.pressure_bar > kMaxVlePressureBar) {
            ++result.dropped_high_pressure;
            continue;
        }
        result.records.push_back(std::move(r));
    }
    return result;
}

IngestResult ingest_csv(const std::filesystem::path& path) { return parse_dataset_csv(io::read_file(path)); }

std::string format_dataset_csv(std::span<const GammaRecord> records) {
    const bool with_pressure =
        std::any_of(records.begin(), records.end(), [](const GammaRecord& r) { return r.pressure_bar.has_value(); });
    std::string out(with_pressure ? kHeaderWithPressure : kHeader);
    out += '\n';
    for (const GammaRecord& r : records) {
        out += r.system_id + ',' + r.smiles_1 + ',' + r.smiles_2 + ',' + io::format_double(r.T) + ',' +
               io::format_double(r.x1) + ',';
        if (r.ln_gamma1) out += io::format_double(*r.ln_gamma1);
        out += ',';
        if (r.ln_gamma2) out += io::format_double(*r.ln_gamma2);
        out += ',';
        out += r.source;
        if (with_pressure) {
            out += ',';
            if (r.pressure_bar) out += io::format_double(*r.pressure_bar);
        }
        out += '\n';
    }
    return out;
}

void write_dataset_csv(std::span<const GammaRecord> records, const std::filesystem::path& path) {
    io::write_file(path, format_dataset_csv(records));
}

std::vector<std::string> missing_descriptors(std::span<const GammaRecord> records, const DescriptorTable& table) {
    std::set<std::string> missing;
    for (const GammaRecord& r : records) {
        for (const std::string* s : {&r.smiles_1, &r.smiles_2}) {
            if (!table.find(*s)) {
                missing.insert(*s);
            }
        }
    }
    return {missing.begin(), missing.end()};
}

std::size_t PreparedDataset::target_count() const {
    std::size_t n = 0;
    for (const Sample& s : samples) {
        n += (s.ln_gamma1 ? 1 : 0) + (s.ln_gamma2 ? 1 : 0);
    }
    return n;
}

PreparedDataset prepare_dataset(std::span<const GammaRecord> records, const DescriptorTable& table,
                                const StandardizationStats& stats) {
    if (const auto missing = missing_descriptors(records, table); !missing.empty()) {
        std::string list;
        for (const auto& s : missing) {
            list += (list.empty() ? "" : ", ") + s;
        }
        throw ValidationError("missing descriptors for: " + list);
    }
    PreparedDataset out;
    std::map<std::string, std::uint32_t, std::less<>> index;
    auto component = [&](const std::string& smiles) {
        auto it = index.find(smiles);
        if (it != index.end()) {
            return it->second;
        }
        const auto id = static_cast<std::uint32_t>(out.components.size());
        out.components.push_back(stats.apply(table.at(smiles)));
        out.component_smiles.push_back(smiles);
        index.emplace(smiles, id);
        return id;
    };
    out.samples.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const GammaRecord& r = records[i];
        PreparedDataset::Sample s;
        s.c1 = component(r.smiles_1);
        s.c2 = component(r.smiles_2);
        s.t_star = stats.apply_temperature(r.T);
        s.x1 = r.x1;
        s.x2 = 1.0 - r.x1;
        s.ln_gamma1 = r.ln_gamma1;
        s.ln_gamma2 = r.ln_gamma2;
        s.record = static_cast<std::uint32_t>(i);
        out.samples.push_back(s);
    }
    return out;
}

}  // namespace gibbsnet
