#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gibbsnet/descriptors.hpp"
#include "gibbsnet/error.hpp"
#include "gibbsnet/io/text.hpp"

namespace gibbsnet {

const std::vector<double>* DescriptorTable::find(std::string_view smiles) const {
    auto it = entries.find(smiles);
    return it == entries.end() ? nullptr : &it->second;
}

const std::vector<double>& DescriptorTable::at(std::string_view smiles) const {
    if (const auto* v = find(smiles)) {
        return *v;
    }
    throw ValidationError("no descriptor for SMILES '" + std::string(smiles) + "'");
}

void DescriptorTable::insert(std::string smiles, std::vector<double> vector) {
    if (vector.size() != dim) {
        throw ShapeError("descriptor for '" + smiles + "' has " + std::to_string(vector.size()) +
                         " values, table dimension is " + std::to_string(dim));
    }
    for (const double v : vector) {
        if (!std::isfinite(v)) {
            throw ValidationError("descriptor for '" + smiles + "' is not finite");
        }
    }
    if (entries.contains(smiles)) {
        throw ValidationError("duplicate descriptor key '" + smiles + "'");
    }
    order_.push_back(smiles);
    entries.emplace(std::move(smiles), std::move(vector));
}

DescriptorTable parse_descriptor_table(std::string_view text) {
    io::LineReader lines(text);
    std::string_view header;
    if (!lines.next(header)) {
        throw ParseError("descriptor file: missing header", 1);
    }
    const auto head = io::split_csv(header);
    if (head.size() != 4 || head[0] != "smiles" || !head[1].starts_with("dim=") ||
        !head[2].starts_with("source=") || !head[3].starts_with("seed=")) {
        throw ParseError("descriptor file line 1: expected header 'smiles,dim=<D>,source=<tag>,seed=<int>'", 1);
    }
    DescriptorTable table;
    try {
        table.dim = io::parse_size(head[1].substr(4));
        table.seed = io::parse_uint64(head[3].substr(5));
    } catch (const ValidationError& e) {
        throw ParseError(std::string("descriptor file line 1: ") + e.what(), 1);
    }
    table.source = std::string(head[2].substr(7));
    if (table.dim == 0) {
        throw ParseError("descriptor file line 1: dim must be positive", 1);
    }

    std::string_view line;
    while (lines.next(line)) {
        const std::size_t lineno = lines.line_number();
        if (line.empty()) {
            continue;
        }
        const auto cells = io::split_csv(line);
        if (cells.size() != table.dim + 1) {
            throw ParseError("descriptor file line " + std::to_string(lineno) + ": expected " +
                                 std::to_string(table.dim) + " values, found " +
                                 std::to_string(cells.size() - 1),
                             lineno);
        }
        if (cells[0].empty()) {
            throw ParseError("descriptor file line " + std::to_string(lineno) + ": empty SMILES", lineno);
        }
        std::vector<double> v(table.dim);
        try {
            for (std::size_t k = 0; k < table.dim; ++k) {
                v[k] = io::parse_double(cells[k + 1]);
            }
            table.insert(std::string(cells[0]), std::move(v));
        } catch (const Error& e) {
            throw ParseError("descriptor file line " + std::to_string(lineno) + ": " + e.what(), lineno);
        }
    }
    return table;
}

DescriptorTable load_descriptor_table(const std::filesystem::path& path) {
    return parse_descriptor_table(io::read_file(path));
}

std::string format_descriptor_table(const DescriptorTable& table) {
    std::string out = "smiles,dim=" + std::to_string(table.dim) + ",source=" + table.source +
                      ",seed=" + std::to_string(table.seed) + "\n";
    for (const std::string& smiles : table.order()) {
        out += smiles;
        for (const double v : table.entries.at(smiles)) {
            out += ',';
            out += io::format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_descriptor_table(const DescriptorTable& table, const std::filesystem::path& path) {
    io::write_file(path, format_descriptor_table(table));
}

}  // namespace gibbsnet
