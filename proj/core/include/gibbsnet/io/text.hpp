#pragma once

// Small text helpers shared by the CSV readers and writers.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gibbsnet::io {

/// Iterates lines of a buffer, stripping a trailing '\r'. line_number() is
/// 1-based and refers to the line most recently returned.
class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line);
    std::size_t line_number() const noexcept { return line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 0;
};

/// Splits on ','. No quoting: none of the file formats carry commas in
/// fields.
std::vector<std::string_view> split_csv(std::string_view line);

/// Strict parsers; throw ValidationError on trailing garbage or overflow.
double parse_double(std::string_view s);
std::size_t parse_size(std::string_view s);
std::uint64_t parse_uint64(std::string_view s);
std::int64_t parse_int64(std::string_view s);

/// %.17g: round-trips every finite double.
std::string format_double(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace gibbsnet::io
