#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ptdp {

/// Shortest decimal text that parses back to exactly `x`. NaN prints as "nan",
/// infinities as "inf" / "-inf".
std::string format_real(double x);

/// Strict parse of a full field; throws std::invalid_argument on trailing junk.
double parse_real(std::string_view text);

/// Split on commas. No quoting: fields here are always numeric or identifiers.
std::vector<std::string> split_csv_line(std::string_view line);

/// Column-ordered table rendered as UTF-8, comma-separated, LF-terminated.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row);
    const std::vector<std::string>& header() const { return header_; }
    std::size_t rows() const { return rows_.size(); }
    std::string render() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

}  // namespace ptdp
