#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ambilab::csv {

/// Splits one CSV record. Handles double-quoted fields with "" escapes;
/// no multi-line fields.
std::vector<std::string> split_record(const std::string& line);

/// Quotes a field only when it contains a comma, quote, or newline.
std::string escape_field(const std::string& field);

void write_record(std::ostream& os, const std::vector<std::string>& fields);

/// Parses a floating-point field; empty or "NA" is missing.
std::optional<double> parse_double_field(const std::string& field);

/// Strict integer parse; rejects trailing characters like "2017.5".
int parse_int_field(const std::string& field);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double value);

/// Header-indexed reader over an input stream.
class Reader {
public:
    explicit Reader(std::istream& is);

    const std::vector<std::string>& header() const { return header_; }

    /// Index of a header column, or -1.
    int column_index(const std::string& name) const;

    /// Reads the next record; false at EOF. Skips blank lines.
    bool next(std::vector<std::string>& fields);

    /// 1-based line number of the record last returned by next().
    std::size_t line_number() const { return line_; }

private:
    std::istream& is_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

} // namespace ambilab::csv
