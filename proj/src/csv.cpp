#include "ambilab/csv.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "ambilab/errors.hpp"

namespace ambilab::csv {

std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string escape_field(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_record(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) os << ',';
        os << escape_field(fields[i]);
    }
    os << '\n';
}

std::optional<double> parse_double_field(const std::string& field) {
    if (field.empty() || field == "NA" || field == "na" || field == ".") return std::nullopt;
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
        throw DomainError("not a number: '" + field + "'");
    }
    return value;
}

int parse_int_field(const std::string& field) {
    int value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || field.empty()) {
        throw DomainError("not an integer: '" + field + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, value);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == value) break;
    }
    return buf;
}

Reader::Reader(std::istream& is) : is_(is) {
    std::string line;
    if (!std::getline(is_, line)) {
        throw SchemaError("missing header row");
    }
    ++line_;
    header_ = split_record(line);
}

int Reader::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

bool Reader::next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(is_, line)) {
        ++line_;
        if (line.empty() || line == "\r") continue;
        fields = split_record(line);
        return true;
    }
    return false;
}

} // namespace ambilab::csv
