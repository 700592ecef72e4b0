#include "ambilab/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ambilab/csv.hpp"

namespace ambilab {

namespace {

constexpr char kKeySep = '\x1f';

} // namespace

double centrism_transform(double position, CentrismMode mode, double reference) {
    if (position < 0.0 || position > 10.0) {
        throw DomainError("position outside the 0-10 scale: " + std::to_string(position));
    }
    if (mode == CentrismMode::Midpoint) reference = 5.0;
    return 5.0 - std::abs(reference - position);
}

int PartyYearPanel::add_row(const std::string& country, const std::string& party, int year) {
    if (!allow_duplicate_keys_) {
        std::string key = country + kKeySep + party + kKeySep + std::to_string(year);
        if (!key_index_.emplace(key, n_rows()).second) {
            throw DomainError("duplicate panel key (" + country + ", " + party + ", " +
                              std::to_string(year) + ")");
        }
    }
    countries_.push_back(country);
    parties_.push_back(party);
    years_.push_back(year);
    tags_.emplace_back();
    for (auto& [name, col] : columns_) {
        col.values.push_back(0.0);
        col.present.push_back(0);
    }
    return n_rows() - 1;
}

void PartyYearPanel::set_tag(int row, const std::string& tag) { tags_[row] = tag; }
const std::string& PartyYearPanel::tag(int row) const { return tags_[row]; }

bool PartyYearPanel::has_column(const std::string& name) const {
    return columns_.count(name) != 0;
}

void PartyYearPanel::ensure_column(const std::string& name) {
    if (columns_.count(name)) return;
    Column col;
    col.values.assign(countries_.size(), 0.0);
    col.present.assign(countries_.size(), 0);
    columns_.emplace(name, std::move(col));
    column_order_.push_back(name);
}

PartyYearPanel::Column& PartyYearPanel::column(const std::string& name) {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw DomainError("unknown panel column '" + name + "'");
    return it->second;
}

const PartyYearPanel::Column& PartyYearPanel::column(const std::string& name) const {
    auto it = columns_.find(name);
    if (it == columns_.end()) throw DomainError("unknown panel column '" + name + "'");
    return it->second;
}

void PartyYearPanel::set(int row, const std::string& name, double value) {
    ensure_column(name);
    Column& col = column(name);
    col.values[row] = value;
    col.present[row] = 1;
}

void PartyYearPanel::set_missing(int row, const std::string& name) {
    ensure_column(name);
    Column& col = column(name);
    col.values[row] = 0.0;
    col.present[row] = 0;
}

std::optional<double> PartyYearPanel::get(int row, const std::string& name) const {
    const Column& col = column(name);
    if (!col.present[row]) return std::nullopt;
    return col.values[row];
}

std::string PartyYearPanel::country_year_key(int row) const {
    return countries_[row] + kKeySep + std::to_string(years_[row]);
}

std::string PartyYearPanel::party_key(int row) const {
    return countries_[row] + kKeySep + parties_[row];
}

std::string PartyYearPanel::group_key(int row, const std::string& dimension) const {
    if (dimension == "party") return party_key(row);
    if (dimension == "country") return countries_[row];
    if (dimension == "country_year") return country_year_key(row);
    auto v = get(row, dimension);
    if (!v) return std::string("row") + kKeySep + std::to_string(row);
    return csv::format_double(*v);
}

std::vector<int> PartyYearPanel::waves() const {
    std::set<int> distinct(years_.begin(), years_.end());
    return {distinct.begin(), distinct.end()};
}

void PartyYearPanel::add_product_column(const std::string& name,
                                        const std::vector<std::string>& factors) {
    if (factors.empty()) throw DomainError("product column needs at least one factor");
    for (const auto& f : factors) column(f); // validate
    ensure_column(name);
    for (int row = 0; row < n_rows(); ++row) {
        double product = 1.0;
        bool missing = false;
        for (const auto& f : factors) {
            auto v = get(row, f);
            if (!v) {
                missing = true;
                break;
            }
            product *= *v;
        }
        if (missing) set_missing(row, name);
        else set(row, name, product);
    }
}

void PartyYearPanel::add_centrism_column(const std::string& position_column,
                                         const std::string& name, CentrismMode mode) {
    column(position_column); // validate

    std::map<std::string, double> medians;
    if (mode == CentrismMode::Median) {
        std::map<std::string, std::vector<double>> groups;
        for (int row = 0; row < n_rows(); ++row) {
            if (auto v = get(row, position_column)) groups[country_year_key(row)].push_back(*v);
        }
        for (auto& [key, vals] : groups) {
            std::sort(vals.begin(), vals.end());
            const std::size_t n = vals.size();
            medians[key] = n % 2 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
        }
    }

    ensure_column(name);
    for (int row = 0; row < n_rows(); ++row) {
        auto v = get(row, position_column);
        if (!v) {
            set_missing(row, name);
            continue;
        }
        const double ref = mode == CentrismMode::Median ? medians.at(country_year_key(row)) : 5.0;
        set(row, name, centrism_transform(*v, mode, ref));
    }
}

void PartyYearPanel::build_lags(const std::vector<std::string>& columns, int order) {
    if (order < 1) throw DomainError("lag order must be >= 1");
    const std::vector<int> wave_years = waves();
    std::map<int, int> wave_index;
    for (std::size_t i = 0; i < wave_years.size(); ++i) wave_index[wave_years[i]] = static_cast<int>(i);

    // party key + wave index -> row
    std::map<std::string, int> row_at;
    for (int row = 0; row < n_rows(); ++row) {
        row_at[party_key(row) + kKeySep + std::to_string(wave_index.at(years_[row]))] = row;
    }

    for (const std::string& col : columns) {
        column(col); // validate
        const std::string lag_name =
            col + "_lag" + (order == 1 ? std::string() : std::to_string(order));
        ensure_column(lag_name);
        for (int row = 0; row < n_rows(); ++row) {
            const int idx = wave_index.at(years_[row]) - order;
            if (idx < 0) {
                set_missing(row, lag_name);
                continue;
            }
            auto it = row_at.find(party_key(row) + kKeySep + std::to_string(idx));
            if (it == row_at.end()) {
                set_missing(row, lag_name);
                continue;
            }
            auto v = get(it->second, col);
            if (v) set(row, lag_name, *v);
            else set_missing(row, lag_name);
        }
    }
}

void write_panel_csv(std::ostream& os, const PartyYearPanel& panel) {
    std::vector<std::string> header = {"country", "party", "year"};
    for (const auto& c : panel.column_names()) header.push_back(c);
    csv::write_record(os, header);
    for (int row = 0; row < panel.n_rows(); ++row) {
        std::vector<std::string> rec = {panel.country(row), panel.party(row),
                                        std::to_string(panel.year(row))};
        for (const auto& c : panel.column_names()) {
            auto v = panel.get(row, c);
            rec.push_back(v ? csv::format_double(*v) : std::string());
        }
        csv::write_record(os, rec);
    }
}

void write_panel_csv_file(const std::string& path, const PartyYearPanel& panel) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open '" + path + "' for writing");
    write_panel_csv(os, panel);
}

PartyYearPanel read_panel_csv(std::istream& is) {
    csv::Reader reader(is);
    const int c_country = reader.column_index("country");
    const int c_party = reader.column_index("party");
    const int c_year = reader.column_index("year");
    if (c_country < 0 || c_party < 0 || c_year < 0) {
        throw SchemaError("panel file must have country, party, and year columns");
    }
    std::vector<std::pair<int, std::string>> value_cols;
    for (std::size_t i = 0; i < reader.header().size(); ++i) {
        const std::string& name = reader.header()[i];
        if (name != "country" && name != "party" && name != "year") {
            value_cols.emplace_back(static_cast<int>(i), name);
        }
    }

    PartyYearPanel panel;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        if (fields.size() != reader.header().size()) {
            throw ParseError(reader.line_number(), "", "expected " +
                             std::to_string(reader.header().size()) + " fields, got " +
                             std::to_string(fields.size()));
        }
        int year = 0;
        try {
            year = csv::parse_int_field(fields[c_year]);
        } catch (const DomainError& e) {
            throw ParseError(reader.line_number(), "year", e.what());
        }
        const int row = panel.add_row(fields[c_country], fields[c_party], year);
        for (const auto& [idx, name] : value_cols) {
            std::optional<double> v;
            try {
                v = csv::parse_double_field(fields[idx]);
            } catch (const DomainError& e) {
                throw ParseError(reader.line_number(), name, e.what());
            }
            if (v) panel.set(row, name, *v);
            else panel.ensure_column(name);
        }
    }
    return panel;
}

PartyYearPanel read_panel_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open '" + path + "'");
    return read_panel_csv(is);
}

} // namespace ambilab
