#include "ambilab/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ambilab/csv.hpp"

namespace ambilab::ingest {

namespace {

struct GroupStats {
    std::vector<double> positions;
    std::vector<double> blurriness;
};

// Mean that is exact when every value is identical (the zero-noise case).
double stable_mean(const std::vector<double>& values) {
    const double first = values.front();
    bool identical = true;
    double sum = 0.0;
    for (double v : values) {
        identical = identical && v == first;
        sum += v;
    }
    return identical ? first : sum / static_cast<double>(values.size());
}

} // namespace

ExpertTable read_expert_table(std::istream& is, const ReadOptions& options) {
    csv::Reader reader(is);

    std::map<std::string, int> field_index;
    for (const std::string& field : canonical_expert_fields()) {
        auto bound = options.schema_map.find(field);
        const std::string file_column =
            bound == options.schema_map.end() ? field : bound->second;
        const int idx = reader.column_index(file_column);
        if (idx < 0 && field != "blurriness") {
            throw SchemaError("no column '" + file_column + "' for field '" + field + "'");
        }
        field_index[field] = idx;
    }

    auto scale_check = [&](double v, const std::string& field, std::size_t line) {
        if (v < 0.0 || v > 10.0) {
            throw ParseError(line, field,
                             "value " + csv::format_double(v) + " outside the 0-10 scale");
        }
    };

    ExpertTable table;
    std::vector<std::string> fields;
    while (reader.next(fields)) {
        const std::size_t line = reader.line_number();
        if (fields.size() != reader.header().size()) {
            throw ParseError(line, "", "expected " + std::to_string(reader.header().size()) +
                             " fields, got " + std::to_string(fields.size()));
        }
        ExpertRow row;
        row.expert_id = fields[field_index["expert_id"]];
        row.country = fields[field_index["country"]];
        row.party_id = fields[field_index["party"]];
        row.dimension = fields[field_index["dimension"]];
        if (row.country.empty()) throw ParseError(line, "country", "empty value");
        if (row.party_id.empty()) throw ParseError(line, "party", "empty value");
        if (!options.dimension_registry.count(row.dimension)) {
            throw ParseError(line, "dimension",
                             "'" + row.dimension + "' is not in the dimension registry");
        }
        try {
            row.year = csv::parse_int_field(fields[field_index["year"]]);
        } catch (const DomainError& e) {
            throw ParseError(line, "year", e.what());
        }

        std::optional<double> position;
        try {
            position = csv::parse_double_field(fields[field_index["position"]]);
        } catch (const DomainError& e) {
            throw ParseError(line, "position", e.what());
        }
        if (!position) throw ParseError(line, "position", "missing value");
        scale_check(*position, "position", line);
        row.position = *position;

        if (const int bi = field_index["blurriness"]; bi >= 0) {
            std::optional<double> blur;
            try {
                blur = csv::parse_double_field(fields[bi]);
            } catch (const DomainError& e) {
                throw ParseError(line, "blurriness", e.what());
            }
            if (blur) {
                scale_check(*blur, "blurriness", line);
                row.blurriness = blur;
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

ExpertTable read_expert_table_file(const std::string& path, const ReadOptions& options) {
    std::ifstream is(path);
    if (!is) throw DomainError("cannot open '" + path + "'");
    return read_expert_table(is, options);
}

void write_expert_csv(std::ostream& os, const ExpertTable& table) {
    csv::write_record(os, canonical_expert_fields());
    for (const ExpertRow& row : table.rows) {
        csv::write_record(os, {row.expert_id, row.country, row.party_id,
                               std::to_string(row.year), row.dimension,
                               csv::format_double(row.position),
                               row.blurriness ? csv::format_double(*row.blurriness) : std::string()});
    }
}

void write_expert_csv_file(const std::string& path, const ExpertTable& table) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open '" + path + "' for writing");
    write_expert_csv(os, table);
}

Aggregation aggregate_party_year(const ExpertTable& table, const AggregationPolicy& policy) {
    // (country, party, year) -> dimension -> stats; map keeps output ordering
    // deterministic and independent of row order.
    std::map<std::tuple<std::string, std::string, int>, std::map<std::string, GroupStats>> groups;
    for (const ExpertRow& row : table.rows) {
        if (!policy.dimensions.empty() && !policy.dimensions.count(row.dimension)) continue;
        if (!policy.year_filter.empty() && !policy.year_filter.count(row.year)) continue;
        GroupStats& g = groups[{row.country, row.party_id, row.year}][row.dimension];
        g.positions.push_back(row.position);
        if (row.blurriness) g.blurriness.push_back(*row.blurriness);
    }

    Aggregation out;
    for (const auto& [key, dims] : groups) {
        const auto& [country, party, year] = key;
        int row = -1;
        for (const auto& [dim, g] : dims) {
            const int n = static_cast<int>(g.positions.size());
            ++out.groups_total;
            if (n < policy.min_experts) {
                ++out.groups_dropped;
                continue;
            }
            if (row < 0) row = out.panel.add_row(country, party, year);
            const double mean = stable_mean(g.positions);
            // Two-pass sample SD of the expert position assessments, so
            // identical assessments give exactly zero; a single expert is
            // defined as zero dispersion.
            double sd = 0.0;
            if (n > 1) {
                double ss = 0.0;
                for (double p : g.positions) ss += (p - mean) * (p - mean);
                sd = std::sqrt(ss / (n - 1));
            }
            out.panel.set(row, "position_" + dim, mean);
            out.panel.set(row, "blurriness_sd_" + dim, sd);
            out.panel.set(row, "n_experts_" + dim, static_cast<double>(n));
            if (!g.blurriness.empty()) {
                out.panel.set(row, "blurriness_" + dim, stable_mean(g.blurriness));
            } else {
                out.panel.ensure_column("blurriness_" + dim);
            }
        }
    }
    return out;
}

PartyYearPanel expert_level_panel(const ExpertTable& table) {
    // One row per (expert, country, party, year); dimensions become columns.
    std::map<std::tuple<std::string, std::string, std::string, int>, int> row_of;
    PartyYearPanel panel(/*allow_duplicate_keys=*/true);
    for (const ExpertRow& r : table.rows) {
        auto key = std::make_tuple(r.expert_id, r.country, r.party_id, r.year);
        auto it = row_of.find(key);
        int row;
        if (it == row_of.end()) {
            row = panel.add_row(r.country, r.party_id, r.year);
            panel.set_tag(row, r.expert_id);
            row_of.emplace(key, row);
        } else {
            row = it->second;
        }
        panel.set(row, "position_" + r.dimension, r.position);
        if (r.blurriness) panel.set(row, "blurriness_" + r.dimension, *r.blurriness);
    }
    return panel;
}

} // namespace ambilab::ingest
