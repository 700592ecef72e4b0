#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ambilab/panel.hpp"

namespace ambilab::ingest {

/// One expert's assessment of one party-year on one ideological dimension.
/// Positions and blurriness live on the 0-10 scale; blurriness may be absent.
struct ExpertRow {
    std::string expert_id;
    std::string country;
    std::string party_id;
    int year = 0;
    std::string dimension;
    double position = 0.0;
    std::optional<double> blurriness;
};

struct ExpertTable {
    std::vector<ExpertRow> rows;
};

/// Canonical field names understood by the reader. A schema map binds each
/// canonical field to the file's actual header name; unbound fields default
/// to the canonical name itself.
inline const std::vector<std::string>& canonical_expert_fields() {
    static const std::vector<std::string> fields = {"expert_id", "country", "party",
                                                    "year",      "dimension", "position",
                                                    "blurriness"};
    return fields;
}

struct ReadOptions {
    /// canonical field -> file column name; unlisted fields use the
    /// canonical name.
    std::map<std::string, std::string> schema_map;

    /// Accepted dimension tokens; rows with others are rejected.
    std::set<std::string> dimension_registry = {"economic", "social"};
};

/// Reads a comma-delimited expert file with a header row. Malformed or
/// out-of-range rows raise ParseError with the line number; a missing column
/// binding raises SchemaError.
ExpertTable read_expert_table(std::istream& is, const ReadOptions& options = {});
ExpertTable read_expert_table_file(const std::string& path, const ReadOptions& options = {});

void write_expert_csv(std::ostream& os, const ExpertTable& table);
void write_expert_csv_file(const std::string& path, const ExpertTable& table);

struct AggregationPolicy {
    int min_experts = 0;                 // groups with fewer experts are dropped
    std::set<std::string> dimensions;    // empty = keep all
    std::set<int> year_filter;           // empty = keep all waves
};

/// Party-year aggregation result. For each (party, year, dimension) group the
/// panel gains position_<dim> (mean), blurriness_<dim> (mean of the expert
/// blurriness assessments, when any), blurriness_sd_<dim> (standard deviation
/// of the expert position assessments - the dispersion-based alternative
/// blurriness measure), and n_experts_<dim>. The SD uses the sample (n-1)
/// denominator, with a single expert defined as 0.
struct Aggregation {
    PartyYearPanel panel;
    int groups_total = 0;
    int groups_dropped = 0;
};

Aggregation aggregate_party_year(const ExpertTable& table, const AggregationPolicy& policy = {});

/// Expert-level panel (one row per expert-party-year, duplicate keys allowed)
/// for running the same designs on disaggregated data. The expert id is kept
/// as the row tag; party and country keys stay at the party level so party
/// clustering and country-year effects work unchanged.
PartyYearPanel expert_level_panel(const ExpertTable& table);

} // namespace ambilab::ingest
