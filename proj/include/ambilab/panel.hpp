#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambilab/errors.hpp"

namespace ambilab {

/// Centrism measure variants: distance from the scale midpoint 5, or distance
/// from a supplied distribution median. Both return 5 - |reference - position|
/// so the two variants share a scale; only the reference differs.
enum class CentrismMode { Midpoint, Median };

double centrism_transform(double position, CentrismMode mode, double reference);

/// Rectangular party-by-wave table. Rows are keyed by (country, party, year);
/// numeric columns hold positions, blurriness, derived measures, and context
/// covariates, with missing values explicit. Keys are unique unless the panel
/// is built in duplicate-key mode (expert-level rows).
class PartyYearPanel {
public:
    explicit PartyYearPanel(bool allow_duplicate_keys = false)
        : allow_duplicate_keys_(allow_duplicate_keys) {}

    int add_row(const std::string& country, const std::string& party, int year);

    int n_rows() const { return static_cast<int>(countries_.size()); }

    const std::string& country(int row) const { return countries_[row]; }
    const std::string& party(int row) const { return parties_[row]; }
    int year(int row) const { return years_[row]; }

    /// Optional free-form row tag (e.g. expert id for expert-level panels).
    void set_tag(int row, const std::string& tag);
    const std::string& tag(int row) const;

    bool has_column(const std::string& name) const;
    const std::vector<std::string>& column_names() const { return column_order_; }

    void set(int row, const std::string& column, double value);
    void set_missing(int row, const std::string& column);
    std::optional<double> get(int row, const std::string& column) const;

    /// Creates the column filled with missing values if absent.
    void ensure_column(const std::string& name);

    /// Grouping keys for fixed effects and clustering.
    std::string country_year_key(int row) const;
    std::string party_key(int row) const;

    /// Key for a named grouping: "party", "country", "country_year", or any
    /// numeric column (its value formatted; missing -> row-unique key).
    std::string group_key(int row, const std::string& dimension) const;

    /// Sorted distinct years present.
    std::vector<int> waves() const;

    /// Product of existing columns as a new column (missing if any factor is).
    void add_product_column(const std::string& name, const std::vector<std::string>& factors);

    /// position -> centrism. Midpoint mode references 5; median mode
    /// references the median position across parties within each
    /// (country, year) party system.
    void add_centrism_column(const std::string& position_column, const std::string& name,
                             CentrismMode mode);

    /// Lagged copies of `columns` (order-th previous wave within the same
    /// party), named "<col>_lag" (order 1) or "<col>_lag<order>". A lag is
    /// missing when the party is absent from the earlier wave.
    void build_lags(const std::vector<std::string>& columns, int order = 1);

private:
    struct Column {
        std::vector<double> values;
        std::vector<char> present;
    };

    Column& column(const std::string& name);
    const Column& column(const std::string& name) const;

    bool allow_duplicate_keys_;
    std::vector<std::string> countries_;
    std::vector<std::string> parties_;
    std::vector<int> years_;
    std::vector<std::string> tags_;
    std::map<std::string, Column> columns_;
    std::vector<std::string> column_order_;
    std::map<std::string, int> key_index_; // only when unique keys enforced
};

/// Panel serialization: header "country,party,year,<columns...>"; missing
/// values are empty fields. Read and write round-trip exactly for values
/// written by this writer.
void write_panel_csv(std::ostream& os, const PartyYearPanel& panel);
void write_panel_csv_file(const std::string& path, const PartyYearPanel& panel);
PartyYearPanel read_panel_csv(std::istream& is);
PartyYearPanel read_panel_csv_file(const std::string& path);

} // namespace ambilab
