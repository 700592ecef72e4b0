#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ambilab/ingest.hpp"
#include "ambilab/panel.hpp"

namespace ambilab::dgp {

/// Shape of the synthetic panel. The defaults give 25 countries x 8 parties
/// x 2 waves (2017, 2019): 200 parties, matching the survey's desk scale.
struct PanelSpec {
    int n_countries = 25;
    int n_waves = 2;
    int parties_per_country = 8;
    int first_wave_year = 2017;
    int wave_step = 2;
    std::vector<std::string> dimensions = {"economic", "social"};
};

/// How blurriness depends on position in the generated truth.
enum class BlurrinessModel {
    Quadratic, // beta0 + beta1*p + beta2*p^2
    Centrism,  // alpha0 + alpha1*(5 - |5 - p|)
};

/// True coefficients and variance components. The default calibration targets
/// the survey's observed moments: mean position ~4.92, mean blurriness ~3.7,
/// a quadratic peak at exactly 5, and persistence 0.9 so lagged positions are
/// strong instruments.
struct DGPParams {
    BlurrinessModel model = BlurrinessModel::Quadratic;

    double beta0 = 1.6;
    double beta1 = 1.05;
    double beta2 = -0.105; // peak at -beta1/(2*beta2) = 5

    double alpha0 = 0.8;
    double alpha1 = 0.6;

    double sd_country_year = 0.35;
    double sd_party = 0.45;
    double sd_noise = 0.5;

    double position_mean = 4.916;
    double position_sd = 1.8;
    double persistence = 0.9; // across-wave AR(1) correlation of positions

    /// Measurement feedback: observed position is shifted toward the scale
    /// midpoint by simultaneity * noise, so blurriness shocks contaminate
    /// measured centrism. Zero disables it.
    double simultaneity = 0.0;
};

/// Party-year panel with position_<dim> and blurriness_<dim> columns, both
/// clamped to [0, 10]. Deterministic given (spec, params, seed).
PartyYearPanel generate_panel(const PanelSpec& spec, const DGPParams& params,
                              std::uint64_t seed);

/// Expert-level table: each party-year-dimension row expands into
/// experts_per_party assessments with independent N(0, expert_sd) noise,
/// clamped to the 0-10 scale. Aggregating recovers the panel exactly at
/// expert_sd = 0.
ingest::ExpertTable generate_expert_table(const PartyYearPanel& panel, int experts_per_party,
                                          double expert_sd, std::uint64_t seed);

/// Country-year economic context and party-year government status.
struct ContextParams {
    double growth_mean = 2.0;      // percent
    double growth_sd_min = 0.4;    // per-country volatility range
    double growth_sd_max = 1.2;
    int variance_window = 3;       // trailing years entering the lagged variance
    int government_parties = 3;    // coalition size per country-year (capped at the
                                   // party count); the rest are the opposition

    /// Triple-interaction truth per dimension: blurriness receives
    /// theta * centrism * variance_lag * opposition when nonzero.
    double theta_economic = 0.0;
    double theta_social = 0.0;
};

struct ContextRow {
    std::string country;
    int year = 0;
    double gdp_growth = 0.0;
    double gdp_growth_var_lag = 0.0; // variance over the trailing window
    int crisis_count = 0;            // negative-growth years in the window
};

struct ContextTable {
    std::vector<ContextRow> rows;
};

/// Generates GDP growth histories and government status, merges the context
/// columns into the panel (gdp_growth, gdp_growth_var_lag,
/// gdp_growth_var_lag_high, gdp_growth_low, crisis_count, in_government,
/// opposition, centrism_<dim>), and, when a theta is nonzero, adds the
/// interaction truth to that dimension's blurriness. Median splits are taken
/// within year across countries.
ContextTable generate_context(PartyYearPanel& panel, const ContextParams& params,
                              std::uint64_t seed);

void write_context_csv(std::ostream& os, const ContextTable& table);

} // namespace ambilab::dgp
