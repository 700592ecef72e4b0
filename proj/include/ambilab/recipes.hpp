#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambilab/dgp.hpp"
#include "ambilab/panel.hpp"
#include "ambilab/regress.hpp"

namespace ambilab::recipes {

/// Outcome of one estimated specification. Failed specs keep their error
/// text so a run can finish and report partial results.
struct SpecOutcome {
    std::string label;
    bool ok = false;
    std::string error;
    econ::FitResult fit;
    std::optional<double> peak;
    std::optional<std::pair<double, double>> joint_test; // Wald stat, p
};

struct BinnedPoint {
    double bin_center = 0.0;
    double mean_blurriness = 0.0;
    int count = 0;
};

struct BaselineConfig {
    std::uint64_t seed = 1;

    /// Data source: an aggregated panel file, an expert-level file to
    /// aggregate, or (default) a synthetic expert survey.
    std::string panel_csv;
    std::string expert_csv;

    dgp::PanelSpec panel_spec;
    dgp::DGPParams params;
    int experts_per_party = 30;
    double expert_sd = 1.0;

    double bin_width = 0.5;
};

struct BaselineResult {
    std::vector<SpecOutcome> outcomes;
    std::map<std::string, std::vector<BinnedPoint>> binned; // per dimension
    std::map<std::string, double> partial_correlations;
    bool any_error() const;
};

/// Runs the full baseline battery on each dimension found in the panel:
/// the quadratic fixed-effects spec (with peak and joint test), both centrism
/// variants, the monotonic comparison, the dispersion-outcome robustness
/// spec, and the lag-instrumented 2SLS variants. Also emits binned
/// position-vs-blurriness data and the cross-dimension centrism partial
/// correlation.
BaselineResult replicate_baseline(const BaselineConfig& config);

struct MechanismConfig {
    std::uint64_t seed = 1;
    dgp::PanelSpec panel_spec;
    dgp::DGPParams params;        // Centrism model by default
    dgp::ContextParams context;
};

struct MechanismResult {
    std::vector<SpecOutcome> outcomes;
    bool any_error() const;
};

/// Runs the context-interaction battery: the continuous and median-dummy
/// variance interactions (with the opposition triple), the below-median GDP
/// growth interaction, and the crisis-count interaction, per dimension.
MechanismResult replicate_mechanism(const MechanismConfig& config);

MechanismConfig default_mechanism_config();

/// Derives the columns the baseline battery needs: centrism (midpoint and
/// median variants), lags of position and centrism, and the squared lag
/// instrument, for every dimension with a position column.
void prepare_baseline_columns(PartyYearPanel& panel);

/// Dimensions present in a panel (from its position_<dim> columns).
std::vector<std::string> panel_dimensions(const PartyYearPanel& panel);

/// Binned position-vs-blurriness means for plotting.
std::vector<BinnedPoint> bin_position_blurriness(const PartyYearPanel& panel,
                                                 const std::string& dimension, double bin_width);

/// Report writing. Every run directory receives a manifest (config echo),
/// one report file per spec, and an error index when anything failed.
void write_manifest(const std::string& dir, const std::map<std::string, std::string>& entries);
int write_outcomes(const std::string& dir, const std::vector<SpecOutcome>& outcomes);
void write_binned_csv(const std::string& path, const std::vector<BinnedPoint>& points);

} // namespace ambilab::recipes
