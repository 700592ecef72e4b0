#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ambilab/panel.hpp"

namespace ambilab::econ {

/// A regression term: the product of one or more panel columns. An empty
/// factor list is the intercept. A square is the same column twice.
struct Term {
    std::vector<std::string> factors;
    std::string name;

    static Term intercept();
    static Term column(const std::string& col);
    static Term square(const std::string& col);
    static Term product(const std::vector<std::string>& cols);

    /// Parses "col", "col^2", or "a*b^2" style expressions.
    static Term parse(const std::string& text);

    /// Per-row value: product of factor values; missing if any factor is.
    std::optional<double> evaluate(const PartyYearPanel& panel, int row) const;

    static std::string display_name(const std::vector<std::string>& factors);
};

struct FixedEffectsSpec {
    bool country_year = false;
    bool party = false;

    bool any() const { return country_year || party; }
};

/// A regression specification: outcome, terms, absorbed fixed effects, the
/// clustering dimension, and (for 2SLS) a map from endogenous term names to
/// instrument columns.
struct DesignSpec {
    std::string outcome;
    std::vector<Term> regressors;
    FixedEffectsSpec fixed_effects;
    std::string cluster = "party";
    std::map<std::string, std::vector<std::string>> instruments;
    std::string label;
};

struct Diagnostics {
    int dropped_singletons = 0;       // rows removed from singleton FE groups
    int absorbed_country_year = 0;    // distinct country-year groups absorbed
    int absorbed_party = 0;           // distinct party groups absorbed
    int absorbed_df = 0;              // total fixed-effect degrees of freedom
    int demeaning_iterations = 0;
    bool used_dummy_fallback = false; // two-way demeaning fell back to dummies
};

/// Estimates with cluster-robust covariance. The covariance uses the CR1
/// sandwich with correction (M/(M-1)) * ((n-1)/(n-K)) over cluster score
/// sums, where K counts estimated coefficients plus absorbed fixed effects.
/// t statistics are referenced against Student-t with df = n_clusters - 1.
struct FitResult {
    std::vector<std::string> term_names;
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd vcov_clustered;
    int n_obs = 0;
    int n_clusters = 0;
    double df = 0.0;
    std::optional<double> first_stage_f;
    Diagnostics diagnostics;
    std::vector<std::string> warnings;

    int term_index(const std::string& name) const; // -1 when absent
    double coefficient(const std::string& name) const;
    double std_error(const std::string& name) const;
    double t_stat(const std::string& name) const;
    double p_value(const std::string& name) const;
};

struct FitOptions {
    double demean_tol = 1e-10;
    int demean_max_iter = 10000;
    int dummy_fallback_max_rows = 5000; // two-way fallback ceiling
    double weak_instrument_f = 10.0;
};

/// In-place group demeaning of matrix columns. One grouping demeans exactly;
/// two alternate until the largest change is below tol (ConvergenceError past
/// max_iter). Returns the number of sweeps.
int demean_within_groups(Eigen::MatrixXd& m, const std::vector<int>& groups_a,
                         const std::vector<int>* groups_b, double tol = 1e-10,
                         int max_iter = 10000);

/// Complete-case columns demeaned by the requested fixed effects. Two-way
/// absorption that misses the sweep cap falls back to explicit dummies on
/// panels up to opts.dummy_fallback_max_rows rows and raises ConvergenceError
/// beyond that.
struct AbsorbedMatrix {
    Eigen::MatrixXd values;      // one column per requested panel column
    std::vector<int> panel_rows; // source row of each matrix row
    int iterations = 0;
};

AbsorbedMatrix absorb_fixed_effects(const PartyYearPanel& panel,
                                    const std::vector<std::string>& columns,
                                    const FixedEffectsSpec& fe, const FitOptions& opts = {});

/// Fixed-effects OLS with CR1 cluster-robust covariance. Rows with any
/// missing required value are dropped (listwise); singleton fixed-effect
/// groups are dropped iteratively and counted. Adds an intercept when no
/// fixed effects are absorbed.
FitResult fit_ols_clustered(const PartyYearPanel& panel, const DesignSpec& spec,
                            const FitOptions& opts = {});

/// Two-stage least squares on the demeaned system. Reports the clustered
/// first-stage F of the excluded instruments (minimum across endogenous
/// terms) and warns, without failing, when it falls below
/// opts.weak_instrument_f.
FitResult fit_2sls(const PartyYearPanel& panel, const DesignSpec& spec,
                   const FitOptions& opts = {});

/// Base specification augmented with interaction terms, delegated to
/// fit_ols_clustered.
FitResult fit_interaction(const PartyYearPanel& panel, const DesignSpec& base_spec,
                          const std::vector<Term>& interaction_terms,
                          const FitOptions& opts = {});

/// Wald test that the named coefficients are jointly zero; returns
/// (statistic, p) with p from chi-square with |terms| degrees of freedom.
std::pair<double, double> wald_joint_test(const FitResult& fit,
                                          const std::vector<std::string>& terms);

/// Peak of the fitted quadratic: -b_linear / (2 * b_quadratic). ShapeError
/// when the quadratic coefficient is not negative.
double peak_location(const FitResult& fit, const std::string& linear_term,
                     const std::string& quadratic_term);

/// Pearson correlation of x and y after absorbing the fixed effects.
double partial_correlation(const PartyYearPanel& panel, const std::string& x,
                           const std::string& y, const FixedEffectsSpec& fe,
                           const FitOptions& opts = {});

/// Structured-text report: coefficient table then key=value summary lines.
void write_fit_report(std::ostream& os, const FitResult& fit, const std::string& label,
                      std::optional<double> peak = std::nullopt);

} // namespace ambilab::econ
