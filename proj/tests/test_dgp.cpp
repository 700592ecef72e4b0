#include "doctest.h"

#include <cmath>
#include <map>
#include <tuple>

#include "ambilab/dgp.hpp"
#include "ambilab/recipes.hpp"
#include "ambilab/regress.hpp"

using namespace ambilab;
using namespace ambilab::dgp;
using econ::DesignSpec;
using econ::FitResult;
using econ::Term;

namespace {

PanelSpec small_spec() {
    PanelSpec spec;
    spec.n_countries = 8;
    spec.parties_per_country = 5;
    return spec;
}

} // namespace

TEST_CASE("generation is deterministic given the seed") {
    const PanelSpec spec = small_spec();
    const DGPParams params;
    const PartyYearPanel a = generate_panel(spec, params, 42);
    const PartyYearPanel b = generate_panel(spec, params, 42);
    const PartyYearPanel c = generate_panel(spec, params, 43);
    REQUIRE(a.n_rows() == b.n_rows());
    bool all_equal = true;
    bool any_differs_from_c = false;
    for (int r = 0; r < a.n_rows(); ++r) {
        for (const std::string& col : a.column_names()) {
            if (a.get(r, col) != b.get(r, col)) all_equal = false;
            if (a.get(r, col) != c.get(r, col)) any_differs_from_c = true;
        }
    }
    CHECK(all_equal);
    CHECK(any_differs_from_c);
}

TEST_CASE("zero-noise quadratic generation is exactly invertible") {
    PanelSpec spec = small_spec();
    DGPParams params;
    params.beta0 = 0.5;
    params.beta1 = 1.6;
    params.beta2 = -0.16;
    params.sd_country_year = 0.0;
    params.sd_party = 0.0;
    params.sd_noise = 0.0;
    const PartyYearPanel panel = generate_panel(spec, params, 7);

    for (int r = 0; r < panel.n_rows(); ++r) {
        const double p = *panel.get(r, "position_economic");
        const double expected = 0.5 + 1.6 * p - 0.16 * p * p;
        CHECK(*panel.get(r, "blurriness_economic") == doctest::Approx(expected).epsilon(1e-14));
    }

    DesignSpec design;
    design.outcome = "blurriness_economic";
    design.regressors = {Term::column("position_economic"), Term::square("position_economic")};
    design.fixed_effects.country_year = true;
    const FitResult fit = econ::fit_ols_clustered(panel, design);
    CHECK(fit.coefficient("position_economic") == doctest::Approx(1.6).epsilon(1e-10));
    CHECK(fit.coefficient("position_economic^2") == doctest::Approx(-0.16).epsilon(1e-10));
    CHECK(econ::peak_location(fit, "position_economic", "position_economic^2") ==
          doctest::Approx(5.0).epsilon(1e-10));
}

TEST_CASE("default calibration matches the survey moments") {
    const PanelSpec spec; // full desk scale
    const DGPParams params;
    const PartyYearPanel panel = generate_panel(spec, params, 1);
    double blur_sum = 0.0, pos_sum = 0.0;
    int n = 0;
    int clamped = 0;
    for (int r = 0; r < panel.n_rows(); ++r) {
        for (const std::string& dim : {"economic", "social"}) {
            const double blur = *panel.get(r, "blurriness_" + std::string(dim));
            const double pos = *panel.get(r, "position_" + std::string(dim));
            blur_sum += blur;
            pos_sum += pos;
            ++n;
            if (blur == 0.0 || blur == 10.0 || pos == 0.0 || pos == 10.0) ++clamped;
        }
    }
    CHECK(blur_sum / n == doctest::Approx(3.675).epsilon(0.5 / 3.675));
    CHECK(pos_sum / n == doctest::Approx(4.916).epsilon(0.5 / 4.916));
    // Clamping is rare under the default calibration.
    CHECK(static_cast<double>(clamped) / n < 0.01);
}

TEST_CASE("positions persist across waves") {
    const PanelSpec spec;
    DGPParams params;
    const PartyYearPanel panel = generate_panel(spec, params, 5);
    PartyYearPanel copy = panel;
    copy.build_lags({"position_economic"});
    double sxy = 0, sx = 0, sy = 0, sx2 = 0, sy2 = 0;
    int n = 0;
    for (int r = 0; r < copy.n_rows(); ++r) {
        const auto lag = copy.get(r, "position_economic_lag");
        if (!lag) continue;
        const double x = *lag;
        const double y = *copy.get(r, "position_economic");
        sx += x;
        sy += y;
        sxy += x * y;
        sx2 += x * x;
        sy2 += y * y;
        ++n;
    }
    const double corr = (n * sxy - sx * sy) /
                        std::sqrt((n * sx2 - sx * sx) * (n * sy2 - sy * sy));
    CHECK(corr > 0.8); // persistence 0.9 up to clamping
}

TEST_CASE("expert table with zero noise reproduces the panel") {
    const PartyYearPanel panel = generate_panel(small_spec(), DGPParams{}, 11);
    const auto table = generate_expert_table(panel, 3, 0.0, 11);
    CHECK(table.rows.size() ==
          static_cast<std::size_t>(panel.n_rows()) * 2 /*dims*/ * 3 /*experts*/);
    for (const auto& row : table.rows) {
        CHECK(row.position >= 0.0);
        CHECK(row.position <= 10.0);
        REQUIRE(row.blurriness.has_value());
    }
}

TEST_CASE("expert aggregation stays within the CLT band") {
    const PartyYearPanel panel = generate_panel(small_spec(), DGPParams{}, 13);
    const int n_experts = 40;
    const auto table = generate_expert_table(panel, n_experts, 1.0, 13);

    // Direct recomputation: group means per (party, year, dimension).
    std::map<std::tuple<std::string, std::string, int, std::string>, std::pair<double, int>> sums;
    for (const auto& row : table.rows) {
        auto& [sum, count] = sums[{row.country, row.party_id, row.year, row.dimension}];
        sum += row.position;
        ++count;
    }
    const double bound = 3.0 / std::sqrt(static_cast<double>(n_experts));
    int total = 0;
    int outside = 0;
    for (int r = 0; r < panel.n_rows(); ++r) {
        for (const std::string& dim : {"economic", "social"}) {
            const auto& [sum, count] = sums.at(
                {panel.country(r), panel.party(r), panel.year(r), std::string(dim)});
            REQUIRE(count == n_experts);
            const double mean = sum / count;
            ++total;
            if (std::abs(mean - *panel.get(r, "position_" + std::string(dim))) >= bound) {
                ++outside;
            }
        }
    }
    // A 3-sigma bound holds for ~99.7% of groups; allow the expected tail.
    CHECK(outside <= total / 50);
}

TEST_CASE("context generation attaches covariates and flags medians") {
    PartyYearPanel panel = generate_panel(small_spec(), DGPParams{}, 17);
    ContextParams ctx;
    const ContextTable table = generate_context(panel, ctx, 17);

    CHECK(static_cast<int>(table.rows.size()) == 8 * 2); // countries x waves
    for (const auto& row : table.rows) {
        CHECK(row.gdp_growth_var_lag >= 0.0);
        CHECK(row.crisis_count >= 0);
        CHECK(row.crisis_count <= ctx.variance_window);
    }

    // One governing coalition of the configured size per country-year; dummy
    // flags split near the median within year.
    std::map<std::string, double> gov_count;
    int high = 0, low = 0;
    for (int r = 0; r < panel.n_rows(); ++r) {
        gov_count[panel.country(r) + "#" + std::to_string(panel.year(r))] +=
            *panel.get(r, "in_government");
        CHECK(*panel.get(r, "opposition") == 1.0 - *panel.get(r, "in_government"));
        if (*panel.get(r, "gdp_growth_var_lag_high") == 1.0) ++high;
        else ++low;
    }
    for (const auto& [key, count] : gov_count) {
        CHECK(count == static_cast<double>(ctx.government_parties));
    }
    CHECK(high > 0);
    CHECK(low > 0);
}

TEST_CASE("zero interaction truth leaves blurriness untouched") {
    PartyYearPanel with_theta = generate_panel(small_spec(), DGPParams{}, 19);
    PartyYearPanel without = with_theta;
    ContextParams ctx; // thetas default to zero
    generate_context(with_theta, ctx, 19);
    for (int r = 0; r < without.n_rows(); ++r) {
        CHECK(*with_theta.get(r, "blurriness_economic") ==
              *without.get(r, "blurriness_economic"));
    }
}

TEST_CASE("interaction truth is recovered by the triple-interaction design") {
    int covered = 0;
    const int n_seeds = 25;
    for (int seed = 1; seed <= n_seeds; ++seed) {
        dgp::PanelSpec spec; // full scale
        DGPParams params;
        params.model = BlurrinessModel::Centrism;
        PartyYearPanel panel = generate_panel(spec, params, seed);
        ContextParams ctx;
        ctx.theta_economic = 0.3;
        generate_context(panel, ctx, seed);

        DesignSpec design;
        design.outcome = "blurriness_economic";
        design.fixed_effects.country_year = true;
        design.regressors = {
            Term::column("centrism_economic"),
            Term::column("opposition"),
            Term::product({"centrism_economic", "opposition"}),
            Term::product({"centrism_economic", "gdp_growth_var_lag"}),
            Term::product({"gdp_growth_var_lag", "opposition"}),
            Term::product({"centrism_economic", "gdp_growth_var_lag", "opposition"})};
        const FitResult fit = econ::fit_ols_clustered(panel, design);
        const std::string triple = "centrism_economic*gdp_growth_var_lag*opposition";
        if (std::abs(fit.coefficient(triple) - 0.3) < 3.0 * fit.std_error(triple)) ++covered;
    }
    CHECK(covered >= n_seeds - 2);
}

TEST_CASE("monotonic projection vanishes for symmetric inverted-U truth") {
    int insignificant = 0;
    const int n_seeds = 60;
    for (int seed = 1; seed <= n_seeds; ++seed) {
        PanelSpec spec;
        spec.n_countries = 15;
        DGPParams params;
        params.position_mean = 5.0; // symmetric about the midpoint
        const PartyYearPanel panel = generate_panel(spec, params, seed);
        DesignSpec design;
        design.outcome = "blurriness_economic";
        design.regressors = {Term::column("position_economic")};
        design.fixed_effects.country_year = true;
        const FitResult fit = econ::fit_ols_clustered(panel, design);
        if (fit.p_value("position_economic") > 0.05) ++insignificant;
    }
    CHECK(insignificant >= n_seeds * 9 / 10);
}

TEST_CASE("invalid parameters are rejected") {
    PanelSpec empty;
    empty.n_countries = 0;
    CHECK_THROWS_AS(generate_panel(empty, DGPParams{}, 1), DomainError);

    DGPParams bad;
    bad.sd_noise = -1.0;
    CHECK_THROWS_AS(generate_panel(PanelSpec{}, bad, 1), DomainError);

    DGPParams bad_rho;
    bad_rho.persistence = 1.0;
    CHECK_THROWS_AS(generate_panel(PanelSpec{}, bad_rho, 1), DomainError);

    PartyYearPanel panel = generate_panel(small_spec(), DGPParams{}, 1);
    ContextParams ctx;
    ctx.variance_window = 1;
    CHECK_THROWS_AS(generate_context(panel, ctx, 1), DomainError);

    CHECK_THROWS_AS(generate_expert_table(panel, 0, 1.0, 1), DomainError);
}

TEST_CASE("measurement feedback biases OLS but spares the lagged instrument") {
    PanelSpec spec;
    DGPParams params;
    params.model = BlurrinessModel::Centrism;
    params.simultaneity = 0.8;
    PartyYearPanel panel = generate_panel(spec, params, 3);
    panel.add_centrism_column("position_economic", "centrism_economic", CentrismMode::Midpoint);
    panel.build_lags({"centrism_economic"});

    DesignSpec ols;
    ols.outcome = "blurriness_economic";
    ols.regressors = {Term::column("centrism_economic")};
    ols.fixed_effects.country_year = true;
    const FitResult fit = econ::fit_ols_clustered(panel, ols);
    // The feedback loads blurriness shocks into measured centrism: OLS is
    // biased upward well beyond its standard error.
    CHECK(fit.coefficient("centrism_economic") - params.alpha1 >
          3.0 * fit.std_error("centrism_economic"));

    DesignSpec iv = ols;
    iv.instruments["centrism_economic"] = {"centrism_economic_lag"};
    const FitResult fit_iv = econ::fit_2sls(panel, iv);
    CHECK(std::abs(fit_iv.coefficient("centrism_economic") - params.alpha1) <
          3.0 * fit_iv.std_error("centrism_economic"));
    CHECK(*fit_iv.first_stage_f > 10.0);
}
