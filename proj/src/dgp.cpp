#include "ambilab/dgp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "ambilab/csv.hpp"
#include "ambilab/rng.hpp"

namespace ambilab::dgp {

namespace {

double clamp_scale(double v) { return std::clamp(v, 0.0, 10.0); }

std::string country_name(int i) {
    std::string s = "C";
    if (i + 1 < 10) s += '0';
    return s + std::to_string(i + 1);
}

std::string party_name(int i) { return "P" + std::to_string(i + 1); }

} // namespace

PartyYearPanel generate_panel(const PanelSpec& spec, const DGPParams& params,
                              std::uint64_t seed) {
    if (spec.n_countries < 1 || spec.n_waves < 1 || spec.parties_per_country < 1) {
        throw DomainError("panel spec counts must all be >= 1");
    }
    if (spec.dimensions.empty()) throw DomainError("panel spec needs at least one dimension");
    if (params.sd_country_year < 0 || params.sd_party < 0 || params.sd_noise < 0) {
        throw DomainError("DGP standard deviations must be nonnegative");
    }
    if (params.persistence < 0.0 || params.persistence >= 1.0) {
        throw DomainError("persistence must lie in [0, 1)");
    }

    CounterRng positions_rng(seed, streams::kPanelPositions);
    CounterRng effects_rng(seed, streams::kPanelEffects);
    CounterRng noise_rng(seed, streams::kPanelNoise);

    PartyYearPanel panel;
    const double rho = params.persistence;
    const double innovation_sd = params.position_sd * std::sqrt(1.0 - rho * rho);

    for (int c = 0; c < spec.n_countries; ++c) {
        const std::string country = country_name(c);

        // Country-year effects per dimension.
        std::map<std::pair<int, std::string>, double> cy_effect;
        for (int w = 0; w < spec.n_waves; ++w) {
            for (const std::string& dim : spec.dimensions) {
                cy_effect[{w, dim}] = effects_rng.next_normal(0.0, params.sd_country_year);
            }
        }

        for (int p = 0; p < spec.parties_per_country; ++p) {
            const std::string party = party_name(p);

            std::map<std::string, double> party_effect;
            for (const std::string& dim : spec.dimensions) {
                party_effect[dim] = effects_rng.next_normal(0.0, params.sd_party);
            }

            // Latent positions follow a stationary AR(1) across waves; the
            // stored position is clamped to the scale.
            std::map<std::string, double> latent;
            for (int w = 0; w < spec.n_waves; ++w) {
                const int year = spec.first_wave_year + w * spec.wave_step;
                const int row = panel.add_row(country, party, year);
                for (const std::string& dim : spec.dimensions) {
                    double pos;
                    if (w == 0) {
                        pos = positions_rng.next_normal(params.position_mean, params.position_sd);
                    } else {
                        pos = params.position_mean + rho * (latent[dim] - params.position_mean) +
                              positions_rng.next_normal(0.0, innovation_sd);
                    }
                    latent[dim] = pos;
                    const double truth = clamp_scale(pos);

                    const double noise = noise_rng.next_normal(0.0, params.sd_noise);
                    double blur;
                    if (params.model == BlurrinessModel::Quadratic) {
                        blur = params.beta0 + params.beta1 * truth + params.beta2 * truth * truth;
                    } else {
                        blur = params.alpha0 +
                               params.alpha1 * (5.0 - std::abs(5.0 - truth));
                    }
                    blur += cy_effect[{w, dim}] + party_effect[dim] + noise;

                    double observed = truth;
                    if (params.simultaneity > 0.0) {
                        // Blurriness shocks drag the measured position toward
                        // the midpoint, contaminating measured centrism.
                        const double toward = truth < 5.0 ? 1.0 : -1.0;
                        observed = clamp_scale(truth + params.simultaneity * noise * toward);
                    }

                    panel.set(row, "position_" + dim, observed);
                    panel.set(row, "blurriness_" + dim, clamp_scale(blur));
                }
            }
        }
    }
    return panel;
}

ingest::ExpertTable generate_expert_table(const PartyYearPanel& panel, int experts_per_party,
                                          double expert_sd, std::uint64_t seed) {
    if (experts_per_party < 1) throw DomainError("experts_per_party must be >= 1");
    if (expert_sd < 0.0) throw DomainError("expert_sd must be nonnegative");

    // Dimensions are inferred from the panel's position_* columns.
    std::vector<std::string> dims;
    for (const std::string& col : panel.column_names()) {
        if (col.rfind("position_", 0) == 0 && col.find("_lag") == std::string::npos &&
            col.find("_sd") == std::string::npos) {
            dims.push_back(col.substr(9));
        }
    }
    if (dims.empty()) throw DomainError("panel has no position_<dimension> columns");

    CounterRng rng(seed, streams::kExpertNoise);
    ingest::ExpertTable table;
    for (int row = 0; row < panel.n_rows(); ++row) {
        for (const std::string& dim : dims) {
            auto pos = panel.get(row, "position_" + dim);
            if (!pos) continue;
            auto blur = panel.get(row, "blurriness_" + dim);
            for (int e = 0; e < experts_per_party; ++e) {
                ingest::ExpertRow r;
                r.expert_id = "E" + std::to_string(e + 1);
                r.country = panel.country(row);
                r.party_id = panel.party(row);
                r.year = panel.year(row);
                r.dimension = dim;
                r.position = clamp_scale(*pos + rng.next_normal(0.0, expert_sd));
                if (blur) r.blurriness = clamp_scale(*blur + rng.next_normal(0.0, expert_sd));
                table.rows.push_back(std::move(r));
            }
        }
    }
    return table;
}

ContextTable generate_context(PartyYearPanel& panel, const ContextParams& params,
                              std::uint64_t seed) {
    if (params.variance_window < 2) {
        throw DomainError("variance window must be >= 2 years");
    }
    if (params.growth_sd_min <= 0 || params.growth_sd_max < params.growth_sd_min) {
        throw DomainError("growth volatility range must satisfy 0 < min <= max");
    }

    CounterRng rng(seed, streams::kContext);

    std::vector<int> years = panel.waves();
    if (years.empty()) throw DomainError("context generation needs a non-empty panel");
    const int first_year = years.front() - params.variance_window - 1;
    const int last_year = years.back();

    std::vector<std::string> countries;
    for (int row = 0; row < panel.n_rows(); ++row) {
        if (std::find(countries.begin(), countries.end(), panel.country(row)) ==
            countries.end()) {
            countries.push_back(panel.country(row));
        }
    }

    // Per-country growth history with heterogeneous volatility.
    std::map<std::string, std::map<int, double>> growth;
    for (const std::string& country : countries) {
        const double sd = rng.next_uniform(params.growth_sd_min, params.growth_sd_max);
        for (int y = first_year; y <= last_year; ++y) {
            growth[country][y] = rng.next_normal(params.growth_mean, sd);
        }
    }

    auto window_stats = [&](const std::string& country, int year) {
        double sum = 0.0, sumsq = 0.0;
        int crises = 0;
        for (int y = year - params.variance_window; y <= year - 1; ++y) {
            const double g = growth[country][y];
            sum += g;
            sumsq += g * g;
            if (g < 0.0) ++crises;
        }
        const int n = params.variance_window;
        const double mean = sum / n;
        const double var = std::max(0.0, (sumsq - n * mean * mean) / (n - 1));
        return std::make_pair(var, crises);
    };

    ContextTable table;
    std::map<std::pair<std::string, int>, ContextRow> by_cy;
    for (const std::string& country : countries) {
        for (int year : years) {
            ContextRow row;
            row.country = country;
            row.year = year;
            row.gdp_growth = growth[country][year];
            auto [var, crises] = window_stats(country, year);
            row.gdp_growth_var_lag = var;
            row.crisis_count = crises;
            by_cy[{country, year}] = row;
            table.rows.push_back(row);
        }
    }

    // Within-year medians for the dummy variants.
    std::map<int, double> var_median, growth_pair_median;
    for (int year : years) {
        std::vector<double> vars, pairs;
        for (const std::string& country : countries) {
            vars.push_back(by_cy[{country, year}].gdp_growth_var_lag);
            pairs.push_back(0.5 * (growth[country][year] + growth[country][year - 1]));
        }
        auto median = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            const std::size_t n = v.size();
            return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
        };
        var_median[year] = median(vars);
        growth_pair_median[year] = median(pairs);
    }

    // A governing coalition per country-year; the rest are the opposition.
    if (params.government_parties < 1) {
        throw DomainError("government_parties must be >= 1");
    }
    std::map<std::pair<std::string, int>, std::vector<int>> cy_rows;
    for (int row = 0; row < panel.n_rows(); ++row) {
        cy_rows[{panel.country(row), panel.year(row)}].push_back(row);
    }
    std::map<int, char> in_government;
    for (auto& [key, rows] : cy_rows) {
        // Partial Fisher-Yates draw of the coalition without replacement.
        std::vector<int> order(rows.begin(), rows.end());
        const std::size_t coalition =
            std::min<std::size_t>(params.government_parties, order.size());
        for (std::size_t i = 0; i < coalition; ++i) {
            const std::size_t j = i + rng.next_below(order.size() - i);
            std::swap(order[i], order[j]);
        }
        for (int row : rows) in_government[row] = 0;
        for (std::size_t i = 0; i < coalition; ++i) in_government[order[i]] = 1;
    }

    // Centrism columns for every dimension present.
    std::vector<std::string> dims;
    for (const std::string& col : panel.column_names()) {
        if (col.rfind("position_", 0) == 0 && col.find("_lag") == std::string::npos) {
            dims.push_back(col.substr(9));
        }
    }
    for (const std::string& dim : dims) {
        if (!panel.has_column("centrism_" + dim)) {
            panel.add_centrism_column("position_" + dim, "centrism_" + dim,
                                      CentrismMode::Midpoint);
        }
    }

    for (int row = 0; row < panel.n_rows(); ++row) {
        const ContextRow& ctx = by_cy.at({panel.country(row), panel.year(row)});
        const double opposition = in_government[row] ? 0.0 : 1.0;
        panel.set(row, "gdp_growth", ctx.gdp_growth);
        panel.set(row, "gdp_growth_var_lag", ctx.gdp_growth_var_lag);
        panel.set(row, "gdp_growth_var_lag_high",
                  ctx.gdp_growth_var_lag > var_median.at(panel.year(row)) ? 1.0 : 0.0);
        const double pair_growth =
            0.5 * (ctx.gdp_growth + growth[panel.country(row)][panel.year(row) - 1]);
        panel.set(row, "gdp_growth_low",
                  pair_growth < growth_pair_median.at(panel.year(row)) ? 1.0 : 0.0);
        panel.set(row, "crisis_count", static_cast<double>(ctx.crisis_count));
        panel.set(row, "in_government", in_government[row] ? 1.0 : 0.0);
        panel.set(row, "opposition", opposition);

        for (const std::string& dim : dims) {
            const double theta = dim == "economic" ? params.theta_economic
                                : dim == "social"  ? params.theta_social
                                                   : 0.0;
            if (theta == 0.0) continue;
            auto centrism = panel.get(row, "centrism_" + dim);
            auto blur = panel.get(row, "blurriness_" + dim);
            if (!centrism || !blur) continue;
            panel.set(row, "blurriness_" + dim,
                      std::clamp(*blur + theta * *centrism * ctx.gdp_growth_var_lag * opposition,
                                 0.0, 10.0));
        }
    }
    return table;
}

void write_context_csv(std::ostream& os, const ContextTable& table) {
    os << "country,year,gdp_growth,gdp_growth_var_lag,crisis_count\n";
    for (const ContextRow& row : table.rows) {
        os << row.country << ',' << row.year << ',' << csv::format_double(row.gdp_growth) << ','
           << csv::format_double(row.gdp_growth_var_lag) << ',' << row.crisis_count << '\n';
    }
}

} // namespace ambilab::dgp
