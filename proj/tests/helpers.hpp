// Test-only helpers: an independent full-dummy OLS oracle and random panel
// builders. The oracle residualizes on explicit dummy matrices via QR, a
// different route than the library's alternating demeaning.
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "ambilab/panel.hpp"
#include "ambilab/regress.hpp"
#include "ambilab/rng.hpp"

namespace testutil {

struct DummyOls {
    Eigen::VectorXd beta;       // coefficients on the terms only
    Eigen::VectorXd residuals;
    Eigen::MatrixXd x_tilde;    // terms residualized on the dummy span
    std::vector<int> rows;
};

// Complete-case rows for the outcome and term factors.
inline std::vector<int> complete_rows(const ambilab::PartyYearPanel& panel,
                                      const std::string& outcome,
                                      const std::vector<ambilab::econ::Term>& terms) {
    std::vector<int> rows;
    for (int r = 0; r < panel.n_rows(); ++r) {
        if (!panel.get(r, outcome)) continue;
        bool ok = true;
        for (const auto& t : terms) {
            if (!t.evaluate(panel, r)) {
                ok = false;
                break;
            }
        }
        if (ok) rows.push_back(r);
    }
    return rows;
}

inline DummyOls full_dummy_ols(const ambilab::PartyYearPanel& panel, const std::string& outcome,
                               const std::vector<ambilab::econ::Term>& terms, bool fe_country_year,
                               bool fe_party) {
    DummyOls out;
    out.rows = complete_rows(panel, outcome, terms);
    const int n = static_cast<int>(out.rows.size());
    const int k = static_cast<int>(terms.size());

    Eigen::VectorXd y(n);
    Eigen::MatrixXd x(n, k);
    for (int i = 0; i < n; ++i) {
        y(i) = *panel.get(out.rows[i], outcome);
        for (int j = 0; j < k; ++j) x(i, j) = *terms[j].evaluate(panel, out.rows[i]);
    }

    std::map<std::string, int> g1, g2;
    for (int i = 0; i < n; ++i) {
        if (fe_country_year) g1.emplace(panel.group_key(out.rows[i], "country_year"),
                                        static_cast<int>(g1.size()));
        if (fe_party) g2.emplace(panel.group_key(out.rows[i], "party"),
                                 static_cast<int>(g2.size()));
    }
    const int d1 = static_cast<int>(g1.size());
    const int d2 = static_cast<int>(g2.size());

    Eigen::MatrixXd dummies = Eigen::MatrixXd::Zero(n, d1 + d2);
    for (int i = 0; i < n; ++i) {
        if (fe_country_year) dummies(i, g1.at(panel.group_key(out.rows[i], "country_year"))) = 1.0;
        if (fe_party) dummies(i, d1 + g2.at(panel.group_key(out.rows[i], "party"))) = 1.0;
    }

    if (d1 + d2 > 0) {
        // The stacked dummies share the intercept direction, so project on
        // the leading rank columns of a pivoted QR only.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dummies);
        const int rank = static_cast<int>(qr.rank());
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
        x -= q * (q.transpose() * x);
        y -= q * (q.transpose() * y);
    }

    out.beta = (x.transpose() * x).ldlt().solve(x.transpose() * y);
    out.residuals = y - x * out.beta;
    out.x_tilde = x;
    return out;
}

// Random balanced panel with position/outcome columns for oracle checks.
inline ambilab::PartyYearPanel random_panel(int countries, int parties, int waves,
                                            std::uint64_t seed) {
    ambilab::CounterRng rng(seed, 99);
    ambilab::PartyYearPanel panel;
    for (int c = 0; c < countries; ++c) {
        for (int p = 0; p < parties; ++p) {
            const double party_effect = rng.next_normal(0.0, 1.0);
            for (int w = 0; w < waves; ++w) {
                const int row = panel.add_row("C" + std::to_string(c), "P" + std::to_string(p),
                                              2015 + 2 * w);
                const double x1 = rng.next_normal(5.0, 2.0);
                const double x2 = rng.next_normal(0.0, 1.0);
                const double cy_effect = 0.7 * c + 0.3 * w;
                panel.set(row, "x1", x1);
                panel.set(row, "x2", x2);
                panel.set(row, "y",
                          1.0 + 0.5 * x1 - 0.8 * x2 + cy_effect + party_effect +
                              rng.next_normal(0.0, 0.5));
            }
        }
    }
    return panel;
}

} // namespace testutil
