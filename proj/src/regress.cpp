#include "ambilab/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "ambilab/csv.hpp"
#include "ambilab/stats.hpp"

namespace ambilab::econ {

namespace {

// Encodes string group keys as dense integer ids over the given rows.
std::vector<int> encode_groups(const PartyYearPanel& panel, const std::vector<int>& rows,
                               const std::string& dimension) {
    std::map<std::string, int> ids;
    std::vector<int> out;
    out.reserve(rows.size());
    for (int row : rows) {
        auto [it, inserted] = ids.emplace(panel.group_key(row, dimension),
                                          static_cast<int>(ids.size()));
        out.push_back(it->second);
    }
    return out;
}

int group_count(const std::vector<int>& groups) {
    return groups.empty() ? 0 : *std::max_element(groups.begin(), groups.end()) + 1;
}

// Union-find for counting connected components of the two-way FE graph.
class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    int find(int x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }

private:
    std::vector<int> parent_;
};

int connected_components(const std::vector<int>& g1, const std::vector<int>& g2) {
    const int n1 = group_count(g1);
    const int n2 = group_count(g2);
    UnionFind uf(n1 + n2);
    for (std::size_t i = 0; i < g1.size(); ++i) uf.unite(g1[i], n1 + g2[i]);
    std::set<int> roots;
    for (int i = 0; i < n1 + n2; ++i) roots.insert(uf.find(i));
    return static_cast<int>(roots.size());
}

void subtract_group_means(Eigen::MatrixXd& m, const std::vector<int>& groups) {
    const int n_groups = group_count(groups);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_groups, m.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_groups);
    for (int i = 0; i < m.rows(); ++i) {
        sums.row(groups[i]) += m.row(i);
        counts[groups[i]] += 1.0;
    }
    for (int g = 0; g < n_groups; ++g) sums.row(g) /= counts[g];
    for (int i = 0; i < m.rows(); ++i) m.row(i) -= sums.row(groups[i]);
}

// Residualizes m on the column span of full group dummies. The dummy matrix
// is rank deficient (shared intercept direction), so only the pivoted QR's
// leading rank columns enter the projection.
void residualize_on_dummies(Eigen::MatrixXd& m, const std::vector<int>& g1,
                            const std::vector<int>& g2) {
    const int n = static_cast<int>(m.rows());
    const int n1 = group_count(g1);
    const int n2 = group_count(g2);
    Eigen::MatrixXd dummies = Eigen::MatrixXd::Zero(n, n1 + n2);
    for (int i = 0; i < n; ++i) {
        dummies(i, g1[i]) = 1.0;
        dummies(i, n1 + g2[i]) = 1.0;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(dummies);
    const int rank = static_cast<int>(qr.rank());
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
    m -= q * (q.transpose() * m);
}

struct Frame {
    std::vector<int> rows;            // panel rows retained
    std::vector<int> cluster_ids;
    std::vector<int> cy_ids;          // valid when fe.country_year
    std::vector<int> party_ids;       // valid when fe.party
    Diagnostics diagnostics;
};

// Complete-case rows for the required columns, singleton FE groups dropped
// iteratively, groups encoded.
Frame build_frame(const PartyYearPanel& panel, const std::vector<std::string>& required,
                  const FixedEffectsSpec& fe, const std::string& cluster) {
    Frame frame;
    for (int row = 0; row < panel.n_rows(); ++row) {
        bool complete = true;
        for (const std::string& col : required) {
            if (!panel.get(row, col)) {
                complete = false;
                break;
            }
        }
        if (complete) frame.rows.push_back(row);
    }
    if (frame.rows.empty()) throw DomainError("no complete observations for the requested design");

    // Iterative singleton removal: dropping a row for one dimension can
    // create new singletons in the other.
    if (fe.any()) {
        bool changed = true;
        while (changed && !frame.rows.empty()) {
            changed = false;
            for (int dim = 0; dim < 2; ++dim) {
                const bool use = dim == 0 ? fe.country_year : fe.party;
                if (!use) continue;
                std::vector<int> ids =
                    encode_groups(panel, frame.rows, dim == 0 ? "country_year" : "party");
                std::vector<int> sizes(group_count(ids), 0);
                for (int g : ids) ++sizes[g];
                std::vector<int> kept;
                kept.reserve(frame.rows.size());
                for (std::size_t i = 0; i < frame.rows.size(); ++i) {
                    if (sizes[ids[i]] > 1) {
                        kept.push_back(frame.rows[i]);
                    } else {
                        ++frame.diagnostics.dropped_singletons;
                        changed = true;
                    }
                }
                frame.rows.swap(kept);
            }
        }
        if (frame.rows.empty()) {
            throw DomainError("all observations lie in singleton fixed-effect groups");
        }
    }

    frame.cluster_ids = encode_groups(panel, frame.rows, cluster);
    if (fe.country_year) {
        frame.cy_ids = encode_groups(panel, frame.rows, "country_year");
        frame.diagnostics.absorbed_country_year = group_count(frame.cy_ids);
    }
    if (fe.party) {
        frame.party_ids = encode_groups(panel, frame.rows, "party");
        frame.diagnostics.absorbed_party = group_count(frame.party_ids);
    }
    if (fe.country_year && fe.party) {
        frame.diagnostics.absorbed_df = frame.diagnostics.absorbed_country_year +
                                        frame.diagnostics.absorbed_party -
                                        connected_components(frame.cy_ids, frame.party_ids);
    } else {
        frame.diagnostics.absorbed_df =
            frame.diagnostics.absorbed_country_year + frame.diagnostics.absorbed_party;
    }
    return frame;
}

// Demeans the matrix in place per the FE spec; returns sweep count.
int demean_frame(Eigen::MatrixXd& m, const Frame& frame, const FixedEffectsSpec& fe,
                 const FitOptions& opts, Diagnostics& diag) {
    if (!fe.any()) return 0;
    if (fe.country_year && fe.party) {
        try {
            return demean_within_groups(m, frame.cy_ids, &frame.party_ids, opts.demean_tol,
                                        opts.demean_max_iter);
        } catch (const ConvergenceError&) {
            if (m.rows() > opts.dummy_fallback_max_rows) throw;
            residualize_on_dummies(m, frame.cy_ids, frame.party_ids);
            diag.used_dummy_fallback = true;
            return opts.demean_max_iter;
        }
    }
    const std::vector<int>& ids = fe.country_year ? frame.cy_ids : frame.party_ids;
    return demean_within_groups(m, ids, nullptr, opts.demean_tol, opts.demean_max_iter);
}

std::vector<std::string> collect_required(const DesignSpec& spec, bool with_instruments) {
    std::vector<std::string> required;
    std::set<std::string> seen;
    auto add = [&](const std::string& c) {
        if (seen.insert(c).second) required.push_back(c);
    };
    add(spec.outcome);
    for (const Term& t : spec.regressors) {
        for (const std::string& f : t.factors) add(f);
    }
    if (with_instruments) {
        for (const auto& [endog, cols] : spec.instruments) {
            for (const std::string& c : cols) add(c);
        }
    }
    return required;
}

Eigen::MatrixXd evaluate_terms(const PartyYearPanel& panel, const std::vector<int>& rows,
                               const std::vector<Term>& terms) {
    Eigen::MatrixXd x(rows.size(), terms.size());
    for (std::size_t j = 0; j < terms.size(); ++j) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            auto v = terms[j].evaluate(panel, rows[i]);
            if (!v) {
                throw DomainError("internal: missing value escaped listwise deletion");
            }
            x(i, j) = *v;
        }
    }
    return x;
}

Eigen::VectorXd evaluate_column(const PartyYearPanel& panel, const std::vector<int>& rows,
                                const std::string& col) {
    Eigen::VectorXd v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) v(i) = *panel.get(rows[i], col);
    return v;
}

void check_rank(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                const std::vector<std::string>& names) {
    const int rank = static_cast<int>(qr.rank());
    const int k = static_cast<int>(names.size());
    if (rank >= k) return;
    const auto& perm = qr.colsPermutation().indices();
    std::string offending;
    for (int j = rank; j < k; ++j) {
        if (!offending.empty()) offending += ", ";
        offending += names[perm[j]];
    }
    throw RankError("collinear design; offending terms: " + offending);
}

// CR1 clustered sandwich around an already-inverted bread matrix.
Eigen::MatrixXd clustered_vcov(const Eigen::MatrixXd& scores_basis, const Eigen::VectorXd& resid,
                               const std::vector<int>& cluster_ids, const Eigen::MatrixXd& bread_inv,
                               int k_total) {
    const int k = static_cast<int>(scores_basis.cols());
    const int n = static_cast<int>(scores_basis.rows());
    const int m = group_count(cluster_ids);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(m, k);
    for (int i = 0; i < n; ++i) {
        sums.row(cluster_ids[i]) += resid(i) * scores_basis.row(i);
    }
    Eigen::MatrixXd meat = sums.transpose() * sums;
    double dof = n - k_total;
    if (dof < 1.0) dof = 1.0;
    const double c = (static_cast<double>(m) / (m - 1.0)) * ((n - 1.0) / dof);
    Eigen::MatrixXd vcov = c * bread_inv * meat * bread_inv;
    return 0.5 * (vcov + vcov.transpose()); // enforce symmetry
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

} // namespace

Term Term::intercept() { return Term{{}, "(intercept)"}; }
Term Term::column(const std::string& col) { return Term{{col}, col}; }
Term Term::square(const std::string& col) { return Term{{col, col}, display_name({col, col})}; }

Term Term::product(const std::vector<std::string>& cols) {
    if (cols.empty()) throw DomainError("product term needs at least one column");
    return Term{cols, display_name(cols)};
}

std::string Term::display_name(const std::vector<std::string>& factors) {
    if (factors.empty()) return "(intercept)";
    std::vector<std::pair<std::string, int>> powers;
    for (const std::string& f : factors) {
        auto it = std::find_if(powers.begin(), powers.end(),
                               [&](const auto& p) { return p.first == f; });
        if (it == powers.end()) powers.emplace_back(f, 1);
        else ++it->second;
    }
    std::string out;
    for (const auto& [col, power] : powers) {
        if (!out.empty()) out += '*';
        out += col;
        if (power > 1) out += "^" + std::to_string(power);
    }
    return out;
}

Term Term::parse(const std::string& text) {
    std::vector<std::string> factors;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('*', start);
        if (end == std::string::npos) end = text.size();
        std::string piece = text.substr(start, end - start);
        int power = 1;
        if (auto caret = piece.find('^'); caret != std::string::npos) {
            try {
                power = csv::parse_int_field(piece.substr(caret + 1));
            } catch (const DomainError&) {
                throw DomainError("bad power in term '" + text + "'");
            }
            piece = piece.substr(0, caret);
        }
        if (piece.empty() || power < 1) throw DomainError("cannot parse term '" + text + "'");
        for (int i = 0; i < power; ++i) factors.push_back(piece);
        if (end == text.size()) break;
        start = end + 1;
    }
    if (factors.empty()) throw DomainError("empty term");
    return Term{factors, display_name(factors)};
}

std::optional<double> Term::evaluate(const PartyYearPanel& panel, int row) const {
    double product = 1.0;
    for (const std::string& f : factors) {
        auto v = panel.get(row, f);
        if (!v) return std::nullopt;
        product *= *v;
    }
    return product;
}

int FitResult::term_index(const std::string& name) const {
    for (std::size_t i = 0; i < term_names.size(); ++i) {
        if (term_names[i] == name) return static_cast<int>(i);
    }
    return -1;
}

double FitResult::coefficient(const std::string& name) const {
    const int i = term_index(name);
    if (i < 0) throw DomainError("no coefficient named '" + name + "'");
    return coefficients(i);
}

double FitResult::std_error(const std::string& name) const {
    const int i = term_index(name);
    if (i < 0) throw DomainError("no coefficient named '" + name + "'");
    return std::sqrt(vcov_clustered(i, i));
}

double FitResult::t_stat(const std::string& name) const {
    return coefficient(name) / std_error(name);
}

double FitResult::p_value(const std::string& name) const {
    return stats::t_test_p_value(t_stat(name), df);
}

int demean_within_groups(Eigen::MatrixXd& m, const std::vector<int>& groups_a,
                         const std::vector<int>* groups_b, double tol, int max_iter) {
    if (static_cast<int>(groups_a.size()) != m.rows()) {
        throw DomainError("group vector length does not match matrix rows");
    }
    if (!groups_b) {
        subtract_group_means(m, groups_a);
        return 1;
    }
    for (int iter = 1; iter <= max_iter; ++iter) {
        Eigen::MatrixXd before = m;
        subtract_group_means(m, groups_a);
        subtract_group_means(m, *groups_b);
        const double change = (m - before).cwiseAbs().maxCoeff();
        if (change < tol) return iter;
    }
    throw ConvergenceError("two-way demeaning did not converge within " +
                           std::to_string(max_iter) + " sweeps");
}

AbsorbedMatrix absorb_fixed_effects(const PartyYearPanel& panel,
                                    const std::vector<std::string>& columns,
                                    const FixedEffectsSpec& fe, const FitOptions& opts) {
    if (!fe.any()) throw DomainError("absorb_fixed_effects requires at least one FE dimension");
    if (columns.empty()) throw DomainError("absorb_fixed_effects requires at least one column");

    Frame frame = build_frame(panel, columns, fe, "party");
    AbsorbedMatrix out;
    out.values.resize(frame.rows.size(), columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out.values.col(j) = evaluate_column(panel, frame.rows, columns[j]);
    }
    Diagnostics diag;
    out.iterations = demean_frame(out.values, frame, fe, opts, diag);
    out.panel_rows = frame.rows;
    return out;
}

FitResult fit_ols_clustered(const PartyYearPanel& panel, const DesignSpec& spec,
                            const FitOptions& opts) {
    if (!spec.instruments.empty()) {
        throw DomainError("fit_ols_clustered does not take instruments; use fit_2sls");
    }
    std::vector<Term> terms = spec.regressors;
    if (!spec.fixed_effects.any()) terms.push_back(Term::intercept());
    if (terms.empty()) throw DomainError("design has no regressors");

    Frame frame = build_frame(panel, collect_required(spec, false), spec.fixed_effects,
                              spec.cluster);
    const int n = static_cast<int>(frame.rows.size());
    const int k = static_cast<int>(terms.size());

    Eigen::MatrixXd data(n, k + 1);
    data.col(0) = evaluate_column(panel, frame.rows, spec.outcome);
    data.rightCols(k) = evaluate_terms(panel, frame.rows, terms);
    frame.diagnostics.demeaning_iterations =
        demean_frame(data, frame, spec.fixed_effects, opts, frame.diagnostics);

    Eigen::VectorXd y = data.col(0);
    Eigen::MatrixXd x = data.rightCols(k);

    std::vector<std::string> names;
    for (const Term& t : terms) names.push_back(t.name);

    if (n < k) throw RankError("fewer observations than coefficients");
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    check_rank(qr, names);
    Eigen::VectorXd beta = qr.solve(y);
    Eigen::VectorXd resid = y - x * beta;

    const int m = group_count(frame.cluster_ids);
    if (m < 2) throw ClusterError("clustered inference requires at least 2 clusters, got " +
                                  std::to_string(m));

    Eigen::MatrixXd xtx_inv = (x.transpose() * x).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    FitResult fit;
    fit.term_names = names;
    fit.coefficients = beta;
    fit.vcov_clustered = clustered_vcov(x, resid, frame.cluster_ids, xtx_inv,
                                        k + frame.diagnostics.absorbed_df);
    fit.n_obs = n;
    fit.n_clusters = m;
    fit.df = m - 1.0;
    fit.diagnostics = frame.diagnostics;
    return fit;
}

FitResult fit_2sls(const PartyYearPanel& panel, const DesignSpec& spec, const FitOptions& opts) {
    if (spec.instruments.empty()) {
        throw DomainError("fit_2sls requires an instrument map");
    }
    std::vector<Term> terms = spec.regressors;
    if (!spec.fixed_effects.any()) terms.push_back(Term::intercept());

    // Split endogenous vs exogenous terms and collect excluded instruments.
    std::vector<int> endog_idx;
    std::vector<std::string> excluded;
    std::set<std::string> excluded_seen;
    for (const auto& [endog_name, cols] : spec.instruments) {
        bool found = false;
        for (std::size_t j = 0; j < terms.size(); ++j) {
            if (terms[j].name == endog_name) {
                endog_idx.push_back(static_cast<int>(j));
                found = true;
                break;
            }
        }
        if (!found) {
            throw DomainError("instrumented term '" + endog_name + "' is not a regressor");
        }
        for (const std::string& c : cols) {
            if (excluded_seen.insert(c).second) excluded.push_back(c);
        }
    }
    if (excluded.size() < endog_idx.size()) {
        throw DomainError("order condition fails: " + std::to_string(excluded.size()) +
                          " instruments for " + std::to_string(endog_idx.size()) +
                          " endogenous terms");
    }

    Frame frame =
        build_frame(panel, collect_required(spec, true), spec.fixed_effects, spec.cluster);
    const int n = static_cast<int>(frame.rows.size());
    const int k = static_cast<int>(terms.size());
    const int q = static_cast<int>(excluded.size());

    // Assemble [y | X | excluded Z] and demean everything together.
    Eigen::MatrixXd data(n, 1 + k + q);
    data.col(0) = evaluate_column(panel, frame.rows, spec.outcome);
    data.block(0, 1, n, k) = evaluate_terms(panel, frame.rows, terms);
    for (int j = 0; j < q; ++j) {
        data.col(1 + k + j) = evaluate_column(panel, frame.rows, excluded[j]);
    }
    frame.diagnostics.demeaning_iterations =
        demean_frame(data, frame, spec.fixed_effects, opts, frame.diagnostics);

    Eigen::VectorXd y = data.col(0);
    Eigen::MatrixXd x = data.block(0, 1, n, k);
    Eigen::MatrixXd z_excl = data.rightCols(q);

    const int m = group_count(frame.cluster_ids);
    if (m < 2) throw ClusterError("clustered inference requires at least 2 clusters, got " +
                                  std::to_string(m));
    const int k_total = k + frame.diagnostics.absorbed_df;

    // Full instrument matrix: excluded instruments plus exogenous regressors.
    std::vector<int> exog_idx;
    for (int j = 0; j < k; ++j) {
        if (std::find(endog_idx.begin(), endog_idx.end(), j) == endog_idx.end()) {
            exog_idx.push_back(j);
        }
    }
    Eigen::MatrixXd z(n, q + exog_idx.size());
    z.leftCols(q) = z_excl;
    for (std::size_t j = 0; j < exog_idx.size(); ++j) z.col(q + j) = x.col(exog_idx[j]);

    std::vector<std::string> z_names = excluded;
    for (int j : exog_idx) z_names.push_back(terms[j].name);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> z_qr(z);
    check_rank(z_qr, z_names);
    const int zc = static_cast<int>(z.cols());
    Eigen::MatrixXd ztz_inv = (z.transpose() * z).ldlt().solve(Eigen::MatrixXd::Identity(zc, zc));

    // First stage per endogenous term; clustered F on the excluded block.
    double min_f = std::numeric_limits<double>::infinity();
    Eigen::MatrixXd x_hat = x;
    for (int j : endog_idx) {
        Eigen::VectorXd gamma = z_qr.solve(x.col(j));
        Eigen::VectorXd fs_resid = x.col(j) - z * gamma;
        x_hat.col(j) = z * gamma;

        Eigen::MatrixXd fs_vcov = clustered_vcov(z, fs_resid, frame.cluster_ids, ztz_inv,
                                                 zc + frame.diagnostics.absorbed_df);
        Eigen::VectorXd r = gamma.head(q);
        Eigen::MatrixXd v = fs_vcov.topLeftCorner(q, q);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
        double f;
        if (!lu.isInvertible()) {
            // Degenerate first-stage covariance (e.g. perfect fit); treat as
            // unbounded instrument strength.
            f = std::numeric_limits<double>::infinity();
        } else {
            f = (r.transpose() * lu.solve(r)).value() / q;
        }
        min_f = std::min(min_f, f);
    }

    std::vector<std::string> names;
    for (const Term& t : terms) names.push_back(t.name);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> xh_qr(x_hat);
    check_rank(xh_qr, names);
    Eigen::VectorXd beta = xh_qr.solve(y);
    Eigen::VectorXd resid = y - x * beta; // residuals use the actual regressors

    Eigen::MatrixXd bread_inv =
        (x_hat.transpose() * x_hat).ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    FitResult fit;
    fit.term_names = names;
    fit.coefficients = beta;
    fit.vcov_clustered = clustered_vcov(x_hat, resid, frame.cluster_ids, bread_inv, k_total);
    fit.n_obs = n;
    fit.n_clusters = m;
    fit.df = m - 1.0;
    fit.first_stage_f = min_f;
    fit.diagnostics = frame.diagnostics;
    if (min_f < opts.weak_instrument_f) {
        fit.warnings.push_back("weak instruments: first-stage F = " + format_number(min_f) +
                               " < " + format_number(opts.weak_instrument_f));
    }
    return fit;
}

FitResult fit_interaction(const PartyYearPanel& panel, const DesignSpec& base_spec,
                          const std::vector<Term>& interaction_terms, const FitOptions& opts) {
    DesignSpec spec = base_spec;
    for (const Term& t : interaction_terms) spec.regressors.push_back(t);
    return fit_ols_clustered(panel, spec, opts);
}

std::pair<double, double> wald_joint_test(const FitResult& fit,
                                          const std::vector<std::string>& terms) {
    if (terms.empty()) throw DomainError("wald_joint_test needs at least one term");
    Eigen::VectorXd r(terms.size());
    Eigen::MatrixXd v(terms.size(), terms.size());
    std::vector<int> idx;
    for (const std::string& t : terms) {
        const int i = fit.term_index(t);
        if (i < 0) throw DomainError("no coefficient named '" + t + "'");
        idx.push_back(i);
    }
    for (std::size_t a = 0; a < idx.size(); ++a) {
        r(a) = fit.coefficients(idx[a]);
        for (std::size_t b = 0; b < idx.size(); ++b) {
            v(a, b) = fit.vcov_clustered(idx[a], idx[b]);
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
    if (!lu.isInvertible()) {
        throw SingularError("covariance block of the tested terms is numerically singular");
    }
    const double w = (r.transpose() * lu.solve(r)).value();
    return {w, stats::chi_squared_sf(w, static_cast<double>(terms.size()))};
}

double peak_location(const FitResult& fit, const std::string& linear_term,
                     const std::string& quadratic_term) {
    const double b1 = fit.coefficient(linear_term);
    const double b2 = fit.coefficient(quadratic_term);
    if (b2 >= 0.0) {
        throw ShapeError("no interior maximum: quadratic coefficient is " + format_number(b2));
    }
    return -b1 / (2.0 * b2);
}

double partial_correlation(const PartyYearPanel& panel, const std::string& x,
                           const std::string& y, const FixedEffectsSpec& fe,
                           const FitOptions& opts) {
    std::vector<int> rows;
    for (int row = 0; row < panel.n_rows(); ++row) {
        if (panel.get(row, x) && panel.get(row, y)) rows.push_back(row);
    }
    if (rows.size() < 3) throw DomainError("partial correlation needs at least 3 usable rows");

    Eigen::MatrixXd m(rows.size(), 2);
    m.col(0) = evaluate_column(panel, rows, x);
    m.col(1) = evaluate_column(panel, rows, y);

    if (fe.any()) {
        std::vector<int> g1, g2;
        if (fe.country_year) g1 = encode_groups(panel, rows, "country_year");
        if (fe.party) g2 = encode_groups(panel, rows, "party");
        if (fe.country_year && fe.party) {
            demean_within_groups(m, g1, &g2, opts.demean_tol, opts.demean_max_iter);
        } else {
            demean_within_groups(m, fe.country_year ? g1 : g2, nullptr, opts.demean_tol,
                                 opts.demean_max_iter);
        }
    } else {
        m.col(0).array() -= m.col(0).mean();
        m.col(1).array() -= m.col(1).mean();
    }

    const double ssx = m.col(0).squaredNorm();
    const double ssy = m.col(1).squaredNorm();
    if (ssx < 1e-12 || ssy < 1e-12) {
        throw DegenerateError("zero-variance residuals in partial correlation");
    }
    return m.col(0).dot(m.col(1)) / std::sqrt(ssx * ssy);
}

void write_fit_report(std::ostream& os, const FitResult& fit, const std::string& label,
                      std::optional<double> peak) {
    os << "# fit: " << label << '\n';
    os << "term,estimate,se_clustered,t,p\n";
    for (std::size_t i = 0; i < fit.term_names.size(); ++i) {
        const std::string& name = fit.term_names[i];
        os << name << ',' << format_number(fit.coefficients(i)) << ','
           << format_number(fit.std_error(name)) << ',' << format_number(fit.t_stat(name)) << ','
           << format_number(fit.p_value(name)) << '\n';
    }
    os << "n_obs=" << fit.n_obs << '\n';
    os << "n_clusters=" << fit.n_clusters << '\n';
    os << "df=" << format_number(fit.df) << '\n';
    os << "dropped_singletons=" << fit.diagnostics.dropped_singletons << '\n';
    os << "absorbed_country_year=" << fit.diagnostics.absorbed_country_year << '\n';
    os << "absorbed_party=" << fit.diagnostics.absorbed_party << '\n';
    if (fit.first_stage_f) os << "first_stage_F=" << format_number(*fit.first_stage_f) << '\n';
    if (peak) os << "peak=" << format_number(*peak) << '\n';
    for (const std::string& w : fit.warnings) os << "warning=" << w << '\n';
}

} // namespace ambilab::econ
