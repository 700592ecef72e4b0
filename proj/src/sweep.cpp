#include "ambilab/sweep.hpp"

#include <cmath>
#include <ostream>

namespace ambilab::game {

std::vector<Rational> k_range(const Rational& first, const Rational& last, const Rational& step) {
    if (step <= Rational(0)) throw DomainError("k range step must be positive");
    std::vector<Rational> out;
    for (Rational k = first; k <= last; k += step) out.push_back(k);
    return out;
}

std::vector<PhaseRecord> sweep_grid(const SweepGrid& grid) {
    if (grid.k_values.empty()) throw DomainError("sweep grid has no k values");
    for (std::size_t i = 1; i < grid.k_values.size(); ++i) {
        if (!(grid.k_values[i - 1] < grid.k_values[i])) {
            throw DomainError("sweep k values must be strictly increasing");
        }
    }

    std::vector<std::pair<Rational, Rational>> cells;
    if (const auto* offset = std::get_if<OffsetRule>(&grid.l_rule)) {
        if (offset->delta <= Rational(0)) throw DomainError("l offset must be positive");
        for (const Rational& k : grid.k_values) cells.emplace_back(k, k + offset->delta);
    } else {
        const auto& rule = std::get<ExplicitRule>(grid.l_rule);
        if (rule.l_values.empty()) throw DomainError("sweep grid has no l values");
        for (const Rational& k : grid.k_values) {
            for (const Rational& l : rule.l_values) cells.emplace_back(k, l);
        }
    }

    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& [k, l] = cells[i];
        if (!(Rational(1) < k && k < l)) {
            throw DomainError("invalid sweep pair at cell " + std::to_string(i) + ": k = " +
                              k.str() + ", l = " + l.str() + " (need 1 < k < l)");
        }
    }

    std::vector<PhaseRecord> records;
    records.reserve(cells.size());
    for (const auto& [k, l] : cells) {
        EquilibriumReport r = solve_canonical(k, l, grid.boundary_eps);
        records.push_back({k, l, r.regime, r.pure_equilibria, r.payoffs});
    }
    return records;
}

void write_phase_table(std::ostream& os, const std::vector<PhaseRecord>& records) {
    os << "k,l,regime,eq_profiles,pC_AA,pC_AC,pC_CA,pC_CC\n";
    for (const PhaseRecord& rec : records) {
        std::string profiles;
        for (const ActionProfile& p : rec.equilibria) {
            if (!profiles.empty()) profiles += '|';
            profiles += p.label();
        }
        if (profiles.empty()) profiles = "none";
        os << rec.k.str() << ',' << rec.l.str() << ',' << to_string(rec.regime) << ','
           << profiles;
        for (const ActionProfile& p : all_profiles()) {
            os << ',' << rec.payoffs.centrist_prob(p).str();
        }
        os << '\n';
    }
}

McResult monte_carlo_check(const AmbiguityGame& game, const ActionProfile& profile,
                           std::uint64_t n_samples, std::uint64_t seed) {
    if (n_samples == 0) throw DomainError("monte_carlo_check requires n_samples >= 1");

    const VoterUtility& u = game.utility();
    const bool exact = u.exact();

    // Pre-evaluate every score each party can present to the voter.
    auto committed = [&](const DeviationSet& set) {
        std::vector<Rational> ex;
        std::vector<double> ap;
        for (const Rational& d : set.values()) {
            if (exact) ex.push_back(u.value(d));
            else ap.push_back(u.value_approx(d));
        }
        return std::make_pair(ex, ap);
    };

    const bool c_commits = profile.centrist == MetaAction::Commit;
    const bool e_commits = profile.extremist == MetaAction::Commit;

    auto [c_ex, c_ap] = c_commits ? committed(game.commit_set_c())
                                  : std::make_pair(std::vector<Rational>{}, std::vector<double>{});
    auto [e_ex, e_ap] = e_commits ? committed(game.commit_set_e())
                                  : std::make_pair(std::vector<Rational>{}, std::vector<double>{});
    Rational c_lottery_ex(0), e_lottery_ex(0);
    double c_lottery_ap = 0, e_lottery_ap = 0;
    if (!c_commits) {
        if (exact) c_lottery_ex = lottery_expected_utility(game.ambiguous_set_c(), u);
        else c_lottery_ap = lottery_expected_utility_approx(game.ambiguous_set_c(), u);
    }
    if (!e_commits) {
        if (exact) e_lottery_ex = lottery_expected_utility(game.ambiguous_set_e(), u);
        else e_lottery_ap = lottery_expected_utility_approx(game.ambiguous_set_e(), u);
    }

    CounterRng rng(seed, streams::kMonteCarlo);
    const std::uint64_t n_c = game.commit_set_c().size();
    const std::uint64_t n_e = game.commit_set_e().size();

    std::uint64_t wins_c = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
        int cmp;
        if (exact) {
            const Rational& sc = c_commits ? c_ex[rng.next_below(n_c)] : c_lottery_ex;
            const Rational& se = e_commits ? e_ex[rng.next_below(n_e)] : e_lottery_ex;
            cmp = sc == se ? 0 : (sc > se ? 1 : -1);
        } else {
            const double sc = c_commits ? c_ap[rng.next_below(n_c)] : c_lottery_ap;
            const double se = e_commits ? e_ap[rng.next_below(n_e)] : e_lottery_ap;
            const double scale = std::max({1.0, std::abs(sc), std::abs(se)});
            cmp = std::abs(sc - se) <= 1e-12 * scale ? 0 : (sc > se ? 1 : -1);
        }
        if (cmp > 0 || (cmp == 0 && rng.next_bool())) ++wins_c;
    }

    McResult out;
    out.n_samples = n_samples;
    out.frequency = static_cast<double>(wins_c) / static_cast<double>(n_samples);
    out.std_error =
        std::sqrt(out.frequency * (1.0 - out.frequency) / static_cast<double>(n_samples));
    return out;
}

} // namespace ambilab::game
