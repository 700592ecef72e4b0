#include "ambilab/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace ambilab::game {

namespace {

// Comparison tolerance for the floating path (fractional risk exponents only).
constexpr double kTieTolerance = 1e-12;

// A party's election-time evaluation: either a fixed score (ambiguous lottery)
// or one of finitely many equally likely committed realizations.
struct Evaluation {
    bool exact;
    std::vector<Rational> exact_scores;   // exact path
    std::vector<double> approx_scores;    // floating path
    std::size_t size() const { return exact ? exact_scores.size() : approx_scores.size(); }
};

Evaluation committed_scores(const DeviationSet& set, const VoterUtility& u) {
    Evaluation ev;
    ev.exact = u.exact();
    for (const Rational& d : set.values()) {
        if (ev.exact) {
            ev.exact_scores.push_back(u.value(d));
        } else {
            ev.approx_scores.push_back(u.value_approx(d));
        }
    }
    return ev;
}

Evaluation ambiguous_score(const DeviationSet& set, const VoterUtility& u) {
    Evaluation ev;
    ev.exact = u.exact();
    if (ev.exact) {
        ev.exact_scores.push_back(lottery_expected_utility(set, u));
    } else {
        ev.approx_scores.push_back(lottery_expected_utility_approx(set, u));
    }
    return ev;
}

// -1: b wins, 0: tie, +1: a wins.
int compare_approx(double a, double b) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    if (std::abs(a - b) <= kTieTolerance * scale) return 0;
    return a > b ? 1 : -1;
}

} // namespace

DeviationSet::DeviationSet(std::vector<Rational> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("deviation set must be non-empty");
    std::sort(values_.begin(), values_.end());
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] == values_[i - 1]) {
            throw DomainError("deviation set has duplicate value " + values_[i].str());
        }
    }
}

bool DeviationSet::contains(const Rational& v) const {
    return std::binary_search(values_.begin(), values_.end(), v);
}

bool DeviationSet::subset_of(const DeviationSet& other) const {
    return std::all_of(values_.begin(), values_.end(),
                       [&](const Rational& v) { return other.contains(v); });
}

VoterUtility::VoterUtility(Rational risk_exponent) : exponent_(risk_exponent) {
    if (exponent_ < Rational(1)) {
        throw DomainError("risk exponent must be >= 1, got " + exponent_.str());
    }
}

Rational VoterUtility::value(const Rational& deviation) const {
    if (!exact()) {
        throw DomainError("exact utility requires an integer risk exponent, got " +
                          exponent_.str());
    }
    return -deviation.abs().pow(static_cast<unsigned>(exponent_.num()));
}

double VoterUtility::value_approx(const Rational& deviation) const {
    return -std::pow(std::abs(deviation.to_double()), exponent_.to_double());
}

const char* to_string(MetaAction a) {
    return a == MetaAction::Ambiguous ? "Ambiguous" : "Commit";
}

std::string ActionProfile::label() const {
    std::string s;
    s += centrist == MetaAction::Ambiguous ? 'A' : 'C';
    s += extremist == MetaAction::Ambiguous ? 'A' : 'C';
    return s;
}

std::array<ActionProfile, 4> all_profiles() {
    return {ActionProfile{MetaAction::Ambiguous, MetaAction::Ambiguous},
            ActionProfile{MetaAction::Ambiguous, MetaAction::Commit},
            ActionProfile{MetaAction::Commit, MetaAction::Ambiguous},
            ActionProfile{MetaAction::Commit, MetaAction::Commit}};
}

AmbiguityGame::AmbiguityGame(DeviationSet commit_c, DeviationSet commit_e,
                             DeviationSet ambiguous_c, DeviationSet ambiguous_e,
                             VoterUtility utility)
    : commit_c_(std::move(commit_c)),
      commit_e_(std::move(commit_e)),
      ambiguous_c_(std::move(ambiguous_c)),
      ambiguous_e_(std::move(ambiguous_e)),
      utility_(utility) {
    if (!commit_c_.subset_of(ambiguous_c_)) {
        throw DomainError("centrist commit set must be a subset of its ambiguous set");
    }
    if (!commit_e_.subset_of(ambiguous_e_)) {
        throw DomainError("extremist commit set must be a subset of its ambiguous set");
    }
}

AmbiguityGame canonical_game(const Rational& k, const Rational& l) {
    if (!(Rational(1) < k)) {
        throw DomainError("canonical game requires k > 1, got k = " + k.str());
    }
    if (!(k < l)) {
        throw DomainError("canonical game requires k < l, got k = " + k.str() +
                          ", l = " + l.str());
    }
    DeviationSet narrow({-k, Rational(-1), Rational(0), Rational(1), k});
    DeviationSet wide({-l, -k, Rational(-1), Rational(0), Rational(1), k, l});
    return AmbiguityGame(narrow, narrow, narrow, wide, VoterUtility(Rational(2)));
}

Rational lottery_expected_utility(const DeviationSet& set, const VoterUtility& utility) {
    // Accumulate in 128 bits: intermediate sums such as -(2l^2 + 2k^2 + 2)
    // can exceed int64 even when the final mean fits after reduction.
    __int128 num = 0;
    __int128 den = 1;
    for (const Rational& s : set.values()) {
        const Rational u = utility.value(s);
        num = num * u.den() + static_cast<__int128>(u.num()) * den;
        den *= u.den();
        const __int128 g = detail::gcd128(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    den *= static_cast<std::int64_t>(set.size());
    return detail::make_rational_128(num, den);
}

double lottery_expected_utility_approx(const DeviationSet& set, const VoterUtility& utility) {
    double sum = 0.0;
    for (const Rational& s : set.values()) sum += utility.value_approx(s);
    return sum / static_cast<double>(set.size());
}

std::pair<Rational, Rational> contest_win_probabilities(const AmbiguityGame& game,
                                                        const ActionProfile& profile) {
    const VoterUtility& u = game.utility();
    Evaluation ev_c = profile.centrist == MetaAction::Commit
                          ? committed_scores(game.commit_set_c(), u)
                          : ambiguous_score(game.ambiguous_set_c(), u);
    Evaluation ev_e = profile.extremist == MetaAction::Commit
                          ? committed_scores(game.commit_set_e(), u)
                          : ambiguous_score(game.ambiguous_set_e(), u);

    // Count over all joint realizations; ties contribute half a win each.
    std::int64_t twice_wins_c = 0;
    for (std::size_t i = 0; i < ev_c.size(); ++i) {
        for (std::size_t j = 0; j < ev_e.size(); ++j) {
            int cmp;
            if (ev_c.exact) {
                const Rational& a = ev_c.exact_scores[i];
                const Rational& b = ev_e.exact_scores[j];
                cmp = a == b ? 0 : (a > b ? 1 : -1);
            } else {
                cmp = compare_approx(ev_c.approx_scores[i], ev_e.approx_scores[j]);
            }
            twice_wins_c += cmp + 1; // +2 win, +1 tie, +0 loss
        }
    }
    const auto total = static_cast<std::int64_t>(ev_c.size() * ev_e.size());
    Rational p_c(twice_wins_c, 2 * total);
    return {p_c, Rational(1) - p_c};
}

void PayoffMatrix::set(const ActionProfile& profile, Rational p_centrist, Rational p_extremist) {
    if (p_centrist + p_extremist != Rational(1)) {
        throw DomainError("win probabilities must sum to 1");
    }
    if (p_centrist < Rational(0) || p_centrist > Rational(1)) {
        throw DomainError("win probability outside [0, 1]");
    }
    entries_[index(profile)] = {p_centrist, p_extremist};
    filled_[index(profile)] = true;
}

const std::pair<Rational, Rational>& PayoffMatrix::at(const ActionProfile& profile) const {
    if (!filled_[index(profile)]) {
        throw DomainError("payoff matrix entry " + profile.label() + " not set");
    }
    return entries_[index(profile)];
}

std::size_t PayoffMatrix::index(const ActionProfile& p) {
    return (p.centrist == MetaAction::Commit ? 2u : 0u) +
           (p.extremist == MetaAction::Commit ? 1u : 0u);
}

PayoffMatrix payoff_matrix(const AmbiguityGame& game) {
    PayoffMatrix m;
    for (const ActionProfile& profile : all_profiles()) {
        auto [pc, pe] = contest_win_probabilities(game, profile);
        m.set(profile, pc, pe);
    }
    return m;
}

std::vector<ActionProfile> pure_nash_equilibria(const PayoffMatrix& matrix) {
    std::vector<ActionProfile> result;
    for (const ActionProfile& profile : all_profiles()) {
        const MetaAction other_c =
            profile.centrist == MetaAction::Ambiguous ? MetaAction::Commit : MetaAction::Ambiguous;
        const MetaAction other_e =
            profile.extremist == MetaAction::Ambiguous ? MetaAction::Commit : MetaAction::Ambiguous;
        const bool c_deviates =
            matrix.centrist_prob({other_c, profile.extremist}) > matrix.centrist_prob(profile);
        const bool e_deviates =
            matrix.extremist_prob({profile.centrist, other_e}) > matrix.extremist_prob(profile);
        if (!c_deviates && !e_deviates) result.push_back(profile);
    }
    return result;
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::CentristAmbiguity: return "CentristAmbiguity";
        case Regime::FullCommitment: return "FullCommitment";
        case Regime::Boundary: return "Boundary";
    }
    return "?";
}

Regime regime_from_k_squared(const Rational& k_squared, const Rational& boundary_eps) {
    const Rational gap = k_squared - Rational(3, 2);
    if (gap.abs() <= boundary_eps) return Regime::Boundary;
    return gap < Rational(0) ? Regime::CentristAmbiguity : Regime::FullCommitment;
}

Regime analytic_regime(const Rational& k, const Rational& l, const Rational& boundary_eps) {
    if (!(Rational(1) < k && k < l)) {
        throw DomainError("analytic regime requires 1 < k < l, got k = " + k.str() +
                          ", l = " + l.str());
    }
    return regime_from_k_squared(k * k, boundary_eps);
}

EquilibriumReport solve_canonical(const Rational& k, const Rational& l,
                                  const Rational& boundary_eps) {
    EquilibriumReport report;
    report.k = k;
    report.l = l;
    AmbiguityGame game = canonical_game(k, l);
    report.payoffs = payoff_matrix(game);
    report.pure_equilibria = pure_nash_equilibria(report.payoffs);
    report.regime = analytic_regime(k, l, boundary_eps);
    report.centrist_threshold = k * k - Rational(3, 2);
    report.extremist_threshold = k * k + l * l - Rational(5, 2);
    return report;
}

} // namespace ambilab::game
