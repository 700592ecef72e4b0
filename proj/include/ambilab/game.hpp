#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ambilab/rational.hpp"

namespace ambilab::game {

/// Finite ordered set of realized policy deviations from the median voter's
/// ideal point, in policy-scale units. Values are stored sorted ascending;
/// duplicates are rejected.
class DeviationSet {
public:
    explicit DeviationSet(std::vector<Rational> values);

    const std::vector<Rational>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }

    bool contains(const Rational& v) const;
    bool subset_of(const DeviationSet& other) const;

private:
    std::vector<Rational> values_;
};

/// Median-voter preferences: utility of a deviation x is -|x|^risk_exponent.
/// The canonical exponent is 2 (quadratic loss). Exponents must be >= 1;
/// integer exponents evaluate exactly in rational arithmetic, fractional
/// exponents fall back to doubles with a 1e-12 comparison tolerance.
class VoterUtility {
public:
    explicit VoterUtility(Rational risk_exponent = Rational(2));

    const Rational& risk_exponent() const { return exponent_; }
    bool exact() const { return exponent_.is_integer(); }

    /// Exact utility -|x|^n; requires an integer exponent.
    Rational value(const Rational& deviation) const;

    /// Floating utility -|x|^e; any exponent >= 1.
    double value_approx(const Rational& deviation) const;

private:
    Rational exponent_;
};

/// Meta-level action of a party: commit to a concrete policy, or stay
/// ambiguous over a (possibly larger) set.
enum class MetaAction { Ambiguous, Commit };

const char* to_string(MetaAction a);

/// Joint action profile; centrist listed first.
struct ActionProfile {
    MetaAction centrist;
    MetaAction extremist;

    friend bool operator==(const ActionProfile&, const ActionProfile&) = default;

    /// Compact two-letter label, e.g. "AC" = centrist ambiguous, extremist committed.
    std::string label() const;
};

inline constexpr std::array<MetaAction, 2> kMetaActions = {MetaAction::Ambiguous,
                                                           MetaAction::Commit};

/// All four profiles in fixed (AA, AC, CA, CC) order.
std::array<ActionProfile, 4> all_profiles();

/// Two-party contest between a centrist (C) and an extremist (E), each
/// choosing to commit or to stay ambiguous, competing to maximize the
/// probability of winning a risk-averse median voter.
///
/// Evaluation semantics (fixed across the module):
///  - A committing party's realized deviation is drawn uniformly from its
///    commit set; the voter observes it and scores it at -|d|^exponent.
///  - An ambiguous party is scored ex ante at the expected utility of the
///    uniform lottery over its ambiguous set.
///  - The voter elects the party with the higher score; exact ties split
///    the win 1/2-1/2.
/// Win probabilities are computed by exact enumeration over all joint
/// realizations of the committing parties, so every probability is an exact
/// integer ratio.
class AmbiguityGame {
public:
    AmbiguityGame(DeviationSet commit_c, DeviationSet commit_e, DeviationSet ambiguous_c,
                  DeviationSet ambiguous_e, VoterUtility utility = VoterUtility());

    const DeviationSet& commit_set_c() const { return commit_c_; }
    const DeviationSet& commit_set_e() const { return commit_e_; }
    const DeviationSet& ambiguous_set_c() const { return ambiguous_c_; }
    const DeviationSet& ambiguous_set_e() const { return ambiguous_e_; }
    const VoterUtility& utility() const { return utility_; }

    /// True when the centrist's ambiguous set is strictly smaller than the
    /// extremist's. Reported, not enforced, so exploratory games may break it.
    bool centrist_less_ambiguous() const {
        return ambiguous_c_.size() < ambiguous_e_.size();
    }

private:
    DeviationSet commit_c_;
    DeviationSet commit_e_;
    DeviationSet ambiguous_c_;
    DeviationSet ambiguous_e_;
    VoterUtility utility_;
};

/// The canonical parameterization: commit sets and the centrist ambiguous set
/// are {-k,-1,0,1,k}; the extremist ambiguous set is {-l,-k,-1,0,1,k,l};
/// quadratic voter utility. Requires 1 < k < l.
AmbiguityGame canonical_game(const Rational& k, const Rational& l);

/// Expected utility of the uniform lottery over `set`: (1/|set|) * sum -|s|^n.
/// Exact; requires an integer risk exponent.
Rational lottery_expected_utility(const DeviationSet& set, const VoterUtility& utility);

/// Floating variant for fractional exponents.
double lottery_expected_utility_approx(const DeviationSet& set, const VoterUtility& utility);

/// Win probabilities (centrist, extremist) for one profile; sums to exactly 1.
std::pair<Rational, Rational> contest_win_probabilities(const AmbiguityGame& game,
                                                        const ActionProfile& profile);

/// 2x2 matrix of win-probability pairs, one per profile.
class PayoffMatrix {
public:
    PayoffMatrix() = default;

    void set(const ActionProfile& profile, Rational p_centrist, Rational p_extremist);
    const std::pair<Rational, Rational>& at(const ActionProfile& profile) const;

    Rational centrist_prob(const ActionProfile& p) const { return at(p).first; }
    Rational extremist_prob(const ActionProfile& p) const { return at(p).second; }

private:
    static std::size_t index(const ActionProfile& p);
    std::array<std::pair<Rational, Rational>, 4> entries_{};
    std::array<bool, 4> filled_{};
};

/// Evaluates all four profiles exactly.
PayoffMatrix payoff_matrix(const AmbiguityGame& game);

/// Exact best-response enumeration over the 2x2 meta-game. A profile is a
/// pure Nash equilibrium iff neither party strictly gains from a unilateral
/// deviation; indifference does not exclude a profile.
std::vector<ActionProfile> pure_nash_equilibria(const PayoffMatrix& matrix);

/// Equilibrium pattern of the canonical game.
enum class Regime { CentristAmbiguity, FullCommitment, Boundary };

const char* to_string(Regime r);

/// Regime from the centrist threshold: CentristAmbiguity when k^2 < 3/2,
/// FullCommitment when k^2 > 3/2, Boundary within `boundary_eps` of the
/// threshold (default 0: Boundary only at exact equality, which no rational
/// k attains; it is reachable through this k^2-level overload and through a
/// positive eps band).
Regime regime_from_k_squared(const Rational& k_squared, const Rational& boundary_eps = Rational(0));

/// Same, validating 1 < k < l first.
Regime analytic_regime(const Rational& k, const Rational& l,
                       const Rational& boundary_eps = Rational(0));

/// Full solution of a canonical game: payoffs, equilibria, regime, and the
/// two decision thresholds.
struct EquilibriumReport {
    Rational k;
    Rational l;
    PayoffMatrix payoffs;
    std::vector<ActionProfile> pure_equilibria;
    Regime regime = Regime::Boundary;
    Rational centrist_threshold;   // k^2 - 3/2
    Rational extremist_threshold;  // k^2 + l^2 - 5/2
};

EquilibriumReport solve_canonical(const Rational& k, const Rational& l,
                                  const Rational& boundary_eps = Rational(0));

} // namespace ambilab::game
