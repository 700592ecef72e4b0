#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "ambilab/game.hpp"
#include "ambilab/rng.hpp"

namespace ambilab::game {

/// Rule producing l from each k in a sweep: a fixed offset l = k + delta, or
/// an explicit list crossed with every k.
struct OffsetRule {
    Rational delta; // > 0
};
struct ExplicitRule {
    std::vector<Rational> l_values;
};

/// Grid of (k, l) pairs for a phase sweep. Every evaluated pair must satisfy
/// 1 < k < l.
struct SweepGrid {
    std::vector<Rational> k_values;                // strictly increasing, all > 1
    std::variant<OffsetRule, ExplicitRule> l_rule; // offset or explicit list
    Rational boundary_eps = Rational(0);           // near-threshold band for the regime flag
};

/// Evenly spaced k values [first, last] with the given step (all exact).
std::vector<Rational> k_range(const Rational& first, const Rational& last, const Rational& step);

/// One sweep cell: parameters, regime, equilibria, and the full payoff matrix.
struct PhaseRecord {
    Rational k;
    Rational l;
    Regime regime;
    std::vector<ActionProfile> equilibria;
    PayoffMatrix payoffs;
};

/// Evaluates every grid cell in deterministic (k index, l index) order.
/// Cells are independent, so callers may shard the grid and merge by index.
/// Throws DomainError naming the first invalid (k, l) pair.
std::vector<PhaseRecord> sweep_grid(const SweepGrid& grid);

/// Writes the phase table as delimited text with header
/// k,l,regime,eq_profiles,pC_AA,pC_AC,pC_CA,pC_CC; rationals as "num/den".
void write_phase_table(std::ostream& os, const std::vector<PhaseRecord>& records);

/// Monte Carlo estimate of the centrist's win probability under one profile.
struct McResult {
    double frequency;  // empirical centrist win frequency
    double std_error;  // binomial standard error sqrt(f(1-f)/n)
    std::uint64_t n_samples;
};

/// Samples committing parties' deviations uniformly at random and applies the
/// same voter comparison as the exact path (ambiguous parties are scored at
/// their lottery's expected utility). A tie is resolved by a fair coin from
/// the same stream, so each draw is Bernoulli and the binomial standard error
/// is exact. Deterministic given (seed); uses stream id streams::kMonteCarlo.
McResult monte_carlo_check(const AmbiguityGame& game, const ActionProfile& profile,
                           std::uint64_t n_samples, std::uint64_t seed);

} // namespace ambilab::game
