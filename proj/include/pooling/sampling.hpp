#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "pooling/prob_core.hpp"
#include "pooling/rules.hpp"

namespace pooling {

/// Deterministic generator. Draws are built from raw 64-bit engine output so
/// sequences do not depend on the standard library's distribution classes.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream for trial `index` of a run seeded with `seed`.
    static Rng for_trial(std::uint64_t seed, std::uint64_t index);

    /// Uniform on [0, 1).
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform on {0, ..., n-1}; n must be positive.
    std::size_t index(std::size_t n);
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Point of the (dimension-1)-simplex from sorted uniform spacings.
std::vector<double> random_simplex_point(std::size_t dimension, Rng& rng);

Belief random_belief(std::size_t states, Rng& rng);
UtilityAct random_act(std::size_t states, double range, Rng& rng);
Weight random_weight(std::size_t experts, Rng& rng);
SuggestionProfile random_profile(std::size_t experts, std::size_t states, Rng& rng);

/// Non-empty event other than the whole space; requires states >= 2.
Event random_proper_event(std::size_t states, Rng& rng);

/// Experts share a common probability alpha of the event and a common
/// sub-vector on its complement; allocations inside the event are independent.
SuggestionProfile restricted_disagreement_profile(std::size_t experts, const Event& event, Rng& rng);

/// Experts share only the probability of the event; both conditionals are
/// drawn independently per expert.
SuggestionProfile event_agreement_profile(std::size_t experts, const Event& event, Rng& rng);

/// Random rules for property tests.
AggregationRule random_linear_rule(std::size_t experts, Rng& rng);
AggregationRule random_multiple_weight_rule(std::size_t experts, std::size_t vertices, Rng& rng);
AggregationRule random_dual_self_rule(std::size_t experts, std::size_t sets, Rng& rng);

}  // namespace pooling
