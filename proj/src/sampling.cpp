#include "pooling/sampling.hpp"

#include <algorithm>

namespace pooling {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng Rng::for_trial(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ULL + 1)));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "index range must be positive");
    // Rejection sampling removes modulo bias.
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

std::vector<double> random_simplex_point(std::size_t dimension, Rng& rng) {
    std::vector<double> cuts(dimension + 1);
    cuts[0] = 0.0;
    cuts[dimension] = 1.0;
    for (std::size_t i = 1; i < dimension; ++i) cuts[i] = rng.uniform();
    std::sort(cuts.begin() + 1, cuts.end() - 1);
    std::vector<double> p(dimension);
    double total = 0.0;
    for (std::size_t i = 0; i < dimension; ++i) {
        p[i] = cuts[i + 1] - cuts[i];
        total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
}

Belief random_belief(std::size_t states, Rng& rng) { return Belief(random_simplex_point(states, rng)); }

UtilityAct random_act(std::size_t states, double range, Rng& rng) {
    std::vector<double> u(states);
    for (double& x : u) x = rng.uniform(-range, range);
    return UtilityAct(std::move(u));
}

Weight random_weight(std::size_t experts, Rng& rng) { return Weight(random_simplex_point(experts, rng)); }

SuggestionProfile random_profile(std::size_t experts, std::size_t states, Rng& rng) {
    std::vector<Belief> b;
    b.reserve(experts);
    for (std::size_t i = 0; i < experts; ++i) b.push_back(random_belief(states, rng));
    return SuggestionProfile(std::move(b));
}

Event random_proper_event(std::size_t states, Rng& rng) {
    if (states < 2 || states > 63) throw Error(ErrorKind::InvalidArgument, "proper events need 2..63 states");
    const unsigned long long full = (1ULL << states) - 1;
    // Uniform over masks in [1, full-1].
    const auto bits = 1ULL + rng.index(static_cast<std::size_t>(full - 1));
    return Event::from_mask(states, bits);
}

namespace {

// Writes `mass` spread over the members of `cells` according to a random simplex point.
void scatter(std::vector<double>& p, const std::vector<std::size_t>& cells, double mass, Rng& rng) {
    const auto q = random_simplex_point(cells.size(), rng);
    for (std::size_t k = 0; k < cells.size(); ++k) p[cells[k]] = mass * q[k];
}

double interior_alpha(Rng& rng) { return rng.uniform(0.1, 0.9); }

}  // namespace

SuggestionProfile restricted_disagreement_profile(std::size_t experts, const Event& event, Rng& rng) {
    const std::size_t m = event.dimension();
    const auto inside = event.members();
    const double alpha = event.is_whole() ? 1.0 : interior_alpha(rng);
    std::vector<double> common(m, 0.0);
    if (!event.is_whole()) scatter(common, event.complement().members(), 1.0 - alpha, rng);
    std::vector<Belief> beliefs;
    for (std::size_t i = 0; i < experts; ++i) {
        auto p = common;
        scatter(p, inside, alpha, rng);
        beliefs.emplace_back(std::move(p));
    }
    return SuggestionProfile(std::move(beliefs));
}

SuggestionProfile event_agreement_profile(std::size_t experts, const Event& event, Rng& rng) {
    const std::size_t m = event.dimension();
    const auto inside = event.members();
    const double alpha = event.is_whole() ? 1.0 : interior_alpha(rng);
    std::vector<Belief> beliefs;
    for (std::size_t i = 0; i < experts; ++i) {
        std::vector<double> p(m, 0.0);
        scatter(p, inside, alpha, rng);
        if (!event.is_whole()) scatter(p, event.complement().members(), 1.0 - alpha, rng);
        beliefs.emplace_back(std::move(p));
    }
    return SuggestionProfile(std::move(beliefs));
}

AggregationRule random_linear_rule(std::size_t experts, Rng& rng) {
    return AggregationRule::linear(random_weight(experts, rng));
}

AggregationRule random_multiple_weight_rule(std::size_t experts, std::size_t vertices, Rng& rng) {
    std::vector<Weight> v;
    for (std::size_t k = 0; k < vertices; ++k) v.push_back(random_weight(experts, rng));
    return AggregationRule::multiple_weight(WeightSet(std::move(v)));
}

AggregationRule random_dual_self_rule(std::size_t experts, std::size_t sets, Rng& rng) {
    std::vector<WeightSet> c;
    for (std::size_t s = 0; s < sets; ++s) {
        std::vector<Weight> v;
        const std::size_t count = 1 + rng.index(3);
        for (std::size_t k = 0; k < count; ++k) v.push_back(random_weight(experts, rng));
        c.emplace_back(std::move(v));
    }
    return AggregationRule::dual_self(WeightSetCollection(std::move(c)));
}

}  // namespace pooling
