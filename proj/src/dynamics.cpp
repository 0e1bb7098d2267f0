#include "pooling/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pooling/sampling.hpp"

namespace pooling {

bool disagreement_restricted_within(const SuggestionProfile& profile, const Event& event,
                                    const Tolerances& tol) {
    if (event.dimension() != profile.state_count()) {
        throw Error(ErrorKind::DimensionMismatch, "event and profile differ in state count");
    }
    for (std::size_t w = 0; w < profile.state_count(); ++w) {
        if (event.contains(w)) continue;
        for (std::size_t i = 1; i < profile.expert_count(); ++i) {
            if (std::abs(profile[i][w] - profile[0][w]) > tol.simplex) return false;
        }
    }
    return true;
}

bool agree_on_event(const SuggestionProfile& profile, const Event& event, const Tolerances& tol) {
    const double first = profile[0].mass(event);
    for (std::size_t i = 1; i < profile.expert_count(); ++i) {
        if (std::abs(profile[i].mass(event) - first) > tol.simplex) return false;
    }
    return true;
}

double conditional_certainty_equivalent(const AggregationRule& rule,
                                        const SuggestionProfile& profile, const Event& event,
                                        const UtilityAct& f, const UtilityAct& h,
                                        const Tolerances& tol) {
    const double target = aggregate_utility(rule, profile, composite_act(f, event, h), tol);

    // U((c 1)Eh) is the rule applied to the affine evaluation profile c * mu_i(E) + b_i,
    // with b_i the expected utility of h restricted to the complement.
    std::vector<Belief> pooled;
    if (const auto* g = std::get_if<GeometricRule>(&rule.variant())) {
        pooled.push_back(geometric_pooled_belief(g->exponents, profile, tol));
    }
    const auto& beliefs = pooled.empty() ? profile.beliefs() : pooled;
    std::vector<double> mass_in(beliefs.size(), 0.0);
    std::vector<double> tail(beliefs.size(), 0.0);
    for (std::size_t i = 0; i < beliefs.size(); ++i) {
        for (std::size_t w = 0; w < beliefs[i].size(); ++w) {
            if (event.contains(w)) {
                mass_in[i] += beliefs[i][w];
            } else {
                tail[i] += beliefs[i][w] * h[w];
            }
        }
    }
    EvaluationProfile buffer;
    buffer.values.resize(beliefs.size());
    const auto value_at = [&](double c) {
        for (std::size_t i = 0; i < beliefs.size(); ++i) buffer.values[i] = c * mass_in[i] + tail[i];
        if (!pooled.empty()) return buffer.values[0];
        return aggregation_functional(rule, buffer);
    };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (auto w : event.members()) {
        lo = std::min(lo, f[w]);
        hi = std::max(hi, f[w]);
    }
    lo -= 1.0;
    hi += 1.0;
    const double max_width = (hi - lo) * 1048576.0;  // 2^20 times the initial bracket

    while (value_at(lo) > target) {
        lo -= (hi - lo);
        if (hi - lo > max_width) {
            throw Error(ErrorKind::BracketFailure, "lower end of the certainty-equivalent bracket diverged");
        }
    }
    while (value_at(hi) < target) {
        hi += (hi - lo);
        if (hi - lo > max_width) {
            throw Error(ErrorKind::BracketFailure, "upper end of the certainty-equivalent bracket diverged");
        }
    }
    for (int iter = 0; iter < 400 && hi - lo > tol.bisect; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (value_at(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

ConditionalCE conditional_ce(const AggregationRule& rule, const SuggestionProfile& profile,
                             const Event& event, const UtilityAct& f,
                             const std::vector<UtilityAct>& h_samples, const Tolerances& tol) {
    if (h_samples.empty()) throw Error(ErrorKind::InvalidArgument, "conditional_ce needs at least one h");
    if (!is_conditionable(profile, event, tol)) {
        // condition_profile produces the expert-specific diagnostic.
        (void)condition_profile(profile, event, tol);
    }
    ConditionalCE out;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& h : h_samples) {
        const double ce = conditional_certainty_equivalent(rule, profile, event, f, h, tol);
        lo = std::min(lo, ce);
        hi = std::max(hi, ce);
        out.value_by_h.emplace_back(h, ce);
    }
    out.spread = hi - lo;
    return out;
}

ConditionalComparison conditional_compare(const AggregationRule& rule,
                                          const SuggestionProfile& profile, const Event& event,
                                          const UtilityAct& f, const UtilityAct& g,
                                          const std::vector<UtilityAct>& h_samples,
                                          const Tolerances& tol) {
    if (!is_conditionable(profile, event, tol)) (void)condition_profile(profile, event, tol);
    ConditionalComparison out;
    if (h_samples.empty()) return out;
    for (const auto& h : h_samples) {
        ++out.samples_used;
        const double uf = aggregate_utility(rule, profile, composite_act(f, event, h), tol);
        const double ug = aggregate_utility(rule, profile, composite_act(g, event, h), tol);
        if (uf < ug - tol.value) {
            out.verdict = Verdict::Fails;
            out.witness = h;
            return out;
        }
    }
    out.verdict = Verdict::Holds;
    return out;
}

double restricted_decomposition(const AggregationRule& rule, const SuggestionProfile& profile,
                                const Event& event, const UtilityAct& f, const UtilityAct& h,
                                const Tolerances& tol) {
    if (event.is_whole()) {
        throw Error(ErrorKind::InvalidEvent, "decomposition needs a proper event");
    }
    if (!disagreement_restricted_within(profile, event, tol)) {
        throw Error(ErrorKind::DisagreementNotRestricted,
                    "experts disagree on a state outside the event");
    }
    const auto conditioned = condition_profile(profile, event, tol);
    const Event outside = event.complement();
    const double alpha = profile[0].mass(event);
    const double slack = tol.simplex * static_cast<double>(profile.state_count());
    for (std::size_t i = 1; i < profile.expert_count(); ++i) {
        if (std::abs(profile[i].mass(event) - alpha) > slack) {
            throw Error(ErrorKind::DisagreementNotRestricted,
                        fmt::format("expert {} assigns {} to the event, expert 0 assigns {}", i,
                                    profile[i].mass(event), alpha));
        }
    }
    const double inner = aggregate_utility(rule, conditioned, f, tol);
    if (1.0 - alpha <= tol.simplex) return inner;
    const Belief common = condition_belief(profile[0], outside, tol);
    return alpha * inner + (1.0 - alpha) * expected_utility(common, h);
}

std::vector<UtilityAct> default_h_samples(std::size_t states, const std::vector<UtilityAct>& anchors,
                                          std::size_t draws, double range, std::uint64_t seed) {
    std::vector<UtilityAct> out;
    out.reserve(1 + anchors.size() + draws);
    out.push_back(UtilityAct::constant(states, 0.0));
    for (const auto& a : anchors) out.push_back(a);
    Rng rng(splitmix64(seed ^ 0x5EEDBA5EULL));
    for (std::size_t k = 0; k < draws; ++k) out.push_back(random_act(states, range, rng));
    return out;
}

}  // namespace pooling
