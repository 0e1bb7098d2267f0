#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pooling/prob_core.hpp"
#include "pooling/rules.hpp"

namespace pooling {

/// All experts agree (within tol.simplex) on every state outside the event.
bool disagreement_restricted_within(const SuggestionProfile& profile, const Event& event,
                                    const Tolerances& tol = {});

/// All experts assign the same probability (within tol.simplex) to the event.
bool agree_on_event(const SuggestionProfile& profile, const Event& event,
                    const Tolerances& tol = {});

enum class Verdict { Holds, Fails, Unknown };

/// Sampled outcome of "fEh is weakly preferred to gEh for every h".
/// Failure is sound; Holds only means no sampled h refuted it.
struct ConditionalComparison {
    Verdict verdict = Verdict::Unknown;
    std::optional<UtilityAct> witness;
    std::size_t samples_used = 0;
};

/// Conditional certainty equivalents of an act, one per continuation act h.
struct ConditionalCE {
    std::vector<std::pair<UtilityAct, double>> value_by_h;
    double spread = 0.0;
};

/// The constant c solving U(fEh) = U((c 1)Eh), found by bisection on c.
/// Throws BracketFailure if the bracket cannot be widened to contain a root.
double conditional_certainty_equivalent(const AggregationRule& rule,
                                        const SuggestionProfile& profile, const Event& event,
                                        const UtilityAct& f, const UtilityAct& h,
                                        const Tolerances& tol = {});

ConditionalCE conditional_ce(const AggregationRule& rule, const SuggestionProfile& profile,
                             const Event& event, const UtilityAct& f,
                             const std::vector<UtilityAct>& h_samples, const Tolerances& tol = {});

ConditionalComparison conditional_compare(const AggregationRule& rule,
                                          const SuggestionProfile& profile, const Event& event,
                                          const UtilityAct& f, const UtilityAct& g,
                                          const std::vector<UtilityAct>& h_samples,
                                          const Tolerances& tol = {});

/// alpha * U_{profile^E}(f) + (1 - alpha) * EU_{mu0}(h), where alpha is the
/// common probability of E and mu0 the common posterior on the complement.
/// Requires disagreement restricted within a proper event E.
double restricted_decomposition(const AggregationRule& rule, const SuggestionProfile& profile,
                                const Event& event, const UtilityAct& f, const UtilityAct& h,
                                const Tolerances& tol = {});

/// Continuation acts used when none are supplied: the zero act, each act in
/// `anchors`, then `draws` uniform acts from [-range, range]^states.
std::vector<UtilityAct> default_h_samples(std::size_t states, const std::vector<UtilityAct>& anchors,
                                          std::size_t draws, double range, std::uint64_t seed);

}  // namespace pooling
