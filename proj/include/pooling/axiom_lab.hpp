#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pooling/prob_core.hpp"
#include "pooling/rules.hpp"

namespace pooling {

enum class Axiom {
    Pareto,
    Monotonicity,
    P2,
    CIndependence,
    Independence,
    AmbiguityAversion,
    WeakCommutativity,
    PessimismUpdateThenAggregate,
    ModerateCommutativity,
    FullCommutativity,
};

/// Stable identifiers used on the command line and in reports.
std::string_view axiom_id(Axiom axiom) noexcept;
std::optional<Axiom> parse_axiom(std::string_view id) noexcept;
const std::vector<Axiom>& all_axioms();

/// Axioms stated for a fixed suggestion profile (the rest quantify over profiles).
bool axiom_uses_fixed_profile(Axiom axiom) noexcept;

struct CheckConfig {
    std::uint64_t seed = 0;
    std::size_t trials = 1000;
    /// Sampled utilities are drawn from [-act_range, act_range].
    double act_range = 10.0;
    /// Random continuation acts per conditional evaluation.
    std::size_t h_samples = 32;
    /// State-space sizes for axioms that sample their own profiles.
    std::vector<std::size_t> state_counts{3, 4, 5};
    Tolerances tol;

    void validate() const;
};

enum class CheckVerdict { Pass, Violated, Inapplicable };
std::string_view to_string(CheckVerdict verdict) noexcept;

/// Concrete data refuting an axiom, replayable through `witness_gap`.
struct Witness {
    std::vector<SuggestionProfile> profiles;
    std::optional<Event> event;
    std::vector<std::pair<std::string, UtilityAct>> acts;
    std::vector<std::pair<std::string, double>> scalars;
    /// Size of the violation; the axiom is refuted when gap > tol.value.
    double gap = 0.0;

    const UtilityAct& act(std::string_view name) const;
    double scalar(std::string_view name) const;
};

struct CheckReport {
    Axiom axiom = Axiom::Pareto;
    CheckVerdict verdict = CheckVerdict::Pass;
    std::uint64_t seed = 0;
    /// Random trials attempted plus constructed probes attempted.
    std::size_t trials_run = 0;
    /// Trials whose sampled instance could not be evaluated (e.g. undefined pooling).
    std::size_t skipped = 0;
    std::optional<Witness> witness;
    std::string reason;
};

/// Recomputes the violation size of a witness from its stored data.
double witness_gap(const AggregationRule& rule, Axiom axiom, const Witness& witness,
                   const Tolerances& tol = {});

CheckReport check_pareto(const AggregationRule& rule, const CheckConfig& config);
CheckReport check_monotonicity_regularity(const AggregationRule& rule, const CheckConfig& config);
CheckReport check_p2(const AggregationRule& rule, const SuggestionProfile& profile,
                     const CheckConfig& config);
CheckReport check_c_independence(const AggregationRule& rule, const SuggestionProfile& profile,
                                 const CheckConfig& config);
CheckReport check_independence(const AggregationRule& rule, const SuggestionProfile& profile,
                               const CheckConfig& config);
CheckReport check_ambiguity_aversion(const AggregationRule& rule, const SuggestionProfile& profile,
                                     const CheckConfig& config);
CheckReport check_weak_commutativity(const AggregationRule& rule, const CheckConfig& config);
/// Throws StateSpaceTooSmall if any configured state count is below 4.
CheckReport check_pessimism_utta(const AggregationRule& rule, const CheckConfig& config);
CheckReport check_moderate_commutativity(const AggregationRule& rule, const CheckConfig& config);
CheckReport check_full_commutativity(const AggregationRule& rule, const CheckConfig& config);

/// Dispatches to the checker for `axiom`; `profile` is required for fixed-profile axioms.
CheckReport run_check(Axiom axiom, const AggregationRule& rule,
                      const std::optional<SuggestionProfile>& profile, const CheckConfig& config);

/// Profile on which linear pooling fails to commute with Bayesian updating.
struct DictatorshipCounterexample {
    SuggestionProfile profile;
    Event event;
    /// Linear pool of the experts' posteriors.
    Belief pool_of_posteriors;
    /// Posterior of the linear pool.
    Belief posterior_of_pool;
    /// pool_of_posteriors[0] - posterior_of_pool[0].
    double gap;
};

/// Expert 0 holds (.1, 0, .9, 0, ...), every other expert a point mass on
/// state 1, and the event is {0, 1}. Throws WeightDegenerate unless
/// 0 < lambda_0 < 1; needs at least two experts and four states.
DictatorshipCounterexample dictatorship_counterexample(const Weight& lambda, std::size_t states = 4);

/// Closed form lambda_0 - .1 lambda_0 / (1 - .9 lambda_0) of the counterexample gap.
double dictatorship_gap_formula(double lambda0);

}  // namespace pooling
