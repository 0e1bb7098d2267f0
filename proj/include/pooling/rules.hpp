#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pooling/prob_core.hpp"

namespace pooling {

/// Credibility weight: a probability distribution over experts.
class Weight {
public:
    explicit Weight(std::vector<double> lambdas, const Tolerances& tol = {});

    static Weight unit(std::size_t experts, std::size_t expert);
    static Weight uniform(std::size_t experts);

    std::size_t size() const noexcept { return lambdas_.size(); }
    double operator[](std::size_t i) const { return lambdas_[i]; }
    std::span<const double> lambdas() const noexcept { return lambdas_; }

    friend bool operator==(const Weight&, const Weight&) = default;

private:
    std::vector<double> lambdas_;
};

/// Weight polytope given by its vertices. Near-duplicate vertices are dropped.
class WeightSet {
public:
    explicit WeightSet(std::vector<Weight> vertices, const Tolerances& tol = {});

    /// Every unit vector of the expert simplex.
    static WeightSet full_simplex(std::size_t experts);

    std::size_t expert_count() const noexcept { return vertices_.front().size(); }
    const std::vector<Weight>& vertices() const noexcept { return vertices_; }

    friend bool operator==(const WeightSet&, const WeightSet&) = default;

private:
    std::vector<Weight> vertices_;
};

/// Finite collection of weight polytopes.
class WeightSetCollection {
public:
    explicit WeightSetCollection(std::vector<WeightSet> sets);

    std::size_t expert_count() const noexcept { return sets_.front().expert_count(); }
    const std::vector<WeightSet>& sets() const noexcept { return sets_; }

    friend bool operator==(const WeightSetCollection&, const WeightSetCollection&) = default;

private:
    std::vector<WeightSet> sets_;
};

struct LinearRule {
    Weight weight;
    friend bool operator==(const LinearRule&, const LinearRule&) = default;
};

struct MultipleWeightRule {
    WeightSet weights;
    friend bool operator==(const MultipleWeightRule&, const MultipleWeightRule&) = default;
};

struct DualSelfRule {
    WeightSetCollection collection;
    friend bool operator==(const DualSelfRule&, const DualSelfRule&) = default;
};

struct DictatorshipRule {
    std::size_t expert;
    std::size_t experts;
    friend bool operator==(const DictatorshipRule&, const DictatorshipRule&) = default;
};

/// Normalized weighted geometric mean of beliefs. Not a functional of the
/// evaluation profile; kept for contrast with the dual-self family.
struct GeometricRule {
    std::vector<double> exponents;
    friend bool operator==(const GeometricRule&, const GeometricRule&) = default;
};

/// Arbitrary functional of the evaluation profile, for probing the axiom
/// checkers with rules outside the dual-self family.
struct CustomRule {
    std::string name;
    std::size_t experts;
    std::function<double(std::span<const double>)> functional;
    friend bool operator==(const CustomRule& a, const CustomRule& b) {
        return a.name == b.name && a.experts == b.experts;
    }
};

class AggregationRule {
public:
    using Variant = std::variant<LinearRule, MultipleWeightRule, DualSelfRule, DictatorshipRule,
                                 GeometricRule, CustomRule>;

    AggregationRule(Variant v);

    static AggregationRule linear(Weight w) { return AggregationRule(LinearRule{std::move(w)}); }
    static AggregationRule multiple_weight(WeightSet s) {
        return AggregationRule(MultipleWeightRule{std::move(s)});
    }
    static AggregationRule dual_self(WeightSetCollection c) {
        return AggregationRule(DualSelfRule{std::move(c)});
    }
    static AggregationRule geometric(std::vector<double> exponents);
    static AggregationRule custom(std::string name, std::size_t experts,
                                  std::function<double(std::span<const double>)> functional);

    const Variant& variant() const noexcept { return v_; }

    /// Short identifier: linear, multiple_weight, dual_self, dictatorship, geometric, custom.
    std::string_view kind() const noexcept;
    std::size_t expert_count() const noexcept;

    /// Belongs to the dual-self family (linear, multiple-weight, dual-self, dictatorship).
    bool is_dual_self_family() const noexcept;
    /// Value depends on the profile only through the evaluation profile.
    bool is_profile_functional() const noexcept;

    /// Canonical dual-self form; nullopt for geometric and custom rules.
    std::optional<WeightSetCollection> as_dual_self() const;

    friend bool operator==(const AggregationRule&, const AggregationRule&) = default;

private:
    Variant v_;
};

/// Vector of expected utilities, one per expert.
struct EvaluationProfile {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
};

EvaluationProfile evaluation_profile(const SuggestionProfile& profile, const UtilityAct& act);

/// Minimum-norm act whose evaluation profile under `profile` equals `target`;
/// nullopt when the beliefs are linearly dependent and the target is unreachable.
std::optional<UtilityAct> realize_evaluation_profile(const SuggestionProfile& profile,
                                                     std::span<const double> target,
                                                     const Tolerances& tol = {});

/// Linear pool sum_i lambda_i * mu_i.
Belief pooled_belief(const Weight& lambda, const SuggestionProfile& profile);

/// Value of the aggregation functional I at evaluation profile `a`.
/// Throws NotProfileFunctional for geometric rules.
double aggregation_functional(const AggregationRule& rule, const EvaluationProfile& a);

/// Utility of an act under the rule applied to the profile. For every rule in
/// scope this is also the act's certainty equivalent in utils.
double aggregate_utility(const AggregationRule& rule, const SuggestionProfile& profile,
                         const UtilityAct& act, const Tolerances& tol = {});

/// Normalized product prod_i mu_i(w)^alpha_i, with 0^a = 0 for a > 0 and 0^0 = 1.
/// Throws GeometricUndefined when the normalizer is (numerically) zero.
Belief geometric_pooled_belief(std::span<const double> exponents, const SuggestionProfile& profile,
                               const Tolerances& tol = {});

/// Median of three evaluations in dual-self form: the max over the three
/// expert pairs of the pair's minimum. Throws WrongExpertCount unless n == 3.
AggregationRule median_rule(std::size_t experts = 3);

/// Throws IndexOutOfRange unless expert < experts.
AggregationRule dictatorship_rule(std::size_t expert, std::size_t experts);

/// Four-expert rule
///   U(f) = w * min_{l in [lo,hi]} EU_{l mu1 + (1-l) mu2}(f)
///        + (1-w) * max_{l in [lo,hi]} EU_{l mu3 + (1-l) mu4}(f)
/// written as a max over two polytopes (one per extreme of the second
/// group's interval) of a min over two vertices.
AggregationRule two_group_credibility_rule(double group_weight, double lo, double hi);

/// -T log( (1/n) sum_i exp(-a_i / T) ): monotone and translation invariant
/// but not positively homogeneous, hence outside the dual-self family.
AggregationRule soft_min_rule(std::size_t experts, double temperature);

}  // namespace pooling
