#include "pooling/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace pooling {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double min_over(const WeightSet& set, std::span<const double> a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& v : set.vertices()) best = std::min(best, dot(v.lambdas(), a));
    return best;
}

double max_min_over(const WeightSetCollection& c, std::span<const double> a) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& s : c.sets()) best = std::max(best, min_over(s, a));
    return best;
}

void require_experts(std::size_t expected, std::size_t got, std::string_view what) {
    if (expected != got) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("{} expects {} experts, got {}", what, expected, got));
    }
}

}  // namespace

// ----------------------------------------------------------------------------
// Weights

Weight::Weight(std::vector<double> lambdas, const Tolerances& tol) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw Error(ErrorKind::InvalidWeight, "weight needs at least one expert");
    double total = 0.0;
    for (std::size_t i = 0; i < lambdas_.size(); ++i) {
        double& l = lambdas_[i];
        if (!std::isfinite(l) || l < -tol.simplex || l > 1.0 + tol.simplex) {
            throw Error(ErrorKind::InvalidWeight, fmt::format("weight entry {} = {} outside [0,1]", i, l));
        }
        l = std::clamp(l, 0.0, 1.0);
        total += l;
    }
    if (std::abs(total - 1.0) > tol.simplex) {
        throw Error(ErrorKind::InvalidWeight, fmt::format("weights sum to {}, not 1", total));
    }
}

Weight Weight::unit(std::size_t experts, std::size_t expert) {
    if (expert >= experts) throw Error(ErrorKind::IndexOutOfRange, "unit weight index out of range");
    std::vector<double> l(experts, 0.0);
    l[expert] = 1.0;
    return Weight(std::move(l));
}

Weight Weight::uniform(std::size_t experts) {
    return Weight(std::vector<double>(experts, 1.0 / static_cast<double>(experts)));
}

WeightSet::WeightSet(std::vector<Weight> vertices, const Tolerances& tol) {
    if (vertices.empty()) throw Error(ErrorKind::InvalidWeight, "weight set needs at least one vertex");
    const std::size_t experts = vertices.front().size();
    for (auto& v : vertices) {
        if (v.size() != experts) {
            throw Error(ErrorKind::DimensionMismatch, "weight set vertices differ in expert count");
        }
        const bool dup = std::any_of(vertices_.begin(), vertices_.end(), [&](const Weight& w) {
            return approx_equal(w.lambdas(), v.lambdas(), tol.simplex);
        });
        if (!dup) vertices_.push_back(std::move(v));
    }
}

WeightSet WeightSet::full_simplex(std::size_t experts) {
    std::vector<Weight> v;
    for (std::size_t i = 0; i < experts; ++i) v.push_back(Weight::unit(experts, i));
    return WeightSet(std::move(v));
}

WeightSetCollection::WeightSetCollection(std::vector<WeightSet> sets) : sets_(std::move(sets)) {
    if (sets_.empty()) throw Error(ErrorKind::InvalidWeight, "weight-set collection must be non-empty");
    for (const auto& s : sets_) {
        if (s.expert_count() != sets_.front().expert_count()) {
            throw Error(ErrorKind::DimensionMismatch, "weight sets disagree on expert count");
        }
    }
}

// ----------------------------------------------------------------------------
// AggregationRule

AggregationRule::AggregationRule(Variant v) : v_(std::move(v)) {
    if (const auto* d = std::get_if<DictatorshipRule>(&v_); d && d->expert >= d->experts) {
        throw Error(ErrorKind::IndexOutOfRange,
                    fmt::format("dictator {} not among {} experts", d->expert, d->experts));
    }
}

AggregationRule AggregationRule::geometric(std::vector<double> exponents) {
    if (exponents.empty()) throw Error(ErrorKind::InvalidWeight, "geometric rule needs exponents");
    double total = 0.0;
    for (double a : exponents) {
        if (!std::isfinite(a) || a < 0.0) {
            throw Error(ErrorKind::InvalidWeight, fmt::format("geometric exponent {} is negative", a));
        }
        total += a;
    }
    if (std::abs(total - 1.0) > Tolerances{}.simplex) {
        throw Error(ErrorKind::InvalidWeight, fmt::format("geometric exponents sum to {}, not 1", total));
    }
    return AggregationRule(GeometricRule{std::move(exponents)});
}

AggregationRule AggregationRule::custom(std::string name, std::size_t experts,
                                        std::function<double(std::span<const double>)> functional) {
    if (experts == 0 || !functional) throw Error(ErrorKind::InvalidArgument, "custom rule is empty");
    return AggregationRule(CustomRule{std::move(name), experts, std::move(functional)});
}

std::string_view AggregationRule::kind() const noexcept {
    return std::visit(overloaded{
                          [](const LinearRule&) { return std::string_view("linear"); },
                          [](const MultipleWeightRule&) { return std::string_view("multiple_weight"); },
                          [](const DualSelfRule&) { return std::string_view("dual_self"); },
                          [](const DictatorshipRule&) { return std::string_view("dictatorship"); },
                          [](const GeometricRule&) { return std::string_view("geometric"); },
                          [](const CustomRule&) { return std::string_view("custom"); },
                      },
                      v_);
}

std::size_t AggregationRule::expert_count() const noexcept {
    return std::visit(overloaded{
                          [](const LinearRule& r) { return r.weight.size(); },
                          [](const MultipleWeightRule& r) { return r.weights.expert_count(); },
                          [](const DualSelfRule& r) { return r.collection.expert_count(); },
                          [](const DictatorshipRule& r) { return r.experts; },
                          [](const GeometricRule& r) { return r.exponents.size(); },
                          [](const CustomRule& r) { return r.experts; },
                      },
                      v_);
}

bool AggregationRule::is_dual_self_family() const noexcept {
    return !std::holds_alternative<GeometricRule>(v_) && !std::holds_alternative<CustomRule>(v_);
}

bool AggregationRule::is_profile_functional() const noexcept {
    return !std::holds_alternative<GeometricRule>(v_);
}

std::optional<WeightSetCollection> AggregationRule::as_dual_self() const {
    return std::visit(
        overloaded{
            [](const LinearRule& r) -> std::optional<WeightSetCollection> {
                return WeightSetCollection({WeightSet({r.weight})});
            },
            [](const MultipleWeightRule& r) -> std::optional<WeightSetCollection> {
                return WeightSetCollection({r.weights});
            },
            [](const DualSelfRule& r) -> std::optional<WeightSetCollection> { return r.collection; },
            [](const DictatorshipRule& r) -> std::optional<WeightSetCollection> {
                return WeightSetCollection({WeightSet({Weight::unit(r.experts, r.expert)})});
            },
            [](const GeometricRule&) -> std::optional<WeightSetCollection> { return std::nullopt; },
            [](const CustomRule&) -> std::optional<WeightSetCollection> { return std::nullopt; },
        },
        v_);
}

// ----------------------------------------------------------------------------
// Evaluation

EvaluationProfile evaluation_profile(const SuggestionProfile& profile, const UtilityAct& act) {
    EvaluationProfile out;
    out.values.reserve(profile.expert_count());
    for (const auto& mu : profile.beliefs()) out.values.push_back(expected_utility(mu, act));
    return out;
}

std::optional<UtilityAct> realize_evaluation_profile(const SuggestionProfile& profile,
                                                     std::span<const double> target,
                                                     const Tolerances& tol) {
    const std::size_t n = profile.expert_count();
    const std::size_t m = profile.state_count();
    require_experts(n, target.size(), "target evaluation profile");
    // Solve (B B^T) y = target, then u = B^T y.
    std::vector<std::vector<double>> g(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) g[i][j] = dot(profile[i].probs(), profile[j].probs());
        g[i][n] = target[i];
    }
    // Gauss-Jordan; a column without a usable pivot keeps y = 0, and the final
    // check decides whether the target was reachable.
    std::vector<std::size_t> pivot_col;
    std::size_t row = 0;
    for (std::size_t col = 0; col < n && row < n; ++col) {
        std::size_t pivot = row;
        for (std::size_t r = row + 1; r < n; ++r)
            if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
        if (std::abs(g[pivot][col]) < 1e-12) continue;
        std::swap(g[pivot], g[row]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == row) continue;
            const double factor = g[r][col] / g[row][col];
            for (std::size_t c = col; c <= n; ++c) g[r][c] -= factor * g[row][c];
        }
        pivot_col.push_back(col);
        ++row;
    }
    std::vector<double> u(m, 0.0);
    for (std::size_t r = 0; r < pivot_col.size(); ++r) {
        const std::size_t i = pivot_col[r];
        const double y = g[r][n] / g[r][i];
        for (std::size_t w = 0; w < m; ++w) u[w] += y * profile[i][w];
    }
    UtilityAct act(std::move(u));
    const auto check = evaluation_profile(profile, act);
    if (!approx_equal(check.values, target, tol.value)) return std::nullopt;
    return act;
}

Belief pooled_belief(const Weight& lambda, const SuggestionProfile& profile) {
    require_experts(lambda.size(), profile.expert_count(), "weight");
    std::vector<double> p(profile.state_count(), 0.0);
    for (std::size_t i = 0; i < profile.expert_count(); ++i)
        for (std::size_t w = 0; w < p.size(); ++w) p[w] += lambda[i] * profile[i][w];
    return Belief(std::move(p));
}

double aggregation_functional(const AggregationRule& rule, const EvaluationProfile& a) {
    if (!rule.is_profile_functional()) {
        throw Error(ErrorKind::NotProfileFunctional,
                    "geometric pooling is not a functional of the evaluation profile");
    }
    require_experts(rule.expert_count(), a.size(), std::string(rule.kind()) + " rule");
    const std::span<const double> v = a.values;
    return std::visit(overloaded{
                          [&](const LinearRule& r) { return dot(r.weight.lambdas(), v); },
                          [&](const MultipleWeightRule& r) { return min_over(r.weights, v); },
                          [&](const DualSelfRule& r) { return max_min_over(r.collection, v); },
                          [&](const DictatorshipRule& r) { return v[r.expert]; },
                          [&](const GeometricRule&) { return 0.0; },
                          [&](const CustomRule& r) { return r.functional(v); },
                      },
                      rule.variant());
}

double aggregate_utility(const AggregationRule& rule, const SuggestionProfile& profile,
                         const UtilityAct& act, const Tolerances& tol) {
    if (const auto* g = std::get_if<GeometricRule>(&rule.variant())) {
        return expected_utility(geometric_pooled_belief(g->exponents, profile, tol), act);
    }
    if (const auto* d = std::get_if<DictatorshipRule>(&rule.variant())) {
        require_experts(d->experts, profile.expert_count(), "dictatorship rule");
        return expected_utility(profile[d->expert], act);
    }
    return aggregation_functional(rule, evaluation_profile(profile, act));
}

Belief geometric_pooled_belief(std::span<const double> exponents, const SuggestionProfile& profile,
                               const Tolerances& tol) {
    require_experts(exponents.size(), profile.expert_count(), "geometric rule");
    std::vector<double> p(profile.state_count(), 1.0);
    for (std::size_t w = 0; w < p.size(); ++w) {
        for (std::size_t i = 0; i < profile.expert_count(); ++i) {
            const double a = exponents[i];
            if (a == 0.0) continue;
            const double m = profile[i][w];
            p[w] *= (m == 0.0) ? 0.0 : std::pow(m, a);
        }
    }
    double c = 0.0;
    for (double x : p) c += x;
    if (c <= tol.simplex) {
        throw Error(ErrorKind::GeometricUndefined,
                    fmt::format("geometric normalizer {} vanishes (disjoint supports)", c));
    }
    for (double& x : p) x /= c;
    return Belief(std::move(p), tol);
}

// ----------------------------------------------------------------------------
// Named rules

AggregationRule median_rule(std::size_t experts) {
    if (experts != 3) {
        throw Error(ErrorKind::WrongExpertCount,
                    fmt::format("median rule is defined for 3 experts, got {}", experts));
    }
    const auto e = [](std::size_t i) { return Weight::unit(3, i); };
    return AggregationRule::dual_self(WeightSetCollection({
        WeightSet({e(0), e(1)}),
        WeightSet({e(1), e(2)}),
        WeightSet({e(0), e(2)}),
    }));
}

AggregationRule dictatorship_rule(std::size_t expert, std::size_t experts) {
    return AggregationRule(DictatorshipRule{expert, experts});
}

AggregationRule two_group_credibility_rule(double group_weight, double lo, double hi) {
    if (!(group_weight >= 0.0 && group_weight <= 1.0) || !(0.0 <= lo && lo <= hi && hi <= 1.0)) {
        throw Error(ErrorKind::InvalidWeight, "credibility rule parameters outside [0,1]");
    }
    const double w = group_weight;
    const auto vertex = [w](double l1, double l2) {
        return Weight({w * l1, w * (1.0 - l1), (1.0 - w) * l2, (1.0 - w) * (1.0 - l2)});
    };
    std::vector<WeightSet> sets;
    for (double l2 : {lo, hi}) sets.emplace_back(std::vector<Weight>{vertex(lo, l2), vertex(hi, l2)});
    return AggregationRule::dual_self(WeightSetCollection(std::move(sets)));
}

AggregationRule soft_min_rule(std::size_t experts, double temperature) {
    if (!(temperature > 0.0)) throw Error(ErrorKind::InvalidArgument, "soft-min temperature must be positive");
    const double t = temperature;
    return AggregationRule::custom(
        fmt::format("soft_min(T={})", t), experts, [t](std::span<const double> a) {
            const double lo = *std::min_element(a.begin(), a.end());
            double s = 0.0;
            for (double x : a) s += std::exp(-(x - lo) / t);
            return lo - t * std::log(s / static_cast<double>(a.size()));
        });
}

}  // namespace pooling
