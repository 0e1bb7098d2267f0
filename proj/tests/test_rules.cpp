#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pooling/rules.hpp"
#include "pooling/sampling.hpp"

using namespace pooling;
using oracle::Vec;

namespace {

Vec vec(std::span<const double> s) { return Vec(s.begin(), s.end()); }

std::vector<Vec> raw(const SuggestionProfile& p) {
    std::vector<Vec> out;
    for (const auto& b : p.beliefs()) out.push_back(vec(b.probs()));
    return out;
}

std::vector<std::vector<Vec>> raw_sets(const WeightSetCollection& c) {
    std::vector<std::vector<Vec>> out;
    for (const auto& s : c.sets()) {
        out.emplace_back();
        for (const auto& v : s.vertices()) out.back().push_back(vec(v.lambdas()));
    }
    return out;
}

template <class F>
ErrorKind kind_thrown(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no pooling::Error thrown");
    return ErrorKind::InvalidArgument;
}

/// Rule zoo for the given expert count.
std::vector<AggregationRule> zoo(std::size_t n, Rng& rng) {
    std::vector<AggregationRule> rules{random_linear_rule(n, rng), random_multiple_weight_rule(n, 3, rng),
                                       random_dual_self_rule(n, 2, rng), dictatorship_rule(rng.index(n), n)};
    if (n == 3) rules.push_back(median_rule());
    return rules;
}

}  // namespace

TEST_CASE("weights") {
    CHECK_NOTHROW(Weight({0.25, 0.75}));
    CHECK(kind_thrown([] { Weight({0.5, 0.6}); }) == ErrorKind::InvalidWeight);
    CHECK(kind_thrown([] { Weight({1.5, -0.5}); }) == ErrorKind::InvalidWeight);
    CHECK(kind_thrown([] { Weight(std::vector<double>{}); }) == ErrorKind::InvalidWeight);
    CHECK(Weight::unit(3, 2)[2] == 1.0);
    CHECK(WeightSet({Weight({0.5, 0.5}), Weight({0.5 + 1e-12, 0.5 - 1e-12})}).vertices().size() == 1);
    CHECK(kind_thrown([] { WeightSet({Weight({0.5, 0.5}), Weight({1.0, 0.0, 0.0})}); }) ==
          ErrorKind::DimensionMismatch);
    CHECK(kind_thrown([] { WeightSetCollection({}); }) == ErrorKind::InvalidWeight);
    CHECK(kind_thrown([] { (void)dictatorship_rule(3, 3); }) == ErrorKind::IndexOutOfRange);
    CHECK(kind_thrown([] { (void)median_rule(4); }) == ErrorKind::WrongExpertCount);
}

TEST_CASE("rule classification") {
    CHECK(AggregationRule::linear(Weight::uniform(2)).is_dual_self_family());
    CHECK(median_rule().is_dual_self_family());
    CHECK(dictatorship_rule(0, 2).is_dual_self_family());
    CHECK_FALSE(AggregationRule::geometric({0.5, 0.5}).is_profile_functional());
    CHECK_FALSE(soft_min_rule(2, 1.0).is_dual_self_family());
    CHECK(soft_min_rule(2, 1.0).is_profile_functional());
    CHECK_FALSE(soft_min_rule(2, 1.0).as_dual_self().has_value());
    CHECK(median_rule().kind() == "dual_self");
    // Every family member has a dual-self form with the same functional.
    Rng rng(5);
    for (const auto& rule : zoo(3, rng)) {
        const auto ds = AggregationRule::dual_self(*rule.as_dual_self());
        for (int t = 0; t < 50; ++t) {
            EvaluationProfile a{{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)}};
            CHECK(aggregation_functional(ds, a) == doctest::Approx(aggregation_functional(rule, a)).epsilon(1e-12));
        }
    }
}

TEST_CASE("linear rule matches state-by-state mixture") {
    Rng rng(21);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + rng.index(4), m = 3 + rng.index(4);
        const auto p = random_profile(n, m, rng);
        const auto w = random_weight(n, rng);
        const auto f = random_act(m, 10, rng);
        const double expect = oracle::mixture_value(vec(w.lambdas()), raw(p), vec(f.utils()));
        CHECK(aggregate_utility(AggregationRule::linear(w), p, f) == doctest::Approx(expect).epsilon(1e-12));
        Vec pooled(m, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t s = 0; s < m; ++s) pooled[s] += w[i] * p[i][s];
        CHECK(approx_equal(pooled_belief(w, p).probs(), pooled, 1e-14));
    }
}

TEST_CASE("multiple-weight and dual-self rules match the hull-grid oracle") {
    Rng rng(22);
    for (int t = 0; t < 150; ++t) {
        const std::size_t n = 2 + rng.index(3), m = 3 + rng.index(3);
        const auto p = random_profile(n, m, rng);
        const auto f = random_act(m, 10, rng);
        const auto a = evaluation_profile(p, f);
        const auto mw = random_multiple_weight_rule(n, 3, rng);
        const auto ds = random_dual_self_rule(n, 2, rng);
        const double mw_expect = oracle::dual_self_value(raw_sets(*mw.as_dual_self()), a.values);
        const double ds_expect = oracle::dual_self_value(raw_sets(*ds.as_dual_self()), a.values);
        CHECK(aggregate_utility(mw, p, f) == doctest::Approx(mw_expect).epsilon(1e-12));
        CHECK(aggregate_utility(ds, p, f) == doctest::Approx(ds_expect).epsilon(1e-12));
    }
}

TEST_CASE("median rule is the sorted middle evaluation") {
    Rng rng(23);
    const auto med = median_rule();
    for (int t = 0; t < 500; ++t) {
        Vec a{rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-9, 9)};
        if (t % 5 == 0) a[2] = a[0];
        CHECK(aggregation_functional(med, EvaluationProfile{a}) == oracle::median3(a));
    }
    CHECK(aggregation_functional(med, EvaluationProfile{{0, 0, 2}}) == 0.0);
    CHECK(aggregation_functional(med, EvaluationProfile{{0, 2, 0}}) == 0.0);
    CHECK(aggregation_functional(med, EvaluationProfile{{0, 1, 1}}) == 1.0);
    CHECK(aggregation_functional(med, EvaluationProfile{{0, 0, -2}}) == 0.0);
    CHECK(aggregation_functional(med, EvaluationProfile{{0, -2, 0}}) == 0.0);
    CHECK(aggregation_functional(med, EvaluationProfile{{0, -1, -1}}) == -1.0);
}

TEST_CASE("dictatorship returns the dictator's expected utility") {
    Rng rng(24);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 2 + rng.index(3), m = 3 + rng.index(3), d = rng.index(n);
        const auto p = random_profile(n, m, rng);
        const auto f = random_act(m, 10, rng);
        CHECK(aggregate_utility(dictatorship_rule(d, n), p, f) == expected_utility(p[d], f));
    }
}

TEST_CASE("two-group credibility rule equals the endpoint formula") {
    // Closed form: .8 * min over the first pair's segment + .2 * max over the second's.
    const auto rule = two_group_credibility_rule(0.8, 0.25, 0.75);
    Rng rng(25);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 2 + rng.index(3);
        const auto p = random_profile(4, m, rng);
        const auto f = random_act(m, 5, rng);
        const auto a = evaluation_profile(p, f).values;
        double lo = 1e300, hi = -1e300;
        for (double l : {0.25, 0.75}) {
            lo = std::min(lo, l * a[0] + (1 - l) * a[1]);
            hi = std::max(hi, l * a[2] + (1 - l) * a[3]);
        }
        CHECK(aggregate_utility(rule, p, f) == doctest::Approx(0.8 * lo + 0.2 * hi).epsilon(1e-12));
    }
}

TEST_CASE("constant acts are valued at their constant") {
    Rng rng(26);
    for (std::size_t n : {2, 3, 4}) {
        for (const auto& rule : zoo(n, rng)) {
            const auto p = random_profile(n, 4, rng);
            CHECK(aggregate_utility(rule, p, UtilityAct::constant(4, 7.0)) == doctest::Approx(7.0).epsilon(1e-14));
        }
    }
    const auto p = random_profile(3, 4, rng);
    CHECK(aggregate_utility(AggregationRule::geometric({0.2, 0.3, 0.5}), p, UtilityAct::constant(4, 7.0)) ==
          doctest::Approx(7.0));
    CHECK(aggregate_utility(soft_min_rule(3, 0.7), p, UtilityAct::constant(4, 7.0)) == doctest::Approx(7.0));
}

TEST_CASE("family functionals are monotone, constant-linear and positively homogeneous") {
    Rng rng(27);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + rng.index(3);
        for (const auto& rule : zoo(n, rng)) {
            Vec a(n), b(n);
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = rng.uniform(-5, 5);
                b[i] = a[i] + rng.uniform(0, 2);
            }
            const double Ia = aggregation_functional(rule, EvaluationProfile{a});
            CHECK(aggregation_functional(rule, EvaluationProfile{b}) >= Ia - 1e-12);
            const double beta = rng.uniform(0, 1), c = rng.uniform(-5, 5);
            Vec mixed(n);
            for (std::size_t i = 0; i < n; ++i) mixed[i] = beta * a[i] + (1 - beta) * c;
            CHECK(aggregation_functional(rule, EvaluationProfile{mixed}) ==
                  doctest::Approx(beta * Ia + (1 - beta) * c).epsilon(1e-12));
        }
    }
}

TEST_CASE("soft-min is translation invariant but not homogeneous") {
    const auto rule = soft_min_rule(2, 1.0);
    const double base = aggregation_functional(rule, EvaluationProfile{{0, 2}});
    CHECK(aggregation_functional(rule, EvaluationProfile{{3, 5}}) == doctest::Approx(base + 3));
    CHECK(aggregation_functional(rule, EvaluationProfile{{0, 4}}) != doctest::Approx(2 * base));
}

TEST_CASE("geometric pooling") {
    SuggestionProfile p({Belief({0.5, 0.25, 0.25}), Belief({0.25, 0.25, 0.5})});
    const auto g = geometric_pooled_belief(std::vector<double>{0.5, 0.5}, p);
    // Oracle: sqrt(p_i q_i) normalized.
    Vec expect{std::sqrt(0.125), 0.25, std::sqrt(0.125)};
    double z = expect[0] + expect[1] + expect[2];
    for (double& x : expect) x /= z;
    CHECK(approx_equal(g.probs(), expect, 1e-12));

    SuggestionProfile zeros({Belief({0.5, 0.5, 0.0}), Belief({0.0, 0.5, 0.5})});
    CHECK(geometric_pooled_belief(std::vector<double>{0.5, 0.5}, zeros) == Belief({0, 1, 0}));
    // A zero exponent ignores that expert's zeros.
    CHECK(geometric_pooled_belief(std::vector<double>{1.0, 0.0}, zeros) == Belief({0.5, 0.5, 0}));
    SuggestionProfile disjoint({Belief({1.0, 0.0, 0.0}), Belief({0.0, 0.0, 1.0})});
    CHECK(kind_thrown([&] { (void)geometric_pooled_belief(std::vector<double>{0.5, 0.5}, disjoint); }) ==
          ErrorKind::GeometricUndefined);
    CHECK(kind_thrown([] { (void)aggregation_functional(AggregationRule::geometric({0.5, 0.5}), EvaluationProfile{{1, 2}}); }) ==
          ErrorKind::NotProfileFunctional);
    CHECK(kind_thrown([] { (void)AggregationRule::geometric({0.5, 0.6}); }) == ErrorKind::InvalidWeight);
}

TEST_CASE("evaluation profiles can be realized by acts") {
    Rng rng(28);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.index(3), m = n + 1 + rng.index(3);
        const auto p = random_profile(n, m, rng);
        Vec target(n);
        for (double& x : target) x = rng.uniform(-3, 3);
        const auto f = realize_evaluation_profile(p, target);
        REQUIRE(f.has_value());
        CHECK(approx_equal(evaluation_profile(p, *f).values, target, 1e-9));
    }
    SuggestionProfile twins({Belief({0.5, 0.5, 0.0}), Belief({0.5, 0.5, 0.0})});
    CHECK_FALSE(realize_evaluation_profile(twins, std::vector<double>{0, 1}).has_value());
    CHECK(realize_evaluation_profile(twins, std::vector<double>{2, 2}).has_value());
}
