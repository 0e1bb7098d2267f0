#include <doctest.h>

#include <vector>

#include "pooling/axiom_lab.hpp"
#include "pooling/dynamics.hpp"
#include "pooling/sampling.hpp"

using namespace pooling;

namespace {

SuggestionProfile three_experts() {
    return SuggestionProfile({Belief({0.4, 0.3, 0.2, 0.1}), Belief({0.1, 0.2, 0.3, 0.4}),
                              Belief({0.25, 0.25, 0.4, 0.1})});
}

CheckConfig config(std::size_t trials, std::uint64_t seed = 17) {
    CheckConfig c;
    c.trials = trials;
    c.seed = seed;
    return c;
}

void require_replay(const AggregationRule& rule, const CheckReport& r) {
    REQUIRE(r.verdict == CheckVerdict::Violated);
    REQUIRE(r.witness.has_value());
    CHECK(r.witness->gap > 1e-8);
    CHECK(witness_gap(rule, r.axiom, *r.witness) == doctest::Approx(r.witness->gap).epsilon(1e-12));
}

}  // namespace

TEST_CASE("axiom identifiers round-trip") {
    for (auto a : all_axioms()) CHECK(parse_axiom(axiom_id(a)) == a);
    CHECK(all_axioms().size() == 10);
    CHECK_FALSE(parse_axiom("savage").has_value());
    CHECK(axiom_uses_fixed_profile(Axiom::P2));
    CHECK_FALSE(axiom_uses_fixed_profile(Axiom::WeakCommutativity));
}

TEST_CASE("config validation") {
    CheckConfig c;
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = CheckConfig{};
    c.state_counts.clear();
    CHECK_THROWS_AS(c.validate(), Error);
    c = CheckConfig{};
    c.act_range = -1;
    CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("reports are deterministic") {
    const auto rule = median_rule();
    for (auto axiom : all_axioms()) {
        auto cfg = config(200, 99);
        if (axiom == Axiom::PessimismUpdateThenAggregate) cfg.state_counts = {4, 5};
        const auto a = run_check(axiom, rule, three_experts(), cfg);
        const auto b = run_check(axiom, rule, three_experts(), cfg);
        CHECK(a.verdict == b.verdict);
        CHECK(a.trials_run == b.trials_run);
        CHECK(a.witness.has_value() == b.witness.has_value());
        if (a.witness) {
            CHECK(a.witness->gap == b.witness->gap);
            CHECK(a.witness->acts == b.witness->acts);
            CHECK(a.witness->profiles == b.witness->profiles);
        }
    }
}

TEST_CASE("regularity holds on the dual-self family") {
    Rng rng(3);
    for (std::size_t n : {2, 3}) {
        for (const auto& rule : {random_linear_rule(n, rng), random_multiple_weight_rule(n, 3, rng),
                                 random_dual_self_rule(n, 2, rng), dictatorship_rule(0, n)}) {
            CHECK(check_pareto(rule, config(300)).verdict == CheckVerdict::Pass);
            CHECK(check_monotonicity_regularity(rule, config(300)).verdict == CheckVerdict::Pass);
        }
    }
}

TEST_CASE("a non-monotone rule fails Pareto with a replayable witness") {
    const auto rule = AggregationRule::custom("spread", 2, [](std::span<const double> a) {
        return 0.5 * (a[0] + a[1]) - 2.0 * std::abs(a[0] - a[1]);
    });
    const auto r = check_pareto(rule, config(500));
    require_replay(rule, r);
}

TEST_CASE("soft-min fails C-independence") {
    // Translation invariant but not positively homogeneous.
    const auto rule = soft_min_rule(2, 1.0);
    const auto c = check_c_independence(rule, SuggestionProfile({Belief({0.5, 0.3, 0.2}), Belief({0.1, 0.3, 0.6})}),
                                        config(500));
    require_replay(rule, c);
}

TEST_CASE("median violations replay") {
    const auto rule = median_rule();
    require_replay(rule, check_p2(rule, three_experts(), config(500)));
    require_replay(rule, check_independence(rule, three_experts(), config(500)));
    require_replay(rule, check_ambiguity_aversion(rule, three_experts(), config(500)));
    CHECK(check_c_independence(rule, three_experts(), config(500)).verdict == CheckVerdict::Pass);
    CHECK(check_weak_commutativity(rule, config(200)).verdict == CheckVerdict::Pass);
    require_replay(rule, check_full_commutativity(rule, config(50)));
}

TEST_CASE("ambiguity aversion probe catches the hedging reversal") {
    // One random trial cannot find it; the constructed pessimistic pair does.
    const auto rule = median_rule();
    const auto r = check_ambiguity_aversion(rule, three_experts(), config(1, 1234567));
    require_replay(rule, r);
}

TEST_CASE("linear pooling: weak and moderate commutativity hold, full fails") {
    Rng rng(8);
    const auto rule = random_linear_rule(3, rng);
    CHECK(check_weak_commutativity(rule, config(200)).verdict == CheckVerdict::Pass);
    CHECK(check_moderate_commutativity(rule, config(200)).verdict == CheckVerdict::Pass);
    const auto full = check_full_commutativity(rule, config(200));
    require_replay(rule, full);
}

TEST_CASE("dictatorship passes full commutativity") {
    CHECK(check_full_commutativity(dictatorship_rule(1, 3), config(300)).verdict == CheckVerdict::Pass);
}

TEST_CASE("pessimism to update-then-aggregate") {
    Rng rng(9);
    CheckConfig cfg = config(300);
    cfg.state_counts = {4, 5};
    CHECK(check_pessimism_utta(random_multiple_weight_rule(3, 3, rng), cfg).verdict == CheckVerdict::Pass);
    CHECK(check_pessimism_utta(random_linear_rule(3, rng), cfg).verdict == CheckVerdict::Pass);
    require_replay(median_rule(), check_pessimism_utta(median_rule(), cfg));
    CHECK_THROWS_AS(check_pessimism_utta(median_rule(), config(10)), Error);
}

TEST_CASE("geometric pooling: commutes but is not regular") {
    const auto rule = AggregationRule::geometric({0.5, 0.5});
    CHECK(check_weak_commutativity(rule, config(200)).verdict == CheckVerdict::Pass);
    CHECK(check_full_commutativity(rule, config(200)).verdict == CheckVerdict::Pass);
    require_replay(rule, check_pareto(rule, config(2000)));
}

TEST_CASE("fixed-profile axioms need a profile") {
    CHECK_THROWS_AS(run_check(Axiom::P2, median_rule(), std::nullopt, config(5)), Error);
    CHECK_THROWS_AS(run_check(Axiom::P2, median_rule(), SuggestionProfile({Belief({0.5, 0.5, 0})}), config(5)),
                    Error);
}

TEST_CASE("linear-pool counterexample to commutativity") {
    const auto cx = dictatorship_counterexample(Weight({0.5, 0.5}));
    CHECK(cx.pool_of_posteriors[0] == doctest::Approx(0.5));
    CHECK(cx.posterior_of_pool[0] == doctest::Approx(1.0 / 11.0));
    CHECK(cx.gap == doctest::Approx(dictatorship_gap_formula(0.5)));
    CHECK(cx.event == Event(4, {0, 1}));
    for (int k = 1; k <= 9; ++k) {
        const double l = k / 10.0;
        const auto c = dictatorship_counterexample(Weight({l, 1 - l}), 5);
        CHECK(c.gap == doctest::Approx(dictatorship_gap_formula(l)).epsilon(1e-12));
        CHECK(c.gap > 0.0);
    }
    CHECK_THROWS_AS(dictatorship_counterexample(Weight({1.0, 0.0})), Error);
    CHECK_THROWS_AS(dictatorship_counterexample(Weight({1.0})), Error);
    CHECK_THROWS_AS(dictatorship_counterexample(Weight({0.5, 0.5}), 3), Error);
}

TEST_CASE("weak commutativity holds across the rule zoo") {
    Rng rng(10);
    for (std::size_t n : {2, 3, 4}) {
        for (const auto& rule : {random_linear_rule(n, rng), random_multiple_weight_rule(n, 3, rng),
                                 random_dual_self_rule(n, 2, rng), dictatorship_rule(n - 1, n)}) {
            const auto r = check_weak_commutativity(rule, config(150, n));
            CHECK(r.verdict == CheckVerdict::Pass);
            CHECK(r.trials_run == 150);
            CHECK(r.skipped == 0);
        }
    }
}
