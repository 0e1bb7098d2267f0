#include "pooling/axiom_lab.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "pooling/dynamics.hpp"
#include "pooling/sampling.hpp"

namespace pooling {

namespace {

constexpr double kNoViolation = -std::numeric_limits<double>::infinity();

// Differences within this band count as indifference when testing "iff" axioms.
// It sits far below tol.value so that shrinking a difference by a mixture weight
// in [0.05, 0.95] cannot turn a strict preference into a reported violation.
constexpr double kIndifferenceSlack = 1e-11;

struct AxiomInfo {
    Axiom axiom;
    std::string_view id;
    bool fixed_profile;
};

constexpr AxiomInfo kAxioms[] = {
    {Axiom::Pareto, "pareto", false},
    {Axiom::Monotonicity, "monotonicity", false},
    {Axiom::P2, "p2", true},
    {Axiom::CIndependence, "c_independence", true},
    {Axiom::Independence, "independence", true},
    {Axiom::AmbiguityAversion, "ambiguity_aversion", true},
    {Axiom::WeakCommutativity, "weak_commutativity", false},
    {Axiom::PessimismUpdateThenAggregate, "pessimism_utta", false},
    {Axiom::ModerateCommutativity, "moderate_commutativity", false},
    {Axiom::FullCommutativity, "full_commutativity", false},
};

double utility(const AggregationRule& rule, const SuggestionProfile& profile, const UtilityAct& f,
               const Tolerances& tol) {
    return aggregate_utility(rule, profile, f, tol);
}

/// Violation size of "f >= g iff f' >= g'" given d = U(f) - U(g) and d' = U(f') - U(g').
double equivalence_gap(double d1, double d2) {
    double gap = kNoViolation;
    if (d1 >= -kIndifferenceSlack) gap = std::max(gap, -d2);
    if (d1 <= kIndifferenceSlack) gap = std::max(gap, d2);
    if (d2 >= -kIndifferenceSlack) gap = std::max(gap, -d1);
    if (d2 <= kIndifferenceSlack) gap = std::max(gap, d1);
    return gap;
}

double commutativity_gap(const AggregationRule& rule, const Witness& w, const Tolerances& tol) {
    const auto& profile = w.profiles.at(0);
    const auto& event = w.event.value();
    const auto& f = w.act("f");
    const double target = utility(rule, condition_profile(profile, event, tol), f, tol);
    const double c1 = conditional_certainty_equivalent(rule, profile, event, f, w.act("h_low"), tol);
    const double c2 = conditional_certainty_equivalent(rule, profile, event, f, w.act("h_high"), tol);
    return std::max({std::abs(c1 - c2), std::abs(c1 - target), std::abs(c2 - target)});
}

std::size_t experts_of(const AggregationRule& rule) { return rule.expert_count(); }

std::size_t pick_states(const CheckConfig& cfg, Rng& rng) {
    return cfg.state_counts[rng.index(cfg.state_counts.size())];
}

double interior_weight(Rng& rng) { return rng.uniform(0.05, 0.95); }

/// Shift `g` by a constant so that U(g) lands on `target`. Exact
/// for translation-invariant rules; otherwise refined by bisection on the shift.
std::optional<UtilityAct> shift_to_value(const AggregationRule& rule, const SuggestionProfile& profile,
                                         const UtilityAct& g, double target, const Tolerances& tol) {
    const double ug = utility(rule, profile, g, tol);
    UtilityAct shifted = g.shifted(target - ug);
    if (std::abs(utility(rule, profile, shifted, tol) - target) <= 0.1 * tol.value) return shifted;
    double lo = target - ug - 1.0;
    double hi = target - ug + 1.0;
    for (int k = 0; k < 40 && utility(rule, profile, g.shifted(lo), tol) > target; ++k) lo -= (hi - lo);
    for (int k = 0; k < 40 && utility(rule, profile, g.shifted(hi), tol) < target; ++k) hi += (hi - lo);
    for (int k = 0; k < 200 && hi - lo > tol.bisect; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (utility(rule, profile, g.shifted(mid), tol) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    shifted = g.shifted(0.5 * (lo + hi));
    if (std::abs(utility(rule, profile, shifted, tol) - target) <= tol.value) return shifted;
    return std::nullopt;
}

/// One sampled instance: a witness candidate, or nullopt when the instance
/// could not be built. Thrown library errors mark the trial as skipped.
using Trial = std::function<std::optional<Witness>(Rng&)>;
using Probe = std::function<std::optional<Witness>()>;

CheckReport run_trials(Axiom axiom, const AggregationRule& rule, const CheckConfig& cfg,
                       const Trial& trial, const std::vector<Probe>& probes = {}) {
    cfg.validate();
    CheckReport report;
    report.axiom = axiom;
    report.seed = cfg.seed;

    const auto consider = [&](std::optional<Witness> w) {
        if (!w) {
            ++report.skipped;
            return false;
        }
        w->gap = witness_gap(rule, axiom, *w, cfg.tol);
        if (w->gap > cfg.tol.value) {
            report.verdict = CheckVerdict::Violated;
            report.witness = std::move(w);
            return true;
        }
        return false;
    };

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        ++report.trials_run;
        Rng rng = Rng::for_trial(cfg.seed, t);
        std::optional<Witness> w;
        try {
            w = trial(rng);
        } catch (const Error&) {
            w.reset();
        }
        if (consider(std::move(w))) return report;
    }
    for (const auto& probe : probes) {
        ++report.trials_run;
        std::optional<Witness> w;
        try {
            w = probe();
        } catch (const Error&) {
            w.reset();
        }
        // An inapplicable probe is not a skipped random trial.
        if (!w) {
            continue;
        }
        if (consider(std::move(w))) return report;
    }
    if (report.skipped == cfg.trials) {
        report.verdict = CheckVerdict::Inapplicable;
        report.reason = "no sampled instance could be evaluated under this rule";
    }
    return report;
}

void require_matching_profile(const AggregationRule& rule, const SuggestionProfile& profile) {
    if (rule.expert_count() != profile.expert_count()) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("rule aggregates {} experts, profile has {}", rule.expert_count(),
                                profile.expert_count()));
    }
}

// Constructed acts realizing the hedging examples for three experts:
// evaluation profiles (0,0,s) and (0,s,0) with s = +2 or -2.
std::optional<std::pair<UtilityAct, UtilityAct>> hedging_pair(const SuggestionProfile& profile,
                                                              double s, const Tolerances& tol) {
    if (profile.expert_count() != 3) return std::nullopt;
    const std::vector<double> a{0.0, 0.0, s};
    const std::vector<double> b{0.0, s, 0.0};
    auto f = realize_evaluation_profile(profile, a, tol);
    auto g = realize_evaluation_profile(profile, b, tol);
    if (!f || !g) return std::nullopt;
    return std::make_pair(std::move(*f), std::move(*g));
}

Witness commutativity_witness(const AggregationRule& rule, const SuggestionProfile& profile,
                              const Event& event, const UtilityAct& f, const CheckConfig& cfg,
                              std::uint64_t h_seed) {
    const auto hs = default_h_samples(profile.state_count(), {f}, cfg.h_samples, cfg.act_range, h_seed);
    const auto ce = conditional_ce(rule, profile, event, f, hs, cfg.tol);
    const double target = utility(rule, condition_profile(profile, event, cfg.tol), f, cfg.tol);
    std::size_t lo = 0, hi = 0;
    for (std::size_t k = 1; k < ce.value_by_h.size(); ++k) {
        if (ce.value_by_h[k].second < ce.value_by_h[lo].second) lo = k;
        if (ce.value_by_h[k].second > ce.value_by_h[hi].second) hi = k;
    }
    const double c_lo = ce.value_by_h[lo].second;
    const double c_hi = ce.value_by_h[hi].second;
    Witness w;
    w.profiles.push_back(profile);
    w.event = event;
    w.acts = {{"f", f}, {"h_low", ce.value_by_h[lo].first}, {"h_high", ce.value_by_h[hi].first}};
    w.scalars = {{"ce_low", c_lo}, {"ce_high", c_hi}, {"updated_then_aggregated", target}};
    return w;
}

using ProfileMaker = std::function<std::optional<std::pair<SuggestionProfile, Event>>(Rng&, std::size_t)>;

CheckReport commutativity_check(Axiom axiom, const AggregationRule& rule, const CheckConfig& cfg,
                                const ProfileMaker& make, const std::vector<Probe>& probes = {}) {
    const std::size_t n = experts_of(rule);
    const Trial trial = [&](Rng& rng) -> std::optional<Witness> {
        const std::size_t m = pick_states(cfg, rng);
        auto made = make(rng, m);
        if (!made) return std::nullopt;
        auto& [profile, event] = *made;
        if (profile.expert_count() != n || !is_conditionable(profile, event, cfg.tol)) return std::nullopt;
        const UtilityAct f = random_act(m, cfg.act_range, rng);
        return commutativity_witness(rule, profile, event, f, cfg, splitmix64(rng.index(1u << 30)));
    };
    return run_trials(axiom, rule, cfg, trial, probes);
}

}  // namespace

// ----------------------------------------------------------------------------
// Identifiers and configuration

std::string_view axiom_id(Axiom axiom) noexcept {
    for (const auto& info : kAxioms)
        if (info.axiom == axiom) return info.id;
    return "unknown";
}

std::optional<Axiom> parse_axiom(std::string_view id) noexcept {
    for (const auto& info : kAxioms)
        if (info.id == id) return info.axiom;
    return std::nullopt;
}

const std::vector<Axiom>& all_axioms() {
    static const std::vector<Axiom> axioms = [] {
        std::vector<Axiom> v;
        for (const auto& info : kAxioms) v.push_back(info.axiom);
        return v;
    }();
    return axioms;
}

bool axiom_uses_fixed_profile(Axiom axiom) noexcept {
    for (const auto& info : kAxioms)
        if (info.axiom == axiom) return info.fixed_profile;
    return false;
}

void CheckConfig::validate() const {
    tol.validate();
    if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be at least 1");
    if (!(act_range > 0.0) || !std::isfinite(act_range)) {
        throw Error(ErrorKind::InvalidArgument, "act range must be positive");
    }
    if (state_counts.empty()) throw Error(ErrorKind::InvalidArgument, "no state counts configured");
    for (auto m : state_counts) {
        if (m < 2 || m > 63) throw Error(ErrorKind::InvalidArgument, fmt::format("unsupported state count {}", m));
    }
}

std::string_view to_string(CheckVerdict verdict) noexcept {
    switch (verdict) {
        case CheckVerdict::Pass: return "Pass";
        case CheckVerdict::Violated: return "Violated";
        case CheckVerdict::Inapplicable: return "Inapplicable";
    }
    return "Unknown";
}

const UtilityAct& Witness::act(std::string_view name) const {
    for (const auto& [k, v] : acts)
        if (k == name) return v;
    throw Error(ErrorKind::InvalidArgument, fmt::format("witness has no act '{}'", name));
}

double Witness::scalar(std::string_view name) const {
    for (const auto& [k, v] : scalars)
        if (k == name) return v;
    throw Error(ErrorKind::InvalidArgument, fmt::format("witness has no scalar '{}'", name));
}

// ----------------------------------------------------------------------------
// Witness replay

double witness_gap(const AggregationRule& rule, Axiom axiom, const Witness& w, const Tolerances& tol) {
    const auto U = [&](const SuggestionProfile& p, const UtilityAct& f) { return utility(rule, p, f, tol); };
    switch (axiom) {
        case Axiom::Pareto: {
            const auto& p = w.profiles.at(0);
            return U(p, w.act("g")) - U(p, w.act("f"));
        }
        case Axiom::Monotonicity:
            return U(w.profiles.at(0), w.act("f")) - U(w.profiles.at(1), w.act("f"));
        case Axiom::P2: {
            const auto& p = w.profiles.at(0);
            const auto& e = w.event.value();
            const auto &f = w.act("f"), &g = w.act("g"), &h = w.act("h");
            const double d1 = U(p, composite_act(f, e, g)) - U(p, g);
            const double d2 = U(p, composite_act(f, e, h)) - U(p, composite_act(g, e, h));
            return equivalence_gap(d1, d2);
        }
        case Axiom::CIndependence:
        case Axiom::Independence: {
            const auto& p = w.profiles.at(0);
            const auto &f = w.act("f"), &g = w.act("g");
            const auto& h = w.act(axiom == Axiom::Independence ? "h" : "x");
            const double a = w.scalar("alpha");
            const double d1 = U(p, f) - U(p, g);
            const double d2 = U(p, mix_acts(f, h, a)) - U(p, mix_acts(g, h, a));
            return equivalence_gap(d1, d2);
        }
        case Axiom::AmbiguityAversion: {
            const auto& p = w.profiles.at(0);
            const auto &f = w.act("f"), &g = w.act("g");
            const double uf = U(p, f), ug = U(p, g);
            if (std::abs(uf - ug) > tol.value) return kNoViolation;
            return std::min(uf, ug) - U(p, mix_acts(f, g, w.scalar("alpha")));
        }
        case Axiom::WeakCommutativity:
        case Axiom::ModerateCommutativity:
        case Axiom::FullCommutativity:
            return commutativity_gap(rule, w, tol);
        case Axiom::PessimismUpdateThenAggregate: {
            const auto& p = w.profiles.at(0);
            const auto& e = w.event.value();
            const auto &f = w.act("f"), &h = w.act("h");
            const double c = w.scalar("x");
            if (U(condition_profile(p, e, tol), f) < c) return kNoViolation;
            const auto x = UtilityAct::constant(f.size(), c);
            return U(p, composite_act(x, e, h)) - U(p, composite_act(f, e, h));
        }
    }
    return kNoViolation;
}

// ----------------------------------------------------------------------------
// Regularity

CheckReport check_pareto(const AggregationRule& rule, const CheckConfig& cfg) {
    const std::size_t n = experts_of(rule);
    return run_trials(Axiom::Pareto, rule, cfg, [&](Rng& rng) -> std::optional<Witness> {
        const std::size_t m = pick_states(cfg, rng);
        auto profile = random_profile(n, m, rng);
        const UtilityAct g = random_act(m, cfg.act_range, rng);
        // Lift g by an act every expert values at least at zero.
        const UtilityAct d = random_act(m, cfg.act_range, rng);
        const auto ev = evaluation_profile(profile, d);
        const double floor = *std::min_element(ev.values.begin(), ev.values.end());
        const double extra = rng.coin() ? 0.0 : rng.uniform(0.0, 0.1 * cfg.act_range);
        std::vector<double> fu(m);
        for (std::size_t w = 0; w < m; ++w) fu[w] = g[w] + d[w] - floor + extra;
        Witness wit;
        wit.profiles.push_back(std::move(profile));
        wit.acts = {{"f", UtilityAct(std::move(fu))}, {"g", g}};
        return wit;
    });
}

CheckReport check_monotonicity_regularity(const AggregationRule& rule, const CheckConfig& cfg) {
    const std::size_t n = experts_of(rule);
    return run_trials(Axiom::Monotonicity, rule, cfg, [&](Rng& rng) -> std::optional<Witness> {
        const std::size_t m = pick_states(cfg, rng);
        auto before = random_profile(n, m, rng);
        const UtilityAct f = random_act(m, cfg.act_range, rng);
        const auto best = static_cast<std::size_t>(
            std::max_element(f.utils().begin(), f.utils().end()) - f.utils().begin());
        std::vector<Belief> after;
        for (std::size_t i = 0; i < n; ++i) {
            Belief candidate = random_belief(m, rng);
            if (expected_utility(candidate, f) >= expected_utility(before[i], f)) {
                after.push_back(std::move(candidate));
                continue;
            }
            // Move mass toward the best state, which can only raise EU.
            const double t = rng.uniform(0.0, 1.0);
            std::vector<double> p(m);
            for (std::size_t w = 0; w < m; ++w) p[w] = t * before[i][w] + (w == best ? 1.0 - t : 0.0);
            after.emplace_back(std::move(p));
        }
        Witness wit;
        wit.profiles = {std::move(before), SuggestionProfile(std::move(after))};
        wit.acts = {{"f", f}};
        return wit;
    });
}

// ----------------------------------------------------------------------------
// Fixed-profile preference axioms

CheckReport check_p2(const AggregationRule& rule, const SuggestionProfile& profile, const CheckConfig& cfg) {
    require_matching_profile(rule, profile);
    const std::size_t m = profile.state_count();
    if (m < 2) throw Error(ErrorKind::StateSpaceTooSmall, "P2 needs at least two states");
    return run_trials(Axiom::P2, rule, cfg, [&](Rng& rng) -> std::optional<Witness> {
        const Event e = random_proper_event(m, rng);
        UtilityAct f = random_act(m, cfg.act_range, rng);
        const UtilityAct g = random_act(m, cfg.act_range, rng);
        const UtilityAct h = random_act(m, cfg.act_range, rng);
        if (rng.coin()) {
            // Bring fEg close to indifference with g by shifting f on the event.
            const UtilityAct shift_on_e = composite_act(UtilityAct::constant(m, 1.0), e, UtilityAct::constant(m, 0.0));
            const double ug = utility(rule, profile, g, cfg.tol);
            const double offset = rng.uniform(-0.05, 0.05) * cfg.act_range;
            double lo = -4.0 * cfg.act_range, hi = 4.0 * cfg.act_range;
            const auto value = [&](double k) {
                std::vector<double> u(m);
                for (std::size_t w = 0; w < m; ++w) u[w] = f[w] + k * shift_on_e[w];
                return utility(rule, profile, composite_act(UtilityAct(std::move(u)), e, g), cfg.tol);
            };
            if (value(lo) <= ug + offset && value(hi) >= ug + offset) {
                for (int k = 0; k < 60; ++k) {
                    const double mid = 0.5 * (lo + hi);
                    (value(mid) < ug + offset ? lo : hi) = mid;
                }
                std::vector<double> u(m);
                for (std::size_t w = 0; w < m; ++w) u[w] = f[w] + 0.5 * (lo + hi) * shift_on_e[w];
                f = UtilityAct(std::move(u));
            }
        }
        Witness wit;
        wit.profiles.push_back(profile);
        wit.event = e;
        wit.acts = {{"f", f}, {"g", g}, {"h", h}};
        return wit;
    });
}

namespace {

CheckReport independence_like(Axiom axiom, const AggregationRule& rule, const SuggestionProfile& profile,
                              const CheckConfig& cfg) {
    require_matching_profile(rule, profile);
    const std::size_t m = profile.state_count();
    const bool constant_mix = axiom == Axiom::CIndependence;
    const char* third = constant_mix ? "x" : "h";
    const Trial trial = [&](Rng& rng) -> std::optional<Witness> {
        const UtilityAct f = random_act(m, cfg.act_range, rng);
        UtilityAct g = random_act(m, cfg.act_range, rng);
        const UtilityAct h = constant_mix ? UtilityAct::constant(m, rng.uniform(-cfg.act_range, cfg.act_range))
                                          : random_act(m, cfg.act_range, rng);
        const double alpha = interior_weight(rng);
        if (rng.coin()) {
            const double target = utility(rule, profile, f, cfg.tol) + rng.uniform(-0.05, 0.05) * cfg.act_range;
            if (auto s = shift_to_value(rule, profile, g, target, cfg.tol)) g = std::move(*s);
        }
        Witness wit;
        wit.profiles.push_back(profile);
        wit.acts = {{"f", f}, {"g", std::move(g)}, {third, h}};
        wit.scalars = {{"alpha", alpha}};
        return wit;
    };
    std::vector<Probe> probes;
    if (!constant_mix) {
        // Hedging example: f and g indifferent, their even mixture strictly better.
        probes.push_back([&]() -> std::optional<Witness> {
            auto pair = hedging_pair(profile, 2.0, cfg.tol);
            if (!pair) return std::nullopt;
            Witness wit;
            wit.profiles.push_back(profile);
            wit.acts = {{"f", pair->first}, {"g", pair->second}, {"h", pair->second}};
            wit.scalars = {{"alpha", 0.5}};
            return wit;
        });
    }
    return run_trials(axiom, rule, cfg, trial, probes);
}

}  // namespace

CheckReport check_c_independence(const AggregationRule& rule, const SuggestionProfile& profile,
                                 const CheckConfig& cfg) {
    return independence_like(Axiom::CIndependence, rule, profile, cfg);
}

CheckReport check_independence(const AggregationRule& rule, const SuggestionProfile& profile,
                               const CheckConfig& cfg) {
    return independence_like(Axiom::Independence, rule, profile, cfg);
}

CheckReport check_ambiguity_aversion(const AggregationRule& rule, const SuggestionProfile& profile,
                                     const CheckConfig& cfg) {
    require_matching_profile(rule, profile);
    const std::size_t m = profile.state_count();
    const Trial trial = [&](Rng& rng) -> std::optional<Witness> {
        const UtilityAct f = random_act(m, cfg.act_range, rng);
        const UtilityAct g0 = random_act(m, cfg.act_range, rng);
        auto g = shift_to_value(rule, profile, g0, utility(rule, profile, f, cfg.tol), cfg.tol);
        if (!g) return std::nullopt;
        Witness wit;
        wit.profiles.push_back(profile);
        wit.acts = {{"f", f}, {"g", std::move(*g)}};
        wit.scalars = {{"alpha", interior_weight(rng)}};
        return wit;
    };
    // Pessimism-led disagreement: indifferent acts whose even mixture is worse.
    const std::vector<Probe> probes{[&]() -> std::optional<Witness> {
        auto pair = hedging_pair(profile, -2.0, cfg.tol);
        if (!pair) return std::nullopt;
        Witness wit;
        wit.profiles.push_back(profile);
        wit.acts = {{"f", pair->first}, {"g", pair->second}};
        wit.scalars = {{"alpha", 0.5}};
        return wit;
    }};
    return run_trials(Axiom::AmbiguityAversion, rule, cfg, trial, probes);
}

// ----------------------------------------------------------------------------
// Updating axioms

CheckReport check_weak_commutativity(const AggregationRule& rule, const CheckConfig& cfg) {
    const std::size_t n = experts_of(rule);
    return commutativity_check(Axiom::WeakCommutativity, rule, cfg,
                               [n](Rng& rng, std::size_t m) -> std::optional<std::pair<SuggestionProfile, Event>> {
                                   Event e = random_proper_event(m, rng);
                                   auto p = restricted_disagreement_profile(n, e, rng);
                                   return std::make_pair(std::move(p), std::move(e));
                               });
}

CheckReport check_moderate_commutativity(const AggregationRule& rule, const CheckConfig& cfg) {
    const std::size_t n = experts_of(rule);
    return commutativity_check(Axiom::ModerateCommutativity, rule, cfg,
                               [n](Rng& rng, std::size_t m) -> std::optional<std::pair<SuggestionProfile, Event>> {
                                   Event e = random_proper_event(m, rng);
                                   auto p = event_agreement_profile(n, e, rng);
                                   return std::make_pair(std::move(p), std::move(e));
                               });
}

CheckReport check_full_commutativity(const AggregationRule& rule, const CheckConfig& cfg) {
    const std::size_t n = experts_of(rule);
    std::vector<Probe> probes;
    const auto big = std::find_if(cfg.state_counts.begin(), cfg.state_counts.end(),
                                  [](std::size_t m) { return m >= 4; });
    if (n >= 2 && big != cfg.state_counts.end()) {
        const std::size_t m = *big;
        probes.push_back([&, m, n]() -> std::optional<Witness> {
            const auto cx = dictatorship_counterexample(Weight::uniform(n), m);
            std::vector<double> f(m, 0.0);
            f[0] = 1.0;
            return commutativity_witness(rule, cx.profile, cx.event, UtilityAct(std::move(f)), cfg, cfg.seed);
        });
    }
    return commutativity_check(Axiom::FullCommutativity, rule, cfg,
                               [n](Rng& rng, std::size_t m) -> std::optional<std::pair<SuggestionProfile, Event>> {
                                   Event e = random_proper_event(m, rng);
                                   auto p = random_profile(n, m, rng);
                                   return std::make_pair(std::move(p), std::move(e));
                               },
                               probes);
}

CheckReport check_pessimism_utta(const AggregationRule& rule, const CheckConfig& cfg) {
    for (auto m : cfg.state_counts) {
        if (m < 4) {
            throw Error(ErrorKind::StateSpaceTooSmall,
                        fmt::format("pessimism to update-then-aggregate needs at least 4 states, got {}", m));
        }
    }
    const std::size_t n = experts_of(rule);
    return run_trials(Axiom::PessimismUpdateThenAggregate, rule, cfg, [&](Rng& rng) -> std::optional<Witness> {
        const std::size_t m = pick_states(cfg, rng);
        // The complement needs two states for agreement on E to leave room for disagreement off E.
        Event e = random_proper_event(m, rng);
        while (e.complement().size() < 2) e = random_proper_event(m, rng);
        auto profile = event_agreement_profile(n, e, rng);
        if (n > 1 && disagreement_restricted_within(profile, e, cfg.tol)) return std::nullopt;
        const UtilityAct f = random_act(m, cfg.act_range, rng);
        const double c = utility(rule, condition_profile(profile, e, cfg.tol), f, cfg.tol);
        const auto x = UtilityAct::constant(m, c);
        const auto hs = default_h_samples(m, {f}, cfg.h_samples, cfg.act_range, splitmix64(rng.index(1u << 30)));
        std::size_t worst = 0;
        double worst_gap = kNoViolation;
        for (std::size_t k = 0; k < hs.size(); ++k) {
            const double gap = utility(rule, profile, composite_act(x, e, hs[k]), cfg.tol) -
                               utility(rule, profile, composite_act(f, e, hs[k]), cfg.tol);
            if (gap > worst_gap) {
                worst_gap = gap;
                worst = k;
            }
        }
        Witness wit;
        wit.profiles.push_back(std::move(profile));
        wit.event = std::move(e);
        wit.acts = {{"f", f}, {"h", hs[worst]}};
        wit.scalars = {{"x", c}};
        return wit;
    });
}

CheckReport run_check(Axiom axiom, const AggregationRule& rule,
                      const std::optional<SuggestionProfile>& profile, const CheckConfig& cfg) {
    if (axiom_uses_fixed_profile(axiom) && !profile) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("axiom '{}' is checked on a fixed profile", axiom_id(axiom)));
    }
    switch (axiom) {
        case Axiom::Pareto: return check_pareto(rule, cfg);
        case Axiom::Monotonicity: return check_monotonicity_regularity(rule, cfg);
        case Axiom::P2: return check_p2(rule, *profile, cfg);
        case Axiom::CIndependence: return check_c_independence(rule, *profile, cfg);
        case Axiom::Independence: return check_independence(rule, *profile, cfg);
        case Axiom::AmbiguityAversion: return check_ambiguity_aversion(rule, *profile, cfg);
        case Axiom::WeakCommutativity: return check_weak_commutativity(rule, cfg);
        case Axiom::PessimismUpdateThenAggregate: return check_pessimism_utta(rule, cfg);
        case Axiom::ModerateCommutativity: return check_moderate_commutativity(rule, cfg);
        case Axiom::FullCommutativity: return check_full_commutativity(rule, cfg);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown axiom");
}

// ----------------------------------------------------------------------------
// Non-commutativity of linear pooling

double dictatorship_gap_formula(double lambda0) { return lambda0 - 0.1 * lambda0 / (1.0 - 0.9 * lambda0); }

DictatorshipCounterexample dictatorship_counterexample(const Weight& lambda, std::size_t states) {
    const std::size_t n = lambda.size();
    if (n < 2) throw Error(ErrorKind::WrongExpertCount, "counterexample needs at least two experts");
    if (states < 4) throw Error(ErrorKind::StateSpaceTooSmall, "counterexample needs at least four states");
    if (!(lambda[0] > 0.0 && lambda[0] < 1.0)) {
        throw Error(ErrorKind::WeightDegenerate,
                    fmt::format("first expert weight {} must lie strictly inside (0,1)", lambda[0]));
    }
    std::vector<Belief> beliefs;
    std::vector<double> first(states, 0.0);
    first[0] = 0.1;
    first[2] = 0.9;
    beliefs.emplace_back(std::move(first));
    for (std::size_t i = 1; i < n; ++i) beliefs.push_back(Belief::degenerate(states, 1));
    SuggestionProfile profile(std::move(beliefs));
    Event event(states, {0, 1});
    Belief pool_of_posteriors = pooled_belief(lambda, condition_profile(profile, event));
    Belief posterior_of_pool = condition_belief(pooled_belief(lambda, profile), event);
    const double gap = pool_of_posteriors[0] - posterior_of_pool[0];
    return {std::move(profile), std::move(event), std::move(pool_of_posteriors),
            std::move(posterior_of_pool), gap};
}

}  // namespace pooling
