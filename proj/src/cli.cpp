#include "pooling/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pooling/dynamics.hpp"
#include "pooling/geometry.hpp"

namespace pooling {

// ----------------------------------------------------------------------------
// Report

void Report::add(std::string section, std::string key, std::string value) {
    records_.push_back({std::move(section), std::move(key), std::move(value)});
}

void Report::add(std::string section, std::string key, double value) {
    add(std::move(section), std::move(key), format_number(value));
}

std::string Report::machine() const {
    std::string out;
    for (const auto& r : records_) out += fmt::format("{}\t{}\t{}\n", r.section, r.key, r.value);
    return out;
}

std::string Report::human() const {
    std::string out;
    const std::string* current = nullptr;
    for (const auto& r : records_) {
        if (!current || *current != r.section) {
            if (current) out += '\n';
            out += fmt::format("[{}]\n", r.section);
            current = &r.section;
        }
        out += fmt::format("  {}: {}\n", r.key, r.value);
    }
    return out;
}

std::string format_number(double x) {
    if (x == 0.0) return "0";  // no "-0"
    return fmt::format("{:.12g}", x);
}

std::string format_vector(std::span<const double> v) {
    std::string out = "(";
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += ", ";
        out += format_number(v[k]);
    }
    return out + ")";
}

namespace {

std::string format_event(const Event& e, const StateSpace* states) {
    std::string out = "{";
    bool first = true;
    for (auto s : e.members()) {
        if (!first) out += ", ";
        first = false;
        out += states && states->size() == e.dimension() ? states->label(s) : std::to_string(s);
    }
    return out + "}";
}

// ----------------------------------------------------------------------------
// Built-in examples

class Expectations {
public:
    Expectations(Report& report, std::string section, double eps)
        : report_(report), section_(std::move(section)), eps_(eps) {}

    void value(const std::string& key, double actual, double expected) {
        report_.add(section_, key, actual);
        if (!(std::abs(actual - expected) <= eps_)) miss(key, format_number(expected));
    }

    void vector(const std::string& key, std::span<const double> actual, std::span<const double> expected) {
        report_.add(section_, key, format_vector(actual));
        if (actual.size() != expected.size() || !approx_equal(actual, expected, eps_)) {
            miss(key, format_vector(expected));
        }
    }

    void flag(const std::string& key, bool actual, bool expected, std::string_view yes, std::string_view no) {
        report_.add(section_, key, std::string(actual ? yes : no));
        if (actual != expected) miss(key, std::string(expected ? yes : no));
    }

    void note(const std::string& key, std::string value) { report_.add(section_, key, std::move(value)); }

    bool finish() {
        report_.add(section_, "status", ok_ ? "ok" : "MISMATCH");
        return ok_;
    }

private:
    void miss(const std::string& key, const std::string& expected) {
        ok_ = false;
        report_.add(section_, "mismatch", fmt::format("{} expected {}", key, expected));
    }

    Report& report_;
    std::string section_;
    double eps_;
    bool ok_ = true;
};

bool demo_te1(Report& report, const Tolerances& tol) {
    Expectations x(report, "demo.te1", tol.simplex);
    const StateSpace states({"No", "Mild", "Severe"});
    const SuggestionProfile profile({Belief({0.9, 0.1, 0.0}), Belief({0.0, 0.0, 1.0})});
    const Event e(3, {1, 2});
    x.note("event", format_event(e, &states));
    const auto post = condition_profile(profile, e, tol);
    x.vector("posterior.Alice", post[0].probs(), std::vector<double>{0, 1, 0});
    x.vector("posterior.Bob", post[1].probs(), std::vector<double>{0, 0, 1});
    // Equal-weight linear pool, both orders.
    const Weight half({0.5, 0.5});
    const Belief pool_of_posteriors = pooled_belief(half, post);
    const Belief posterior_of_pool = condition_belief(pooled_belief(half, profile), e, tol);
    x.vector("pool_of_posteriors", pool_of_posteriors.probs(), std::vector<double>{0, 0.5, 0.5});
    x.vector("posterior_of_pool", posterior_of_pool.probs(), std::vector<double>{0, 0.05 / 0.55, 0.5 / 0.55});
    return x.finish();
}

bool demo_te2(Report& report, const Tolerances& tol) {
    Expectations x(report, "demo.te2", tol.simplex);
    const StateSpace states({"hH", "lH", "hL", "lL"});
    const std::vector<Belief> priors{Belief({0.4, 0.1, 0.1, 0.4}), Belief({0.1, 0.4, 0.4, 0.1})};
    const SuggestionProfile profile(priors);
    const Event h(4, {0, 2});
    const Event H(4, {0, 1});
    x.value("prior_H.Alice", priors[0].mass(H), 0.5);
    x.value("prior_H.Bob", priors[1].mass(H), 0.5);
    const auto post = condition_profile(profile, h, tol);
    x.value("posterior_H_given_h.Alice", post[0].mass(H), 0.8);
    x.value("posterior_H_given_h.Bob", post[1].mass(H), 0.2);

    x.note("partition_event", format_event(H, &states));
    const auto witness = find_rectangularity_violation(priors, H, 0x5EC7A9, tol);
    x.flag("rectangular", !witness.has_value(), false, "yes", "no");
    if (witness) {
        x.vector("witness.pasted", witness->pasted.probs(), std::vector<double>{0.4, 0.1, 0.4, 0.1});
        x.value("witness.residual", witness->residual, witness->residual);
    }
    const auto hull = hull_contains(priors, Belief({0.4, 0.1, 0.4, 0.1}), tol);
    x.flag("hull_contains_(.4,.1,.4,.1)", hull.inside, false, "yes", "no");
    return x.finish();
}

bool demo_eq6(Report& report, const Tolerances& tol, bool second_case) {
    Expectations x(report, second_case ? "demo.eq6_case2" : "demo.eq6_case1", tol.value);
    const Belief split_low({0.2, 0.8});
    const Belief split_high({0.8, 0.2});
    const Belief even({0.5, 0.5});
    const SuggestionProfile profile = second_case ? SuggestionProfile({even, even, split_low, split_high})
                                                  : SuggestionProfile({split_low, split_high, even, even});
    const auto rule = two_group_credibility_rule(0.8, 0.25, 0.75);
    const double u_h = aggregate_utility(rule, profile, UtilityAct({1.0, 0.0}), tol);
    const double u_l = aggregate_utility(rule, profile, UtilityAct({0.0, 1.0}), tol);
    // Case 1 behaves as min over P(H) in [.38,.62]; case 2 as max over [.47,.53].
    const double lo = second_case ? 0.47 : 0.38;
    const double hi = second_case ? 0.53 : 0.62;
    x.value("value.(1,0)", u_h, second_case ? hi : lo);
    x.value("value.(0,1)", u_l, second_case ? 1.0 - lo : 1.0 - hi);
    x.value("implied_lower_P(H)", second_case ? 1.0 - u_l : u_h, lo);
    x.value("implied_upper_P(H)", second_case ? u_h : 1.0 - u_l, hi);
    return x.finish();
}

bool demo_median(Report& report, const Tolerances& tol) {
    Expectations x(report, "demo.median_cases", tol.value);
    const auto rule = median_rule(3);
    const auto I = [&](std::vector<double> a) { return aggregation_functional(rule, EvaluationProfile{std::move(a)}); };
    x.value("case1.f=(0,0,2)", I({0, 0, 2}), 0.0);
    x.value("case1.g=(0,2,0)", I({0, 2, 0}), 0.0);
    x.value("case1.mix=(0,1,1)", I({0, 1, 1}), 1.0);
    x.value("case2.f=(0,0,-2)", I({0, 0, -2}), 0.0);
    x.value("case2.g=(0,-2,0)", I({0, -2, 0}), 0.0);
    x.value("case2.mix=(0,-1,-1)", I({0, -1, -1}), -1.0);
    return x.finish();
}

bool demo_dictatorship(Report& report, const Tolerances& tol) {
    Expectations x(report, "demo.dictatorship_cx", tol.value);
    const auto cx = dictatorship_counterexample(Weight({0.5, 0.5}), 4);
    x.note("event", format_event(cx.event, nullptr));
    x.vector("pool_of_posteriors", cx.pool_of_posteriors.probs(), std::vector<double>{0.5, 0.5, 0, 0});
    x.vector("posterior_of_pool", cx.posterior_of_pool.probs(), std::vector<double>{1.0 / 11.0, 10.0 / 11.0, 0, 0});
    x.value("pool_of_posteriors(w1)", cx.pool_of_posteriors[0], 0.5);
    x.value("posterior_of_pool(w1)", cx.posterior_of_pool[0], 1.0 / 11.0);
    x.value("gap", cx.gap, dictatorship_gap_formula(0.5));
    x.flag("verdict", cx.gap > tol.value, true, "NOT COMMUTATIVE", "commutative");
    return x.finish();
}

void add_witness(const Witness& w, Report& report, const std::string& section) {
    for (std::size_t p = 0; p < w.profiles.size(); ++p) {
        for (std::size_t i = 0; i < w.profiles[p].expert_count(); ++i) {
            report.add(section, fmt::format("profile{}.expert{}", p, i), format_vector(w.profiles[p][i].probs()));
        }
    }
    if (w.event) report.add(section, "event", format_event(*w.event, nullptr));
    for (const auto& [name, act] : w.acts) report.add(section, "act." + name, format_vector(act.utils()));
    for (const auto& [name, v] : w.scalars) report.add(section, "scalar." + name, v);
    report.add(section, "gap", w.gap);
}

CheckConfig check_config_for(Axiom axiom, CheckConfig cfg) {
    if (axiom == Axiom::PessimismUpdateThenAggregate &&
        std::any_of(cfg.state_counts.begin(), cfg.state_counts.end(), [](std::size_t m) { return m < 4; })) {
        cfg.state_counts = {4, 5, 6};
    }
    return cfg;
}

CheckReport run_scenario_check(const Scenario& sc, Axiom axiom, const CheckConfig& cfg) {
    std::optional<SuggestionProfile> profile;
    if (axiom_uses_fixed_profile(axiom)) profile = sc.profile();
    return run_check(axiom, sc.rule, profile, check_config_for(axiom, cfg));
}

[[noreturn]] void query_error(std::size_t index, const Query& q, const Error& e) {
    throw Error(ErrorKind::QueryError, fmt::format("query {} ({}): {}", index, to_string(q.kind), e.what()));
}

}  // namespace

const std::vector<std::string>& demo_ids() {
    static const std::vector<std::string> ids{"te1", "te2", "eq6_case1", "eq6_case2", "median_cases",
                                              "dictatorship_cx"};
    return ids;
}

bool run_demo(std::string_view id, Report& report, const Tolerances& tol) {
    if (id == "te1") return demo_te1(report, tol);
    if (id == "te2") return demo_te2(report, tol);
    if (id == "eq6_case1") return demo_eq6(report, tol, false);
    if (id == "eq6_case2") return demo_eq6(report, tol, true);
    if (id == "median_cases") return demo_median(report, tol);
    if (id == "dictatorship_cx") return demo_dictatorship(report, tol);
    throw Error(ErrorKind::QueryError, fmt::format("unknown demo '{}'", id));
}

bool report_check(const CheckReport& check, Report& report, const std::string& section) {
    report.add(section, "axiom", std::string(axiom_id(check.axiom)));
    report.add(section, "verdict", std::string(to_string(check.verdict)));
    report.add(section, "seed", std::to_string(check.seed));
    report.add(section, "trials_run", std::to_string(check.trials_run));
    report.add(section, "skipped", std::to_string(check.skipped));
    if (!check.reason.empty()) report.add(section, "reason", check.reason);
    if (check.witness) add_witness(*check.witness, report, section + ".witness");
    return check.verdict != CheckVerdict::Violated;
}

QueryOutcome run_queries(const Scenario& sc, const CheckConfig& cfg) {
    QueryOutcome out;
    const auto profile = sc.profile();
    const auto& tol = cfg.tol;
    for (std::size_t k = 0; k < sc.queries.size(); ++k) {
        const Query& q = sc.queries[k];
        const std::string section = fmt::format("query{}.{}", k + 1, to_string(q.kind));
        Report& r = out.report;
        const auto resolve_act = [&](const std::string& name) -> const UtilityAct& {
            try {
                return sc.act(name);
            } catch (const Error& e) {
                query_error(k + 1, q, e);
            }
        };
        const auto resolve_event = [&](const std::string& name) -> const Event& {
            try {
                return sc.event(name);
            } catch (const Error& e) {
                query_error(k + 1, q, e);
            }
        };
        switch (q.kind) {
            case Query::Kind::Evaluate: {
                const auto& f = resolve_act(q.act);
                r.add(section, "act", q.act);
                const auto ev = evaluation_profile(profile, f);
                for (std::size_t i = 0; i < sc.experts.size(); ++i) {
                    r.add(section, "expected_utility." + sc.experts[i].name, ev[i]);
                }
                r.add(section, "value", aggregate_utility(sc.rule, profile, f, tol));
                break;
            }
            case Query::Kind::Update: {
                const auto& e = resolve_event(q.event);
                r.add(section, "event", format_event(e, &sc.states));
                const auto post = condition_profile(profile, e, tol);
                for (std::size_t i = 0; i < sc.experts.size(); ++i) {
                    r.add(section, "prior_mass." + sc.experts[i].name, profile[i].mass(e));
                    r.add(section, "posterior." + sc.experts[i].name, format_vector(post[i].probs()));
                }
                break;
            }
            case Query::Kind::ConditionalCE: {
                const auto& f = resolve_act(q.act);
                const auto& e = resolve_event(q.event);
                std::vector<UtilityAct> hs;
                for (const auto& name : q.continuations) hs.push_back(resolve_act(name));
                if (hs.empty()) hs = default_h_samples(sc.states.size(), {f}, cfg.h_samples, cfg.act_range, cfg.seed);
                const auto ce = conditional_ce(sc.rule, profile, e, f, hs, tol);
                r.add(section, "act", q.act);
                r.add(section, "event", format_event(e, &sc.states));
                for (std::size_t j = 0; j < ce.value_by_h.size(); ++j) {
                    const std::string label = j < q.continuations.size() ? q.continuations[j] : std::to_string(j);
                    r.add(section, fmt::format("h[{}]", label), format_vector(ce.value_by_h[j].first.utils()));
                    r.add(section, fmt::format("ce[{}]", label), ce.value_by_h[j].second);
                }
                r.add(section, "spread", ce.spread);
                r.add(section, "updated_then_aggregated",
                      aggregate_utility(sc.rule, condition_profile(profile, e, tol), f, tol));
                break;
            }
            case Query::Kind::Check: {
                const auto axiom = parse_axiom(q.id);
                if (!axiom) {
                    query_error(k + 1, q, Error(ErrorKind::QueryError, fmt::format("unknown axiom '{}'", q.id)));
                }
                if (!report_check(run_scenario_check(sc, *axiom, cfg), r, section)) out.ok = false;
                break;
            }
            case Query::Kind::Demo: {
                const auto& ids = demo_ids();
                if (std::find(ids.begin(), ids.end(), q.id) == ids.end()) {
                    query_error(k + 1, q, Error(ErrorKind::QueryError, fmt::format("unknown demo '{}'", q.id)));
                }
                if (!run_demo(q.id, r, tol)) out.ok = false;
                break;
            }
        }
    }
    return out;
}

// ----------------------------------------------------------------------------
// Entry point

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    constexpr int kOk = 0, kFailed = 1, kInputError = 2, kUsage = 64;

    CLI::App app{"Aggregate expert priors into a decision maker's preference and test axioms.", "pooling_lab"};
    app.require_subcommand(1);
    bool machine = false;
    double eps_value = Tolerances{}.value;
    app.add_flag("--machine", machine, "Tab-separated section/key/value output");
    app.add_option("--eps-value", eps_value, "Utility comparison tolerance")->capture_default_str();

    std::string file, axiom_name, demo_id;
    std::size_t trials = CheckConfig{}.trials;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto* evaluate = app.add_subcommand("evaluate", "Run the queries of a scenario file");
    evaluate->add_option("file", file, "Scenario file")->required();

    auto* check = app.add_subcommand("check", "Search for violations of one axiom");
    check->add_option("file", file, "Scenario file")->required();
    check->add_option("--axiom", axiom_name, "Axiom id")->required();
    check->add_option("--trials", trials, "Random trials")->check(CLI::PositiveNumber)->capture_default_str();
    check->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_given = true; }, "Seed (default: $POOLING_LAB_SEED or 0)");

    auto* demo = app.add_subcommand("demo", "Run a built-in worked example");
    demo->add_option("id", demo_id, "Example id")->required()->check(CLI::IsMember(demo_ids()));

    // Check queries inside a scenario use the same knobs.
    evaluate->add_option("--trials", trials, "Random trials per check query")->check(CLI::PositiveNumber);
    evaluate->add_option_function<std::uint64_t>(
        "--seed", [&](std::uint64_t s) { seed = s; seed_given = true; }, "Seed for check queries");
    for (auto* sub : {evaluate, check, demo}) sub->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kUsage;
    }

    CheckConfig cfg;
    cfg.trials = trials;
    cfg.tol.value = eps_value;
    if (!(eps_value > 0.0) || !std::isfinite(eps_value) || cfg.tol.bisect > eps_value) {
        err << fmt::format("usage error: --eps-value must be finite and at least the bisection width {}\n",
                           format_number(cfg.tol.bisect));
        return kUsage;
    }
    if (!seed_given) {
        if (const char* env = std::getenv("POOLING_LAB_SEED"); env && *env) {
            char* end = nullptr;
            errno = 0;
            const unsigned long long v = std::strtoull(env, &end, 10);
            if (*end != '\0' || errno != 0 || env[0] == '-') {
                err << fmt::format("usage error: POOLING_LAB_SEED='{}' is not an unsigned integer\n", env);
                return kUsage;
            }
            seed = v;
        }
    }
    cfg.seed = seed;

    try {
        Report report;
        bool ok = true;
        if (*demo) {
            ok = run_demo(demo_id, report, cfg.tol);
        } else if (*check) {
            const auto axiom = parse_axiom(axiom_name);
            if (!axiom) {
                err << fmt::format("usage error: unknown axiom '{}'\n", axiom_name);
                return kUsage;
            }
            const Scenario sc = load_scenario(file, cfg.tol);
            ok = report_check(run_scenario_check(sc, *axiom, cfg), report, "check");
        } else {
            const Scenario sc = load_scenario(file, cfg.tol);
            auto outcome = run_queries(sc, cfg);
            report = std::move(outcome.report);
            ok = outcome.ok;
        }
        out << report.render(machine);
        return ok ? kOk : kFailed;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInputError;
    }
}

}  // namespace pooling
