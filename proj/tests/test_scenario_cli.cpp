#include <doctest.h>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "pooling/cli.hpp"
#include "pooling/sampling.hpp"
#include "pooling/scenario.hpp"

using namespace pooling;

namespace {

const std::string kScenarios = POOLING_SCENARIOS;

ErrorKind parse_kind(const std::string& text) {
    try {
        (void)parse_scenario(text);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("scenario parsed");
    return ErrorKind::InvalidArgument;
}

std::string minimal(const std::string& rule, const std::string& extra = "") {
    return R"({"states": ["a", "b", "c"],
              "experts": [{"name": "x", "prior": [0.2, 0.3, 0.5]},
                          {"name": "y", "prior": [0.5, 0.25, 0.25]},
                          {"name": "z", "prior": [0.1, 0.1, 0.8]}],
              "rule": )" +
           rule + extra + "}";
}

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string value_of(const std::string& machine, const std::string& section, const std::string& key) {
    std::istringstream in(machine);
    std::string line;
    const std::string prefix = section + "\t" + key + "\t";
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
    return "<missing>";
}

}  // namespace

TEST_CASE("thought experiment 1 scenario") {
    const auto sc = load_scenario(kScenarios + "/te1.scn");
    CHECK(sc.states.labels() == std::vector<std::string>{"No", "Mild", "Severe"});
    CHECK(sc.experts.size() == 2);
    CHECK(sc.rule == AggregationRule::linear(Weight({0.5, 0.5})));
    const auto post = condition_profile(sc.profile(), sc.event("outbreak"));
    CHECK(post[0] == Belief({0, 1, 0}));
    CHECK(post[1] == Belief({0, 0, 1}));
    const auto out = run_queries(sc, CheckConfig{});
    CHECK(out.ok);
    const auto m = out.report.machine();
    CHECK(value_of(m, "query1.update", "posterior.Alice") == "(0, 1, 0)");
    CHECK(value_of(m, "query1.update", "posterior.Bob") == "(0, 0, 1)");
    CHECK(value_of(m, "query3.evaluate", "value") == "7");
    // 53/11, the pooled posterior's value of treating.
    CHECK(std::stod(value_of(m, "query4.conditional_ce", "ce[wait]")) == doctest::Approx(53.0 / 11.0).epsilon(1e-9));
    CHECK(value_of(m, "query4.conditional_ce", "updated_then_aggregated") == "4");
}

TEST_CASE("validation errors") {
    CHECK(parse_kind(R"({"states": ["a","b","c"], "experts": [{"name": "x", "prior": [0.5, 0.48, 0]}],
                         "rule": {"kind": "linear", "weights": [1]}})") == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.5, 0.5]})")) == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.5, 0.6, -0.1]})")) == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "dictatorship", "expert": "w"})")) == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "dictatorship", "expert": 3})")) == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.2, 0.3, 0.5]})",
                             R"(, "queries": [{"evaluate": "ghost"}])")) == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.2, 0.3, 0.5]})",
                             R"(, "events": [{"name": "E", "states": ["a", "q"]}])")) == ErrorKind::ValidationError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.2, 0.3, 0.5]})",
                             R"(, "acts": [{"name": "f", "utils": [1, 2]}])")) == ErrorKind::ValidationError);
}

TEST_CASE("parse errors carry a location") {
    try {
        (void)parse_scenario("{\n  \"states\": [\"a\", \"b\",\n  oops\n}");
        FAIL("parsed malformed text");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(parse_kind(minimal(R"({"kind": "median"})")) == ErrorKind::ParseError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.2, 0.3, 0.5]})", R"(, "colour": 1)")) ==
          ErrorKind::ParseError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.2, "x", 0.5]})")) == ErrorKind::ParseError);
    CHECK(parse_kind(minimal(R"({"kind": "linear", "weights": [0.2, 0.3, 0.5]})",
                             R"(, "queries": [{"plot": "f"}])")) == ErrorKind::ParseError);
    CHECK_THROWS_AS(load_scenario("/nonexistent/te9.scn"), Error);
}

TEST_CASE("dual-self file listing the three pairs is the median rule") {
    const auto sc = load_scenario(kScenarios + "/median.scn");
    const auto med = median_rule();
    Rng rng(4);
    for (int t = 0; t < 200; ++t) {
        EvaluationProfile a{{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)}};
        CHECK(aggregation_functional(sc.rule, a) == aggregation_functional(med, a));
    }
}

TEST_CASE("scenario round trip") {
    for (const char* name : {"te1", "te2", "median", "dictatorship"}) {
        const auto sc = load_scenario(kScenarios + "/" + name + ".scn");
        const auto text = serialize_scenario(sc);
        CHECK(parse_scenario(text) == sc);
        CHECK(serialize_scenario(parse_scenario(text)) == text);
    }
    // Random scenarios over every serializable rule kind.
    Rng rng(12);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 1 + rng.index(3), m = 3 + rng.index(3);
        std::vector<Expert> experts;
        for (std::size_t i = 0; i < n; ++i) experts.push_back({"e" + std::to_string(i), random_belief(m, rng)});
        std::vector<AggregationRule> rules{random_linear_rule(n, rng), random_multiple_weight_rule(n, 2, rng),
                                           random_dual_self_rule(n, 2, rng), dictatorship_rule(rng.index(n), n)};
        auto w = random_weight(n, rng);
        rules.push_back(AggregationRule::geometric(std::vector<double>(w.lambdas().begin(), w.lambdas().end())));
        Scenario sc{StateSpace::indexed(m), experts, rules[t % rules.size()],
                    {{"f", random_act(m, 5, rng)}, {"g", random_act(m, 5, rng)}},
                    {{"E", random_proper_event(m, rng)}},
                    {}};
        sc.queries = {Query{Query::Kind::Evaluate, "f", "", "", {}},
                      Query{Query::Kind::Update, "", "E", "", {}},
                      Query{Query::Kind::ConditionalCE, "f", "E", "", {"g"}},
                      Query{Query::Kind::Check, "", "", "p2", {}},
                      Query{Query::Kind::Demo, "", "", "te2", {}}};
        CHECK(parse_scenario(serialize_scenario(sc)) == sc);
    }
    Scenario custom{StateSpace::indexed(3), {{"a", Belief::uniform(3)}}, soft_min_rule(1, 1.0), {}, {}, {}};
    CHECK_THROWS_AS(serialize_scenario(custom), Error);
}

TEST_CASE("evaluating a constant act returns the constant under every rule") {
    for (const char* rule : {R"({"kind": "linear", "weights": [0.2, 0.3, 0.5]})",
                             R"({"kind": "multiple_weight", "vertices": [[1, 0, 0], [0, 0.5, 0.5]]})",
                             R"({"kind": "dual_self", "sets": [[[1, 0, 0], [0, 1, 0]], [[0, 0, 1]]]})",
                             R"({"kind": "dictatorship", "expert": "y"})",
                             R"({"kind": "geometric", "exponents": [0.2, 0.3, 0.5]})"}) {
        const auto sc = parse_scenario(
            minimal(rule, R"(, "acts": [{"name": "seven", "utils": [7, 7, 7]}], "queries": [{"evaluate": "seven"}])"));
        const auto out = run_queries(sc, CheckConfig{});
        CHECK(value_of(out.report.machine(), "query1.evaluate", "value") == "7");
    }
}

TEST_CASE("unresolved references at run time are query errors") {
    auto sc = load_scenario(kScenarios + "/te1.scn");
    sc.queries = {Query{Query::Kind::Evaluate, "ghost", "", "", {}}};
    try {
        (void)run_queries(sc, CheckConfig{});
        FAIL("ran");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::QueryError);
        CHECK(std::string(e.what()).find("query 1") != std::string::npos);
    }
}

TEST_CASE("demos reproduce their expected values") {
    for (const auto& id : demo_ids()) {
        const auto r = run({"demo", id, "--machine"});
        CHECK_MESSAGE(r.code == 0, id);
        CHECK(value_of(r.out, "demo." + id, "status") == "ok");
    }
    const auto d = run({"demo", "dictatorship_cx", "--machine"});
    CHECK(value_of(d.out, "demo.dictatorship_cx", "posterior_of_pool(w1)") == "0.0909090909091");
    CHECK(value_of(d.out, "demo.dictatorship_cx", "verdict") == "NOT COMMUTATIVE");
    const auto e = run({"demo", "eq6_case1", "--machine"});
    CHECK(value_of(e.out, "demo.eq6_case1", "implied_lower_P(H)") == "0.38");
    CHECK(value_of(e.out, "demo.eq6_case1", "implied_upper_P(H)") == "0.62");
    const auto m = run({"demo", "median_cases", "--machine"});
    CHECK(value_of(m.out, "demo.median_cases", "case1.mix=(0,1,1)") == "1");
    CHECK(value_of(m.out, "demo.median_cases", "case2.mix=(0,-1,-1)") == "-1");
}

TEST_CASE("exit codes") {
    CHECK(run({"demo", "te1"}).code == 0);
    CHECK(run({"demo", "nope"}).code == 64);
    CHECK(run({"demo", "te1", "--frobnicate"}).code == 64);
    CHECK(run({}).code == 64);
    CHECK(run({"evaluate"}).code == 64);
    CHECK(run({"evaluate", "/nonexistent.scn"}).code == 2);
    CHECK(run({"evaluate", std::string(POOLING_TEST_DATA) + "/bad_prior.scn"}).code == 2);
    CHECK(run({"check", kScenarios + "/te1.scn", "--axiom", "no_such_axiom"}).code == 64);
    CHECK(run({"check", kScenarios + "/te1.scn", "--axiom", "p2", "--trials", "0"}).code == 64);
    CHECK(run({"check", kScenarios + "/median.scn", "--axiom", "p2", "--trials", "500"}).code == 1);
    CHECK(run({"check", kScenarios + "/median.scn", "--axiom", "c_independence", "--trials", "300"}).code == 0);
    CHECK(run({"evaluate", kScenarios + "/median.scn", "--trials", "300"}).code == 1);
    CHECK(run({"--eps-value", "1e-12", "demo", "te1"}).code == 64);
    CHECK(run({"--eps-value", "1e-6", "demo", "te1"}).code == 0);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("weak commutativity check on the outbreak scenario") {
    const std::vector<std::string> args{"check", kScenarios + "/te1.scn", "--axiom", "weak_commutativity",
                                        "--trials", "1000", "--seed", "7", "--machine"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(value_of(a.out, "check", "verdict") == "Pass");
    CHECK(value_of(a.out, "check", "trials_run") == "1000");
    CHECK(value_of(a.out, "check", "seed") == "7");
    CHECK(value_of(a.out, "check", "skipped") == "0");
}

TEST_CASE("seed from the environment") {
    const std::vector<std::string> args{"check", kScenarios + "/median.scn", "--axiom", "p2", "--machine"};
    ::setenv("POOLING_LAB_SEED", "31", 1);
    const auto env = run(args);
    ::unsetenv("POOLING_LAB_SEED");
    auto explicit_args = args;
    explicit_args.insert(explicit_args.end(), {"--seed", "31"});
    const auto flag = run(explicit_args);
    CHECK(value_of(env.out, "check", "seed") == "31");
    CHECK(env.out == flag.out);
    ::setenv("POOLING_LAB_SEED", "abc", 1);
    CHECK(run(args).code == 64);
    ::unsetenv("POOLING_LAB_SEED");
}

TEST_CASE("machine output is line oriented and stable") {
    const std::vector<std::string> args{"evaluate", kScenarios + "/te2.scn", "--machine"};
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    std::istringstream in(a.out);
    std::string line;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), '\t') == 2);
    }
    const auto human = run({"evaluate", kScenarios + "/te2.scn"});
    CHECK(human.out.find("[query1.update]") != std::string::npos);
}
