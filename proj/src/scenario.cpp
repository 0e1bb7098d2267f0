#include "pooling/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace pooling {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, std::string_view what) {
    throw Error(ErrorKind::ParseError, fmt::format("{}: {}", path, what));
}

[[noreturn]] void invalid(const std::string& path, std::string_view what) {
    throw Error(ErrorKind::ValidationError, fmt::format("{}: {}", path, what));
}

const json& member(const json& obj, const std::string& path, const char* key) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path, fmt::format("missing key '{}'", key));
    return *it;
}

std::string text_of(const json& j, const std::string& path) {
    if (!j.is_string()) schema_error(path, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
    if (!j.is_array()) schema_error(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_number()) schema_error(fmt::format("{}[{}]", path, k), "expected a number");
        out.push_back(j[k].get<double>());
    }
    return out;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
            schema_error(path, fmt::format("unknown key '{}'", it.key()));
        }
    }
}

template <class F>
auto validated(const std::string& path, F&& build) {
    try {
        return build();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError) throw;
        invalid(path, e.what());
    }
}

Weight weight_at(const json& j, const std::string& path, std::size_t experts, const Tolerances& tol) {
    auto values = numbers(j, path);
    if (values.size() != experts) {
        invalid(path, fmt::format("has {} entries for {} experts", values.size(), experts));
    }
    return validated(path, [&] { return Weight(std::move(values), tol); });
}

WeightSet weight_set_at(const json& j, const std::string& path, std::size_t experts, const Tolerances& tol) {
    if (!j.is_array() || j.empty()) schema_error(path, "expected a non-empty array of weight vectors");
    std::vector<Weight> vertices;
    for (std::size_t k = 0; k < j.size(); ++k) {
        vertices.push_back(weight_at(j[k], fmt::format("{}[{}]", path, k), experts, tol));
    }
    return WeightSet(std::move(vertices), tol);
}

AggregationRule parse_rule(const json& j, const std::vector<Expert>& experts, const Tolerances& tol) {
    const std::string path = "rule";
    const std::string kind = text_of(member(j, path, "kind"), "rule.kind");
    const std::size_t n = experts.size();
    if (kind == "linear") {
        check_keys(j, path, {"kind", "weights"});
        const json& w = member(j, path, "weights");
        // Accept a single vector or a one-element array of vectors.
        if (w.is_array() && w.size() == 1 && w[0].is_array()) {
            return AggregationRule::linear(weight_at(w[0], "rule.weights[0]", n, tol));
        }
        return AggregationRule::linear(weight_at(w, "rule.weights", n, tol));
    }
    if (kind == "multiple_weight") {
        check_keys(j, path, {"kind", "vertices"});
        return AggregationRule::multiple_weight(weight_set_at(member(j, path, "vertices"), "rule.vertices", n, tol));
    }
    if (kind == "dual_self") {
        check_keys(j, path, {"kind", "sets"});
        const json& sets = member(j, path, "sets");
        if (!sets.is_array() || sets.empty()) schema_error("rule.sets", "expected a non-empty array of weight sets");
        std::vector<WeightSet> parsed;
        for (std::size_t k = 0; k < sets.size(); ++k) {
            parsed.push_back(weight_set_at(sets[k], fmt::format("rule.sets[{}]", k), n, tol));
        }
        return AggregationRule::dual_self(WeightSetCollection(std::move(parsed)));
    }
    if (kind == "dictatorship") {
        check_keys(j, path, {"kind", "expert"});
        const json& e = member(j, path, "expert");
        if (e.is_number_unsigned()) {
            const auto idx = e.get<std::size_t>();
            if (idx >= n) invalid("rule.expert", fmt::format("index {} out of range for {} experts", idx, n));
            return dictatorship_rule(idx, n);
        }
        const std::string name = text_of(e, "rule.expert");
        for (std::size_t i = 0; i < n; ++i)
            if (experts[i].name == name) return dictatorship_rule(i, n);
        invalid("rule.expert", fmt::format("unknown expert '{}'", name));
    }
    if (kind == "geometric") {
        check_keys(j, path, {"kind", "exponents"});
        auto exps = numbers(member(j, path, "exponents"), "rule.exponents");
        if (exps.size() != n) invalid("rule.exponents", fmt::format("has {} entries for {} experts", exps.size(), n));
        return validated("rule.exponents", [&] { return AggregationRule::geometric(std::move(exps)); });
    }
    schema_error("rule.kind", fmt::format("unknown rule kind '{}'", kind));
}

Query parse_query(const json& j, const std::string& path) {
    if (!j.is_object() || j.size() != 1) schema_error(path, "a query is an object with exactly one key");
    const std::string key = j.begin().key();
    const json& body = j.begin().value();
    Query q;
    if (key == "evaluate") {
        q.kind = Query::Kind::Evaluate;
        q.act = text_of(body, path + ".evaluate");
    } else if (key == "update") {
        q.kind = Query::Kind::Update;
        q.event = text_of(body, path + ".update");
    } else if (key == "conditional_ce") {
        const std::string p = path + ".conditional_ce";
        check_keys(body, p, {"act", "event", "h"});
        q.kind = Query::Kind::ConditionalCE;
        q.act = text_of(member(body, p, "act"), p + ".act");
        q.event = text_of(member(body, p, "event"), p + ".event");
        if (auto it = body.find("h"); it != body.end()) {
            if (!it->is_array()) schema_error(p + ".h", "expected an array of act names");
            for (std::size_t k = 0; k < it->size(); ++k) {
                q.continuations.push_back(text_of((*it)[k], fmt::format("{}.h[{}]", p, k)));
            }
        }
    } else if (key == "check") {
        q.kind = Query::Kind::Check;
        q.id = text_of(body, path + ".check");
    } else if (key == "demo") {
        q.kind = Query::Kind::Demo;
        q.id = text_of(body, path + ".demo");
    } else {
        schema_error(path, fmt::format("unknown query '{}'", key));
    }
    return q;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

json weights_json(const Weight& w) { return json(std::vector<double>(w.lambdas().begin(), w.lambdas().end())); }

json weight_set_json(const WeightSet& s) {
    json out = json::array();
    for (const auto& v : s.vertices()) out.push_back(weights_json(v));
    return out;
}

}  // namespace

std::string_view to_string(Query::Kind kind) noexcept {
    switch (kind) {
        case Query::Kind::Evaluate: return "evaluate";
        case Query::Kind::Update: return "update";
        case Query::Kind::ConditionalCE: return "conditional_ce";
        case Query::Kind::Check: return "check";
        case Query::Kind::Demo: return "demo";
    }
    return "unknown";
}

SuggestionProfile Scenario::profile() const {
    std::vector<Belief> b;
    for (const auto& e : experts) b.push_back(e.prior);
    return SuggestionProfile(std::move(b));
}

const UtilityAct& Scenario::act(std::string_view name) const {
    for (const auto& [k, v] : acts)
        if (k == name) return v;
    throw Error(ErrorKind::QueryError, fmt::format("unknown act '{}'", name));
}

const Event& Scenario::event(std::string_view name) const {
    for (const auto& [k, v] : events)
        if (k == name) return v;
    throw Error(ErrorKind::QueryError, fmt::format("unknown event '{}'", name));
}

Scenario parse_scenario(std::string_view text, const Tolerances& tol) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_and_column(text, e.byte);
        throw Error(ErrorKind::ParseError, fmt::format("line {}, column {}: malformed document", line, col));
    }
    if (!doc.is_object()) schema_error("(root)", "expected an object");
    check_keys(doc, "(root)", {"states", "experts", "rule", "acts", "events", "queries"});

    const json& states_j = member(doc, "(root)", "states");
    if (!states_j.is_array()) schema_error("states", "expected an array of labels");
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < states_j.size(); ++k) labels.push_back(text_of(states_j[k], fmt::format("states[{}]", k)));
    StateSpace states = validated("states", [&] { return StateSpace(std::move(labels)); });
    const std::size_t m = states.size();

    const json& experts_j = member(doc, "(root)", "experts");
    if (!experts_j.is_array() || experts_j.empty()) schema_error("experts", "expected a non-empty array");
    std::vector<Expert> experts;
    for (std::size_t i = 0; i < experts_j.size(); ++i) {
        const std::string path = fmt::format("experts[{}]", i);
        check_keys(experts_j[i], path, {"name", "prior"});
        std::string name = text_of(member(experts_j[i], path, "name"), path + ".name");
        for (const auto& e : experts)
            if (e.name == name) invalid(path + ".name", fmt::format("duplicate expert '{}'", name));
        auto prior = numbers(member(experts_j[i], path, "prior"), path + ".prior");
        if (prior.size() != m) {
            invalid(path + ".prior", fmt::format("has {} entries for {} states", prior.size(), m));
        }
        Belief b = validated(fmt::format("{}.prior ({})", path, name), [&] { return Belief(std::move(prior), tol); });
        experts.push_back({std::move(name), std::move(b)});
    }

    AggregationRule rule = parse_rule(member(doc, "(root)", "rule"), experts, tol);

    std::vector<std::pair<std::string, UtilityAct>> acts;
    if (auto it = doc.find("acts"); it != doc.end()) {
        if (!it->is_array()) schema_error("acts", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string path = fmt::format("acts[{}]", k);
            const json& a = (*it)[k];
            check_keys(a, path, {"name", "utils"});
            std::string name = text_of(member(a, path, "name"), path + ".name");
            for (const auto& [n, _] : acts)
                if (n == name) invalid(path + ".name", fmt::format("duplicate act '{}'", name));
            auto u = numbers(member(a, path, "utils"), path + ".utils");
            if (u.size() != m) invalid(path + ".utils", fmt::format("has {} entries for {} states", u.size(), m));
            acts.emplace_back(std::move(name), validated(path + ".utils", [&] { return UtilityAct(std::move(u)); }));
        }
    }

    std::vector<std::pair<std::string, Event>> events;
    if (auto it = doc.find("events"); it != doc.end()) {
        if (!it->is_array()) schema_error("events", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const std::string path = fmt::format("events[{}]", k);
            const json& e = (*it)[k];
            check_keys(e, path, {"name", "states"});
            std::string name = text_of(member(e, path, "name"), path + ".name");
            for (const auto& [n, _] : events)
                if (n == name) invalid(path + ".name", fmt::format("duplicate event '{}'", name));
            const json& members_j = member(e, path, "states");
            if (!members_j.is_array() || members_j.empty()) schema_error(path + ".states", "expected a non-empty array");
            std::vector<std::size_t> idx;
            for (std::size_t s = 0; s < members_j.size(); ++s) {
                const std::string label = text_of(members_j[s], fmt::format("{}.states[{}]", path, s));
                const std::size_t i = validated(path + ".states", [&] { return states.index_of(label); });
                if (std::find(idx.begin(), idx.end(), i) != idx.end()) {
                    invalid(path + ".states", fmt::format("state '{}' listed twice", label));
                }
                idx.push_back(i);
            }
            std::sort(idx.begin(), idx.end());
            events.emplace_back(std::move(name), Event(m, std::span<const std::size_t>(idx)));
        }
    }

    std::vector<Query> queries;
    if (auto it = doc.find("queries"); it != doc.end()) {
        if (!it->is_array()) schema_error("queries", "expected an array");
        for (std::size_t k = 0; k < it->size(); ++k) queries.push_back(parse_query((*it)[k], fmt::format("queries[{}]", k)));
    }

    Scenario sc{std::move(states), std::move(experts), std::move(rule), std::move(acts), std::move(events),
                std::move(queries)};
    for (std::size_t k = 0; k < sc.queries.size(); ++k) {
        const Query& q = sc.queries[k];
        const std::string path = fmt::format("queries[{}]", k);
        const auto resolve = [&](auto&& lookup) {
            try {
                lookup();
            } catch (const Error& e) {
                invalid(path, e.what());
            }
        };
        if (!q.act.empty()) resolve([&] { (void)sc.act(q.act); });
        if (!q.event.empty()) resolve([&] { (void)sc.event(q.event); });
        for (const auto& h : q.continuations) resolve([&] { (void)sc.act(h); });
    }
    return sc;
}

Scenario load_scenario(const std::string& path, const Tolerances& tol) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ParseError, fmt::format("cannot read scenario file '{}'", path));
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), tol);
}

std::string serialize_scenario(const Scenario& sc) {
    json doc;
    doc["states"] = sc.states.labels();
    json experts = json::array();
    for (const auto& e : sc.experts) {
        experts.push_back({{"name", e.name},
                           {"prior", std::vector<double>(e.prior.probs().begin(), e.prior.probs().end())}});
    }
    doc["experts"] = std::move(experts);

    json rule;
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, LinearRule>) {
                rule = {{"kind", "linear"}, {"weights", weights_json(r.weight)}};
            } else if constexpr (std::is_same_v<T, MultipleWeightRule>) {
                rule = {{"kind", "multiple_weight"}, {"vertices", weight_set_json(r.weights)}};
            } else if constexpr (std::is_same_v<T, DualSelfRule>) {
                json sets = json::array();
                for (const auto& s : r.collection.sets()) sets.push_back(weight_set_json(s));
                rule = {{"kind", "dual_self"}, {"sets", std::move(sets)}};
            } else if constexpr (std::is_same_v<T, DictatorshipRule>) {
                rule = {{"kind", "dictatorship"}, {"expert", r.expert}};
            } else if constexpr (std::is_same_v<T, GeometricRule>) {
                rule = {{"kind", "geometric"}, {"exponents", r.exponents}};
            } else {
                throw Error(ErrorKind::ValidationError, fmt::format("custom rule '{}' has no file form", r.name));
            }
        },
        sc.rule.variant());
    doc["rule"] = std::move(rule);

    json acts = json::array();
    for (const auto& [name, a] : sc.acts) {
        acts.push_back({{"name", name}, {"utils", std::vector<double>(a.utils().begin(), a.utils().end())}});
    }
    doc["acts"] = std::move(acts);

    json events = json::array();
    for (const auto& [name, e] : sc.events) {
        json members = json::array();
        for (auto s : e.members()) members.push_back(sc.states.label(s));
        events.push_back({{"name", name}, {"states", std::move(members)}});
    }
    doc["events"] = std::move(events);

    json queries = json::array();
    for (const auto& q : sc.queries) {
        json body;
        switch (q.kind) {
            case Query::Kind::Evaluate: body = q.act; break;
            case Query::Kind::Update: body = q.event; break;
            case Query::Kind::ConditionalCE:
                body = {{"act", q.act}, {"event", q.event}};
                if (!q.continuations.empty()) body["h"] = q.continuations;
                break;
            case Query::Kind::Check:
            case Query::Kind::Demo: body = q.id; break;
        }
        json entry;
        entry[std::string(to_string(q.kind))] = std::move(body);
        queries.push_back(std::move(entry));
    }
    doc["queries"] = std::move(queries);
    return doc.dump(2) + "\n";
}

}  // namespace pooling
