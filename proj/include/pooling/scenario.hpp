#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pooling/prob_core.hpp"
#include "pooling/rules.hpp"

namespace pooling {

struct Expert {
    std::string name;
    Belief prior;
    friend bool operator==(const Expert&, const Expert&) = default;
};

struct Query {
    enum class Kind { Evaluate, Update, ConditionalCE, Check, Demo };
    Kind kind = Kind::Evaluate;
    /// Act name (Evaluate, ConditionalCE).
    std::string act;
    /// Event name (Update, ConditionalCE).
    std::string event;
    /// Axiom id (Check) or demo id (Demo).
    std::string id;
    /// Continuation acts for ConditionalCE; empty means sampled.
    std::vector<std::string> continuations;
    friend bool operator==(const Query&, const Query&) = default;
};

std::string_view to_string(Query::Kind kind) noexcept;

struct Scenario {
    StateSpace states;
    std::vector<Expert> experts;
    AggregationRule rule;
    std::vector<std::pair<std::string, UtilityAct>> acts;
    std::vector<std::pair<std::string, Event>> events;
    std::vector<Query> queries;

    SuggestionProfile profile() const;
    /// Lookups throw QueryError for unknown names.
    const UtilityAct& act(std::string_view name) const;
    const Event& event(std::string_view name) const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Parses the JSON scenario format described in the README (comments allowed).
/// Syntax errors raise ParseError with line and column; schema and
/// consistency errors raise ParseError or ValidationError naming the key path.
Scenario parse_scenario(std::string_view text, const Tolerances& tol = {});

/// Reads and parses a file; an unreadable file raises ParseError.
Scenario load_scenario(const std::string& path, const Tolerances& tol = {});

/// Inverse of parse_scenario. Custom rules cannot be written and raise ValidationError.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace pooling
