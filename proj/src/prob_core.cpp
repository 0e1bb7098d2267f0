#include "pooling/prob_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

namespace pooling {

void Tolerances::validate() const {
    if (!(simplex > 0.0) || !(value > 0.0) || !(bisect > 0.0)) {
        throw Error(ErrorKind::InvalidArgument, "tolerances must be strictly positive");
    }
    if (bisect > value) {
        throw Error(ErrorKind::InvalidArgument,
                    fmt::format("bisection width {} exceeds value tolerance {}", bisect, value));
    }
}

// ----------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 3) {
        throw Error(ErrorKind::StateSpaceTooSmall,
                    fmt::format("state space needs at least 3 states, got {}", labels_.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) {
            throw Error(ErrorKind::ValidationError, fmt::format("duplicate state label '{}'", l));
        }
    }
}

StateSpace StateSpace::indexed(std::size_t size) {
    std::vector<std::string> labels;
    labels.reserve(size);
    for (std::size_t i = 0; i < size; ++i) labels.push_back(fmt::format("w{}", i + 1));
    return StateSpace(std::move(labels));
}

std::size_t StateSpace::index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
        throw Error(ErrorKind::InvalidEvent, fmt::format("unknown state '{}'", label));
    }
    return static_cast<std::size_t>(it - labels_.begin());
}

void StateSpace::require_at_least(std::size_t required) const {
    if (size() < required) {
        throw Error(ErrorKind::StateSpaceTooSmall,
                    fmt::format("operation needs at least {} states, got {}", required, size()));
    }
}

// ----------------------------------------------------------------------------
// Event

Event::Event(std::vector<char> mask) : mask_(std::move(mask)) {
    if (std::none_of(mask_.begin(), mask_.end(), [](char c) { return c != 0; })) {
        throw Error(ErrorKind::InvalidEvent, "event must be non-empty");
    }
}

Event::Event(std::size_t dimension, std::span<const std::size_t> members)
    : mask_(dimension, 0) {
    for (auto m : members) {
        if (m >= dimension) {
            throw Error(ErrorKind::InvalidEvent,
                        fmt::format("state index {} outside space of size {}", m, dimension));
        }
        mask_[m] = 1;
    }
    if (std::none_of(mask_.begin(), mask_.end(), [](char c) { return c != 0; })) {
        throw Error(ErrorKind::InvalidEvent, "event must be non-empty");
    }
}

Event::Event(std::size_t dimension, std::initializer_list<std::size_t> members)
    : Event(dimension, std::span<const std::size_t>(members.begin(), members.size())) {}

Event Event::whole(std::size_t dimension) { return Event(std::vector<char>(dimension, 1)); }

Event Event::from_mask(std::size_t dimension, unsigned long long bits) {
    std::vector<char> mask(dimension, 0);
    for (std::size_t i = 0; i < dimension; ++i) mask[i] = static_cast<char>((bits >> i) & 1ULL);
    return Event(std::move(mask));
}

std::size_t Event::size() const noexcept {
    return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), char{1}));
}

std::vector<std::size_t> Event::members() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < mask_.size(); ++i)
        if (mask_[i]) out.push_back(i);
    return out;
}

Event Event::complement() const {
    std::vector<char> mask(mask_.size());
    for (std::size_t i = 0; i < mask_.size(); ++i) mask[i] = mask_[i] ? 0 : 1;
    return Event(std::move(mask));
}

// ----------------------------------------------------------------------------
// Belief / UtilityAct / SuggestionProfile

Belief::Belief(std::vector<double> probs, const Tolerances& tol) : probs_(std::move(probs)) {
    if (probs_.empty()) throw Error(ErrorKind::InvalidBelief, "belief must have at least one state");
    double total = 0.0;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        double& p = probs_[i];
        if (!std::isfinite(p) || p < -tol.simplex || p > 1.0 + tol.simplex) {
            throw Error(ErrorKind::InvalidBelief,
                        fmt::format("entry {} = {} is not a probability", i, p));
        }
        p = std::clamp(p, 0.0, 1.0);
        total += p;
    }
    if (std::abs(total - 1.0) > tol.simplex) {
        throw Error(ErrorKind::InvalidBelief, fmt::format("probabilities sum to {}, not 1", total));
    }
}

Belief Belief::degenerate(std::size_t dimension, std::size_t state) {
    if (state >= dimension) throw Error(ErrorKind::IndexOutOfRange, "degenerate state out of range");
    std::vector<double> p(dimension, 0.0);
    p[state] = 1.0;
    return Belief(std::move(p));
}

Belief Belief::uniform(std::size_t dimension) {
    return Belief(std::vector<double>(dimension, 1.0 / static_cast<double>(dimension)));
}

double Belief::mass(const Event& event) const {
    if (event.dimension() != size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("event over {} states, belief over {}", event.dimension(), size()));
    }
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        if (event.contains(i)) m += probs_[i];
    return m;
}

bool approx_equal(std::span<const double> a, std::span<const double> b, double eps) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > eps) return false;
    return true;
}

UtilityAct::UtilityAct(std::vector<double> utils) : utils_(std::move(utils)) {
    if (utils_.empty()) throw Error(ErrorKind::InvalidAct, "act must have at least one state");
    for (std::size_t i = 0; i < utils_.size(); ++i) {
        if (!std::isfinite(utils_[i])) {
            throw Error(ErrorKind::InvalidAct, fmt::format("utility at state {} is not finite", i));
        }
    }
}

UtilityAct UtilityAct::constant(std::size_t dimension, double value) {
    return UtilityAct(std::vector<double>(dimension, value));
}

UtilityAct UtilityAct::shifted(double delta) const {
    auto u = utils_;
    for (auto& x : u) x += delta;
    return UtilityAct(std::move(u));
}

SuggestionProfile::SuggestionProfile(std::vector<Belief> beliefs) : beliefs_(std::move(beliefs)) {
    if (beliefs_.empty()) throw Error(ErrorKind::InvalidArgument, "profile needs at least one expert");
    for (std::size_t i = 1; i < beliefs_.size(); ++i) {
        if (beliefs_[i].size() != beliefs_[0].size()) {
            throw Error(ErrorKind::DimensionMismatch,
                        fmt::format("expert {} has {} states, expert 0 has {}", i,
                                    beliefs_[i].size(), beliefs_[0].size()));
        }
    }
}

// ----------------------------------------------------------------------------
// Operations

Belief condition_belief(const Belief& mu, const Event& event, const Tolerances& tol) {
    const double m = mu.mass(event);
    if (m <= tol.simplex) {
        throw Error(ErrorKind::ZeroProbabilityEvent,
                    fmt::format("conditioning event has probability {}", m));
    }
    std::vector<double> p(mu.size(), 0.0);
    for (std::size_t i = 0; i < mu.size(); ++i)
        if (event.contains(i)) p[i] = mu[i] / m;
    return Belief(std::move(p), tol);
}

bool is_conditionable(const SuggestionProfile& profile, const Event& event, const Tolerances& tol) {
    return std::all_of(profile.beliefs().begin(), profile.beliefs().end(),
                       [&](const Belief& b) { return b.mass(event) > tol.simplex; });
}

SuggestionProfile condition_profile(const SuggestionProfile& profile, const Event& event,
                                    const Tolerances& tol) {
    std::vector<Belief> out;
    out.reserve(profile.expert_count());
    for (std::size_t i = 0; i < profile.expert_count(); ++i) {
        const double m = profile[i].mass(event);
        if (m <= tol.simplex) {
            throw Error(ErrorKind::EventNotConditionable,
                        fmt::format("expert {} assigns probability {} to the event", i, m));
        }
        out.push_back(condition_belief(profile[i], event, tol));
    }
    return SuggestionProfile(std::move(out));
}

double expected_utility(const Belief& mu, const UtilityAct& act) {
    if (mu.size() != act.size()) {
        throw Error(ErrorKind::DimensionMismatch,
                    fmt::format("belief over {} states, act over {}", mu.size(), act.size()));
    }
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * act[i];
    return s;
}

UtilityAct composite_act(const UtilityAct& f, const Event& event, const UtilityAct& g) {
    if (f.size() != g.size() || f.size() != event.dimension()) {
        throw Error(ErrorKind::DimensionMismatch, "composite act operands differ in dimension");
    }
    std::vector<double> u(f.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = event.contains(i) ? f[i] : g[i];
    return UtilityAct(std::move(u));
}

UtilityAct mix_acts(const UtilityAct& f, const UtilityAct& g, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorKind::AlphaOutOfRange, fmt::format("mixture weight {} not in (0,1)", alpha));
    }
    if (f.size() != g.size()) throw Error(ErrorKind::DimensionMismatch, "mixture operands differ in dimension");
    std::vector<double> u(f.size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = alpha * f[i] + (1.0 - alpha) * g[i];
    return UtilityAct(std::move(u));
}

}  // namespace pooling
