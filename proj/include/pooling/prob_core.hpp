#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "pooling/error.hpp"

namespace pooling {

/// Numeric tolerances shared by every module.
///
/// `simplex` governs probability comparisons (simplex membership, zero-mass
/// detection, entrywise agreement of beliefs). `value` governs comparisons
/// between utilities. `bisect` is the terminal bracket width used when
/// solving for certainty equivalents and must not exceed `value`.
struct Tolerances {
    double simplex = 1e-9;
    double value = 1e-8;
    double bisect = 1e-10;

    /// Throws InvalidArgument unless all are positive and bisect <= value.
    void validate() const;
};

/// Ordered, uniquely labelled finite state space with at least three states.
class StateSpace {
public:
    explicit StateSpace(std::vector<std::string> labels);

    /// States labelled "w1".."wn".
    static StateSpace indexed(std::size_t size);

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    /// Index of a label; throws InvalidEvent for unknown names.
    std::size_t index_of(std::string_view label) const;

    /// Throws StateSpaceTooSmall when fewer than `required` states exist.
    void require_at_least(std::size_t required) const;

    friend bool operator==(const StateSpace&, const StateSpace&) = default;

private:
    std::vector<std::string> labels_;
};

/// Non-empty subset of state indices, stored as a membership mask.
class Event {
public:
    Event(std::size_t dimension, std::span<const std::size_t> members);
    Event(std::size_t dimension, std::initializer_list<std::size_t> members);

    static Event whole(std::size_t dimension);
    /// Event encoded by the low `dimension` bits of `bits`; bits must be non-zero.
    static Event from_mask(std::size_t dimension, unsigned long long bits);

    std::size_t dimension() const noexcept { return mask_.size(); }
    bool contains(std::size_t state) const { return mask_.at(state) != 0; }
    std::size_t size() const noexcept;
    bool is_whole() const noexcept { return size() == dimension(); }
    std::vector<std::size_t> members() const;

    /// Complement within the same state space; throws InvalidEvent when this
    /// event is the whole space (the complement would be empty).
    Event complement() const;

    friend bool operator==(const Event&, const Event&) = default;

private:
    explicit Event(std::vector<char> mask);
    std::vector<char> mask_;
};

/// Probability vector over a finite state space.
///
/// Entries may undershoot zero by at most `tol.simplex`; they are clamped into
/// [0,1] and the total must be within `tol.simplex` of one.
class Belief {
public:
    explicit Belief(std::vector<double> probs, const Tolerances& tol = {});

    /// Point mass on `state`.
    static Belief degenerate(std::size_t dimension, std::size_t state);
    static Belief uniform(std::size_t dimension);

    std::size_t size() const noexcept { return probs_.size(); }
    double operator[](std::size_t i) const { return probs_[i]; }
    std::span<const double> probs() const noexcept { return probs_; }

    double mass(const Event& event) const;

    friend bool operator==(const Belief&, const Belief&) = default;

private:
    std::vector<double> probs_;
};

/// True when every entry differs by at most `eps`.
bool approx_equal(std::span<const double> a, std::span<const double> b, double eps);

/// Utility vector over states: acts are represented directly in utility space.
class UtilityAct {
public:
    explicit UtilityAct(std::vector<double> utils);

    static UtilityAct constant(std::size_t dimension, double value);

    std::size_t size() const noexcept { return utils_.size(); }
    double operator[](std::size_t i) const { return utils_[i]; }
    std::span<const double> utils() const noexcept { return utils_; }

    UtilityAct shifted(double delta) const;

    friend bool operator==(const UtilityAct&, const UtilityAct&) = default;

private:
    std::vector<double> utils_;
};

/// Ordered beliefs of n >= 1 experts over a common state space.
class SuggestionProfile {
public:
    explicit SuggestionProfile(std::vector<Belief> beliefs);

    std::size_t expert_count() const noexcept { return beliefs_.size(); }
    std::size_t state_count() const noexcept { return beliefs_.front().size(); }
    const Belief& operator[](std::size_t i) const { return beliefs_[i]; }
    const std::vector<Belief>& beliefs() const noexcept { return beliefs_; }

    friend bool operator==(const SuggestionProfile&, const SuggestionProfile&) = default;

private:
    std::vector<Belief> beliefs_;
};

/// Bayesian posterior mu(. | E). Throws ZeroProbabilityEvent if mu(E) <= tol.simplex.
Belief condition_belief(const Belief& mu, const Event& event, const Tolerances& tol = {});

/// Component-wise conditioning. Throws EventNotConditionable naming the first
/// expert that assigns (numerically) zero mass to the event.
SuggestionProfile condition_profile(const SuggestionProfile& profile, const Event& event,
                                    const Tolerances& tol = {});

/// True when every expert assigns mass above tol.simplex to the event.
bool is_conditionable(const SuggestionProfile& profile, const Event& event,
                      const Tolerances& tol = {});

double expected_utility(const Belief& mu, const UtilityAct& act);

/// The act equal to `f` on the event and to `g` off it.
UtilityAct composite_act(const UtilityAct& f, const Event& event, const UtilityAct& g);

/// Pointwise alpha*f + (1-alpha)*g with alpha strictly inside (0,1).
UtilityAct mix_acts(const UtilityAct& f, const UtilityAct& g, double alpha);

}  // namespace pooling
