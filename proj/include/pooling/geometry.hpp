#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pooling/prob_core.hpp"

namespace pooling {

/// Feasibility of A x = b, x >= 0, via phase one of the simplex method.
struct PhaseOneResult {
    std::vector<double> x;
    /// Optimal sum of artificial variables; zero iff the system is feasible.
    double infeasibility = 0.0;
};

/// Dense tableau, Bland's rule. `rows` holds the m rows of A, all of equal length.
PhaseOneResult solve_phase_one(const std::vector<std::vector<double>>& rows,
                               std::vector<double> rhs, double pivot_tol = 1e-12);

struct HullMembershipResult {
    bool inside = false;
    /// Convex combination over the vertices (meaningful when inside).
    std::vector<double> coefficients;
    double residual = 0.0;
};

HullMembershipResult hull_contains(std::span<const std::vector<double>> vertices,
                                   std::span<const double> point, const Tolerances& tol = {});
HullMembershipResult hull_contains(std::span<const Belief> vertices, const Belief& point,
                                   const Tolerances& tol = {});

/// p3(E) * p1(.|E) on E and p3(E^c) * p2(.|E^c) off E.
Belief paste_across(const Belief& p1, const Belief& p2, const Belief& p3, const Event& event,
                    const Tolerances& tol = {});

struct RectangularityWitness {
    Belief first;
    Belief second;
    Belief third;
    Belief pasted;
    double residual;
};

/// First triple whose pasted measure leaves the hull: every ordered vertex
/// triple, then 64 random triples of hull points drawn from `seed`.
/// Throws ConditioningUndefined when a vertex gives E or E^c (numerically) zero mass.
std::optional<RectangularityWitness> find_rectangularity_violation(
    std::span<const Belief> vertices, const Event& event, std::uint64_t seed = 0x5EC7A9,
    const Tolerances& tol = {});

bool is_rectangular(std::span<const Belief> vertices, const Event& event,
                    const Tolerances& tol = {});

}  // namespace pooling
