#include "pooling/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "pooling/sampling.hpp"

namespace pooling {

PhaseOneResult solve_phase_one(const std::vector<std::vector<double>>& rows,
                               std::vector<double> rhs, double pivot_tol) {
    const std::size_t m = rows.size();
    if (m != rhs.size()) throw Error(ErrorKind::DimensionMismatch, "constraint rows and rhs differ in length");
    const std::size_t n = m == 0 ? 0 : rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != n) throw Error(ErrorKind::DimensionMismatch, "ragged constraint matrix");
    }

    // Tableau columns: n structural, m artificial, 1 rhs.
    const std::size_t width = n + m + 1;
    std::vector<std::vector<double>> t(m, std::vector<double>(width, 0.0));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double sign = rhs[i] < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = sign * rows[i][j];
        t[i][n + i] = 1.0;
        t[i][width - 1] = sign * rhs[i];
        basis[i] = n + i;
    }
    // Reduced costs of minimizing the artificial sum.
    std::vector<double> cost(width, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) cost[j] -= t[i][j];
    for (std::size_t i = 0; i < m; ++i) cost[width - 1] -= t[i][width - 1];

    for (int iter = 0; iter < 100000; ++iter) {
        // Bland: lowest-index improving column.
        std::size_t enter = width;
        for (std::size_t j = 0; j + 1 < width; ++j) {
            if (cost[j] < -pivot_tol) {
                enter = j;
                break;
            }
        }
        if (enter == width) break;

        std::size_t leave = m;
        double best = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double a = t[i][enter];
            if (a <= pivot_tol) continue;
            const double ratio = t[i][width - 1] / a;
            if (leave == m || ratio < best - pivot_tol ||
                (std::abs(ratio - best) <= pivot_tol && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // unbounded direction; cannot occur for a bounded-below phase one

        const double piv = t[leave][enter];
        for (double& v : t[leave]) v /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave) continue;
            const double factor = t[i][enter];
            if (factor == 0.0) continue;
            for (std::size_t j = 0; j < width; ++j) t[i][j] -= factor * t[leave][j];
        }
        const double factor = cost[enter];
        for (std::size_t j = 0; j < width; ++j) cost[j] -= factor * t[leave][j];
        basis[leave] = enter;
    }

    PhaseOneResult out;
    out.x.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double value = std::max(0.0, t[i][width - 1]);
        if (basis[i] < n) {
            out.x[basis[i]] = value;
        } else {
            out.infeasibility += value;
        }
    }
    return out;
}

HullMembershipResult hull_contains(std::span<const std::vector<double>> vertices,
                                   std::span<const double> point, const Tolerances& tol) {
    if (vertices.empty()) throw Error(ErrorKind::InvalidArgument, "hull needs at least one vertex");
    const std::size_t d = point.size();
    for (const auto& v : vertices) {
        if (v.size() != d) {
            throw Error(ErrorKind::DimensionMismatch,
                        fmt::format("vertex has {} coordinates, point has {}", v.size(), d));
        }
    }
    const std::size_t k = vertices.size();
    std::vector<std::vector<double>> rows(d + 1, std::vector<double>(k, 0.0));
    std::vector<double> rhs(d + 1, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t c = 0; c < k; ++c) rows[j][c] = vertices[c][j];
        rhs[j] = point[j];
    }
    std::fill(rows[d].begin(), rows[d].end(), 1.0);
    rhs[d] = 1.0;

    auto lp = solve_phase_one(rows, std::move(rhs));
    HullMembershipResult out;
    out.residual = lp.infeasibility;
    out.coefficients = std::move(lp.x);
    out.inside = out.residual <= tol.simplex;
    return out;
}

HullMembershipResult hull_contains(std::span<const Belief> vertices, const Belief& point,
                                   const Tolerances& tol) {
    std::vector<std::vector<double>> v;
    v.reserve(vertices.size());
    for (const auto& b : vertices) v.emplace_back(b.probs().begin(), b.probs().end());
    return hull_contains(std::span<const std::vector<double>>(v), point.probs(), tol);
}

Belief paste_across(const Belief& p1, const Belief& p2, const Belief& p3, const Event& event,
                    const Tolerances& tol) {
    const Event outside = event.complement();
    const Belief inner = condition_belief(p1, event, tol);
    const Belief outer = condition_belief(p2, outside, tol);
    const double alpha = p3.mass(event);
    std::vector<double> p(p3.size());
    for (std::size_t w = 0; w < p.size(); ++w) {
        p[w] = event.contains(w) ? alpha * inner[w] : (1.0 - alpha) * outer[w];
    }
    return Belief(std::move(p), tol);
}

namespace {

Belief hull_point(std::span<const Belief> vertices, Rng& rng) {
    const auto c = random_simplex_point(vertices.size(), rng);
    std::vector<double> p(vertices.front().size(), 0.0);
    for (std::size_t k = 0; k < vertices.size(); ++k)
        for (std::size_t w = 0; w < p.size(); ++w) p[w] += c[k] * vertices[k][w];
    return Belief(std::move(p));
}

}  // namespace

std::optional<RectangularityWitness> find_rectangularity_violation(std::span<const Belief> vertices,
                                                                   const Event& event,
                                                                   std::uint64_t seed,
                                                                   const Tolerances& tol) {
    if (vertices.empty()) throw Error(ErrorKind::InvalidArgument, "rectangularity needs a non-empty set");
    if (event.is_whole()) {
        throw Error(ErrorKind::ConditioningUndefined, "the complement of the whole space is empty");
    }
    const Event outside = event.complement();
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const double in = vertices[k].mass(event);
        const double out = vertices[k].mass(outside);
        if (in <= tol.simplex || out <= tol.simplex) {
            throw Error(ErrorKind::ConditioningUndefined,
                        fmt::format("vertex {} assigns mass {} to the event and {} to its complement",
                                    k, in, out));
        }
    }

    const auto test = [&](const Belief& a, const Belief& b,
                          const Belief& c) -> std::optional<RectangularityWitness> {
        Belief pasted = paste_across(a, b, c, event, tol);
        const auto hull = hull_contains(vertices, pasted, tol);
        if (hull.inside) return std::nullopt;
        return RectangularityWitness{a, b, c, std::move(pasted), hull.residual};
    };

    for (const auto& a : vertices)
        for (const auto& b : vertices)
            for (const auto& c : vertices)
                if (auto w = test(a, b, c)) return w;

    if (vertices.size() > 1) {
        Rng rng(seed);
        for (int s = 0; s < 64; ++s) {
            const Belief a = hull_point(vertices, rng);
            const Belief b = hull_point(vertices, rng);
            const Belief c = hull_point(vertices, rng);
            if (auto w = test(a, b, c)) return w;
        }
    }
    return std::nullopt;
}

bool is_rectangular(std::span<const Belief> vertices, const Event& event, const Tolerances& tol) {
    return !find_rectangularity_violation(vertices, event, 0x5EC7A9, tol).has_value();
}

}  // namespace pooling
