#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/numeric.hpp"
#include "fairscore/region.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore {

/// One maximal subinterval of the intersection boundary on which both
/// group-piece indices (k for group 0, l for group 1) and the active group
/// are fixed. The terminal vertical segment, when present, is reported with
/// is_vertical = true and p_left == p_right == p_max.
struct BoundarySegment {
    double p_left = 0.0;
    double p_right = 0.0;
    int active_group = 0;
    int k = 0;  // group-0 piece index
    int l = 0;  // group-1 piece index
    bool is_vertical = false;
};

struct IntersectionSummary {
    double p_max = 0.0;
    double q_min = 0.0;
    std::vector<BoundarySegment> segments;
    bool nonempty = false;
};

/// Coefficients of the quadratic whose sign decides which group's boundary
/// is active: q0(p) >= q1(p) on a piece pair (k, l) iff a*p^2 + b*p + c >= 0.
struct QuadCoeffs {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

/// Trivial and edge options available through constant (degenerate)
/// classifiers, which satisfy sufficiency vacuously on the constant side.
struct DegenerateEdge {
    int group = 0;         // the group classified constantly
    bool horizontal = false;  // true: q == fixed_value; false: p == fixed_value
    double fixed_value = 0.0;
    double lo = 0.0;  // range of the free coordinate inside the other region
    double hi = 0.0;
};

struct DegenerateOptions {
    FeasiblePair trivial_point;  // (pi_high, pi_low), attained by predicting group
    int high_group = 0;
    std::vector<DegenerateEdge> edges;
};

/// True iff a nonconstant classifier satisfying predictive parity exists,
/// i.e. both the common-p range (max pi, min s_max] and the common-q range
/// [max s_min, min pi) are nonempty.
inline bool intersection_nonempty(const GroupDistribution& d0, const GroupDistribution& d1) {
    const bool p_range = std::max(d0.base_rate, d1.base_rate) < std::min(d0.s_max(), d1.s_max());
    const bool q_range = std::max(d0.s_min(), d1.s_min()) < std::min(d0.base_rate, d1.base_rate);
    return p_range && q_range;
}

namespace detail {

inline void check_nonempty(const GroupDistribution& d0, const GroupDistribution& d1) {
    if (!intersection_nonempty(d0, d1)) {
        throw Error(ErrorCode::EmptyIntersection,
                    "the two feasible regions have no common nonconstant pair");
    }
}

/// Largest p <= s_max with boundary_for(dist, p) <= q_cap. Scans the
/// hard-threshold FOR breakpoints and inverts the boundary formula on the
/// piece where the cap is crossed.
inline double boundary_p_at_for_cap(const GroupDistribution& dist, double q_cap) {
    int k = 0;
    for (int j = 1; j < dist.m(); ++j) {
        if (dist.q_break_at(j) <= q_cap) {
            k = j;
            break;
        }
    }
    if (k == 0) {
        throw Error(ErrorCode::POutOfRange, "FOR cap below the attainable minimum");
    }
    if (k == 1) return dist.s_max();
    const double pi = dist.base_rate;
    const double sk = dist.score_at(k);
    const double ck = dist.c_at(k);
    return ((sk + ck) * q_cap - sk * pi) / (q_cap - pi + ck);
}

}  // namespace detail

/// Extreme coordinates of the intersection: the largest common PPV and the
/// smallest common FOR. The high-base-rate group caps p (its boundary
/// crosses q = pi_low), the low one caps q.
inline std::pair<double, double> compute_pmax_qmin(const GroupDistribution& d0,
                                                   const GroupDistribution& d1) {
    detail::check_nonempty(d0, d1);
    const bool zero_is_high = d0.base_rate >= d1.base_rate;
    const GroupDistribution& high = zero_is_high ? d0 : d1;
    const GroupDistribution& low = zero_is_high ? d1 : d0;

    const double p_max =
        std::min(detail::boundary_p_at_for_cap(high, low.base_rate), low.s_max());

    // The low group's boundary evaluated at p = pi_high, floored by the high
    // group's minimum score.
    double q_min_low;
    int k = 0;
    for (int j = 2; j <= low.m(); ++j) {
        if (low.p_break_at(j) <= high.base_rate) {
            k = j;
            break;
        }
    }
    if (k == low.m()) {
        q_min_low = low.s_min();
    } else {
        q_min_low = boundary_for_piece(low, k, high.base_rate);
    }
    const double q_min = std::max(q_min_low, high.s_min());
    return {p_max, q_min};
}

/// The active-boundary quadratic for piece pair (k, l), 2 <= k <= m0,
/// 2 <= l <= m1.
inline QuadCoeffs active_boundary_quadratic(const GroupDistribution& d0,
                                            const GroupDistribution& d1, int k, int l) {
    if (k < 2 || k > d0.m() || l < 2 || l > d1.m()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "piece pair (" + std::to_string(k) + ", " + std::to_string(l) +
                        ") outside 2..m for one of the groups");
    }
    const double pi0 = d0.base_rate, s0 = d0.score_at(k), c0 = d0.c_at(k);
    const double pi1 = d1.base_rate, s1 = d1.score_at(l), c1 = d1.c_at(l);
    QuadCoeffs q;
    q.a = (pi0 - c0) - (pi1 - c1);
    q.b = s1 * pi1 - s0 * pi0 + (s0 + c0) * (pi1 - c1) - (s1 + c1) * (pi0 - c0);
    q.c = (s1 + c1) * s0 * pi0 - (s0 + c0) * s1 * pi1;
    return q;
}

inline double eval_quadratic(const QuadCoeffs& q, double p) {
    return (q.a * p + q.b) * p + q.c;
}

/// Pointwise maximum of the two group boundary curves; the lower boundary
/// of the intersection on [max pi, p_max].
inline double intersection_boundary_for(const GroupDistribution& d0,
                                        const GroupDistribution& d1, double p) {
    return std::max(boundary_for(d0, p), boundary_for(d1, p));
}

namespace detail {

constexpr double kRootDropTolerance = 1e-12;
constexpr double kActiveTieTolerance = 1e-12;

}  // namespace detail

/// Walks the intersection boundary in increasing p, splitting at every
/// breakpoint of either group and at every interior root of the
/// active-boundary quadratic, and invokes the visitor once per maximal
/// segment (vertical segment last, when p_max reaches min s_max). Numerical
/// ties go to group 0.
template <class Visitor>
IntersectionSummary trace_boundary(const GroupDistribution& d0, const GroupDistribution& d1,
                                   Visitor&& visit) {
    detail::check_nonempty(d0, d1);
    IntersectionSummary out;
    out.nonempty = true;
    const auto [p_max, q_min] = compute_pmax_qmin(d0, d1);
    out.p_max = p_max;
    out.q_min = q_min;

    double p_left = std::max(d0.base_rate, d1.base_rate);
    while (p_left < p_max) {
        int k = 2;
        for (int j = d0.m(); j >= 2; --j) {
            if (d0.p_break_at(j - 1) > p_left) {
                k = j;
                break;
            }
        }
        int l = 2;
        for (int j = d1.m(); j >= 2; --j) {
            if (d1.p_break_at(j - 1) > p_left) {
                l = j;
                break;
            }
        }
        const double p_right =
            std::min({d0.p_break_at(k - 1), d1.p_break_at(l - 1), p_max});

        const QuadCoeffs phi = active_boundary_quadratic(d0, d1, k, l);
        double roots[2];
        const int n_roots = detail::solve_quadratic(phi.a, phi.b, phi.c, roots);
        std::vector<double> cuts;
        for (int r = 0; r < n_roots; ++r) {
            if (roots[r] > p_left + detail::kRootDropTolerance &&
                roots[r] < p_right - detail::kRootDropTolerance &&
                (cuts.empty() || roots[r] - cuts.back() > detail::kRootDropTolerance)) {
                cuts.push_back(roots[r]);
            }
        }
        cuts.push_back(p_right);

        for (double cut : cuts) {
            BoundarySegment seg;
            seg.p_left = p_left;
            seg.p_right = cut;
            seg.k = k;
            seg.l = l;
            const double mid = eval_quadratic(phi, 0.5 * (p_left + cut));
            seg.active_group = (mid >= -detail::kActiveTieTolerance) ? 0 : 1;
            out.segments.push_back(seg);
            visit(out.segments.back());
            p_left = cut;
        }
    }

    if (p_max == std::min(d0.s_max(), d1.s_max())) {
        BoundarySegment seg;
        seg.p_left = seg.p_right = p_max;
        seg.is_vertical = true;
        seg.active_group = (d0.s_max() <= d1.s_max()) ? 0 : 1;
        seg.k = seg.l = 1;
        out.segments.push_back(seg);
        visit(out.segments.back());
    }
    return out;
}

inline IntersectionSummary trace_boundary(const GroupDistribution& d0,
                                          const GroupDistribution& d1) {
    return trace_boundary(d0, d1, [](const BoundarySegment&) {});
}

/// Degenerate (constant-on-a-group) options, reported descriptively. Always
/// available even when the nonconstant intersection is empty: predicting
/// group membership attains (pi_high, pi_low).
inline DegenerateOptions degenerate_options(const GroupDistribution& d0,
                                            const GroupDistribution& d1) {
    DegenerateOptions out;
    const double pi0 = d0.base_rate, pi1 = d1.base_rate;
    out.high_group = (pi1 > pi0) ? 1 : 0;
    const double pi_high = std::max(pi0, pi1);
    const double pi_low = std::min(pi0, pi1);
    out.trivial_point = {pi_high, pi_low};

    const GroupDistribution* dists[2] = {&d0, &d1};
    for (int a = 0; a < 2; ++a) {
        const double pi_a = dists[a]->base_rate;
        const GroupDistribution& other = *dists[1 - a];
        const double pi_b = other.base_rate;
        if (pi_a < pi_b && pi_a >= other.s_min()) {
            // Group a constant-0: its FOR edge q = pi_a crosses the other
            // region for p up to where the other boundary reaches pi_a.
            DegenerateEdge e;
            e.group = a;
            e.horizontal = true;
            e.fixed_value = pi_a;
            e.lo = pi_b;
            e.hi = detail::boundary_p_at_for_cap(other, pi_a);
            out.edges.push_back(e);
        }
        if (pi_a > pi_b && pi_a <= other.s_max()) {
            // Group a constant-1: its PPV edge p = pi_a crosses the other
            // region for q from the other boundary up to pi_b.
            DegenerateEdge e;
            e.group = a;
            e.horizontal = false;
            e.fixed_value = pi_a;
            e.lo = boundary_for(other, pi_a);
            e.hi = pi_b;
            out.edges.push_back(e);
        }
    }
    return out;
}

}  // namespace fairscore
