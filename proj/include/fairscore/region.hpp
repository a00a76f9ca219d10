#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/numeric.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore {

/// A (PPV, FOR) operating point. p = P(Y=1 | R=1), q = P(Y=1 | R=0).
/// By convention q <= p (the labels of R are interchangeable).
struct FeasiblePair {
    double p = 0.0;
    double q = 0.0;
};

/// Per-bin selection probabilities P(R=1 | score bin), aligned with a
/// GroupDistribution's bins.
struct SelectionRule {
    std::vector<double> select_prob;
};

/// Default slack accepted outside the exact region boundary; downstream
/// optimizers hand back boundary points computed in floating point.
constexpr double kMembershipTolerance = 1e-9;

namespace detail {

inline void check_mu(double mu) {
    if (!(mu > 0.0 && mu < 1.0)) {
        throw Error(ErrorCode::MuOutOfRange,
                    "selection rate " + std::to_string(mu) + " not in (0, 1)");
    }
}

/// Pivot bin index (1-based): the smallest k with mu_k >= mu. At mu == mu_k
/// exactly this picks k, so the soft threshold degenerates to the hard
/// threshold R = 1 iff S >= s_k.
inline int pivot_index(const GroupDistribution& dist, double mu) {
    auto it = std::lower_bound(dist.mu.begin(), dist.mu.end(), mu);
    return static_cast<int>(it - dist.mu.begin()) + 1;
}

/// Piece index k (1-based, 2..m) such that p lies in J_k = [p_k, p_{k-1}),
/// for p in [pi, s_max). p == s_max returns 1.
inline int piece_index(const GroupDistribution& dist, double p) {
    auto it = std::lower_bound(dist.p_break.begin(), dist.p_break.end(), p,
                               std::greater<double>());
    return static_cast<int>(it - dist.p_break.begin()) + 1;
}

}  // namespace detail

/// Maximum PPV attainable by a nonconstant rule with selection rate mu:
/// s_k + c_k / mu at the pivot k. Constant at s_max for mu <= mu_1, then
/// continuous and strictly decreasing down to pi as mu -> 1.
inline double max_ppv(const GroupDistribution& dist, double mu) {
    detail::check_mu(mu);
    const int k = detail::pivot_index(dist, mu);
    return dist.score_at(k) + dist.c_at(k) / mu;
}

/// Minimum FOR attainable at selection rate mu, from the mass balance
/// pi = mu*p + (1-mu)*q applied to max_ppv.
inline double min_for(const GroupDistribution& dist, double mu) {
    detail::check_mu(mu);
    return (dist.base_rate - mu * max_ppv(dist, mu)) / (1.0 - mu);
}

/// The PPV-maximizing rule at rate mu: select everything above the pivot
/// bin, nothing below it, and randomize on the pivot so the rate is met
/// exactly.
inline SelectionRule soft_threshold_rule(const GroupDistribution& dist, double mu) {
    detail::check_mu(mu);
    const int k = detail::pivot_index(dist, mu);
    SelectionRule rule;
    rule.select_prob.assign(static_cast<size_t>(dist.m()), 0.0);
    for (int i = 1; i < k; ++i) rule.select_prob[static_cast<size_t>(i - 1)] = 1.0;
    const double below = (k >= 2) ? dist.mu_at(k - 1) : 0.0;
    rule.select_prob[static_cast<size_t>(k - 1)] =
        detail::clamp01((mu - below) / dist.weight_at(k));
    return rule;
}

/// Selection rate induced by a rule: sum_i weight_i * select_prob_i.
inline double selection_rate(const GroupDistribution& dist, const SelectionRule& rule) {
    detail::CompensatedSum acc;
    for (int i = 0; i < dist.m(); ++i) {
        acc.add(dist.weight_at(i + 1) * rule.select_prob[static_cast<size_t>(i)]);
    }
    return acc.value();
}

/// Exact PPV of a rule, computed analytically from the distribution.
inline double rule_ppv(const GroupDistribution& dist, const SelectionRule& rule) {
    detail::CompensatedSum sel, sel_sw;
    for (int i = 0; i < dist.m(); ++i) {
        const double wr = dist.weight_at(i + 1) * rule.select_prob[static_cast<size_t>(i)];
        sel.add(wr);
        sel_sw.add(dist.score_at(i + 1) * wr);
    }
    if (!(sel.value() > 0.0)) {
        throw Error(ErrorCode::DegeneratePair, "rule never selects; PPV undefined");
    }
    return sel_sw.value() / sel.value();
}

/// Exact FOR of a rule, computed analytically from the distribution.
inline double rule_for(const GroupDistribution& dist, const SelectionRule& rule) {
    detail::CompensatedSum rej, rej_sw;
    for (int i = 0; i < dist.m(); ++i) {
        const double wr =
            dist.weight_at(i + 1) * (1.0 - rule.select_prob[static_cast<size_t>(i)]);
        rej.add(wr);
        rej_sw.add(dist.score_at(i + 1) * wr);
    }
    if (!(rej.value() > 0.0)) {
        throw Error(ErrorCode::DegeneratePair, "rule always selects; FOR undefined");
    }
    return rej_sw.value() / rej.value();
}

/// Boundary curve value on a specific piece k (2..m), without locating the
/// piece from p. For k == m the curve is identically s_min.
inline double boundary_for_piece(const GroupDistribution& dist, int k, double p) {
    if (k < 2 || k > dist.m()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "piece index " + std::to_string(k) + " outside 2..m");
    }
    if (k == dist.m()) return dist.s_min();
    const double pi = dist.base_rate;
    const double sk = dist.score_at(k);
    const double ck = dist.c_at(k);
    return ((pi - ck) * p - sk * pi) / (p - sk - ck);
}

/// Lower boundary of the feasible region as a function of PPV: the minimal
/// FOR attainable with that PPV. Defined on [pi, s_max]; p == s_max yields
/// the bottom of the vertical boundary segment.
inline double boundary_for(const GroupDistribution& dist, double p) {
    const double pi = dist.base_rate;
    if (!(p >= pi - kMembershipTolerance && p <= dist.s_max() + kMembershipTolerance)) {
        throw Error(ErrorCode::POutOfRange,
                    "p = " + std::to_string(p) + " outside [base_rate, s_max]");
    }
    p = std::clamp(p, pi, dist.s_max());
    const int k = detail::piece_index(dist, p);
    if (k == 1) return dist.q_break_at(1);  // p == s_max, vertical-segment bottom
    return boundary_for_piece(dist, k, p);
}

/// Closed-region membership test: true iff the pair is attainable by a
/// (possibly randomized) classifier on this distribution, within tol. The
/// pair lies on the ray through (pi, pi) with rate mu = (pi-q)/(p-q) and is
/// feasible iff p does not exceed max_ppv(mu). Total predicate: never throws.
inline bool contains(const GroupDistribution& dist, const FeasiblePair& pair,
                     double tol = kMembershipTolerance) {
    const double p = pair.p;
    const double q = pair.q;
    if (!std::isfinite(p) || !std::isfinite(q)) return false;
    if (q > p + tol) return false;
    const double pi = dist.base_rate;
    if (p < pi - tol || p > dist.s_max() + tol) return false;
    if (q > pi + tol || q < dist.s_min() - tol) return false;
    if (p - q <= tol) return true;  // bounds above force p ~ q ~ pi
    const double mu = (pi - q) / (p - q);
    // Within tol of the closure edges at q = pi (mu -> 0) or p = pi (mu -> 1):
    // covered by the range checks already done.
    if (mu <= 0.0 || mu >= 1.0) return true;
    return p <= max_ppv(dist, mu) + tol;
}

/// Synthesizes a rule attaining a feasible pair: the eta-mixture of the
/// soft threshold at mu = (pi-q)/(p-q) with a constant-mu coin, where
/// eta = (p-pi)/(max_ppv(mu)-pi). The pair (pi, pi) maps to the constant
/// rule at 0.5 by convention; pairs on the closure edges map to the
/// limiting constant rules (select all / select none).
inline SelectionRule rule_for_pair(const GroupDistribution& dist, const FeasiblePair& pair,
                                   double tol = kMembershipTolerance) {
    if (!contains(dist, pair, tol)) {
        throw Error(ErrorCode::InfeasiblePair,
                    "(" + std::to_string(pair.p) + ", " + std::to_string(pair.q) +
                        ") is not attainable on this distribution");
    }
    const double pi = dist.base_rate;
    const size_t m = static_cast<size_t>(dist.m());
    SelectionRule rule;

    if (std::abs(pair.p - pi) <= tol && std::abs(pair.q - pi) <= tol) {
        rule.select_prob.assign(m, 0.5);
        return rule;
    }

    const double mu = (pi - pair.q) / (pair.p - pair.q);
    if (mu >= 1.0 - 1e-12) {  // p == pi edge: limit of mu -> 1 is "select all"
        rule.select_prob.assign(m, 1.0);
        return rule;
    }
    if (mu <= 1e-12) {  // q == pi edge: limit of mu -> 0 is "select none"
        rule.select_prob.assign(m, 0.0);
        return rule;
    }

    const SelectionRule star = soft_threshold_rule(dist, mu);
    const double p_top = max_ppv(dist, mu);
    const double eta = detail::clamp01((pair.p - pi) / (p_top - pi));
    rule.select_prob.resize(m);
    for (size_t i = 0; i < m; ++i) {
        rule.select_prob[i] = detail::clamp01(eta * star.select_prob[i] + (1.0 - eta) * mu);
    }
    return rule;
}

}  // namespace fairscore
