#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/intersection.hpp"
#include "fairscore/numeric.hpp"
#include "fairscore/region.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore {

/// Misclassification costs; correct predictions cost 0.
struct LossSpec {
    double l01 = 1.0;  // false negative: predict 0, truth 1
    double l10 = 1.0;  // false positive: predict 1, truth 0
};

/// Group prior P(A) together with the aggregate quantities the objectives
/// need: the mixed base rate and the separation constant
/// k_tilde = 2*w0*w1*|pi0 - pi1| / (pi*(1-pi)).
struct PopulationWeights {
    double w0 = 0.5;
    double w1 = 0.5;
    double pi_agg = 0.0;
    double k_tilde = 0.0;
};

inline PopulationWeights make_population_weights(double pi0, double pi1, double w0,
                                                 double w1) {
    if (!(w0 >= 0.0 && w1 >= 0.0) || !(std::abs(w0 + w1 - 1.0) < 1e-9)) {
        throw Error(ErrorCode::InvalidWeights, "group weights must be >= 0 and sum to 1");
    }
    PopulationWeights weights;
    const double total = w0 + w1;
    weights.w0 = w0 / total;
    weights.w1 = w1 / total;
    weights.pi_agg = weights.w0 * pi0 + weights.w1 * pi1;
    weights.k_tilde = 2.0 * weights.w0 * weights.w1 * std::abs(pi0 - pi1) /
                      (weights.pi_agg * (1.0 - weights.pi_agg));
    return weights;
}

inline PopulationWeights make_population_weights(const GroupDistribution& d0,
                                                 const GroupDistribution& d1, double w0,
                                                 double w1) {
    return make_population_weights(d0.base_rate, d1.base_rate, w0, w1);
}

namespace detail {

inline void check_loss(const LossSpec& loss) {
    if (!(loss.l01 + loss.l10 > 0.0) || !std::isfinite(loss.l01) ||
        !std::isfinite(loss.l10)) {
        throw Error(ErrorCode::InvalidLoss, "need finite costs with l01 + l10 > 0");
    }
}

inline void check_pair_nondegenerate(const FeasiblePair& pair) {
    if (!(pair.p - pair.q > 1e-15)) {
        throw Error(ErrorCode::DegeneratePair, "p must exceed q");
    }
}

}  // namespace detail

/// Expected loss of any sufficient classifier attaining the pair:
/// pi*l01 + mu*(l10 - p*(l01+l10)) with mu = (pi - q)/(p - q), pi aggregate.
inline double expected_loss(const FeasiblePair& pair, const PopulationWeights& weights,
                            const LossSpec& loss) {
    detail::check_loss(loss);
    detail::check_pair_nondegenerate(pair);
    const double pi = weights.pi_agg;
    const double mu = (pi - pair.q) / (pair.p - pair.q);
    return pi * loss.l01 + mu * (loss.l10 - pair.p * (loss.l01 + loss.l10));
}

/// Deviation from separation (expected total-variation distance between
/// group-conditional and aggregate error profiles) of any sufficient
/// classifier attaining the pair:
/// k_tilde * (pi*(1-p) + q*(p-pi)) / (p - q).
inline double separation_deviation(const FeasiblePair& pair,
                                   const PopulationWeights& weights) {
    if (weights.k_tilde == 0.0) return 0.0;
    detail::check_pair_nondegenerate(pair);
    const double pi = weights.pi_agg;
    return weights.k_tilde * (pi * (1.0 - pair.p) + pair.q * (pair.p - pi)) /
           (pair.p - pair.q);
}

namespace detail {

/// mu(p) along a boundary piece equals (D*p + E)/((p - pi_a)*(p - s_k)),
/// with D, E below; both objective derivatives reduce to quadratics through
/// this representation.
struct PieceLinear {
    double d = 0.0;
    double e = 0.0;
};

inline PieceLinear mu_numerator(const GroupDistribution& active, int k, double pi_agg) {
    const double pi_a = active.base_rate;
    const double ck = active.c_at(k);
    const double sk = active.score_at(k);
    return {pi_agg - pi_a + ck, (pi_a - pi_agg) * sk - ck * pi_agg};
}

inline void check_piece(const GroupDistribution& active, int k) {
    if (k < 2 || k > active.m()) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "piece index " + std::to_string(k) + " outside 2..m");
    }
}

}  // namespace detail

/// Real roots of the numerator of dL/dp along boundary piece k of the
/// active group. Callers filter to the subinterval they are scanning.
inline std::vector<double> loss_critical_points(const GroupDistribution& active, int k,
                                                const PopulationWeights& weights,
                                                const LossSpec& loss) {
    detail::check_piece(active, k);
    detail::check_loss(loss);
    const auto [dk, ek] = detail::mu_numerator(active, k, weights.pi_agg);
    const double t = loss.l01 + loss.l10;
    const double pi_a = active.base_rate;
    const double sk = active.score_at(k);
    const double f = t * (dk * (pi_a + sk) + ek) - loss.l10 * dk;
    const double g = -2.0 * t * dk * pi_a * sk - 2.0 * loss.l10 * ek;
    const double h = (loss.l10 * dk - t * ek) * pi_a * sk + loss.l10 * ek * (pi_a + sk);
    double roots[2];
    const int n = detail::solve_quadratic(f, g, h, roots);
    return std::vector<double>(roots, roots + n);
}

/// Real roots of the numerator of d(Delta_sep)/dp along boundary piece k of
/// the active group.
inline std::vector<double> separation_critical_points(const GroupDistribution& active,
                                                      int k,
                                                      const PopulationWeights& weights) {
    detail::check_piece(active, k);
    const double pi = weights.pi_agg;
    const double pi_a = active.base_rate;
    const double sk = active.score_at(k);
    const double ck = active.c_at(k);
    const double at = pi_a - pi - ck;
    const double bt = pi * (2.0 * ck - pi_a + sk + 1.0) - sk * pi_a;
    const double ct = pi * (sk * pi_a - sk - ck);
    const double dt = -at * (pi_a + sk) - bt;
    const double et = 2.0 * at * pi_a * sk - 2.0 * ct;
    const double ft = bt * pi_a * sk + ct * (pi_a + sk);
    double roots[2];
    const int n = detail::solve_quadratic(dt, et, ft, roots);
    return std::vector<double>(roots, roots + n);
}

struct LossObjective {
    LossSpec loss;
};
struct SeparationObjective {};
using Objective = std::variant<LossObjective, SeparationObjective>;

enum class CandidateKind { IntervalEndpoint, InteriorRoot, VerticalTop };

inline const char* to_string(CandidateKind kind) {
    switch (kind) {
        case CandidateKind::IntervalEndpoint: return "interval_endpoint";
        case CandidateKind::InteriorRoot: return "interior_root";
        case CandidateKind::VerticalTop: return "vertical_top";
    }
    return "unknown";
}

struct OptimalSolution {
    FeasiblePair pair;
    double objective_value = 0.0;
    BoundarySegment segment;
    CandidateKind candidate_kind = CandidateKind::IntervalEndpoint;
    bool degenerate_objective = false;  // separation objective with k_tilde == 0
};

/// Exact minimization of the chosen objective over the closed intersection
/// boundary. Candidates are the leftmost endpoint, every segment's right
/// endpoint, interior roots of the derivative quadratic of the active
/// piece, and the vertical-segment top. Ties break toward larger p, then
/// larger q. A separation objective with equal base rates is identically
/// zero; the leftmost point is returned flagged degenerate.
inline OptimalSolution minimize_on_boundary(const GroupDistribution& d0,
                                            const GroupDistribution& d1,
                                            const PopulationWeights& weights,
                                            const Objective& objective) {
    const bool is_loss = std::holds_alternative<LossObjective>(objective);
    if (is_loss) detail::check_loss(std::get<LossObjective>(objective).loss);

    const auto value_at = [&](const FeasiblePair& pair) {
        if (is_loss) return expected_loss(pair, weights, std::get<LossObjective>(objective).loss);
        return separation_deviation(pair, weights);
    };
    const auto roots_of = [&](const GroupDistribution& active, int piece) {
        if (is_loss) {
            return loss_critical_points(active, piece, weights,
                                        std::get<LossObjective>(objective).loss);
        }
        return separation_critical_points(active, piece, weights);
    };

    const double domain_left = std::max(d0.base_rate, d1.base_rate);
    const double q_top = std::min(d0.base_rate, d1.base_rate);
    const bool degenerate = !is_loss && weights.k_tilde == 0.0;

    bool have_best = false;
    OptimalSolution best;
    const auto consider = [&](const FeasiblePair& pair, double value,
                              const BoundarySegment& seg, CandidateKind kind) {
        const bool better =
            !have_best || value < best.objective_value ||
            (value == best.objective_value &&
             (pair.p > best.pair.p || (pair.p == best.pair.p && pair.q > best.pair.q)));
        if (better) {
            best = {pair, value, seg, kind, degenerate};
            have_best = true;
        }
    };

    trace_boundary(d0, d1, [&](const BoundarySegment& seg) {
        if (seg.is_vertical) {
            if (degenerate) return;
            const FeasiblePair top{seg.p_left, q_top};
            consider(top, value_at(top), seg, CandidateKind::VerticalTop);
            return;
        }
        const GroupDistribution& active = (seg.active_group == 0) ? d0 : d1;
        const int piece = (seg.active_group == 0) ? seg.k : seg.l;
        if (seg.p_left == domain_left) {
            const FeasiblePair left{seg.p_left, boundary_for_piece(active, piece, seg.p_left)};
            consider(left, degenerate ? 0.0 : value_at(left), seg,
                     CandidateKind::IntervalEndpoint);
        }
        if (degenerate) return;
        const FeasiblePair right{seg.p_right, boundary_for_piece(active, piece, seg.p_right)};
        consider(right, value_at(right), seg, CandidateKind::IntervalEndpoint);
        for (double r : roots_of(active, piece)) {
            if (r > seg.p_left + detail::kRootDropTolerance &&
                r < seg.p_right - detail::kRootDropTolerance) {
                const FeasiblePair cand{r, boundary_for_piece(active, piece, r)};
                consider(cand, value_at(cand), seg, CandidateKind::InteriorRoot);
            }
        }
    });
    return best;
}

inline OptimalSolution minimize_loss_on_boundary(const GroupDistribution& d0,
                                                 const GroupDistribution& d1,
                                                 const PopulationWeights& weights,
                                                 const LossSpec& loss) {
    return minimize_on_boundary(d0, d1, weights, LossObjective{loss});
}

inline OptimalSolution minimize_separation_on_boundary(const GroupDistribution& d0,
                                                       const GroupDistribution& d1,
                                                       const PopulationWeights& weights) {
    return minimize_on_boundary(d0, d1, weights, SeparationObjective{});
}

/// Minimum expected loss without any fairness constraint: per-bin Bayes
/// decisions on each group.
inline double unconstrained_loss(const GroupDistribution& d0, const GroupDistribution& d1,
                                 const PopulationWeights& weights, const LossSpec& loss) {
    detail::check_loss(loss);
    const GroupDistribution* dists[2] = {&d0, &d1};
    const double w[2] = {weights.w0, weights.w1};
    double total = 0.0;
    for (int a = 0; a < 2; ++a) {
        detail::CompensatedSum acc;
        for (int i = 1; i <= dists[a]->m(); ++i) {
            const double s = dists[a]->score_at(i);
            acc.add(dists[a]->weight_at(i) *
                    std::min(s * loss.l01, (1.0 - s) * loss.l10));
        }
        total += w[a] * acc.value();
    }
    return total;
}

}  // namespace fairscore
