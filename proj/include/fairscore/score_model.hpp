#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/numeric.hpp"

namespace fairscore {

/// One support point of a finite score distribution: a calibrated score
/// value together with its probability mass.
struct ScoreBin {
    double score = 0.0;
    double weight = 0.0;
};

/// A finite calibrated score distribution for one group, with every derived
/// quantity the feasible-region geometry needs precomputed:
///
///   bins      scores strictly descending, weights summing to 1
///   base_rate pi = sum_i weight_i * score_i  (prevalence of Y=1)
///   mu[k-1]   cumulative mass of the top k bins; mu[m-1] == 1 exactly
///   c[k-1]    sum_{i<k} weight_i * (score_i - score_k); c[0] == 0
///   p_break   hard-threshold PPV breakpoints, strictly decreasing from
///             s_max down to pi
///   q_break   hard-threshold FOR breakpoints for k = 1..m-1; the last one
///             equals s_min
///
/// Immutable after construction; safe for concurrent reads.
struct GroupDistribution {
    std::vector<ScoreBin> bins;
    double base_rate = 0.0;
    std::vector<double> mu;
    std::vector<double> c;
    std::vector<double> p_break;
    std::vector<double> q_break;

    int m() const { return static_cast<int>(bins.size()); }
    double s_max() const { return bins.front().score; }
    double s_min() const { return bins.back().score; }

    /// 1-based accessors matching the breakpoint naming used throughout.
    double score_at(int k) const { return bins[static_cast<size_t>(k - 1)].score; }
    double weight_at(int k) const { return bins[static_cast<size_t>(k - 1)].weight; }
    double mu_at(int k) const { return mu[static_cast<size_t>(k - 1)]; }
    double c_at(int k) const { return c[static_cast<size_t>(k - 1)]; }
    double p_break_at(int k) const { return p_break[static_cast<size_t>(k - 1)]; }
    double q_break_at(int k) const { return q_break[static_cast<size_t>(k - 1)]; }
};

namespace detail {
constexpr double kWeightSumTolerance = 1e-6;
constexpr double kScoreMergeTolerance = 1e-12;
}  // namespace detail

/// Validates, normalizes and enriches raw (score, weight) bins.
///
/// Bins are sorted by descending score, equal scores (within 1e-12) are
/// merged, weights are renormalized to sum to 1 (rejecting totals further
/// than 1e-6 from 1), and all prefix quantities are filled in with
/// compensated summation. At least two distinct scores must remain.
inline GroupDistribution build_group_distribution(std::vector<ScoreBin> input) {
    if (input.empty()) {
        throw Error(ErrorCode::EmptyInput, "no score bins given");
    }
    for (const ScoreBin& b : input) {
        if (!(b.score >= 0.0 && b.score <= 1.0)) {
            throw Error(ErrorCode::ScoreOutOfRange,
                        "score " + std::to_string(b.score) + " not in [0, 1]");
        }
        if (!(b.weight > 0.0) || !std::isfinite(b.weight)) {
            throw Error(ErrorCode::NonPositiveWeight,
                        "weight " + std::to_string(b.weight) + " must be positive and finite");
        }
    }

    std::sort(input.begin(), input.end(),
              [](const ScoreBin& a, const ScoreBin& b) { return a.score > b.score; });

    GroupDistribution dist;
    dist.bins.reserve(input.size());
    for (const ScoreBin& b : input) {
        if (!dist.bins.empty() &&
            dist.bins.back().score - b.score < detail::kScoreMergeTolerance) {
            dist.bins.back().weight += b.weight;
        } else {
            dist.bins.push_back(b);
        }
    }

    const size_t m = dist.bins.size();
    if (m < 2) {
        throw Error(ErrorCode::DegenerateSupport,
                    "fewer than 2 distinct scores; need a nonconstant score");
    }

    detail::CompensatedSum total_acc;
    for (const ScoreBin& b : dist.bins) total_acc.add(b.weight);
    const double total = total_acc.value();
    if (!(std::abs(total - 1.0) < detail::kWeightSumTolerance)) {
        throw Error(ErrorCode::WeightSumInvalid,
                    "weights sum to " + std::to_string(total) + ", expected 1 within 1e-6");
    }
    for (ScoreBin& b : dist.bins) b.weight /= total;

    dist.mu.resize(m);
    dist.p_break.resize(m);
    detail::CompensatedSum w_acc, sw_acc;
    for (size_t i = 0; i < m; ++i) {
        w_acc.add(dist.bins[i].weight);
        sw_acc.add(dist.bins[i].score * dist.bins[i].weight);
        dist.mu[i] = w_acc.value();
        dist.p_break[i] = sw_acc.value() / dist.mu[i];
    }
    dist.mu[m - 1] = 1.0;
    dist.base_rate = sw_acc.value();
    // Endpoint identities hold exactly by definition; keep them bit-exact
    // instead of routing through the quotient.
    dist.p_break[0] = dist.bins[0].score;
    dist.p_break[m - 1] = dist.base_rate;

    dist.c.resize(m);
    dist.c[0] = 0.0;
    for (size_t k = 1; k < m; ++k) {
        detail::CompensatedSum ck;
        for (size_t i = 0; i < k; ++i) {
            ck.add(dist.bins[i].weight * (dist.bins[i].score - dist.bins[k].score));
        }
        dist.c[k] = ck.value();
    }

    dist.q_break.resize(m - 1);
    detail::CompensatedSum tw_acc, ts_acc;
    for (size_t i = m; i-- > 1;) {
        tw_acc.add(dist.bins[i].weight);
        ts_acc.add(dist.bins[i].score * dist.bins[i].weight);
        dist.q_break[i - 1] = ts_acc.value() / tw_acc.value();
    }
    dist.q_break[m - 2] = dist.bins[m - 1].score;  // single-term quotient, exact

    return dist;
}

}  // namespace fairscore
