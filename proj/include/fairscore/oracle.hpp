#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/region.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore::oracle {

constexpr double kDefaultGridCap = 1e7;

/// Every (PPV, FOR) pair produced by selection rules on the grid
/// {0, 1/G, ..., 1}^m, constant rules excluded, orientation normalized to
/// q <= p. Evaluates the defining sums directly; deliberately shares no
/// code with the closed-form geometry it is used to check.
inline std::vector<FeasiblePair> enumerate_feasible(const GroupDistribution& dist, int grid,
                                                    double cap = kDefaultGridCap) {
    if (grid < 1) throw Error(ErrorCode::BadInput, "grid resolution must be >= 1");
    const int m = dist.m();
    const double count = std::pow(double(grid) + 1.0, double(m));
    if (count > cap) {
        throw Error(ErrorCode::GridTooLarge,
                    std::to_string(count) + " rule evaluations exceed the cap");
    }

    double total_sw = 0.0;
    for (int i = 1; i <= m; ++i) total_sw += dist.score_at(i) * dist.weight_at(i);

    std::vector<FeasiblePair> pairs;
    pairs.reserve(static_cast<size_t>(std::fmin(count, 1 << 20)));
    std::vector<int> digits(static_cast<size_t>(m), 0);
    while (true) {
        bool constant0 = true, constant1 = true;
        double mu = 0.0, sw = 0.0;
        for (int i = 0; i < m; ++i) {
            constant0 = constant0 && digits[static_cast<size_t>(i)] == 0;
            constant1 = constant1 && digits[static_cast<size_t>(i)] == grid;
            const double r = double(digits[static_cast<size_t>(i)]) / double(grid);
            mu += dist.weight_at(i + 1) * r;
            sw += dist.score_at(i + 1) * dist.weight_at(i + 1) * r;
        }
        if (!constant0 && !constant1) {
            const double p = sw / mu;
            const double q = (total_sw - sw) / (1.0 - mu);
            pairs.push_back(p >= q ? FeasiblePair{p, q} : FeasiblePair{q, p});
        }
        int pos = 0;
        while (pos < m && ++digits[static_cast<size_t>(pos)] > grid) {
            digits[static_cast<size_t>(pos)] = 0;
            ++pos;
        }
        if (pos == m) break;
    }
    return pairs;
}

/// Maximum PPV at a fixed selection rate, solved as a linear program by
/// exhaustive vertex enumeration of {x in [0,1]^m : sum w_i x_i = mu}
/// (every vertex has at most one fractional coordinate). Independent of the
/// greedy ordering used by the closed form.
inline double lp_max_ppv(const GroupDistribution& dist, double mu) {
    if (!(mu > 0.0 && mu < 1.0)) {
        throw Error(ErrorCode::MuOutOfRange, "selection rate not in (0, 1)");
    }
    const int m = dist.m();
    if (m > 25) throw Error(ErrorCode::GridTooLarge, "vertex enumeration limited to m <= 25");

    double best = -1.0;
    for (int frac = 0; frac < m; ++frac) {
        const unsigned long masks = 1ul << (m - 1);
        for (unsigned long mask = 0; mask < masks; ++mask) {
            double w_fixed = 0.0, sw_fixed = 0.0;
            unsigned long bit = 1;
            for (int i = 0; i < m; ++i) {
                if (i == frac) continue;
                if (mask & bit) {
                    w_fixed += dist.weight_at(i + 1);
                    sw_fixed += dist.score_at(i + 1) * dist.weight_at(i + 1);
                }
                bit <<= 1;
            }
            const double x = (mu - w_fixed) / dist.weight_at(frac + 1);
            if (x < -1e-12 || x > 1.0 + 1e-12) continue;
            const double xc = std::fmin(std::fmax(x, 0.0), 1.0);
            const double value =
                (sw_fixed + dist.score_at(frac + 1) * dist.weight_at(frac + 1) * xc) / mu;
            if (value > best) best = value;
        }
    }
    return best;
}

struct VerificationReport {
    long pairs_checked = 0;
    double max_boundary_violation = 0.0;  // how far below the curve any pair fell
    int breakpoints_matched = 0;
};

namespace detail {

inline VerificationReport verify_region_impl(
    const GroupDistribution& dist, int grid, double tol_contain, double tol_boundary,
    const std::function<double(const GroupDistribution&, double)>& boundary) {
    VerificationReport report;
    const std::vector<FeasiblePair> pairs = enumerate_feasible(dist, grid);
    for (const FeasiblePair& pair : pairs) {
        ++report.pairs_checked;
        if (!contains(dist, pair, tol_contain)) {
            throw Error(ErrorCode::VerificationFailure,
                        "enumerated pair (" + std::to_string(pair.p) + ", " +
                            std::to_string(pair.q) + ") rejected by the closed-form region");
        }
        const double floor_q = boundary(dist, pair.p);
        const double violation = floor_q - pair.q;
        if (violation > report.max_boundary_violation) {
            report.max_boundary_violation = violation;
        }
        if (violation > tol_boundary) {
            throw Error(ErrorCode::VerificationFailure,
                        "enumerated pair (" + std::to_string(pair.p) + ", " +
                            std::to_string(pair.q) + ") lies below the boundary curve by " +
                            std::to_string(violation));
        }
    }
    // Hard thresholds (all-ones prefix) are grid rules at any resolution and
    // must land exactly on the breakpoints.
    for (int k = 1; k < dist.m(); ++k) {
        double mu = 0.0, sw = 0.0;
        for (int i = 1; i <= k; ++i) {
            mu += dist.weight_at(i);
            sw += dist.score_at(i) * dist.weight_at(i);
        }
        const double p = sw / mu;
        double rw = 0.0, rsw = 0.0;
        for (int i = k + 1; i <= dist.m(); ++i) {
            rw += dist.weight_at(i);
            rsw += dist.score_at(i) * dist.weight_at(i);
        }
        const double q = rsw / rw;
        if (std::abs(p - dist.p_break_at(k)) > 1e-12 ||
            std::abs(q - dist.q_break_at(k)) > 1e-12) {
            throw Error(ErrorCode::VerificationFailure,
                        "hard threshold at k=" + std::to_string(k) +
                            " does not reproduce the stored breakpoints");
        }
        ++report.breakpoints_matched;
    }
    return report;
}

}  // namespace detail

/// Checks the closed-form region against brute force: every grid-rule pair
/// must pass contains() and must not fall below the boundary curve, and the
/// hard-threshold rules must reproduce the breakpoints exactly. Throws
/// VerificationFailure with the offending pair otherwise.
inline VerificationReport verify_region(const GroupDistribution& dist, int grid,
                                        double tol_contain = 1e-9,
                                        double tol_boundary = 1e-6) {
    return detail::verify_region_impl(
        dist, grid, tol_contain, tol_boundary,
        [](const GroupDistribution& d, double p) { return boundary_for(d, p); });
}

}  // namespace fairscore::oracle
