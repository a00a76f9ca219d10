#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace fairscore::detail {

/// Neumaier-compensated running sum. Error is bounded by a few ulp per term,
/// which the prefix-sum contracts of score_model rely on.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_total(std::span<const double> xs) {
    CompensatedSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

/// Real roots of a*x^2 + b*x + c, written ascending into roots[0..n).
/// The larger-magnitude root is computed as -(b + sign(b)*sqrt(disc))/(2a)
/// and the other via the product identity c/(a*r), avoiding cancellation
/// when the coefficients nearly annihilate. |a| < 1e-14 falls back to the
/// linear equation.
inline int solve_quadratic(double a, double b, double c, double roots[2]) {
    if (std::abs(a) < 1e-14) {
        if (std::abs(b) < 1e-14) return 0;  // constant, no isolated roots
        roots[0] = -c / b;
        return 1;
    }
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return 0;
    const double sq = std::sqrt(disc);
    if (sq == 0.0) {
        roots[0] = -b / (2.0 * a);
        return 1;
    }
    const double sgn = (b >= 0.0) ? 1.0 : -1.0;
    const double r1 = -(b + sgn * sq) / (2.0 * a);
    const double r2 = (r1 != 0.0) ? c / (a * r1) : -b / a;
    roots[0] = std::fmin(r1, r2);
    roots[1] = std::fmax(r1, r2);
    return 2;
}

inline double clamp01(double x) {
    if (x < 0.0) return 0.0;
    if (x > 1.0) return 1.0;
    return x;
}

}  // namespace fairscore::detail
