#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <random>

#include "fairscore/objectives.hpp"
#include "test_util.hpp"

using namespace fairscore;

namespace {

const GroupDistribution kD0 = build_group_distribution({{0.9, 0.25}, {0.5, 0.5}, {0.1, 0.25}});
const GroupDistribution kD1 = build_group_distribution({{0.9, 0.5}, {0.5, 0.3}, {0.1, 0.2}});

double grid_min_on_boundary(const GroupDistribution& d0, const GroupDistribution& d1,
                            const PopulationWeights& weights, const Objective& objective,
                            int points) {
    const bool is_loss = std::holds_alternative<LossObjective>(objective);
    const auto value_at = [&](const FeasiblePair& pair) {
        return is_loss ? expected_loss(pair, weights, std::get<LossObjective>(objective).loss)
                       : separation_deviation(pair, weights);
    };
    const IntersectionSummary summary = trace_boundary(d0, d1);
    const double lo = std::max(d0.base_rate, d1.base_rate);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= points; ++i) {
        const double p = lo + (summary.p_max - lo) * double(i) / double(points);
        best = std::min(best, value_at({p, intersection_boundary_for(d0, d1, p)}));
    }
    if (!summary.segments.empty() && summary.segments.back().is_vertical) {
        best = std::min(best,
                        value_at({summary.p_max, std::min(d0.base_rate, d1.base_rate)}));
    }
    return best;
}

}  // namespace

TEST_CASE("expected loss matches worked values", "[objectives]") {
    const LossSpec zero_one{1.0, 1.0};
    PopulationWeights w_half = make_population_weights(0.5, 0.5, 0.5, 0.5);
    CHECK(expected_loss({0.8, 0.2}, w_half, zero_one) == Catch::Approx(0.2).margin(1e-15));

    PopulationWeights w_mixed = make_population_weights(0.5, 0.62, 0.5, 0.5);
    CHECK(w_mixed.pi_agg == Catch::Approx(0.56).margin(1e-15));
    CHECK(expected_loss({0.8, 0.35}, w_mixed, zero_one) == Catch::Approx(0.28).margin(1e-12));

    const LossSpec skew{0.7, 2.3};
    CHECK(expected_loss({1.0, 0.0}, w_mixed, skew) == Catch::Approx(0.0).margin(1e-15));

    CHECK_THROWS_MATCHES(expected_loss({0.5, 0.5}, w_half, zero_one), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::DegeneratePair;
                         }));
    CHECK_THROWS_MATCHES(expected_loss({0.8, 0.2}, w_half, LossSpec{0.0, 0.0}), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::InvalidLoss;
                         }));
}

TEST_CASE("separation deviation matches worked values", "[objectives]") {
    PopulationWeights equal = make_population_weights(0.5, 0.5, 0.5, 0.5);
    CHECK(equal.k_tilde == 0.0);
    CHECK(separation_deviation({0.8, 0.35}, equal) == 0.0);

    PopulationWeights w = make_population_weights(0.5, 0.62, 0.5, 0.5);
    CHECK(w.k_tilde == Catch::Approx(0.06 / 0.2464).margin(1e-12));
    CHECK(separation_deviation({0.8, 0.35}, w) == Catch::Approx(7.0 / 66.0).margin(1e-12));
    CHECK(separation_deviation({0.8, 0.35}, w) == Catch::Approx(0.1060606).margin(1e-6));
    CHECK(separation_deviation({1.0, 0.0}, w) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("population weights are validated", "[objectives]") {
    CHECK_THROWS_MATCHES(make_population_weights(0.5, 0.6, 0.7, 0.7), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::InvalidWeights;
                         }));
    CHECK_THROWS_AS(make_population_weights(0.5, 0.6, -0.2, 1.2), Error);
}

TEST_CASE("loss decreases along fixed-rate lines as p grows", "[objectives]") {
    std::mt19937_64 rng(10401);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int round = 0; round < 100; ++round) {
        const PopulationWeights w =
            make_population_weights(unit(rng) * 0.5 + 0.1, unit(rng) * 0.5 + 0.3, 0.5, 0.5);
        const LossSpec loss{unit(rng) * 2.0, unit(rng) * 2.0};
        const double mu = unit(rng);
        const double pi = w.pi_agg;
        // Two points on the same rate line, the second farther from the center.
        const double p1 = pi + 0.1, p2 = pi + 0.2;
        const double q1 = pi - mu / (1.0 - mu) * (p1 - pi);
        const double q2 = pi - mu / (1.0 - mu) * (p2 - pi);
        if (q2 <= 0.0) continue;
        CHECK(expected_loss({p2, q2}, w, loss) <=
              expected_loss({p1, q1}, w, loss) + 1e-12);
        CHECK(separation_deviation({p2, q2}, w) <=
              separation_deviation({p1, q1}, w) + 1e-12);
    }
}

TEST_CASE("critical points zero out centered finite differences", "[objectives]") {
    // The composed objective is rational with poles at the active base rate
    // and at s_k; roots too close to a pole (or with runaway magnitude) are
    // skipped because the h^2 truncation term of the centered difference
    // dominates there. The roots themselves are scale invariant, so testing
    // with l01 + l10 = 1 loses no generality.
    std::mt19937_64 rng(10402);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    int checked_loss = 0, checked_sep = 0;
    const double h = 1e-6;
    const double margin = 0.15;
    while (checked_loss < 60 || checked_sep < 60) {
        const auto dist = testutil::random_distribution(rng, 3, 6);
        const double w0 = 0.3 + 0.4 * unit(rng);
        const PopulationWeights weights =
            make_population_weights(dist.base_rate, unit(rng), w0, 1.0 - w0);
        if (weights.pi_agg < 0.28 || weights.pi_agg > 0.72) continue;
        const double u = 0.15 + 0.7 * unit(rng);
        const LossSpec loss{u, 1.0 - u};
        std::uniform_int_distribution<int> kdist(2, dist.m());
        const int k = kdist(rng);
        const double pole1 = dist.base_rate;
        const double pole2 = dist.score_at(k);
        if (std::abs(pole1 - pole2) < margin) continue;

        const auto usable = [&](double r) {
            if (!(r > 0.02 && r < 0.98)) return false;
            if (std::abs(r - pole1) < margin || std::abs(r - pole2) < margin ||
                std::abs(r - (pole2 + dist.c_at(k))) < 0.05) {
                return false;
            }
            const double q = boundary_for_piece(dist, k, r);
            return std::isfinite(q) && r - q > 0.05;
        };

        for (double r : loss_critical_points(dist, k, weights, loss)) {
            if (!usable(r)) continue;
            const auto f = [&](double p) {
                return expected_loss({p, boundary_for_piece(dist, k, p)}, weights, loss);
            };
            if (std::abs(f(r)) > 3.0) continue;
            const double fd = (f(r + h) - f(r - h)) / (2.0 * h);
            CHECK(std::abs(fd) < 1e-8);
            ++checked_loss;
        }
        for (double r : separation_critical_points(dist, k, weights)) {
            if (!usable(r)) continue;
            const auto f = [&](double p) {
                return separation_deviation({p, boundary_for_piece(dist, k, p)}, weights);
            };
            if (std::abs(f(r)) > 3.0) continue;
            const double fd = (f(r + h) - f(r - h)) / (2.0 * h);
            CHECK(std::abs(fd) < 1e-8);
            ++checked_sep;
        }
    }
}

TEST_CASE("worked loss optimum for identical two-point groups", "[objectives]") {
    const auto dist = build_group_distribution({{0.8, 0.5}, {0.2, 0.5}});
    const PopulationWeights w = make_population_weights(dist, dist, 0.5, 0.5);
    const OptimalSolution best = minimize_loss_on_boundary(dist, dist, w, {1.0, 1.0});
    CHECK(best.pair.p == Catch::Approx(0.8).margin(1e-12));
    CHECK(best.pair.q == Catch::Approx(0.2).margin(1e-12));
    CHECK(best.objective_value == Catch::Approx(0.2).margin(1e-12));
    CHECK_FALSE(best.degenerate_objective);
}

TEST_CASE("separation objective degenerates for equal base rates", "[objectives]") {
    const auto dist = build_group_distribution({{0.8, 0.5}, {0.2, 0.5}});
    const PopulationWeights w = make_population_weights(dist, dist, 0.5, 0.5);
    const OptimalSolution best = minimize_separation_on_boundary(dist, dist, w);
    CHECK(best.degenerate_objective);
    CHECK(best.objective_value == 0.0);
    CHECK(best.pair.p == Catch::Approx(dist.base_rate).margin(1e-12));  // leftmost point
    CHECK(best.pair.q == Catch::Approx(dist.s_min()).margin(1e-12));
}

TEST_CASE("optimizer value never exceeds a dense grid search", "[objectives]") {
    std::mt19937_64 rng(10403);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int round = 0; round < 30; ++round) {
        const auto [d0, d1] = testutil::random_intersecting_pair(rng, 2, 6);
        const double w0 = 0.2 + 0.6 * unit(rng);
        const PopulationWeights w = make_population_weights(d0, d1, w0, 1.0 - w0);
        const Objective objectives[2] = {
            Objective(LossObjective{{0.2 + 2.0 * unit(rng), 0.2 + 2.0 * unit(rng)}}),
            Objective(SeparationObjective{})};
        for (const Objective& objective : objectives) {
            const OptimalSolution best = minimize_on_boundary(d0, d1, w, objective);
            const double grid = grid_min_on_boundary(d0, d1, w, objective, 10000);
            CHECK(best.objective_value <= grid + 1e-9);
            CHECK(contains(d0, best.pair));
            CHECK(contains(d1, best.pair));
        }
    }
}

TEST_CASE("on flat and vertical segments the optimum sits at an endpoint", "[objectives]") {
    // Flat piece: the worked pair's first segment has q == 0.1 on [0.62, 19/30).
    const PopulationWeights w = make_population_weights(kD0, kD1, 0.5, 0.5);
    const LossSpec loss{1.0, 1.0};
    const auto scan = [&](auto value, double lo, double hi, bool vertical) {
        double best_interior = std::numeric_limits<double>::infinity();
        for (int i = 1; i < 200; ++i) {
            best_interior = std::min(best_interior, value(lo + (hi - lo) * i / 200.0));
        }
        const double at_ends = std::min(value(lo), value(hi));
        CHECK(at_ends <= best_interior + 1e-12);
        (void)vertical;
    };
    scan([&](double p) { return expected_loss({p, 0.1}, w, loss); }, 0.62, 19.0 / 30.0,
         false);
    scan([&](double p) { return separation_deviation({p, 0.1}, w); }, 0.62, 19.0 / 30.0,
         false);
    // Vertical segment at p_max = 0.9, q from the curve value up to pi_low.
    const double q_bottom = intersection_boundary_for(kD0, kD1, 0.9);
    scan([&](double q) { return expected_loss({0.9, q}, w, loss); }, q_bottom, 0.5, true);
    scan([&](double q) { return separation_deviation({0.9, q}, w); }, q_bottom, 0.5, true);
}

TEST_CASE("relabeling the groups leaves the optimum unchanged", "[objectives]") {
    std::mt19937_64 rng(10404);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int round = 0; round < 30; ++round) {
        const auto [d0, d1] = testutil::random_intersecting_pair(rng, 2, 5);
        const double w0 = 0.2 + 0.6 * unit(rng);
        const PopulationWeights w01 = make_population_weights(d0, d1, w0, 1.0 - w0);
        const PopulationWeights w10 = make_population_weights(d1, d0, 1.0 - w0, w0);
        const LossSpec loss{0.5 + unit(rng), 0.5 + unit(rng)};
        const OptimalSolution a = minimize_loss_on_boundary(d0, d1, w01, loss);
        const OptimalSolution b = minimize_loss_on_boundary(d1, d0, w10, loss);
        CHECK(a.pair.p == Catch::Approx(b.pair.p).margin(1e-12));
        CHECK(a.pair.q == Catch::Approx(b.pair.q).margin(1e-12));
        CHECK(a.objective_value == Catch::Approx(b.objective_value).margin(1e-12));
        const OptimalSolution c = minimize_separation_on_boundary(d0, d1, w01);
        const OptimalSolution d = minimize_separation_on_boundary(d1, d0, w10);
        CHECK(c.pair.p == Catch::Approx(d.pair.p).margin(1e-12));
        CHECK(c.objective_value == Catch::Approx(d.objective_value).margin(1e-12));
    }
}
