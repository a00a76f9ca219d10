#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fairscore/classifier.hpp"
#include "test_util.hpp"

using namespace fairscore;

namespace {
const GroupDistribution kD0 = build_group_distribution({{0.9, 0.25}, {0.5, 0.5}, {0.1, 0.25}});
const GroupDistribution kD1 = build_group_distribution({{0.9, 0.5}, {0.5, 0.3}, {0.1, 0.2}});
const PopulationWeights kWeights = make_population_weights(kD0, kD1, 0.5, 0.5);
}  // namespace

TEST_CASE("worked two-group classifier at (0.8, 0.35)", "[classifier]") {
    const FairClassifier clf = build_fair_classifier(kD0, kD1, {0.8, 0.35}, kWeights);
    CHECK(clf.mu0 == Catch::Approx(1.0 / 3.0).margin(1e-12));
    CHECK(clf.rule0.select_prob[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(clf.rule0.select_prob[1] == Catch::Approx(1.0 / 6.0).margin(1e-12));
    CHECK(clf.rule0.select_prob[2] == Catch::Approx(0.0).margin(1e-12));

    CHECK(clf.mu1 == Catch::Approx(0.6).margin(1e-12));
    CHECK(clf.rule1.select_prob[0] == Catch::Approx(0.9375).margin(1e-12));
    CHECK(clf.rule1.select_prob[1] == Catch::Approx(0.375).margin(1e-12));
    CHECK(clf.rule1.select_prob[2] == Catch::Approx(0.09375).margin(1e-12));

    CHECK(clf.mu_agg == Catch::Approx(7.0 / 15.0).margin(1e-12));

    const ClassifierReport report =
        classifier_report(clf, kD0, kD1, kWeights, LossSpec{1.0, 1.0});
    REQUIRE(report.expected_loss.has_value());
    CHECK(*report.expected_loss == Catch::Approx(0.28).margin(1e-12));
    CHECK(report.dsep == Catch::Approx(7.0 / 66.0).margin(1e-12));
    CHECK(report.dsep_tv == Catch::Approx(report.dsep).margin(1e-10));
    CHECK(report.by_group[0].tpr == Catch::Approx(8.0 / 15.0).margin(1e-12));
    CHECK(report.by_group[1].tpr == Catch::Approx(48.0 / 62.0).margin(1e-12));
}

TEST_CASE("infeasible pairs report the failing group", "[classifier]") {
    try {
        build_fair_classifier(kD0, kD1, {0.8, 0.3}, kWeights);
        FAIL("expected InfeasiblePair");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InfeasiblePair);
        CHECK(std::string(e.what()).find("group 0") != std::string::npos);
    }
    // Feasible for both groups even though it lies above both curves.
    CHECK_NOTHROW(build_fair_classifier(kD0, kD1, {0.8, 0.45}, kWeights));
}

TEST_CASE("equal base rates admit constant-probability parity", "[classifier]") {
    const auto dist = build_group_distribution({{0.8, 0.5}, {0.2, 0.5}});
    const PopulationWeights w = make_population_weights(dist, dist, 0.5, 0.5);
    const FairClassifier clf = build_fair_classifier(dist, dist, {0.5, 0.5}, w);
    for (double r : clf.rule0.select_prob) CHECK(r == 0.5);
    for (double r : clf.rule1.select_prob) CHECK(r == 0.5);
}

TEST_CASE("predict follows the matched bin probability", "[classifier]") {
    const FairClassifier clf = build_fair_classifier(kD0, kD1, {0.8, 0.35}, kWeights);
    CHECK(predict(clf, 0, 0.9, 0.999999) == 1);  // prob 1.0
    CHECK(predict(clf, 0, 0.1, 0.0) == 0);       // prob 0.0
    CHECK(predict(clf, 1, 0.5, 0.2) == 1);       // prob 0.375
    CHECK(predict(clf, 1, 0.5, 0.5) == 0);
    CHECK(predict(clf, 1, 0.5 + 5e-10, 0.2) == 1);  // nearest-bin match
    CHECK_THROWS_MATCHES(predict(clf, 0, 0.42, 0.5), Error,
                         Catch::Matchers::Predicate<Error>([](const Error& e) {
                             return e.code() == ErrorCode::UnknownScore;
                         }));
}

TEST_CASE("parity and aggregate identity hold for random classifiers", "[classifier]") {
    std::mt19937_64 rng(11501);
    std::uniform_real_distribution<double> unit(0.05, 0.95);
    for (int round = 0; round < 100; ++round) {
        const auto [d0, d1] = testutil::random_intersecting_pair(rng, 2, 6);
        const double w0 = 0.2 + 0.6 * unit(rng);
        const PopulationWeights w = make_population_weights(d0, d1, w0, 1.0 - w0);
        const bool on_boundary = round % 3 == 0;
        const FeasiblePair pair = testutil::random_common_pair(rng, d0, d1, on_boundary);
        const FairClassifier clf = build_fair_classifier(d0, d1, pair, w);

        const double ppv0 = rule_ppv(d0, clf.rule0);
        const double ppv1 = rule_ppv(d1, clf.rule1);
        const double for0 = rule_for(d0, clf.rule0);
        const double for1 = rule_for(d1, clf.rule1);
        CHECK(std::abs(ppv0 - ppv1) < 1e-12);
        CHECK(std::abs(for0 - for1) < 1e-12);
        CHECK(ppv0 == Catch::Approx(pair.p).margin(1e-12));
        CHECK(for0 == Catch::Approx(pair.q).margin(1e-12));

        CHECK(clf.mu0 ==
              Catch::Approx((d0.base_rate - pair.q) / (pair.p - pair.q)).margin(1e-12));
        CHECK(clf.mu1 ==
              Catch::Approx((d1.base_rate - pair.q) / (pair.p - pair.q)).margin(1e-12));
        CHECK(clf.mu_agg * pair.p + (1.0 - clf.mu_agg) * pair.q ==
              Catch::Approx(w.pi_agg).margin(1e-12));

        const ClassifierReport report = classifier_report(clf, d0, d1, w);
        CHECK(report.dsep_tv == Catch::Approx(report.dsep).margin(1e-10));
    }
}

TEST_CASE("the trivial degenerate point predicts group membership", "[classifier]") {
    const PopulationWeights w = kWeights;
    const DegenerateOptions options = degenerate_options(kD0, kD1);
    REQUIRE(options.high_group == 1);
    const FairClassifier clf =
        build_fair_classifier(kD0, kD1, options.trivial_point, w);
    for (double r : clf.rule1.select_prob) CHECK(r == 1.0);  // high group: select all
    for (double r : clf.rule0.select_prob) CHECK(r == 0.0);  // low group: select none
    CHECK(clf.mu1 == 1.0);
    CHECK(clf.mu0 == 0.0);
    const ClassifierReport report = classifier_report(clf, kD0, kD1, w);
    // The vacuous conditionals fall back to the pair.
    CHECK(report.by_group[0].ppv == Catch::Approx(0.62).margin(1e-15));
    CHECK(report.by_group[1].for_rate == Catch::Approx(0.5).margin(1e-15));
    CHECK(report.dsep_tv == Catch::Approx(report.dsep).margin(1e-10));
}

TEST_CASE("sampling agrees with the analytic pair within 3 standard errors", "[classifier]") {
    const FairClassifier clf = build_fair_classifier(kD0, kD1, {0.8, 0.35}, kWeights);
    std::mt19937_64 rng(11502);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const long n = 1000000;
    long sel = 0, sel_pos = 0, rej = 0, rej_pos = 0;
    for (long i = 0; i < n; ++i) {
        const int group = unit(rng) < kWeights.w1 ? 1 : 0;
        const GroupDistribution& dist = (group == 0) ? kD0 : kD1;
        double u_bin = unit(rng);
        int bin = dist.m() - 1;
        for (int j = 0; j < dist.m(); ++j) {
            if (u_bin < dist.weight_at(j + 1)) {
                bin = j;
                break;
            }
            u_bin -= dist.weight_at(j + 1);
        }
        const double s = dist.score_at(bin + 1);
        const int y = unit(rng) < s ? 1 : 0;
        const int r = predict(clf, group, s, unit(rng));
        if (r == 1) {
            ++sel;
            sel_pos += y;
        } else {
            ++rej;
            rej_pos += y;
        }
    }
    const double ppv_hat = double(sel_pos) / double(sel);
    const double for_hat = double(rej_pos) / double(rej);
    const double se_ppv = std::sqrt(0.8 * 0.2 / double(sel));
    const double se_for = std::sqrt(0.35 * 0.65 / double(rej));
    CHECK(std::abs(ppv_hat - 0.8) < 3.0 * se_ppv);
    CHECK(std::abs(for_hat - 0.35) < 3.0 * se_for);
}
