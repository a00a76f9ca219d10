#pragma once

#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/numeric.hpp"
#include "fairscore/objectives.hpp"
#include "fairscore/region.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore {

/// A pair of group-wise selection rules realizing one common (PPV, FOR)
/// point, i.e. a randomized classifier satisfying predictive parity.
/// Immutable; prediction randomness is supplied by the caller.
struct FairClassifier {
    FeasiblePair pair;
    SelectionRule rule0;
    SelectionRule rule1;
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu_agg = 0.0;
    std::vector<double> scores0;  // bin scores, aligned with rule0
    std::vector<double> scores1;
};

inline FairClassifier build_fair_classifier(const GroupDistribution& d0,
                                            const GroupDistribution& d1,
                                            const FeasiblePair& pair,
                                            const PopulationWeights& weights) {
    for (int a = 0; a < 2; ++a) {
        const GroupDistribution& dist = (a == 0) ? d0 : d1;
        if (!contains(dist, pair)) {
            throw Error(ErrorCode::InfeasiblePair,
                        "pair (" + std::to_string(pair.p) + ", " + std::to_string(pair.q) +
                            ") infeasible for group " + std::to_string(a));
        }
    }
    FairClassifier clf;
    clf.pair = pair;
    clf.rule0 = rule_for_pair(d0, pair);
    clf.rule1 = rule_for_pair(d1, pair);
    clf.mu0 = selection_rate(d0, clf.rule0);
    clf.mu1 = selection_rate(d1, clf.rule1);
    // Constant limit rules carry exact rates.
    for (const SelectionRule* rule : {&clf.rule0, &clf.rule1}) {
        double& mu = (rule == &clf.rule0) ? clf.mu0 : clf.mu1;
        bool all0 = true, all1 = true;
        for (double r : rule->select_prob) {
            all0 = all0 && r == 0.0;
            all1 = all1 && r == 1.0;
        }
        if (all0) mu = 0.0;
        if (all1) mu = 1.0;
    }
    clf.mu_agg = weights.w0 * clf.mu0 + weights.w1 * clf.mu1;
    clf.scores0.reserve(d0.bins.size());
    for (const ScoreBin& b : d0.bins) clf.scores0.push_back(b.score);
    clf.scores1.reserve(d1.bins.size());
    for (const ScoreBin& b : d1.bins) clf.scores1.push_back(b.score);
    return clf;
}

/// Randomized prediction: 1 iff u < the matched bin's selection
/// probability. The score must match a bin of the group's distribution
/// within 1e-9; unknown scores are an error, not extrapolated.
inline int predict(const FairClassifier& clf, int group, double score, double u) {
    const std::vector<double>& scores = (group == 0) ? clf.scores0 : clf.scores1;
    const SelectionRule& rule = (group == 0) ? clf.rule0 : clf.rule1;
    size_t best = scores.size();
    double best_dist = 1e-9;
    for (size_t i = 0; i < scores.size(); ++i) {
        const double d = std::abs(scores[i] - score);
        if (d <= best_dist) {
            best_dist = d;
            best = i;
        }
    }
    if (best == scores.size()) {
        throw Error(ErrorCode::UnknownScore,
                    "score " + std::to_string(score) + " matches no bin of group " +
                        std::to_string(group));
    }
    return (u < rule.select_prob[best]) ? 1 : 0;
}

struct GroupMetrics {
    double mu = 0.0;
    double ppv = 0.0;
    double for_rate = 0.0;
    double tpr = 0.0;
    double fpr = 0.0;
};

struct ClassifierReport {
    GroupMetrics by_group[2];
    GroupMetrics aggregate;
    std::optional<double> expected_loss;
    double dsep = 0.0;     // closed form from the pair
    double dsep_tv = 0.0;  // total-variation form from the explicit joint
};

namespace detail {

/// TV-based deviation computed from the joint P(R, Y, A) induced by the
/// rules, without going through the (p, q) closed form.
inline double dsep_from_joint(const GroupDistribution& d0, const GroupDistribution& d1,
                              const SelectionRule& rule0, const SelectionRule& rule1,
                              const PopulationWeights& weights) {
    const GroupDistribution* dists[2] = {&d0, &d1};
    const SelectionRule* rules[2] = {&rule0, &rule1};
    const double w[2] = {weights.w0, weights.w1};
    double tpr[2], fpr[2];
    for (int a = 0; a < 2; ++a) {
        CompensatedSum pos, neg;
        for (int i = 1; i <= dists[a]->m(); ++i) {
            const double s = dists[a]->score_at(i);
            const double wr =
                dists[a]->weight_at(i) * rules[a]->select_prob[static_cast<size_t>(i - 1)];
            pos.add(s * wr);
            neg.add((1.0 - s) * wr);
        }
        const double pi_a = dists[a]->base_rate;
        tpr[a] = pos.value() / pi_a;
        fpr[a] = neg.value() / (1.0 - pi_a);
    }
    const double pi0 = d0.base_rate, pi1 = d1.base_rate;
    const double pi = w[0] * pi0 + w[1] * pi1;
    const double tpr_agg = (w[0] * pi0 * tpr[0] + w[1] * pi1 * tpr[1]) / pi;
    const double fpr_agg =
        (w[0] * (1.0 - pi0) * fpr[0] + w[1] * (1.0 - pi1) * fpr[1]) / (1.0 - pi);
    double total = 0.0;
    const double pis[2] = {pi0, pi1};
    for (int a = 0; a < 2; ++a) {
        total += w[a] * (pis[a] * std::abs(tpr[a] - tpr_agg) +
                         (1.0 - pis[a]) * std::abs(fpr[a] - fpr_agg));
    }
    return total;
}

}  // namespace detail

/// Exact metrics, computed analytically from the distributions (never
/// sampled). Group PPV/FOR come from the rules; a constant rule's undefined
/// conditional is reported as the common pair value (it is vacuous there).
inline ClassifierReport classifier_report(const FairClassifier& clf,
                                          const GroupDistribution& d0,
                                          const GroupDistribution& d1,
                                          const PopulationWeights& weights,
                                          const std::optional<LossSpec>& loss = {}) {
    ClassifierReport report;
    const GroupDistribution* dists[2] = {&d0, &d1};
    const SelectionRule* rules[2] = {&clf.rule0, &clf.rule1};
    const double mus[2] = {clf.mu0, clf.mu1};
    for (int a = 0; a < 2; ++a) {
        GroupMetrics& gm = report.by_group[a];
        gm.mu = mus[a];
        bool all0 = true, all1 = true;
        for (double r : rules[a]->select_prob) {
            all0 = all0 && r == 0.0;
            all1 = all1 && r == 1.0;
        }
        gm.ppv = all0 ? clf.pair.p : rule_ppv(*dists[a], *rules[a]);
        gm.for_rate = all1 ? clf.pair.q : rule_for(*dists[a], *rules[a]);
        const double pi_a = dists[a]->base_rate;
        gm.tpr = gm.mu * clf.pair.p / pi_a;
        gm.fpr = gm.mu * (1.0 - clf.pair.p) / (1.0 - pi_a);
    }
    report.aggregate.mu = clf.mu_agg;
    report.aggregate.ppv = clf.pair.p;
    report.aggregate.for_rate = clf.pair.q;
    report.aggregate.tpr = clf.mu_agg * clf.pair.p / weights.pi_agg;
    report.aggregate.fpr = clf.mu_agg * (1.0 - clf.pair.p) / (1.0 - weights.pi_agg);
    if (loss) report.expected_loss = expected_loss(clf.pair, weights, *loss);
    report.dsep =
        (clf.pair.p - clf.pair.q > 1e-15) ? separation_deviation(clf.pair, weights) : 0.0;
    report.dsep_tv = detail::dsep_from_joint(d0, d1, clf.rule0, clf.rule1, weights);
    return report;
}

}  // namespace fairscore
