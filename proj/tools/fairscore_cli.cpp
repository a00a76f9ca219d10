// Command-line surface for the fairscore library: ingestion, feasible-region
// reporting, boundary tracing, optimization, calibration, and brute-force
// verification. Outputs are deterministic: no timestamps, numbers at 17
// significant digits.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fairscore/fairscore.hpp"

namespace {

using namespace fairscore;

void write_text(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::BadInput, "cannot write '" + path + "'");
    out << content;
}

std::vector<double> parse_weights_flag(const std::string& flag) {
    const size_t comma = flag.find(',');
    if (comma == std::string::npos) {
        throw Error(ErrorCode::InvalidWeights, "--weights expects 'w0,w1'");
    }
    return {csv::detail::parse_double(flag.substr(0, comma), "--weights"),
            csv::detail::parse_double(flag.substr(comma + 1), "--weights")};
}

const GroupDistribution& require_group(const std::map<int, GroupDistribution>& dists,
                                       int group) {
    const auto it = dists.find(group);
    if (it == dists.end()) {
        throw Error(ErrorCode::BadInput, "input has no group " + std::to_string(group));
    }
    return it->second;
}

std::string polyline_csv(const std::vector<std::pair<double, double>>& points) {
    std::string out = "p,q\n";
    for (const auto& [p, q] : points) {
        out += fmt_g17(p);
        out += ',';
        out += fmt_g17(q);
        out += '\n';
    }
    return out;
}

void append_point(std::vector<std::pair<double, double>>& points, double p, double q) {
    if (!points.empty() && points.back().first == p && points.back().second == q) return;
    points.emplace_back(p, q);
}

// ---------------------------------------------------------------- region --

struct RegionConfig {
    std::string input;
    int group = -1;
    std::size_t samples = 100;
    std::string output = "-";
};

int run_region(const RegionConfig& cfg) {
    const auto dists = csv::read_distributions(cfg.input);
    int group = cfg.group;
    if (group < 0) {
        if (dists.size() != 1) {
            throw Error(ErrorCode::BadInput, "input has several groups; pass --group");
        }
        group = dists.begin()->first;
    }
    const GroupDistribution& dist = require_group(dists, group);

    std::string table = "k,mu,p,q\n";
    for (int k = 1; k <= dist.m(); ++k) {
        const double q = (k < dist.m()) ? dist.q_break_at(k) : dist.s_min();
        table += std::to_string(k) + "," + fmt_g17(dist.mu_at(k)) + "," +
                 fmt_g17(dist.p_break_at(k)) + "," + fmt_g17(q) + "\n";
    }
    std::cout << table;

    std::set<double> ps(dist.p_break.begin(), dist.p_break.end());
    if (cfg.samples >= 2) {
        const double lo = dist.base_rate, hi = dist.s_max();
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            ps.insert(lo + (hi - lo) * double(i) / double(cfg.samples - 1));
        }
    }
    std::vector<std::pair<double, double>> points;
    for (double p : ps) append_point(points, p, boundary_for(dist, p));
    append_point(points, dist.s_max(), dist.q_break_at(1));
    append_point(points, dist.s_max(), dist.base_rate);

    if (cfg.output == "-") std::cout << "\n";
    write_text(cfg.output, polyline_csv(points));
    return 0;
}

// ----------------------------------------------------------------- trace --

struct TraceConfig {
    std::string input;
    std::size_t samples = 200;
    std::string output = "-";
};

int run_trace(const TraceConfig& cfg) {
    const auto dists = csv::read_distributions(cfg.input);
    const GroupDistribution& d0 = require_group(dists, 0);
    const GroupDistribution& d1 = require_group(dists, 1);

    const IntersectionSummary summary = trace_boundary(d0, d1);
    std::string table = "p_left,p_right,active_group,k,l,is_vertical\n";
    for (const BoundarySegment& seg : summary.segments) {
        table += fmt_g17(seg.p_left) + "," + fmt_g17(seg.p_right) + "," +
                 std::to_string(seg.active_group) + "," + std::to_string(seg.k) + "," +
                 std::to_string(seg.l) + "," + (seg.is_vertical ? "1" : "0") + "\n";
    }
    std::cout << table;

    std::set<double> ps;
    const double lo = std::max(d0.base_rate, d1.base_rate);
    const double hi = summary.p_max;
    for (const BoundarySegment& seg : summary.segments) {
        if (seg.is_vertical) continue;
        ps.insert(seg.p_left);
        ps.insert(seg.p_right);
    }
    if (cfg.samples >= 2) {
        for (std::size_t i = 0; i < cfg.samples; ++i) {
            ps.insert(lo + (hi - lo) * double(i) / double(cfg.samples - 1));
        }
    }
    std::vector<std::pair<double, double>> points;
    for (double p : ps) append_point(points, p, intersection_boundary_for(d0, d1, p));
    if (!summary.segments.empty() && summary.segments.back().is_vertical) {
        append_point(points, hi, intersection_boundary_for(d0, d1, hi));
        append_point(points, hi, std::min(d0.base_rate, d1.base_rate));
    }

    if (cfg.output == "-") std::cout << "\n";
    write_text(cfg.output, polyline_csv(points));
    return 0;
}

// -------------------------------------------------------------- optimize --

struct OptimizeConfig {
    std::string input;
    std::string raw;
    double split = 0.2;
    std::uint64_t seed = 0;
    std::string objective;
    double l01 = 1.0;
    double l10 = 1.0;
    bool loss_flags_given = false;
    std::string weights_flag;
    std::string output = "-";
};

void metrics_json(JsonWriter& w, const ClassifierReport& report) {
    w.begin_object();
    w.key("mu").value(report.aggregate.mu);
    w.key("ppv").value(report.aggregate.ppv);
    w.key("for").value(report.aggregate.for_rate);
    w.key("tpr").value(report.aggregate.tpr);
    w.key("fpr").value(report.aggregate.fpr);
    if (report.expected_loss) w.key("expected_loss").value(*report.expected_loss);
    w.key("dsep").value(report.dsep);
    w.key("dsep_tv").value(report.dsep_tv);
    w.key("by_group").begin_array();
    for (int a = 0; a < 2; ++a) {
        const GroupMetrics& gm = report.by_group[a];
        w.begin_object();
        w.key("group").value(a);
        w.key("mu").value(gm.mu);
        w.key("ppv").value(gm.ppv);
        w.key("for").value(gm.for_rate);
        w.key("tpr").value(gm.tpr);
        w.key("fpr").value(gm.fpr);
        w.end_object();
    }
    w.end_array();
    w.end_object();
}

void classifier_json(JsonWriter& w, const FairClassifier& clf,
                     const ClassifierReport& report) {
    w.begin_object();
    w.key("pair").begin_object();
    w.key("p").value(clf.pair.p);
    w.key("q").value(clf.pair.q);
    w.end_object();
    w.key("groups").begin_array();
    for (int a = 0; a < 2; ++a) {
        const SelectionRule& rule = (a == 0) ? clf.rule0 : clf.rule1;
        const std::vector<double>& scores = (a == 0) ? clf.scores0 : clf.scores1;
        w.begin_object();
        w.key("group").value(a);
        w.key("mu").value(a == 0 ? clf.mu0 : clf.mu1);
        w.key("rule").begin_array();
        for (size_t i = 0; i < scores.size(); ++i) {
            w.begin_object();
            w.key("score").value(scores[i]);
            w.key("select_prob").value(rule.select_prob[i]);
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("metrics");
    metrics_json(w, report);
    w.end_object();
}

int run_optimize(const OptimizeConfig& cfg) {
    const bool is_loss = cfg.objective == "loss";
    if (!is_loss && cfg.loss_flags_given) {
        throw Error(ErrorCode::BadInput, "--l01/--l10 are only valid with --objective loss");
    }

    std::map<int, GroupDistribution> dists;
    std::optional<double> empirical_w0;
    if (!cfg.raw.empty()) {
        const CalibrationResult cal =
            calibrate_scores(csv::read_raw_rows(cfg.raw), cfg.split, cfg.seed);
        dists = cal.distributions;
        if (cal.group_frequency.count(0)) empirical_w0 = cal.group_frequency.at(0);
    } else {
        dists = csv::read_distributions(cfg.input);
    }
    const GroupDistribution& d0 = require_group(dists, 0);
    const GroupDistribution& d1 = require_group(dists, 1);

    double w0, w1;
    if (!cfg.weights_flag.empty()) {
        const std::vector<double> w = parse_weights_flag(cfg.weights_flag);
        w0 = w[0];
        w1 = w[1];
    } else if (empirical_w0) {
        w0 = *empirical_w0;
        w1 = 1.0 - w0;
    } else {
        throw Error(ErrorCode::InvalidWeights,
                    "aggregated input carries no group frequencies; pass --weights w0,w1");
    }
    const PopulationWeights weights = make_population_weights(d0, d1, w0, w1);
    const LossSpec loss{cfg.l01, cfg.l10};

    const Objective objective =
        is_loss ? Objective(LossObjective{loss}) : Objective(SeparationObjective{});
    const OptimalSolution solution = minimize_on_boundary(d0, d1, weights, objective);
    const FairClassifier clf = build_fair_classifier(d0, d1, solution.pair, weights);
    const ClassifierReport report = classifier_report(clf, d0, d1, weights, loss);

    const double other_value = is_loss ? separation_deviation(solution.pair, weights)
                                       : expected_loss(solution.pair, weights, loss);
    const double unc_loss = unconstrained_loss(d0, d1, weights, loss);
    const bool zero_one = loss.l01 == 1.0 && loss.l10 == 1.0;
    const double fair_loss = *report.expected_loss;

    JsonWriter w;
    w.begin_object();
    w.key("objective").value(cfg.objective);
    w.key("solution").begin_object();
    w.key("p").value(solution.pair.p);
    w.key("q").value(solution.pair.q);
    w.key("value").value(solution.objective_value);
    w.key("candidate_kind").value(to_string(solution.candidate_kind));
    w.key("degenerate_objective").value(solution.degenerate_objective);
    w.key("segment").begin_object();
    w.key("p_left").value(solution.segment.p_left);
    w.key("p_right").value(solution.segment.p_right);
    w.key("active_group").value(solution.segment.active_group);
    w.key("k").value(solution.segment.k);
    w.key("l").value(solution.segment.l);
    w.key("is_vertical").value(solution.segment.is_vertical);
    w.end_object();
    w.end_object();
    w.key("other_objective").begin_object();
    w.key("name").value(is_loss ? "separation" : "loss");
    w.key("value").value(other_value);
    w.end_object();
    w.key("comparison").begin_object();
    w.key("fair_expected_loss").value(fair_loss);
    w.key("unconstrained_expected_loss").value(unc_loss);
    if (zero_one) {
        w.key("fair_accuracy").value(1.0 - fair_loss);
        w.key("unconstrained_accuracy").value(1.0 - unc_loss);
        w.key("accuracy_gap").value(fair_loss - unc_loss);
    }
    w.end_object();
    w.key("classifier");
    classifier_json(w, clf, report);
    w.end_object();

    write_text(cfg.output, std::move(w).take() + "\n");
    return 0;
}

// ------------------------------------------------------------- calibrate --

struct CalibrateConfig {
    std::string input;
    double split = 0.2;
    std::uint64_t seed = 0;
    std::string output = "-";
    std::string dists_out;
};

int run_calibrate(const CalibrateConfig& cfg) {
    const CalibrationResult result =
        calibrate_scores(csv::read_raw_rows(cfg.input), cfg.split, cfg.seed);

    JsonWriter w;
    w.begin_object();
    w.key("split_fraction").value(result.split_fraction);
    w.key("seed").value(static_cast<unsigned long long>(result.split_seed));
    w.key("calibration_map").begin_object();
    for (const auto& [bin, score] : result.calibration_map) w.key(bin).value(score);
    w.end_object();
    w.key("bins").begin_array();
    for (const BinStat& stat : result.bin_stats) {
        w.begin_object();
        w.key("bin").value(stat.bin_id);
        w.key("total").value(static_cast<long long>(stat.total));
        w.key("calibration_rows").value(static_cast<long long>(stat.calibration_rows));
        w.key("calibration_positives")
            .value(static_cast<long long>(stat.calibration_positives));
        w.key("estimation_rows").begin_array();
        w.value(static_cast<long long>(stat.estimation_rows[0]));
        w.value(static_cast<long long>(stat.estimation_rows[1]));
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.key("groups").begin_array();
    for (const auto& [group, dist] : result.distributions) {
        w.begin_object();
        w.key("group").value(group);
        w.key("frequency").value(result.group_frequency.at(group));
        w.key("base_rate").value(dist.base_rate);
        w.key("bins").begin_array();
        for (const MergedBin& mb : result.merged_bins.at(group)) {
            w.begin_object();
            w.key("score").value(mb.score);
            w.key("weight").value(mb.weight);
            w.key("source_bins").begin_array();
            for (const std::string& b : mb.source_bins) w.value(b);
            w.end_array();
            w.end_object();
        }
        w.end_array();
        w.end_object();
    }
    w.end_array();
    w.end_object();
    write_text(cfg.output, std::move(w).take() + "\n");

    if (!cfg.dists_out.empty()) {
        std::string out = "group,score,weight\n";
        for (const auto& [group, dist] : result.distributions) {
            for (const ScoreBin& b : dist.bins) {
                out += std::to_string(group) + "," + fmt_g17(b.score) + "," +
                       fmt_g17(b.weight) + "\n";
            }
        }
        write_text(cfg.dists_out, out);
    }
    return 0;
}

// ---------------------------------------------------------------- verify --

struct VerifyConfig {
    std::string input;
    int grid = 8;
    double tol = 1e-9;
    double boundary_tol = 1e-6;
    int lp_checks = 50;
    std::uint64_t seed = 12345;
};

int run_verify(const VerifyConfig& cfg) {
    const auto dists = csv::read_distributions(cfg.input);
    std::mt19937_64 rng(cfg.seed);
    for (const auto& [group, dist] : dists) {
        const oracle::VerificationReport report =
            oracle::verify_region(dist, cfg.grid, cfg.tol, cfg.boundary_tol);
        for (int i = 0; i < cfg.lp_checks; ++i) {
            const double u = double(rng()) / 18446744073709551616.0;  // 2^64
            const double mu = 0.01 + 0.98 * u;
            const double closed = max_ppv(dist, mu);
            const double lp = oracle::lp_max_ppv(dist, mu);
            if (std::abs(closed - lp) > 1e-9) {
                throw Error(ErrorCode::VerificationFailure,
                            "group " + std::to_string(group) + ": max_ppv(" + fmt_g17(mu) +
                                ") = " + fmt_g17(closed) + " but LP oracle gives " +
                                fmt_g17(lp));
            }
        }
        std::cout << "group " << group << ": OK, " << report.pairs_checked
                  << " grid pairs checked, " << report.breakpoints_matched
                  << " breakpoints matched, max boundary slack "
                  << fmt_g17(report.max_boundary_violation) << ", " << cfg.lp_checks
                  << " LP cross-checks passed\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact fair classification on finite group-calibrated scores"};
    app.require_subcommand(1);

    RegionConfig region_cfg;
    CLI::App* region = app.add_subcommand(
        "region", "single-group breakpoints and boundary polyline");
    region->add_option("--input,-i", region_cfg.input, "aggregated CSV (group,score,weight)")
        ->required();
    region->add_option("--group,-g", region_cfg.group, "group to report (default: sole group)");
    region->add_option("--samples,-n", region_cfg.samples, "uniform polyline samples");
    region->add_option("--output,-o", region_cfg.output, "polyline CSV path ('-' = stdout)");

    TraceConfig trace_cfg;
    CLI::App* trace = app.add_subcommand(
        "trace", "two-group intersection segments and boundary polyline");
    trace->add_option("--input,-i", trace_cfg.input, "aggregated CSV (group,score,weight)")
        ->required();
    trace->add_option("--samples,-n", trace_cfg.samples, "uniform polyline samples");
    trace->add_option("--output,-o", trace_cfg.output, "polyline CSV path ('-' = stdout)");

    OptimizeConfig opt_cfg;
    CLI::App* optimize = app.add_subcommand(
        "optimize", "optimal fair classifier under loss or separation deviation");
    CLI::Option* opt_input =
        optimize->add_option("--input,-i", opt_cfg.input, "aggregated CSV input");
    CLI::Option* opt_raw =
        optimize->add_option("--raw,-r", opt_cfg.raw, "raw rows CSV (group,bin,label)");
    opt_input->excludes(opt_raw);
    optimize->add_option("--split", opt_cfg.split, "calibration split fraction (with --raw)")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    optimize->add_option("--seed", opt_cfg.seed, "split seed (with --raw)");
    optimize->add_option("--objective", opt_cfg.objective, "loss | separation")
        ->required()
        ->check(CLI::IsMember({"loss", "separation"}));
    CLI::Option* l01 = optimize->add_option("--l01", opt_cfg.l01, "false negative cost");
    CLI::Option* l10 = optimize->add_option("--l10", opt_cfg.l10, "false positive cost");
    optimize->add_option("--weights,-w", opt_cfg.weights_flag,
                         "group weights 'w0,w1' (defaults to empirical with --raw)");
    optimize->add_option("--output,-o", opt_cfg.output, "JSON path ('-' = stdout)");

    CalibrateConfig cal_cfg;
    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "estimate the calibration curve and per-group distributions");
    calibrate->add_option("--input,-i", cal_cfg.input, "raw rows CSV (group,bin,label)")
        ->required();
    calibrate->add_option("--split", cal_cfg.split, "calibration split fraction")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    calibrate->add_option("--seed", cal_cfg.seed, "split seed");
    calibrate->add_option("--output,-o", cal_cfg.output, "JSON path ('-' = stdout)");
    calibrate->add_option("--dists", cal_cfg.dists_out,
                          "also write the aggregated distributions CSV here");

    VerifyConfig ver_cfg;
    CLI::App* verify = app.add_subcommand(
        "verify", "brute-force oracle checks of the closed-form geometry");
    verify->add_option("--input,-i", ver_cfg.input, "aggregated CSV input")->required();
    verify->add_option("--grid,-G", ver_cfg.grid, "rule grid resolution (>= 1)")
        ->check(CLI::Range(1, 1000000));
    verify->add_option("--tol", ver_cfg.tol, "containment tolerance");
    verify->add_option("--boundary-tol", ver_cfg.boundary_tol, "boundary slack tolerance");
    verify->add_option("--lp-checks", ver_cfg.lp_checks, "number of LP cross-checks");
    verify->add_option("--seed", ver_cfg.seed, "seed for the LP cross-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*region) return run_region(region_cfg);
        if (*trace) return run_trace(trace_cfg);
        if (*optimize) {
            opt_cfg.loss_flags_given = l01->count() > 0 || l10->count() > 0;
            if (opt_cfg.input.empty() && opt_cfg.raw.empty()) {
                throw Error(ErrorCode::BadInput, "pass --input or --raw");
            }
            return run_optimize(opt_cfg);
        }
        if (*calibrate) return run_calibrate(cal_cfg);
        if (*verify) return run_verify(ver_cfg);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == ErrorCode::VerificationFailure ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
