#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "fairscore/errors.hpp"
#include "fairscore/score_model.hpp"

namespace fairscore {

/// One labeled observation: group membership, an opaque score-bin label,
/// and the binary outcome.
struct RawRow {
    int group = 0;
    std::string bin_id;
    int label = 0;
};

/// Per-bin split bookkeeping, kept for provenance and testability.
struct BinStat {
    std::string bin_id;
    long total = 0;
    long calibration_rows = 0;
    long calibration_positives = 0;
    long estimation_rows[2] = {0, 0};
};

/// A score bin of a built distribution together with the original bin ids
/// that were merged into it (bins whose calibrated scores collide).
struct MergedBin {
    double score = 0.0;
    double weight = 0.0;
    std::vector<std::string> source_bins;
};

struct CalibrationResult {
    std::map<std::string, double> calibration_map;  // bin id -> P(Y=1 | bin)
    std::vector<BinStat> bin_stats;                 // sorted by bin id
    std::map<int, GroupDistribution> distributions;
    std::map<int, std::vector<MergedBin>> merged_bins;  // descending by score
    std::map<int, double> group_frequency;  // estimation-split share per group
    double split_fraction = 0.0;
    std::uint64_t split_seed = 0;
};

namespace detail {

/// Uniform integer in [0, n) drawn from mt19937_64 by rejection. Both the
/// generator and this mapping are fully specified, so splits reproduce
/// across platforms (std::uniform_int_distribution does not guarantee
/// that).
inline std::uint64_t bounded_rand(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

/// Fisher-Yates prefix shuffle: after the call, v[0..take) is a uniform
/// without-replacement sample.
inline void partial_shuffle(std::vector<size_t>& v, size_t take, std::mt19937_64& rng) {
    for (size_t i = 0; i < take && i + 1 < v.size(); ++i) {
        const size_t j = i + static_cast<size_t>(bounded_rand(rng, v.size() - i));
        std::swap(v[i], v[j]);
    }
}

}  // namespace detail

/// Splits rows stratified by bin (floor(split_fraction * count) rows per
/// bin to calibration, sampled by a seeded mt19937_64), estimates one
/// pooled calibration curve P(Y=1 | bin) from the calibration split, and
/// builds per-group distributions from estimation-split frequencies with
/// the calibrated scores. Bins whose calibrated scores collide are merged;
/// the merge is reported per group.
inline CalibrationResult calibrate_scores(const std::vector<RawRow>& rows,
                                          double split_fraction, std::uint64_t seed) {
    if (rows.empty()) throw Error(ErrorCode::EmptyInput, "no rows");
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
        throw Error(ErrorCode::BadInput, "split fraction must lie in (0, 1)");
    }
    for (const RawRow& r : rows) {
        if (r.group != 0 && r.group != 1) {
            throw Error(ErrorCode::BadInput, "group must be 0 or 1");
        }
        if (r.label != 0 && r.label != 1) {
            throw Error(ErrorCode::BadInput, "label must be 0 or 1");
        }
    }

    // Row indices per bin, bins processed in lexicographic order so the
    // generator stream is consumed deterministically.
    std::map<std::string, std::vector<size_t>> by_bin;
    for (size_t i = 0; i < rows.size(); ++i) by_bin[rows[i].bin_id].push_back(i);

    CalibrationResult result;
    result.split_fraction = split_fraction;
    result.split_seed = seed;
    std::mt19937_64 rng(seed);

    bool group_present[2] = {false, false};
    for (const RawRow& r : rows) group_present[r.group] = true;

    long est_total[2] = {0, 0};
    std::map<std::string, long> est_count[2];
    for (auto& [bin_id, indices] : by_bin) {
        BinStat stat;
        stat.bin_id = bin_id;
        stat.total = static_cast<long>(indices.size());
        const size_t n_cal =
            static_cast<size_t>(std::floor(split_fraction * double(indices.size()) + 1e-9));
        detail::partial_shuffle(indices, n_cal, rng);
        if (n_cal == 0 && indices.size() > 0) {
            throw Error(ErrorCode::EmptyBinInCalibrationSplit,
                        "bin '" + bin_id + "' has estimation mass but no calibration rows");
        }
        long positives = 0;
        for (size_t i = 0; i < n_cal; ++i) positives += rows[indices[i]].label;
        stat.calibration_rows = static_cast<long>(n_cal);
        stat.calibration_positives = positives;
        for (size_t i = n_cal; i < indices.size(); ++i) {
            const RawRow& r = rows[indices[i]];
            ++stat.estimation_rows[r.group];
            ++est_count[r.group][bin_id];
            ++est_total[r.group];
        }
        result.calibration_map[bin_id] = double(positives) / double(n_cal);
        result.bin_stats.push_back(std::move(stat));
    }

    const long grand_total = est_total[0] + est_total[1];
    for (int g = 0; g < 2; ++g) {
        if (!group_present[g]) continue;
        if (est_total[g] == 0) {
            throw Error(ErrorCode::InsufficientData,
                        "group " + std::to_string(g) + " has no estimation rows");
        }
        result.group_frequency[g] = double(est_total[g]) / double(grand_total);

        // Calibrated (score, weight, source) triples, merged on equal score.
        std::vector<MergedBin> merged;
        for (const auto& [bin_id, count] : est_count[g]) {
            MergedBin mb;
            mb.score = result.calibration_map.at(bin_id);
            mb.weight = double(count) / double(est_total[g]);
            mb.source_bins = {bin_id};
            merged.push_back(std::move(mb));
        }
        std::sort(merged.begin(), merged.end(), [](const MergedBin& a, const MergedBin& b) {
            return a.score > b.score;
        });
        std::vector<MergedBin> collapsed;
        for (MergedBin& mb : merged) {
            if (!collapsed.empty() &&
                collapsed.back().score - mb.score < detail::kScoreMergeTolerance) {
                collapsed.back().weight += mb.weight;
                collapsed.back().source_bins.push_back(mb.source_bins.front());
            } else {
                collapsed.push_back(std::move(mb));
            }
        }

        std::vector<ScoreBin> bins;
        bins.reserve(collapsed.size());
        for (const MergedBin& mb : collapsed) bins.push_back({mb.score, mb.weight});
        try {
            result.distributions.emplace(g, build_group_distribution(std::move(bins)));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DegenerateSupport) {
                throw Error(ErrorCode::InsufficientData,
                            "group " + std::to_string(g) +
                                " ends with fewer than 2 distinct calibrated scores");
            }
            throw;
        }
        result.merged_bins.emplace(g, std::move(collapsed));
    }
    if (result.distributions.empty()) {
        throw Error(ErrorCode::InsufficientData, "no group has estimation rows");
    }
    return result;
}

}  // namespace fairscore
