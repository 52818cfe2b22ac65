#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robustnet/dataset.hpp"
#include "robustnet/rng.hpp"

namespace robustnet {

// The three sensor defect models, applied to standardized data:
//   StuckAtZero     - failed sensor pinned at its mean (zero after z-score)
//   ReplaceGaussian - noisy sensor emitting N(0,1) draws instead of signal
//   AdditiveWhite   - white noise added on top of valid measurements
enum class CorruptionKind { StuckAtZero, ReplaceGaussian, AdditiveWhite };

inline char kind_prefix(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::StuckAtZero: return 'D';
        case CorruptionKind::ReplaceGaussian: return 'V';
        case CorruptionKind::AdditiveWhite: return 'W';
    }
    throw std::logic_error("kind_prefix: unknown corruption kind");
}

inline std::string kind_name(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::StuckAtZero: return "stuck-zero";
        case CorruptionKind::ReplaceGaussian: return "replace-gauss";
        case CorruptionKind::AdditiveWhite: return "white";
    }
    throw std::logic_error("kind_name: unknown corruption kind");
}

inline CorruptionKind parse_kind(const std::string& name) {
    if (name == "stuck-zero") return CorruptionKind::StuckAtZero;
    if (name == "replace-gauss") return CorruptionKind::ReplaceGaussian;
    if (name == "white") return CorruptionKind::AdditiveWhite;
    throw std::invalid_argument("unknown corruption kind \"" + name +
                                "\" (expected stuck-zero, replace-gauss or white)");
}

// Defect model: kind plus the number of affected attributes per instance.
// The canonical levels are {0, 20, 40, ..., 140}.
struct CorruptionSpec {
    CorruptionKind kind;
    std::size_t alpha;
    std::uint64_t seed;
};

// Variant label per the level/10 naming scheme: StuckAtZero level 80 -> "D8".
inline std::string variant_label(CorruptionKind kind, std::size_t alpha) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%c%g", kind_prefix(kind), static_cast<double>(alpha) / 10.0);
    return buf;
}

// The attribute subset corrupted in one row. Each row draws its own subset
// from a seed derived from (spec.seed, row), so corruption is reproducible
// row by row regardless of evaluation order.
inline std::vector<std::uint32_t> corruption_indices(const CorruptionSpec& spec, std::size_t row,
                                                      std::size_t dim) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(row)));
    return rng.sample_indices(static_cast<std::uint32_t>(dim),
                              static_cast<std::uint32_t>(spec.alpha));
}

// Per instance, draws a uniform random subset of alpha attribute indices
// without replacement and applies the defect model to those cells. Labels
// are never touched. Expects standardized data so that zeroing pins an
// attribute at its mean and N(0,1) replacement matches the signal scale.
inline Dataset corrupt(const Dataset& dataset_standardized, const CorruptionSpec& spec) {
    const std::size_t d = dataset_standardized.dim();
    if (spec.alpha > d) {
        throw std::invalid_argument("corrupt: alpha " + std::to_string(spec.alpha) +
                                    " exceeds attribute count " + std::to_string(d));
    }
    Dataset out = dataset_standardized;
    if (spec.alpha == 0) return out;

    for (std::size_t i = 0; i < out.size(); ++i) {
        Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
        const std::vector<std::uint32_t> idx = rng.sample_indices(
            static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(spec.alpha));
        double* row = out.features.row_ptr(i);
        switch (spec.kind) {
            case CorruptionKind::StuckAtZero:
                for (std::uint32_t j : idx) row[j] = 0.0;
                break;
            case CorruptionKind::ReplaceGaussian:
                for (std::uint32_t j : idx) row[j] = rng.gaussian();
                break;
            case CorruptionKind::AdditiveWhite:
                for (std::uint32_t j : idx) row[j] += rng.gaussian();
                break;
        }
    }
    return out;
}

// One corrupted copy of the dataset per level, labeled per the level/10
// scheme; level 0 is the untouched dataset. Levels get distinct derived
// seeds so variants are independent.
inline std::vector<std::pair<std::string, Dataset>> make_variant_suite(
    const Dataset& dataset, CorruptionKind kind, const std::vector<std::size_t>& levels,
    std::uint64_t seed) {
    const std::size_t d = dataset.dim();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] > d) {
            throw std::invalid_argument("make_variant_suite: level " +
                                        std::to_string(levels[i]) +
                                        " exceeds attribute count " + std::to_string(d));
        }
        for (std::size_t j = i + 1; j < levels.size(); ++j) {
            if (levels[i] == levels[j]) {
                throw std::invalid_argument("make_variant_suite: duplicate level " +
                                            std::to_string(levels[i]));
            }
        }
    }
    std::vector<std::pair<std::string, Dataset>> suite;
    suite.reserve(levels.size());
    for (std::size_t level : levels) {
        CorruptionSpec spec{kind, level, derive_seed(seed, static_cast<std::uint64_t>(level))};
        suite.emplace_back(variant_label(kind, level), corrupt(dataset, spec));
    }
    return suite;
}

// Diff summary between a dataset and its corrupted copy; test instrumentation
// for the injection procedure.
struct CorruptionDiffStats {
    std::vector<std::size_t> changed_per_row;
    std::size_t changed_total = 0;
    double injected_mean = 0.0;
    double injected_std = 0.0;
};

inline CorruptionDiffStats replacement_noise_stats(const Dataset& before, const Dataset& after,
                                                   CorruptionKind kind) {
    if (before.size() != after.size() || before.dim() != after.dim()) {
        throw std::invalid_argument("replacement_noise_stats: shape mismatch, " +
                                    before.features.shape() + " vs " + after.features.shape());
    }
    CorruptionDiffStats stats;
    stats.changed_per_row.assign(before.size(), 0);
    std::vector<double> injected;
    for (std::size_t i = 0; i < before.size(); ++i) {
        const double* b = before.features.row_ptr(i);
        const double* a = after.features.row_ptr(i);
        for (std::size_t j = 0; j < before.dim(); ++j) {
            if (b[j] != a[j]) {
                ++stats.changed_per_row[i];
                ++stats.changed_total;
                // the injected value: the replacement itself, or the additive delta
                injected.push_back(kind == CorruptionKind::AdditiveWhite ? a[j] - b[j] : a[j]);
            }
        }
    }
    if (!injected.empty()) {
        double sum = 0.0;
        for (double v : injected) sum += v;
        stats.injected_mean = sum / static_cast<double>(injected.size());
        if (injected.size() > 1) {
            double ss = 0.0;
            for (double v : injected) {
                const double delta = v - stats.injected_mean;
                ss += delta * delta;
            }
            stats.injected_std = std::sqrt(ss / static_cast<double>(injected.size() - 1));
        }
    }
    return stats;
}

}  // namespace robustnet
