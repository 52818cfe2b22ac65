#pragma once

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robustnet/matrix.hpp"
#include "robustnet/rng.hpp"

namespace robustnet {

// Labeled feature table. Rows are instances in collection order, columns are
// sensor attributes; labels are class indices in [0, class_count).
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    int class_count;
    std::vector<std::string> attribute_names;

    std::size_t size() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

inline void validate_dataset(const Dataset& ds) {
    if (ds.labels.size() != ds.features.rows()) {
        throw std::invalid_argument("dataset: " + std::to_string(ds.labels.size()) +
                                    " labels for " + std::to_string(ds.features.rows()) +
                                    " rows");
    }
    if (ds.attribute_names.size() != ds.features.cols()) {
        throw std::invalid_argument("dataset: " + std::to_string(ds.attribute_names.size()) +
                                    " attribute names for " + std::to_string(ds.features.cols()) +
                                    " columns");
    }
    if (ds.class_count < 1) {
        throw std::invalid_argument("dataset: class_count must be positive");
    }
    for (std::size_t i = 0; i < ds.labels.size(); ++i) {
        if (ds.labels[i] < 0 || ds.labels[i] >= ds.class_count) {
            throw std::invalid_argument("dataset: label " + std::to_string(ds.labels[i]) +
                                        " at row " + std::to_string(i + 1) +
                                        " outside [0, " + std::to_string(ds.class_count) + ")");
        }
    }
    if (!ds.features.all_finite()) {
        throw std::invalid_argument("dataset: non-finite feature value");
    }
}

// Per-attribute z-score statistics, fitted on training data only.
struct StandardizerStats {
    std::vector<double> means;
    std::vector<double> stds;

    std::size_t dim() const { return means.size(); }
};

// Sample standard deviation (divisor n-1). Constant columns get std 1 so
// they standardize to zero instead of dividing by zero.
inline StandardizerStats fit_standardizer(const Dataset& train) {
    const std::size_t n = train.size();
    const std::size_t d = train.dim();
    if (n < 2) {
        throw std::invalid_argument("fit_standardizer: need at least 2 rows, got " +
                                    std::to_string(n));
    }
    StandardizerStats stats;
    stats.means.assign(d, 0.0);
    stats.stds.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = train.features.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) stats.means[j] += row[j];
    }
    for (std::size_t j = 0; j < d; ++j) stats.means[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = train.features.row_ptr(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double delta = row[j] - stats.means[j];
            stats.stds[j] += delta * delta;
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        stats.stds[j] = std::sqrt(stats.stds[j] / static_cast<double>(n - 1));
        if (stats.stds[j] < 1e-12) stats.stds[j] = 1.0;
    }
    return stats;
}

inline Dataset apply_standardizer(const StandardizerStats& stats, const Dataset& ds) {
    if (stats.dim() != ds.dim()) {
        throw std::invalid_argument("apply_standardizer: stats dimension " +
                                    std::to_string(stats.dim()) + " vs dataset dimension " +
                                    std::to_string(ds.dim()));
    }
    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double* row = out.features.row_ptr(i);
        for (std::size_t j = 0; j < out.dim(); ++j) {
            row[j] = (row[j] - stats.means[j]) / stats.stds[j];
        }
    }
    return out;
}

// Inverse of apply_standardizer (x * std + mean).
inline Dataset unapply_standardizer(const StandardizerStats& stats, const Dataset& ds) {
    if (stats.dim() != ds.dim()) {
        throw std::invalid_argument("unapply_standardizer: stats dimension " +
                                    std::to_string(stats.dim()) + " vs dataset dimension " +
                                    std::to_string(ds.dim()));
    }
    Dataset out = ds;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double* row = out.features.row_ptr(i);
        for (std::size_t j = 0; j < out.dim(); ++j) {
            row[j] = row[j] * stats.stds[j] + stats.means[j];
        }
    }
    return out;
}

// First floor(n * fraction) rows train, remainder test, order preserved.
inline std::pair<Dataset, Dataset> chronological_split(const Dataset& ds, double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("chronological_split: fraction must be in (0, 1), got " +
                                    std::to_string(train_fraction));
    }
    const std::size_t n = ds.size();
    const std::size_t train_n =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction));
    if (train_n < 1 || train_n >= n) {
        throw std::invalid_argument("chronological_split: fraction " +
                                    std::to_string(train_fraction) + " leaves an empty side for " +
                                    std::to_string(n) + " rows");
    }
    auto take = [&](std::size_t begin, std::size_t count) {
        Dataset part{Matrix(count, ds.dim()), {}, ds.class_count, ds.attribute_names};
        part.labels.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double* src = ds.features.row_ptr(begin + i);
            double* dst = part.features.row_ptr(i);
            for (std::size_t j = 0; j < ds.dim(); ++j) dst[j] = src[j];
            part.labels.push_back(ds.labels[begin + i]);
        }
        return part;
    };
    return {take(0, train_n), take(train_n, n - train_n)};
}

namespace detail {

inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

inline bool parse_real(const std::string& field, double& out) {
    if (field.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(field.c_str(), &end);
    return end == field.c_str() + field.size() && errno == 0 && std::isfinite(out);
}

inline bool parse_label(const std::string& field, long& out) {
    if (field.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtol(field.c_str(), &end, 10);
    return end == field.c_str() + field.size() && errno == 0;
}

}  // namespace detail

// CSV layout: UTF-8, comma separated, header row, feature columns followed
// by a final integer "label" column. Reals are written with 17 significant
// digits so save/load round-trips doubles exactly.
inline Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("load_csv: cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("load_csv: " + path.string() + " is empty");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() < 2 || header.back() != "label") {
        throw std::runtime_error("load_csv: " + path.string() +
                                 ": final header column must be \"label\"");
    }
    const std::size_t d = header.size() - 1;
    std::vector<std::string> names(header.begin(), header.end() - 1);

    std::vector<double> cells;
    std::vector<int> labels;
    int max_label = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.peek() == std::ifstream::traits_type::eof()) break;
        ++row;
        std::vector<std::string> fields = detail::split_csv_line(line);
        if (fields.size() != d + 1) {
            throw std::runtime_error("load_csv: " + path.string() + ": row " +
                                     std::to_string(row) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(d + 1));
        }
        for (std::size_t j = 0; j < d; ++j) {
            double v;
            if (!detail::parse_real(fields[j], v)) {
                throw std::runtime_error("load_csv: " + path.string() +
                                         ": non-numeric cell at row " + std::to_string(row) +
                                         ", col " + std::to_string(j + 1));
            }
            cells.push_back(v);
        }
        long label;
        if (!detail::parse_label(fields[d], label)) {
            throw std::runtime_error("load_csv: " + path.string() +
                                     ": non-integer label at row " + std::to_string(row));
        }
        if (label < 0) {
            throw std::runtime_error("load_csv: " + path.string() + ": negative label at row " +
                                     std::to_string(row));
        }
        labels.push_back(static_cast<int>(label));
        max_label = std::max(max_label, static_cast<int>(label));
    }
    if (row == 0) {
        throw std::runtime_error("load_csv: " + path.string() + " has no data rows");
    }
    Dataset ds{Matrix(row, d), std::move(labels), max_label + 1, std::move(names)};
    ds.features.values() = std::move(cells);
    return ds;
}

inline void save_csv(const Dataset& ds, const std::filesystem::path& path) {
    validate_dataset(ds);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("save_csv: cannot open " + path.string() + " for writing");
    }
    for (std::size_t j = 0; j < ds.dim(); ++j) {
        out << ds.attribute_names[j] << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < ds.dim(); ++j) {
            out << detail::format_real(row[j]) << ',';
        }
        out << ds.labels[i] << '\n';
    }
    if (!out.good()) {
        throw std::runtime_error("save_csv: write failed for " + path.string());
    }
}

// Health-state class distribution of the reference fleet data, normalized to
// sum to one.
inline std::vector<double> default_class_priors() {
    std::vector<double> p = {9.96, 13.98, 3.6, 4.6, 12.8, 47.06, 7.9};
    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v /= sum;
    return p;
}

// Synthetic stand-in for the fleet dataset: a small informative core of
// class-predictive attributes, a block of redundant attributes that are
// noisy linear blends of the core, and pure-noise attributes for the rest.
struct SyntheticSpec {
    std::size_t n = 0;
    std::size_t d = 149;
    std::vector<double> class_priors = default_class_priors();
    std::size_t informative_count = 24;
    std::size_t redundant_count = 30;
    std::uint64_t seed = 0;
};

namespace detail {

constexpr std::uint64_t kSaltSyntheticStructure = 0x5facade1;
constexpr std::uint64_t kSaltSyntheticRows = 0x5facade2;

// Spread of class-conditional means relative to the unit within-class noise.
constexpr double kClassMeanSpacing = 1.5;
// Noise added to redundant blends.
constexpr double kRedundantNoiseStd = 0.1;

}  // namespace detail

inline void validate_synthetic_spec(const SyntheticSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("generate_synthetic: n must be at least 1");
    if (spec.d < 1) throw std::invalid_argument("generate_synthetic: d must be at least 1");
    if (spec.informative_count + spec.redundant_count > spec.d) {
        throw std::invalid_argument(
            "generate_synthetic: informative + redundant attributes exceed d");
    }
    if (spec.informative_count < 1) {
        throw std::invalid_argument("generate_synthetic: need at least 1 informative attribute");
    }
    if (spec.class_priors.size() < 2) {
        throw std::invalid_argument("generate_synthetic: need at least 2 class priors");
    }
    double sum = 0.0;
    for (double p : spec.class_priors) {
        if (p < 0.0) throw std::invalid_argument("generate_synthetic: negative class prior");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("generate_synthetic: class priors sum to " +
                                    std::to_string(sum) + ", expected 1");
    }
}

inline Dataset generate_synthetic(const SyntheticSpec& spec) {
    validate_synthetic_spec(spec);
    const std::size_t classes = spec.class_priors.size();
    const std::size_t ninf = spec.informative_count;
    const std::size_t nred = spec.redundant_count;

    // Fixed structure: class-conditional means for the informative core and
    // blend coefficients for the redundant block.
    Rng structure(derive_seed(spec.seed, detail::kSaltSyntheticStructure));
    std::vector<std::vector<double>> means(classes, std::vector<double>(ninf));
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t j = 0; j < ninf; ++j) {
            means[c][j] = detail::kClassMeanSpacing * structure.gaussian();
        }
    }
    const double blend_scale = 1.0 / std::sqrt(static_cast<double>(ninf));
    std::vector<std::vector<double>> blend(nred, std::vector<double>(ninf));
    for (std::size_t k = 0; k < nred; ++k) {
        for (std::size_t j = 0; j < ninf; ++j) {
            blend[k][j] = blend_scale * structure.gaussian();
        }
    }

    std::vector<double> cumulative(classes);
    double acc = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
        acc += spec.class_priors[c];
        cumulative[c] = acc;
    }
    cumulative.back() = 1.0;

    Dataset ds{Matrix(spec.n, spec.d), {}, static_cast<int>(classes), {}};
    ds.labels.reserve(spec.n);
    ds.attribute_names.reserve(spec.d);
    for (std::size_t j = 0; j < spec.d; ++j) {
        ds.attribute_names.push_back("a" + std::to_string(j + 1));
    }

    Rng rows(derive_seed(spec.seed, detail::kSaltSyntheticRows));
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double u = rows.uniform();
        std::size_t cls = 0;
        while (cls + 1 < classes && u >= cumulative[cls]) ++cls;
        ds.labels.push_back(static_cast<int>(cls));

        double* row = ds.features.row_ptr(i);
        for (std::size_t j = 0; j < ninf; ++j) {
            row[j] = means[cls][j] + rows.gaussian();
        }
        for (std::size_t k = 0; k < nred; ++k) {
            double v = detail::kRedundantNoiseStd * rows.gaussian();
            for (std::size_t j = 0; j < ninf; ++j) v += blend[k][j] * row[j];
            row[ninf + k] = v;
        }
        for (std::size_t j = ninf + nred; j < spec.d; ++j) {
            row[j] = rows.gaussian();
        }
    }
    return ds;
}

}  // namespace robustnet
