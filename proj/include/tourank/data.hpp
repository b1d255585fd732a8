#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tourank {

// One labeled feature vector. Grades are ordinal, 1-based, in [1, num_classes].
struct Sample {
    std::string id;
    int grade = 0;
    std::vector<double> features;
};

// Immutable after construction; shared read-only across workers.
struct Dataset {
    std::vector<Sample> samples;
    int num_classes = 0; // N >= 2
    int feature_dim = 0; // d >= 1

    std::size_t size() const { return samples.size(); }

    // Per-grade sample counts, index g-1, length num_classes.
    std::vector<int> grade_counts() const;
};

// Throws DomainError / DimensionError / NumericError when an invariant is broken.
void validate_dataset(const Dataset& ds);

// New dataset containing the samples at the given indices, in the given order.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

// New dataset restricted to samples with grade in [lo, hi].
Dataset filter_grades(const Dataset& ds, int lo, int hi);

// In-place per-feature standardization (zero mean, unit variance). Returns the
// (mean, std) pair per feature so callers can apply the same transform elsewhere.
std::pair<std::vector<double>, std::vector<double>> standardize_features(Dataset& ds);

// ---------------------------------------------------------------------------
// CSV ingestion. Header must be exactly `id,grade,f0,...,f{d-1}`.
// num_classes defaults to the max observed grade unless overridden.
Dataset load_csv(const std::string& path, std::optional<int> num_classes_override = std::nullopt);
void write_csv(const Dataset& ds, const std::string& path);

// ---------------------------------------------------------------------------
// Synthetic imbalanced ordinal data.
//
// Per-grade feature means sit on a monotone path along a latent axis. With
// nonlinearity 0 the latent positions are equally spaced; larger values pull
// consecutive grade pairs (1,2), (3,4), ... toward their pair midpoint, which
// makes adjacent grades within a pair ambiguous while keeping the means
// strictly monotone. Noise is isotropic Gaussian with sigma = 1/separation.
// Features are standardized before return.
struct SyntheticSpec {
    std::vector<int> counts;   // per-grade sample counts; N = counts.size()
    int feature_dim = 16;
    double separation = 3.0;   // > 0; higher means cleaner class clusters
    double nonlinearity = 0.0; // >= 0; higher means stronger pair compression
    std::uint64_t seed = 0;
};

struct SyntheticData {
    Dataset dataset;
    // Unit vector such that projecting standardized features onto it recovers
    // the latent ordering; per-grade projected means are strictly increasing.
    std::vector<double> latent_axis;
    // Latent position per grade (pre-noise, pre-standardization).
    std::vector<double> latent_means;
};

// Latent position of each grade for a given class count and nonlinearity.
// Strictly increasing for any nonlinearity >= 0.
std::vector<double> latent_positions(int num_classes, double nonlinearity);

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// ---------------------------------------------------------------------------
// Stratified k-fold assignment.
struct FoldSplit {
    int fold_count = 0;
    std::vector<int> assignments; // per sample, in [0, fold_count)
    // [grade-1][fold] sample counts; rows for all grades in [1, num_classes].
    std::vector<std::vector<int>> grade_fold_counts;

    // (grade, fold) pairs where the fold holds no sample of that grade.
    std::vector<std::pair<int, int>> missing_grade_folds() const;
};

// Shuffles within each grade, then deals round-robin with a running cursor so
// both per-grade and total fold sizes differ by at most one.
FoldSplit stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

} // namespace tourank
