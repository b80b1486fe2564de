#pragma once

#include "fairsemi/learners.hpp"
#include "fairsemi/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace fairsemi {

class Dataset;

/// Per-point zero-one-loss components. bias and the two rates live in
/// [0,1]; bias is 0/1 exactly.
struct PointDecomposition {
    Scalar bias = 0;      // optimal label vs modal prediction
    Scalar variance = 0;  // fraction of trial predictions off the mode
    Scalar noise = 0;     // fraction of label draws off the optimal label
};

struct MainPrediction {
    IntVector y_m;            // modal prediction per evaluation point
    Vector agreement;         // fraction of trials voting y_m (>= 0.5)
    std::vector<Index> tied;  // points whose vote split exactly in half
};

/// Group-conditional averages. variance and noise carry the zero-one-loss
/// sign coefficients (a point whose mode misses the optimal label
/// contributes its variance negatively, and its noise with coefficient
/// 2 * P(trial prediction = optimal) - 1); the _plain fields are the
/// unsigned averages of the same quantities.
struct GroupDecomposition {
    Scalar bias = 0;
    Scalar variance = 0;
    Scalar noise = 0;
    Scalar variance_plain = 0;
    Scalar noise_plain = 0;
    Scalar gamma = 0;  // bias + variance + noise = expected loss
    Index n_points = 0;
};

struct DecompositionReport {
    GroupDecomposition group0;
    GroupDecomposition group1;
    Scalar bias_gap = 0;      // |group0.bias - group1.bias|
    Scalar variance_gap = 0;  // |group0.variance - group1.variance|
    Scalar noise_gap = 0;
    Index trials = 0;
};

/// Mislabeling rates of pseudo-labels against known true labels, split by
/// (protected, true label) cell.
struct PseudoNoiseReport {
    // cells[a][y]: fraction of rows with protected=a, true label=y that
    // were pseudo-labeled 1-y
    std::array<std::array<Scalar, 2>, 2> cells{};
    Scalar group0 = 0;  // cells[0][0] + cells[0][1]
    Scalar group1 = 0;  // cells[1][0] + cells[1][1]
    Scalar gap = 0;     // |group1 - group0|
};

struct Theorem1Check {
    bool holds = false;
    Scalar margin = 0;  // supervised gap minus semi-supervised gap minus pseudo-noise
};

/// Trains `trials` models, each on an independent size-preserving bootstrap
/// resample of the pool (trial t uses seed + t for the resample and
/// config.seed + t for training), and predicts the evaluation features.
/// Returns a trials x points vote matrix. Failures name the trial.
IntMatrix run_bootstrap_trials(const Dataset& pool, const Matrix& eval_features,
                               const TrainConfig& config, int trials, std::uint64_t seed,
                               int workers = 1);

/// Modal prediction per column of a vote matrix; exact ties resolve to
/// label 0 and are flagged.
MainPrediction main_prediction(const IntMatrix& votes);

MainPrediction estimate_main_prediction(const Dataset& pool, const Matrix& eval_features,
                                        const TrainConfig& config, int trials,
                                        std::uint64_t seed, int workers = 1);

/// Zero-one components at one point from raw trial predictions and label
/// draws. Throws DataError on an empty list.
PointDecomposition decompose_point(int y_star, int y_m, const IntVector& trial_preds,
                                   const IntVector& label_draws);

/// Group-conditional averages over per-point components. Throws
/// UndefinedRateError when either protected group has no points.
DecompositionReport group_decomposition(const IntVector& protected_attr,
                                        const std::vector<PointDecomposition>& points,
                                        Index trials);

/// Cell-wise pseudo-label mislabeling rates. Throws UndefinedRateError
/// when any (protected, label) cell is empty.
PseudoNoiseReport pseudo_noise_discrimination(const IntVector& true_labels,
                                              const IntVector& pseudo_labels,
                                              const IntVector& protected_attr);

/// Diagnostic inequality: the supervised-vs-semi-supervised drop in the
/// between-group variance gap must cover the pseudo-label noise gap.
Theorem1Check check_theorem1(const DecompositionReport& supervised,
                             const DecompositionReport& semi_supervised,
                             Scalar pseudo_noise_gap);

void write_decomposition_csv(const DecompositionReport& report,
                             const std::filesystem::path& path);
void write_pseudo_noise_csv(const PseudoNoiseReport& report, const std::filesystem::path& path);

}  // namespace fairsemi
