#pragma once

#include "fairsemi/types.hpp"

#include <cstdint>

namespace fairsemi {

class Dataset;

/// Two-Gaussian generative recipe: class-conditional feature distributions
/// plus the pool size. Labels and the protected attribute are independent
/// fair coins, so the four (protected, label) cells are roughly balanced.
struct GaussianSpec {
    Vector2 mean_pos{2.0, 2.0};
    Matrix2 cov_pos{{5.0, 1.0}, {1.0, 5.0}};
    Vector2 mean_neg{-2.0, -2.0};
    Matrix2 cov_neg{{10.0, 1.0}, {1.0, 3.0}};
    Index n_total = 22000;
};

/// Throws ValueError when a covariance is not symmetric positive-definite
/// or n_total < 1.
void validate(const GaussianSpec& spec);

/// Labeled dataset of spec.n_total rows with feature columns x1, x2.
/// Same seed, same dataset.
Dataset generate_synthetic(const GaussianSpec& spec, std::uint64_t seed);

/// Keeps a uniform random subset of the (protected=1, label=1) cell of the
/// given size and every row of the other three cells, preserving row order.
/// Row values are never altered, only membership. Throws ValueError when
/// gpp_keep exceeds the current cell size.
Dataset make_discriminatory(const Dataset& data, Index gpp_keep, std::uint64_t seed);

/// Pr(label = 1 | x) under the given generating distributions, with the
/// equal class priors the generator uses.
Scalar positive_posterior(const Vector2& x, const GaussianSpec& spec);

/// 1 iff the class-conditional density ratio p(x|1)/p(x|0) >= 1.
int bayes_optimal_label(const Vector2& x, const GaussianSpec& spec);
IntVector bayes_optimal_labels(const Matrix& features, const GaussianSpec& spec);

}  // namespace fairsemi
