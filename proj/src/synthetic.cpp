#include "fairsemi/synthetic.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <random>
#include <vector>

namespace fairsemi {

namespace {

Matrix2 cholesky_factor(const Matrix2& cov, const char* which) {
    const Scalar scale = cov.cwiseAbs().maxCoeff();
    if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * std::max(scale, Scalar(1))) {
        throw ValueError(std::string(which) + " covariance is not symmetric");
    }
    Eigen::LLT<Matrix2> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw ValueError(std::string(which) + " covariance is not positive-definite");
    }
    return llt.matrixL();
}

Scalar log_density(const Vector2& x, const Vector2& mean, const Matrix2& cov) {
    const Scalar det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
    const Vector2 d = x - mean;
    // closed-form inverse of the 2x2 covariance
    const Scalar quad =
        (cov(1, 1) * d[0] * d[0] - 2 * cov(0, 1) * d[0] * d[1] + cov(0, 0) * d[1] * d[1]) / det;
    return -std::log(2 * EIGEN_PI) - 0.5 * std::log(det) - 0.5 * quad;
}

}  // namespace

void validate(const GaussianSpec& spec) {
    if (spec.n_total < 1) {
        throw ValueError("n_total must be at least 1, got " + std::to_string(spec.n_total));
    }
    cholesky_factor(spec.cov_pos, "positive-class");
    cholesky_factor(spec.cov_neg, "negative-class");
}

Dataset generate_synthetic(const GaussianSpec& spec, std::uint64_t seed) {
    validate(spec);
    const Matrix2 chol_pos = cholesky_factor(spec.cov_pos, "positive-class");
    const Matrix2 chol_neg = cholesky_factor(spec.cov_neg, "negative-class");

    RandomEngine rng(seed);
    std::uniform_int_distribution<int> coin(0, 1);
    std::normal_distribution<Scalar> normal(0.0, 1.0);

    Matrix x(spec.n_total, 2);
    IntVector a(spec.n_total);
    IntVector y(spec.n_total);
    for (Index i = 0; i < spec.n_total; ++i) {
        y[i] = coin(rng);
        a[i] = coin(rng);
        const Vector2 z{normal(rng), normal(rng)};
        const Vector2 row =
            y[i] == 1 ? Vector2(spec.mean_pos + chol_pos * z) : Vector2(spec.mean_neg + chol_neg * z);
        x.row(i) = row.transpose();
    }
    return Dataset(std::move(x), std::move(a), std::move(y), {"x1", "x2"});
}

Dataset make_discriminatory(const Dataset& data, Index gpp_keep, std::uint64_t seed) {
    const auto parts = partition_groups(data);
    const auto& pp = parts[static_cast<std::size_t>(Group::PP)];
    const Index n_pp = static_cast<Index>(pp.size());
    if (gpp_keep < 0 || gpp_keep > n_pp) {
        throw ValueError("gpp_keep " + std::to_string(gpp_keep) +
                         " exceeds the protected-positive cell of size " + std::to_string(n_pp));
    }
    RandomEngine rng(seed);
    const auto picked = sample_without_replacement(n_pp, gpp_keep, rng);
    std::vector<char> keep_pp(static_cast<std::size_t>(n_pp), 0);
    for (const Index p : picked) {
        keep_pp[static_cast<std::size_t>(p)] = 1;
    }

    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(data.rows() - (n_pp - gpp_keep)));
    Index pp_pos = 0;
    const IntVector& labels = data.labels();
    for (Index i = 0; i < data.rows(); ++i) {
        if (data.protected_attr()[i] == 1 && labels[i] == 1) {
            if (keep_pp[static_cast<std::size_t>(pp_pos)]) {
                rows.push_back(i);
            }
            ++pp_pos;
        } else {
            rows.push_back(i);
        }
    }
    return data.select(rows);
}

Scalar positive_posterior(const Vector2& x, const GaussianSpec& spec) {
    const Scalar log_pos = log_density(x, spec.mean_pos, spec.cov_pos);
    const Scalar log_neg = log_density(x, spec.mean_neg, spec.cov_neg);
    // equal priors: posterior = 1 / (1 + exp(log_neg - log_pos))
    return 1.0 / (1.0 + std::exp(log_neg - log_pos));
}

int bayes_optimal_label(const Vector2& x, const GaussianSpec& spec) {
    return log_density(x, spec.mean_pos, spec.cov_pos) >=
                   log_density(x, spec.mean_neg, spec.cov_neg)
               ? 1
               : 0;
}

IntVector bayes_optimal_labels(const Matrix& features, const GaussianSpec& spec) {
    if (features.cols() < 2) {
        throw ShapeError("expected at least 2 feature columns, got " +
                         std::to_string(features.cols()));
    }
    IntVector out(features.rows());
    for (Index i = 0; i < features.rows(); ++i) {
        out[i] = bayes_optimal_label(Vector2(features(i, 0), features(i, 1)), spec);
    }
    return out;
}

}  // namespace fairsemi
