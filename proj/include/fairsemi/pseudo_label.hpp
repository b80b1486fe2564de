#pragma once

#include "fairsemi/learners.hpp"
#include "fairsemi/types.hpp"

#include <cstdint>

namespace fairsemi {

class Dataset;

struct PseudoConfig {
    Scalar rho = 1.0;  // fraction of the unlabeled pool to draw
    std::uint64_t seed = 0;
    TrainConfig learner_cfg;
};

/// Uniform draw without replacement of floor(rho * N) rows from an
/// unlabeled pool. rho = 0 yields an empty dataset, rho = 1 the whole pool
/// (in draw order). Throws ValueError when rho is outside [0,1] or the
/// pool carries labels.
Dataset sample_unlabeled(const Dataset& pool, Scalar rho, std::uint64_t seed);

/// The sampled rows with the model's predictions attached as labels. The
/// protected attribute passes through untouched.
Dataset pseudo_label(const LinearModel& model, const Dataset& sampled);

/// Original training rows first, pseudo-labeled rows after.
Dataset build_new_training_set(const Dataset& train, const Dataset& pseudo);

}  // namespace fairsemi
