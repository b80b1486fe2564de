#include "fairsemi/pseudo_label.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/rng.hpp"

#include <cmath>

namespace fairsemi {

Dataset sample_unlabeled(const Dataset& pool, Scalar rho, std::uint64_t seed) {
    if (!(rho >= 0.0) || !(rho <= 1.0)) {
        throw ValueError("rho must lie in [0, 1], got " + std::to_string(rho));
    }
    if (pool.has_labels()) {
        throw ValueError("sampling pool must be unlabeled");
    }
    const Index take = static_cast<Index>(std::floor(rho * static_cast<Scalar>(pool.rows())));
    RandomEngine rng(seed);
    const auto picked = sample_without_replacement(pool.rows(), take, rng);
    return pool.select(picked);
}

Dataset pseudo_label(const LinearModel& model, const Dataset& sampled) {
    if (sampled.has_labels()) {
        throw ValueError("rows to pseudo-label must be unlabeled");
    }
    return sampled.with_labels(predict(model, sampled));
}

Dataset build_new_training_set(const Dataset& train, const Dataset& pseudo) {
    return concat(train, pseudo);
}

}  // namespace fairsemi
