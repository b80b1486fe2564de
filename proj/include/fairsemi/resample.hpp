#pragma once

#include "fairsemi/types.hpp"

#include <cstdint>
#include <vector>

namespace fairsemi {

class Dataset;
struct LinearModel;

struct ResampleConfig {
    Index n_s = 1;  // rows per (protected, label) cell
    int K = 1;      // number of independent fair datasets
    std::uint64_t seed = 0;
};

/// Rebalances to exactly n_s rows in each of the four (protected, label)
/// cells: cells at or above n_s are subsampled without replacement, smaller
/// cells are oversampled with replacement. Output rows are copies of input
/// rows, grouped cell by cell. Throws DataError when any cell is empty.
Dataset fair_resample(const Dataset& data, Index n_s, std::uint64_t seed);

/// K independent fair_resample draws with sub-seeds seed + k.
std::vector<Dataset> make_fair_datasets(const Dataset& data, const ResampleConfig& config);

/// fair_resample with n_s = round(N / 4): every cell forced to the average
/// cell size.
Dataset uniform_sampling(const Dataset& data, std::uint64_t seed);

/// Rebalances each cell to round(N / 4) deterministically by distance from
/// the ranker's decision boundary: shrinking cells drop the rows with the
/// largest |score| first, growing cells duplicate the rows with the
/// smallest |score| first, cycling when more copies are needed. Row order
/// is preserved, so balanced input passes through unchanged. The seed
/// parameter is accepted for signature symmetry with the other samplers but
/// the rule has no random choices left to make.
Dataset preferential_sampling(const Dataset& data, const LinearModel& ranker,
                              std::uint64_t seed);

}  // namespace fairsemi
