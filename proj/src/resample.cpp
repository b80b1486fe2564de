#include "fairsemi/resample.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/learners.hpp"
#include "fairsemi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fairsemi {

namespace {

GroupIndices nonempty_groups(const Dataset& data) {
    auto parts = partition_groups(data);
    for (const Group g : all_groups) {
        if (parts[static_cast<std::size_t>(g)].empty()) {
            throw DataError(std::string("cannot rebalance: cell ") + group_name(g) +
                            " is empty");
        }
    }
    return parts;
}

Index average_cell_size(const Dataset& data) {
    return static_cast<Index>(std::llround(static_cast<Scalar>(data.rows()) / 4.0));
}

}  // namespace

Dataset fair_resample(const Dataset& data, Index n_s, std::uint64_t seed) {
    if (n_s < 1) {
        throw ValueError("n_s must be at least 1, got " + std::to_string(n_s));
    }
    const auto parts = nonempty_groups(data);
    RandomEngine rng(seed);
    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(4 * n_s));
    for (const Group g : all_groups) {
        const auto& cell = parts[static_cast<std::size_t>(g)];
        const Index n_i = static_cast<Index>(cell.size());
        if (n_i >= n_s) {
            for (const Index p : sample_without_replacement(n_i, n_s, rng)) {
                rows.push_back(cell[static_cast<std::size_t>(p)]);
            }
        } else {
            std::uniform_int_distribution<Index> pick(0, n_i - 1);
            for (Index j = 0; j < n_s; ++j) {
                rows.push_back(cell[static_cast<std::size_t>(pick(rng))]);
            }
        }
    }
    return data.select(rows);
}

std::vector<Dataset> make_fair_datasets(const Dataset& data, const ResampleConfig& config) {
    if (config.K < 1) {
        throw ValueError("K must be at least 1, got " + std::to_string(config.K));
    }
    std::vector<Dataset> out;
    out.reserve(static_cast<std::size_t>(config.K));
    for (int k = 0; k < config.K; ++k) {
        out.push_back(fair_resample(data, config.n_s, config.seed + static_cast<std::uint64_t>(k)));
    }
    return out;
}

Dataset uniform_sampling(const Dataset& data, std::uint64_t seed) {
    return fair_resample(data, average_cell_size(data), seed);
}

Dataset preferential_sampling(const Dataset& data, const LinearModel& ranker,
                              std::uint64_t /*seed*/) {
    const auto parts = nonempty_groups(data);
    const Index target = average_cell_size(data);
    const Vector scores = decision_scores(ranker, data);

    // per-row multiplicity: 0 = dropped, 1 = kept, >1 = duplicated
    std::vector<Index> copies(static_cast<std::size_t>(data.rows()), 0);
    for (const Group g : all_groups) {
        const auto& cell = parts[static_cast<std::size_t>(g)];
        const Index n_i = static_cast<Index>(cell.size());
        // cell positions ordered boundary-first, stable in original order
        std::vector<Index> order(cell.begin(), cell.end());
        std::stable_sort(order.begin(), order.end(), [&](Index lhs, Index rhs) {
            return std::abs(scores[lhs]) < std::abs(scores[rhs]);
        });
        if (n_i >= target) {
            for (Index j = 0; j < target; ++j) {
                copies[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])] = 1;
            }
        } else {
            for (const Index r : cell) {
                copies[static_cast<std::size_t>(r)] = 1;
            }
            for (Index j = 0; j < target - n_i; ++j) {
                copies[static_cast<std::size_t>(order[static_cast<std::size_t>(j % n_i)])] += 1;
            }
        }
    }

    std::vector<Index> rows;
    rows.reserve(static_cast<std::size_t>(4 * target));
    for (Index i = 0; i < data.rows(); ++i) {
        for (Index c = 0; c < copies[static_cast<std::size_t>(i)]; ++c) {
            rows.push_back(i);
        }
    }
    return data.select(rows);
}

}  // namespace fairsemi
