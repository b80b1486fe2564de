#pragma once

#include "fairsemi/types.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fairsemi {

using RandomEngine = std::mt19937_64;

/// Derives an independent stage seed from a master seed. Distinct tags give
/// unrelated streams, so consecutive master seeds (seed, seed+1, ...) do not
/// collide with stage streams.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) noexcept
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::vector<Index> iota_indices(Index n)
{
    std::vector<Index> idx(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        idx[static_cast<std::size_t>(i)] = i;
    return idx;
}

inline std::vector<Index> shuffled_indices(Index n, RandomEngine& rng)
{
    auto idx = iota_indices(n);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

/// k distinct indices drawn uniformly from [0, n), in draw order.
inline std::vector<Index> sample_without_replacement(Index n, Index k, RandomEngine& rng)
{
    auto idx = iota_indices(n);
    for (Index i = 0; i < k; ++i) {
        std::uniform_int_distribution<Index> pick(i, n - 1);
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(pick(rng))]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

/// k uniform draws from `from`, with replacement.
inline std::vector<Index> sample_with_replacement(std::span<const Index> from, Index k,
                                                  RandomEngine& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, from.size() - 1);
    std::vector<Index> out;
    out.reserve(static_cast<std::size_t>(k));
    for (Index i = 0; i < k; ++i)
        out.push_back(from[pick(rng)]);
    return out;
}

}  // namespace fairsemi
