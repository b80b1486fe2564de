#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <vector>

namespace fairsemi {

using Scalar = double;
using Index = Eigen::Index;

using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
using IntVector = Eigen::Matrix<int, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// The four (protected value, label value) cells. The enum order is the
/// canonical order of every 4-tuple of group statistics in this library.
enum class Group : int { PP = 0, UP = 1, PN = 2, UN = 3 };

inline constexpr std::array<Group, 4> all_groups{Group::PP, Group::UP,
                                                 Group::PN, Group::UN};

struct GroupKey {
    int protected_value = 0;
    int label = 0;
};

constexpr Group group_of(int protected_value, int label) noexcept
{
    if (label == 1)
        return protected_value == 1 ? Group::PP : Group::UP;
    return protected_value == 1 ? Group::PN : Group::UN;
}

constexpr GroupKey group_key(Group g) noexcept
{
    switch (g) {
    case Group::PP: return {1, 1};
    case Group::UP: return {0, 1};
    case Group::PN: return {1, 0};
    default:        return {0, 0};
    }
}

constexpr const char* group_name(Group g) noexcept
{
    switch (g) {
    case Group::PP: return "G_PP";
    case Group::UP: return "G_UP";
    case Group::PN: return "G_PN";
    default:        return "G_UN";
    }
}

using GroupCounts = std::array<Index, 4>;
using GroupIndices = std::array<std::vector<Index>, 4>;

}  // namespace fairsemi
