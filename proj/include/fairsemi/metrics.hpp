#pragma once

#include "fairsemi/types.hpp"

#include <utility>

namespace fairsemi {

class Dataset;

/// Fraction of agreeing entries. Throws ShapeError on length mismatch,
/// DataError on empty input.
Scalar accuracy(const IntVector& predicted, const IntVector& actual);

/// Positive prediction rate per protected group: (gamma0, gamma1) where
/// gamma_a = Pr(prediction = 1 | protected = a). Throws UndefinedRateError
/// when either group is absent.
std::pair<Scalar, Scalar> demographic_parity(const IntVector& predicted,
                                             const IntVector& protected_attr);

/// |gamma0 - gamma1|.
Scalar discrimination_level(const IntVector& predicted, const IntVector& protected_attr);

/// Per-cell positive prediction counts over (protected, actual) cells, in
/// canonical order (PP, UP, PN, UN).
struct FairnessReport {
    Scalar accuracy = 0;
    Scalar gamma0 = 0;
    Scalar gamma1 = 0;
    Scalar discrimination = 0;
    GroupCounts positives_by_group{};  // predicted-positive count per cell
    GroupCounts counts_by_group{};     // cell size
};

FairnessReport evaluate(const IntVector& predicted, const Dataset& test);

}  // namespace fairsemi
