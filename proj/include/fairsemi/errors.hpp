#pragma once

#include <stdexcept>

namespace fairsemi {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed file or config structure: missing columns, unknown keys.
struct SchemaError : Error {
    using Error::Error;
};

/// A value violates its contract (non-binary label, size out of range,
/// covariance not positive definite).
struct ValueError : Error {
    using Error::Error;
};

/// Dimension or length mismatch between related containers.
struct ShapeError : Error {
    using Error::Error;
};

/// Not enough usable data: empty file, empty split side, empty group,
/// single-class labels, missing label column.
struct DataError : Error {
    using Error::Error;
};

/// Optimization produced non-finite parameters.
struct TrainingError : Error {
    using Error::Error;
};

/// A rate was requested for a group with no members in the evaluation set.
struct UndefinedRateError : Error {
    using Error::Error;
};

}  // namespace fairsemi
