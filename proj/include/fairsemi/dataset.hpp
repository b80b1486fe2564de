#pragma once

#include "fairsemi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fairsemi {

/// Immutable sample table: a dense feature matrix, a binary protected
/// attribute per row, and optional binary labels. Operations that change
/// membership return a new Dataset; feature values are never rewritten.
class Dataset {
public:
    Dataset(Matrix features, IntVector protected_attr, std::optional<IntVector> labels,
            std::vector<std::string> feature_names);

    Index rows() const noexcept { return features_.rows(); }
    Index dim() const noexcept { return features_.cols(); }
    bool has_labels() const noexcept { return labels_.has_value(); }

    const Matrix& features() const noexcept { return features_; }
    const IntVector& protected_attr() const noexcept { return protected_attr_; }
    /// Throws DataError when the dataset is unlabeled.
    const IntVector& labels() const;
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }

    /// Row subset in the given order. Duplicate indices are allowed; an
    /// empty index list yields an empty dataset.
    Dataset select(std::span<const Index> row_indices) const;
    Dataset without_labels() const;
    Dataset with_labels(IntVector labels) const;
    /// Copy with the protected attribute appended as a trailing feature
    /// column, for pipelines that let the model observe it.
    Dataset with_protected_feature() const;

private:
    Matrix features_;
    IntVector protected_attr_;
    std::optional<IntVector> labels_;
    std::vector<std::string> feature_names_;
};

struct SplitSpec {
    Scalar split_rate = 0.8;
    std::uint64_t seed = 0;
};

/// Ingestion recipe for one CSV file. Exactly one of
/// protected_positive_value / protected_positive_min must be set; the
/// latter maps a numeric protected column by threshold (value >= min -> 1).
struct IngestSchema {
    std::string label_column;  // empty for unlabeled files
    std::string protected_column;
    std::string protected_positive_value;
    std::optional<Scalar> protected_positive_min;
    std::string positive_label_value = "1";
    std::vector<std::string> categorical_columns;
    char delimiter = ',';
};

/// Reads an RFC-4180-style CSV with a header row. Categorical columns are
/// one-hot encoded; the remaining feature columns are z-score standardized
/// with this file's own statistics. Rows containing missing values
/// (empty, "?" or "NA" cells) are dropped. The protected column is mapped
/// to {0,1} and kept out of the feature matrix.
Dataset load_csv(const std::filesystem::path& path, const IngestSchema& schema);

/// Writes feature columns, then "protected", then "label" (when present).
void write_csv(const Dataset& data, const std::filesystem::path& path);

/// Deterministic shuffle by seed; the first floor(split_rate * N) rows form
/// the train side, the remainder the test side. Throws DataError when
/// either side would be empty.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, const SplitSpec& spec);

/// Row indices of each (protected, label) cell, in row order.
GroupIndices partition_groups(const Dataset& data);
GroupCounts group_counts(const Dataset& data);

/// Row-wise concatenation, a's rows first. Feature schemas must match.
Dataset concat(const Dataset& a, const Dataset& b);

}  // namespace fairsemi
