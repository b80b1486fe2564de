#include "fairsemi/dataset.hpp"

#include "fairsemi/errors.hpp"
#include "fairsemi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fairsemi {

namespace {

void check_binary(const IntVector& v, const char* what) {
    for (Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0 && v[i] != 1) {
            throw ValueError(std::string(what) + " must be 0 or 1, got " +
                             std::to_string(v[i]) + " at row " + std::to_string(i));
        }
    }
}

}  // namespace

Dataset::Dataset(Matrix features, IntVector protected_attr, std::optional<IntVector> labels,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      protected_attr_(std::move(protected_attr)),
      labels_(std::move(labels)),
      feature_names_(std::move(feature_names)) {
    if (features_.cols() < 1) {
        throw ShapeError("dataset needs at least one feature column");
    }
    if (protected_attr_.size() != features_.rows()) {
        throw ShapeError("protected attribute length " + std::to_string(protected_attr_.size()) +
                         " does not match row count " + std::to_string(features_.rows()));
    }
    if (labels_ && labels_->size() != features_.rows()) {
        throw ShapeError("label length " + std::to_string(labels_->size()) +
                         " does not match row count " + std::to_string(features_.rows()));
    }
    if (static_cast<Index>(feature_names_.size()) != features_.cols()) {
        throw ShapeError("feature name count " + std::to_string(feature_names_.size()) +
                         " does not match column count " + std::to_string(features_.cols()));
    }
    check_binary(protected_attr_, "protected attribute");
    if (labels_) {
        check_binary(*labels_, "label");
    }
    if (!features_.allFinite()) {
        throw ValueError("feature matrix contains non-finite values");
    }
}

const IntVector& Dataset::labels() const {
    if (!labels_) {
        throw DataError("dataset is unlabeled");
    }
    return *labels_;
}

Dataset Dataset::select(std::span<const Index> row_indices) const {
    const Index n = static_cast<Index>(row_indices.size());
    Matrix x(n, dim());
    IntVector a(n);
    std::optional<IntVector> y;
    if (labels_) {
        y.emplace(n);
    }
    for (Index i = 0; i < n; ++i) {
        const Index r = row_indices[static_cast<std::size_t>(i)];
        if (r < 0 || r >= rows()) {
            throw ValueError("row index " + std::to_string(r) + " out of range [0, " +
                             std::to_string(rows()) + ")");
        }
        x.row(i) = features_.row(r);
        a[i] = protected_attr_[r];
        if (y) {
            (*y)[i] = (*labels_)[r];
        }
    }
    return Dataset(std::move(x), std::move(a), std::move(y), feature_names_);
}

Dataset Dataset::without_labels() const {
    return Dataset(features_, protected_attr_, std::nullopt, feature_names_);
}

Dataset Dataset::with_labels(IntVector labels) const {
    return Dataset(features_, protected_attr_, std::move(labels), feature_names_);
}

Dataset Dataset::with_protected_feature() const {
    Matrix x(rows(), dim() + 1);
    x.leftCols(dim()) = features_;
    x.col(dim()) = protected_attr_.cast<Scalar>();
    auto names = feature_names_;
    names.push_back("protected");
    return Dataset(std::move(x), protected_attr_, labels_, std::move(names));
}

namespace {

// One logical CSV record, quotes resolved. Returns false on EOF with no data.
bool read_record(std::istream& in, char delimiter, std::vector<std::string>& out) {
    out.clear();
    std::string cell;
    bool in_quotes = false;
    bool saw_any = false;
    int c;
    while ((c = in.get()) != std::char_traits<char>::eof()) {
        saw_any = true;
        const char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    cell.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == delimiter) {
            out.push_back(std::move(cell));
            cell.clear();
        } else if (ch == '\r') {
            if (in.peek() == '\n') {
                in.get();
            }
            out.push_back(std::move(cell));
            return true;
        } else if (ch == '\n') {
            out.push_back(std::move(cell));
            return true;
        } else {
            cell.push_back(ch);
        }
    }
    if (!saw_any) {
        return false;
    }
    out.push_back(std::move(cell));
    return true;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

bool is_missing(const std::string& cell) {
    return cell.empty() || cell == "?" || cell == "NA";
}

Scalar parse_number(const std::string& cell, const std::string& column) {
    std::size_t pos = 0;
    Scalar v;
    try {
        v = std::stod(cell, &pos);
    } catch (const std::exception&) {
        throw SchemaError("column '" + column + "' has non-numeric value '" + cell + "'");
    }
    if (pos != cell.size()) {
        throw SchemaError("column '" + column + "' has non-numeric value '" + cell + "'");
    }
    if (!std::isfinite(v)) {
        throw ValueError("column '" + column + "' has non-finite value '" + cell + "'");
    }
    return v;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const IngestSchema& schema) {
    const bool by_value = !schema.protected_positive_value.empty();
    const bool by_min = schema.protected_positive_min.has_value();
    if (by_value == by_min) {
        throw SchemaError(
            "exactly one of protected_positive_value and protected_positive_min must be set");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot open '" + path.string() + "'");
    }

    std::vector<std::string> header;
    if (!read_record(in, schema.delimiter, header)) {
        throw SchemaError("'" + path.string() + "' is empty");
    }
    for (auto& h : header) {
        h = trim(h);
    }
    const auto column_index = [&](const std::string& name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw SchemaError("column '" + name + "' not found in '" + path.string() + "'");
        }
        return static_cast<std::size_t>(it - header.begin());
    };

    const bool labeled = !schema.label_column.empty();
    const std::size_t prot_col = column_index(schema.protected_column);
    const std::size_t label_col = labeled ? column_index(schema.label_column) : 0;
    std::set<std::size_t> categorical;
    for (const auto& name : schema.categorical_columns) {
        const std::size_t idx = column_index(name);
        if (idx == prot_col || (labeled && idx == label_col)) {
            throw SchemaError("column '" + name +
                              "' cannot be both categorical and protected/label");
        }
        categorical.insert(idx);
    }

    std::vector<std::size_t> feature_cols;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j == prot_col || (labeled && j == label_col)) {
            continue;
        }
        feature_cols.push_back(j);
    }

    // First pass over the rows: keep complete records as raw cells, collect
    // label values and category levels.
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::map<std::size_t, std::set<std::string>> levels;
    std::set<std::string> label_values;
    while (read_record(in, schema.delimiter, row)) {
        if (row.size() == 1 && row[0].empty()) {
            continue;  // blank line
        }
        if (row.size() != header.size()) {
            throw SchemaError("'" + path.string() + "': record with " +
                              std::to_string(row.size()) + " fields, header has " +
                              std::to_string(header.size()));
        }
        for (auto& cell : row) {
            cell = trim(cell);
        }
        if (std::any_of(row.begin(), row.end(),
                        [](const std::string& c) { return is_missing(c); })) {
            continue;
        }
        for (const std::size_t j : categorical) {
            levels[j].insert(row[j]);
        }
        if (labeled) {
            label_values.insert(row[label_col]);
        }
        records.push_back(row);
    }
    if (records.empty()) {
        throw DataError("'" + path.string() + "' has no usable rows");
    }
    if (labeled) {
        if (!label_values.count(schema.positive_label_value) && label_values.size() > 1) {
            throw ValueError("positive label value '" + schema.positive_label_value +
                             "' does not occur in '" + path.string() + "'");
        }
        std::set<std::string> others = label_values;
        others.erase(schema.positive_label_value);
        if (others.size() > 1) {
            std::string seen;
            for (const auto& v : others) {
                seen += (seen.empty() ? "" : ", ") + v;
            }
            throw ValueError("label column '" + schema.label_column +
                             "' has more than two values: " + seen);
        }
    }

    // Column layout: numeric features in header order, each categorical
    // column expanded in place into one indicator per sorted level.
    std::vector<std::string> feature_names;
    struct ColumnPlan {
        std::size_t source;
        bool is_categorical;
        std::vector<std::string> level_list;
        Index offset;
    };
    std::vector<ColumnPlan> plan;
    Index width = 0;
    for (const std::size_t j : feature_cols) {
        ColumnPlan p;
        p.source = j;
        p.is_categorical = categorical.count(j) > 0;
        p.offset = width;
        if (p.is_categorical) {
            p.level_list.assign(levels[j].begin(), levels[j].end());
            for (const auto& level : p.level_list) {
                feature_names.push_back(header[j] + "=" + level);
            }
            width += static_cast<Index>(p.level_list.size());
        } else {
            feature_names.push_back(header[j]);
            width += 1;
        }
        plan.push_back(std::move(p));
    }

    const Index n = static_cast<Index>(records.size());
    Matrix x = Matrix::Zero(n, width);
    IntVector a(n);
    IntVector y(n);
    for (Index i = 0; i < n; ++i) {
        const auto& rec = records[static_cast<std::size_t>(i)];
        for (const auto& p : plan) {
            const std::string& cell = rec[p.source];
            if (p.is_categorical) {
                const auto it =
                    std::lower_bound(p.level_list.begin(), p.level_list.end(), cell);
                x(i, p.offset + (it - p.level_list.begin())) = 1.0;
            } else {
                x(i, p.offset) = parse_number(cell, header[p.source]);
            }
        }
        const std::string& prot = rec[prot_col];
        if (by_min) {
            a[i] = parse_number(prot, schema.protected_column) >= *schema.protected_positive_min
                       ? 1
                       : 0;
        } else {
            a[i] = prot == schema.protected_positive_value ? 1 : 0;
        }
        if (labeled) {
            y[i] = rec[label_col] == schema.positive_label_value ? 1 : 0;
        }
    }

    // z-score with this file's own statistics; population variance, and a
    // constant column maps to all zeros rather than dividing by zero.
    for (const auto& p : plan) {
        if (p.is_categorical) {
            continue;
        }
        auto col = x.col(p.offset);
        const Scalar mean = col.mean();
        const Scalar sd = std::sqrt((col.array() - mean).square().mean());
        if (sd > 0) {
            col = (col.array() - mean) / sd;
        } else {
            col.setZero();
        }
    }

    std::optional<IntVector> labels;
    if (labeled) {
        labels = std::move(y);
    }
    return Dataset(std::move(x), std::move(a), std::move(labels), std::move(feature_names));
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot write '" + path.string() + "'");
    }
    const auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (const char c : s) {
            if (c == '"') {
                q += "\"\"";
            } else {
                q.push_back(c);
            }
        }
        q.push_back('"');
        return q;
    };
    for (const auto& name : data.feature_names()) {
        out << quote(name) << ',';
    }
    out << "protected";
    if (data.has_labels()) {
        out << ",label";
    }
    out << '\n';
    std::ostringstream line;
    line.precision(17);
    for (Index i = 0; i < data.rows(); ++i) {
        line.str("");
        for (Index j = 0; j < data.dim(); ++j) {
            line << data.features()(i, j) << ',';
        }
        line << data.protected_attr()[i];
        if (data.has_labels()) {
            line << ',' << data.labels()[i];
        }
        out << line.str() << '\n';
    }
    if (!out) {
        throw SchemaError("write to '" + path.string() + "' failed");
    }
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, const SplitSpec& spec) {
    if (!(spec.split_rate > 0.0) || !(spec.split_rate < 1.0)) {
        throw ValueError("split_rate must lie in (0, 1), got " +
                         std::to_string(spec.split_rate));
    }
    const Index n = data.rows();
    const Index n_train = static_cast<Index>(std::floor(spec.split_rate * static_cast<Scalar>(n)));
    if (n_train == 0 || n_train == n) {
        throw DataError("split of " + std::to_string(n) + " rows at rate " +
                        std::to_string(spec.split_rate) + " leaves an empty side");
    }
    RandomEngine rng(spec.seed);
    const auto order = shuffled_indices(n, rng);
    const std::span<const Index> all(order);
    return {data.select(all.first(static_cast<std::size_t>(n_train))),
            data.select(all.subspan(static_cast<std::size_t>(n_train)))};
}

GroupIndices partition_groups(const Dataset& data) {
    const IntVector& y = data.labels();
    GroupIndices out;
    for (Index i = 0; i < data.rows(); ++i) {
        const Group g = group_of(data.protected_attr()[i], y[i]);
        out[static_cast<std::size_t>(g)].push_back(i);
    }
    return out;
}

GroupCounts group_counts(const Dataset& data) {
    const auto parts = partition_groups(data);
    GroupCounts counts;
    for (std::size_t g = 0; g < counts.size(); ++g) {
        counts[g] = static_cast<Index>(parts[g].size());
    }
    return counts;
}

Dataset concat(const Dataset& a, const Dataset& b) {
    if (a.dim() != b.dim()) {
        throw ShapeError("cannot concatenate: " + std::to_string(a.dim()) + " vs " +
                         std::to_string(b.dim()) + " feature columns");
    }
    if (a.has_labels() != b.has_labels()) {
        throw DataError("cannot concatenate labeled with unlabeled data");
    }
    const Index n = a.rows() + b.rows();
    Matrix x(n, a.dim());
    x.topRows(a.rows()) = a.features();
    x.bottomRows(b.rows()) = b.features();
    IntVector prot(n);
    prot.head(a.rows()) = a.protected_attr();
    prot.tail(b.rows()) = b.protected_attr();
    std::optional<IntVector> labels;
    if (a.has_labels()) {
        labels.emplace(n);
        labels->head(a.rows()) = a.labels();
        labels->tail(b.rows()) = b.labels();
    }
    return Dataset(std::move(x), std::move(prot), std::move(labels), a.feature_names());
}

}  // namespace fairsemi
