#pragma once

#include "fairsemi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace fairsemi {

class Dataset;

enum class LossKind { Logistic, Hinge };

const char* loss_name(LossKind kind);
LossKind loss_from_name(const std::string& name);  // "logreg" or "svm"

struct TrainConfig {
    LossKind loss = LossKind::Logistic;
    Scalar learning_rate = 0.05;
    int epochs = 100;
    int batch_size = 64;
    Scalar l2 = 1e-4;  // applies to weights, not the bias
    std::uint64_t seed = 0;
};

struct LinearModel {
    Vector weights;
    Scalar bias = 0;
    LossKind loss = LossKind::Logistic;
};

/// Mini-batch SGD from zero initialization with a constant learning rate.
/// Row order is reshuffled every epoch; the last batch of an epoch may be
/// short. When epoch_loss is given it receives the regularized loss over
/// the full training set after each epoch. Throws DataError when the data
/// is unlabeled or single-class, TrainingError when parameters leave the
/// finite range.
LinearModel train(const Dataset& data, const TrainConfig& config,
                  std::vector<Scalar>* epoch_loss = nullptr);

/// w . x + b per row. Throws ShapeError when the width does not match.
Vector decision_scores(const LinearModel& model, const Matrix& features);
Vector decision_scores(const LinearModel& model, const Dataset& data);

/// Label 1 where the decision score is >= 0, else 0.
IntVector predict(const LinearModel& model, const Matrix& features);
IntVector predict(const LinearModel& model, const Dataset& data);

/// Mean per-sample loss plus 0.5 * l2 * |w|^2.
Scalar regularized_loss(const LinearModel& model, const Dataset& data, Scalar l2);

/// Full-batch gradient of regularized_loss: (d/dw, d/db).
std::pair<Vector, Scalar> loss_gradient(const LinearModel& model, const Dataset& data, Scalar l2);

/// Plain text format; round-trips exactly.
void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace fairsemi
