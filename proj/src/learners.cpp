#include "fairsemi/learners.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/rng.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

namespace fairsemi {

namespace {

// log(1 + exp(-m)) without overflow for large |m|
Scalar logistic_loss(Scalar margin) {
    if (margin >= 0) {
        return std::log1p(std::exp(-margin));
    }
    return -margin + std::log1p(std::exp(margin));
}

// d/dscore of the per-sample loss, with y already in {-1, +1}
Scalar score_gradient(LossKind loss, Scalar score, Scalar y_signed) {
    if (loss == LossKind::Logistic) {
        // sigmoid(score) - y in the {0,1} convention
        const Scalar p = 1.0 / (1.0 + std::exp(-score));
        return p - (y_signed > 0 ? 1.0 : 0.0);
    }
    return y_signed * score < 1.0 ? -y_signed : 0.0;
}

Scalar sample_loss(LossKind loss, Scalar score, Scalar y_signed) {
    if (loss == LossKind::Logistic) {
        return logistic_loss(y_signed * score);
    }
    return std::max(Scalar(0), 1.0 - y_signed * score);
}

void check_train_config(const TrainConfig& c) {
    if (!(c.learning_rate > 0) || !std::isfinite(c.learning_rate)) {
        throw ValueError("learning_rate must be positive and finite");
    }
    if (c.epochs < 1) {
        throw ValueError("epochs must be at least 1, got " + std::to_string(c.epochs));
    }
    if (c.batch_size < 1) {
        throw ValueError("batch_size must be at least 1, got " + std::to_string(c.batch_size));
    }
    if (c.l2 < 0 || !std::isfinite(c.l2)) {
        throw ValueError("l2 must be non-negative and finite");
    }
}

void check_width(const LinearModel& model, const Matrix& features) {
    if (model.weights.size() != features.cols()) {
        throw ShapeError("model expects " + std::to_string(model.weights.size()) +
                         " features, data has " + std::to_string(features.cols()));
    }
}

}  // namespace

const char* loss_name(LossKind kind) {
    return kind == LossKind::Logistic ? "logreg" : "svm";
}

LossKind loss_from_name(const std::string& name) {
    if (name == "logreg") {
        return LossKind::Logistic;
    }
    if (name == "svm") {
        return LossKind::Hinge;
    }
    throw ValueError("unknown model '" + name + "' (expected logreg or svm)");
}

LinearModel train(const Dataset& data, const TrainConfig& config,
                  std::vector<Scalar>* epoch_loss) {
    check_train_config(config);
    const IntVector& labels = data.labels();
    const Index n = data.rows();
    if (n == 0) {
        throw DataError("training data is empty");
    }
    if (labels.minCoeff() == labels.maxCoeff()) {
        throw DataError("training data has a single class");
    }

    LinearModel model;
    model.loss = config.loss;
    model.weights = Vector::Zero(data.dim());
    model.bias = 0;

    Vector grad = Vector::Zero(data.dim());
    RandomEngine rng(config.seed);
    auto order = iota_indices(n);
    if (epoch_loss) {
        epoch_loss->clear();
        epoch_loss->reserve(static_cast<std::size_t>(config.epochs));
    }

    const Matrix& x = data.features();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Index start = 0; start < n; start += config.batch_size) {
            const Index stop = std::min<Index>(start + config.batch_size, n);
            const Scalar inv = 1.0 / static_cast<Scalar>(stop - start);
            grad.setZero();
            Scalar grad_bias = 0;
            for (Index k = start; k < stop; ++k) {
                const Index r = order[static_cast<std::size_t>(k)];
                const Scalar score = x.row(r).dot(model.weights) + model.bias;
                const Scalar y_signed = labels[r] == 1 ? 1.0 : -1.0;
                const Scalar g = score_gradient(config.loss, score, y_signed);
                if (g != 0) {
                    grad.noalias() += g * x.row(r).transpose();
                    grad_bias += g;
                }
            }
            grad = inv * grad + config.l2 * model.weights;
            model.weights.noalias() -= config.learning_rate * grad;
            model.bias -= config.learning_rate * inv * grad_bias;
        }
        if (!model.weights.allFinite() || !std::isfinite(model.bias)) {
            throw TrainingError("parameters left the finite range in epoch " +
                                std::to_string(epoch + 1));
        }
        if (epoch_loss) {
            epoch_loss->push_back(regularized_loss(model, data, config.l2));
        }
    }
    return model;
}

Vector decision_scores(const LinearModel& model, const Matrix& features) {
    check_width(model, features);
    return (features * model.weights).array() + model.bias;
}

Vector decision_scores(const LinearModel& model, const Dataset& data) {
    return decision_scores(model, data.features());
}

IntVector predict(const LinearModel& model, const Matrix& features) {
    const Vector scores = decision_scores(model, features);
    IntVector out(scores.size());
    for (Index i = 0; i < scores.size(); ++i) {
        out[i] = scores[i] >= 0 ? 1 : 0;
    }
    return out;
}

IntVector predict(const LinearModel& model, const Dataset& data) {
    return predict(model, data.features());
}

Scalar regularized_loss(const LinearModel& model, const Dataset& data, Scalar l2) {
    const Vector scores = decision_scores(model, data);
    const IntVector& labels = data.labels();
    Scalar total = 0;
    for (Index i = 0; i < scores.size(); ++i) {
        total += sample_loss(model.loss, scores[i], labels[i] == 1 ? 1.0 : -1.0);
    }
    return total / static_cast<Scalar>(scores.size()) + 0.5 * l2 * model.weights.squaredNorm();
}

std::pair<Vector, Scalar> loss_gradient(const LinearModel& model, const Dataset& data, Scalar l2) {
    const Vector scores = decision_scores(model, data);
    const IntVector& labels = data.labels();
    Vector grad = Vector::Zero(model.weights.size());
    Scalar grad_bias = 0;
    for (Index i = 0; i < scores.size(); ++i) {
        const Scalar g =
            score_gradient(model.loss, scores[i], labels[i] == 1 ? 1.0 : -1.0);
        if (g != 0) {
            grad.noalias() += g * data.features().row(i).transpose();
            grad_bias += g;
        }
    }
    const Scalar inv = 1.0 / static_cast<Scalar>(scores.size());
    return {inv * grad + l2 * model.weights, inv * grad_bias};
}

void save_model(const LinearModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot write '" + path.string() + "'");
    }
    out.precision(17);
    out << "linear-model 1\n" << loss_name(model.loss) << '\n' << model.weights.size() << '\n';
    out << model.bias << '\n';
    for (Index i = 0; i < model.weights.size(); ++i) {
        out << model.weights[i] << (i + 1 == model.weights.size() ? "" : " ");
    }
    out << '\n';
    if (!out) {
        throw SchemaError("write to '" + path.string() + "' failed");
    }
}

LinearModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SchemaError("cannot open '" + path.string() + "'");
    }
    std::string magic, name;
    int version = 0;
    Index dim = 0;
    LinearModel model;
    in >> magic >> version >> name >> dim >> model.bias;
    if (!in || magic != "linear-model" || version != 1) {
        throw SchemaError("'" + path.string() + "' is not a linear model file");
    }
    if (dim < 0) {
        throw SchemaError("'" + path.string() + "' has a negative dimension");
    }
    model.loss = loss_from_name(name);
    model.weights.resize(dim);
    for (Index i = 0; i < dim; ++i) {
        in >> model.weights[i];
    }
    if (!in) {
        throw SchemaError("'" + path.string() + "' is truncated");
    }
    return model;
}

}  // namespace fairsemi
