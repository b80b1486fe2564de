#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/learners.hpp"
#include "fairsemi/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace fairsemi;

namespace {

// two well-separated blobs, one per class, protected attribute alternating
Dataset blobs(Index n_per_class, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<Scalar> noise(0.0, 0.5);
    const Index n = 2 * n_per_class;
    Matrix x(n, 2);
    IntVector a(n), y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = i < n_per_class ? 1 : 0;
        a[i] = static_cast<int>(i % 2);
        const Scalar cx = y[i] == 1 ? 2.0 : -2.0;
        x(i, 0) = cx + noise(rng);
        x(i, 1) = cx + noise(rng);
    }
    return Dataset(std::move(x), std::move(a), std::move(y), {"x1", "x2"});
}

}  // namespace

TEST_CASE("loss names round-trip") {
    CHECK(loss_from_name("logreg") == LossKind::Logistic);
    CHECK(loss_from_name("svm") == LossKind::Hinge);
    CHECK(loss_name(LossKind::Logistic) == std::string("logreg"));
    CHECK(loss_name(LossKind::Hinge) == std::string("svm"));
    CHECK_THROWS_AS(loss_from_name("tree"), ValueError);
}

TEST_CASE("gradient matches finite differences") {
    const auto data = blobs(20, 3);
    for (const LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
        LinearModel m;
        m.loss = loss;
        m.weights = Vector(2);
        m.weights << 0.3, -0.2;
        m.bias = 0.1;
        const Scalar l2 = 0.01;
        const auto [grad_w, grad_b] = loss_gradient(m, data, l2);

        const Scalar h = 1e-6;
        for (Index j = 0; j < 2; ++j) {
            LinearModel up = m, down = m;
            up.weights[j] += h;
            down.weights[j] -= h;
            const Scalar fd =
                (regularized_loss(up, data, l2) - regularized_loss(down, data, l2)) / (2 * h);
            CHECK(grad_w[j] == doctest::Approx(fd).epsilon(1e-4));
        }
        LinearModel up = m, down = m;
        up.bias += h;
        down.bias -= h;
        const Scalar fd =
            (regularized_loss(up, data, l2) - regularized_loss(down, data, l2)) / (2 * h);
        CHECK(grad_b == doctest::Approx(fd).epsilon(1e-4));
    }
}

TEST_CASE("training separates well-separated blobs") {
    const auto data = blobs(200, 7);
    for (const LossKind loss : {LossKind::Logistic, LossKind::Hinge}) {
        TrainConfig cfg;
        cfg.loss = loss;
        cfg.seed = 11;
        const auto model = train(data, cfg);
        CHECK(accuracy(predict(model, data), data.labels()) > 0.95);
    }
}

TEST_CASE("training loss trace shrinks on separable data") {
    const auto data = blobs(100, 9);
    TrainConfig cfg;
    cfg.seed = 5;
    std::vector<Scalar> trace;
    train(data, cfg, &trace);
    REQUIRE(trace.size() == static_cast<std::size_t>(cfg.epochs));
    CHECK(trace.back() < trace.front());
}

TEST_CASE("training is seed-deterministic") {
    const auto data = blobs(60, 13);
    TrainConfig cfg;
    cfg.seed = 21;
    const auto m1 = train(data, cfg);
    const auto m2 = train(data, cfg);
    CHECK((m1.weights - m2.weights).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    CHECK(m1.bias == doctest::Approx(m2.bias));

    cfg.seed = 22;
    const auto m3 = train(data, cfg);
    CHECK((m3.weights - m1.weights).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("stronger l2 shrinks the weights") {
    const auto data = blobs(100, 17);
    TrainConfig weak;
    weak.l2 = 1e-4;
    weak.seed = 2;
    TrainConfig strong = weak;
    strong.l2 = 1.0;
    CHECK(train(data, strong).weights.norm() < train(data, weak).weights.norm());
}

TEST_CASE("train validates its inputs") {
    const auto data = blobs(10, 1);
    TrainConfig cfg;
    cfg.learning_rate = 0;
    CHECK_THROWS_AS(train(data, cfg), ValueError);
    cfg = TrainConfig{};
    cfg.epochs = 0;
    CHECK_THROWS_AS(train(data, cfg), ValueError);
    cfg = TrainConfig{};
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(data, cfg), ValueError);
    cfg = TrainConfig{};
    cfg.l2 = -1;
    CHECK_THROWS_AS(train(data, cfg), ValueError);

    CHECK_THROWS_AS(train(data.without_labels(), TrainConfig{}), DataError);

    Matrix x(3, 1);
    x << 1, 2, 3;
    IntVector a(3), y(3);
    a << 0, 1, 0;
    y << 1, 1, 1;
    CHECK_THROWS_AS(train(Dataset(x, a, y, {"f"}), TrainConfig{}), DataError);
}

TEST_CASE("overflowing updates raise a training error") {
    Matrix x(2, 1);
    x << 1e155, -1e155;
    IntVector a(2), y(2);
    a << 0, 1;
    y << 0, 1;
    const Dataset data(x, a, y, {"f"});
    TrainConfig cfg;
    cfg.learning_rate = 1e155;
    cfg.epochs = 1;
    CHECK_THROWS_AS(train(data, cfg), TrainingError);
}

TEST_CASE("zero score predicts the positive label") {
    LinearModel m;
    m.weights = Vector::Zero(2);
    m.bias = 0;
    Matrix x(3, 2);
    x.setRandom();
    const auto p = predict(m, x);
    for (Index i = 0; i < p.size(); ++i) {
        CHECK(p[i] == 1);
    }
}

TEST_CASE("predict rejects mismatched width") {
    LinearModel m;
    m.weights = Vector::Zero(3);
    CHECK_THROWS_AS(predict(m, Matrix::Zero(2, 2)), ShapeError);
}

TEST_CASE("model files round-trip") {
    const auto data = blobs(50, 23);
    TrainConfig cfg;
    cfg.loss = LossKind::Hinge;
    cfg.seed = 31;
    const auto model = train(data, cfg);
    const auto path = std::filesystem::temp_directory_path() / "model_roundtrip.txt";
    save_model(model, path);
    const auto loaded = load_model(path);
    CHECK(loaded.loss == model.loss);
    CHECK(loaded.bias == doctest::Approx(model.bias).epsilon(1e-15));
    CHECK((loaded.weights - model.weights).cwiseAbs().maxCoeff() ==
          doctest::Approx(0.0).epsilon(1e-15));

    CHECK_THROWS_AS(load_model("no_such_model.txt"), SchemaError);
    const auto junk = std::filesystem::temp_directory_path() / "junk_model.txt";
    {
        std::ofstream out(junk);
        out << "not a model\n";
    }
    CHECK_THROWS_AS(load_model(junk), SchemaError);
}
