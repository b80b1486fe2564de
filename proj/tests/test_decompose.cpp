#include "fairsemi/dataset.hpp"
#include "fairsemi/decompose.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/synthetic.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace fairsemi;

namespace {

IntVector vec(std::initializer_list<int> values) {
    IntVector v(static_cast<Index>(values.size()));
    Index i = 0;
    for (const int x : values) {
        v[i++] = x;
    }
    return v;
}

}  // namespace

TEST_CASE("decompose_point on the worked examples") {
    const auto perfect = decompose_point(1, 1, vec({1, 1, 1}), vec({1, 1}));
    CHECK(perfect.bias == doctest::Approx(0.0));
    CHECK(perfect.variance == doctest::Approx(0.0));
    CHECK(perfect.noise == doctest::Approx(0.0));

    const auto biased = decompose_point(1, 0, vec({0, 1}), vec({1, 0, 1}));
    CHECK(biased.bias == doctest::Approx(1.0));

    const auto spread = decompose_point(1, 1, vec({1, 1, 0, 0}), vec({1}));
    CHECK(spread.variance == doctest::Approx(0.5));
}

TEST_CASE("decompose_point validates input") {
    CHECK_THROWS_AS(decompose_point(2, 0, vec({0}), vec({0})), ValueError);
    CHECK_THROWS_AS(decompose_point(0, 0, IntVector(0), vec({0})), DataError);
    CHECK_THROWS_AS(decompose_point(0, 0, vec({0}), IntVector(0)), DataError);
}

TEST_CASE("decompose_point outputs stay in the unit interval") {
    std::mt19937_64 rng(3);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 200; ++trial) {
        IntVector preds(5), draws(4);
        for (Index i = 0; i < preds.size(); ++i) {
            preds[i] = coin(rng);
        }
        for (Index i = 0; i < draws.size(); ++i) {
            draws[i] = coin(rng);
        }
        const int y_star = coin(rng);
        const int y_m = coin(rng);
        const auto p = decompose_point(y_star, y_m, preds, draws);
        CHECK(p.bias >= 0.0);
        CHECK(p.bias <= 1.0);
        CHECK(p.variance >= 0.0);
        CHECK(p.variance <= 1.0);
        CHECK(p.noise >= 0.0);
        CHECK(p.noise <= 1.0);
        if ((preds.array() == preds[0]).all() && preds[0] == y_m) {
            CHECK(p.variance == doctest::Approx(0.0));
        }
        if ((draws.array() == y_star).all()) {
            CHECK(p.noise == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("main prediction takes the per-point mode") {
    IntMatrix votes(3, 2);
    votes << 1, 0, 1, 0, 0, 1;
    const auto mp = main_prediction(votes);
    CHECK(mp.y_m[0] == 1);
    CHECK(mp.y_m[1] == 0);
    CHECK(mp.agreement[0] == doctest::Approx(2.0 / 3.0));
    CHECK(mp.agreement[1] == doctest::Approx(2.0 / 3.0));
    CHECK(mp.tied.empty());

    IntMatrix single(1, 3);
    single << 1, 0, 1;
    const auto one = main_prediction(single);
    CHECK(one.y_m[0] == 1);
    CHECK(one.y_m[1] == 0);
    CHECK(one.y_m[2] == 1);
    CHECK(one.agreement.minCoeff() == doctest::Approx(1.0));

    IntMatrix tie(2, 1);
    tie << 1, 0;
    const auto tied = main_prediction(tie);
    CHECK(tied.y_m[0] == 0);
    CHECK(tied.agreement[0] == doctest::Approx(0.5));
    REQUIRE(tied.tied.size() == 1);
    CHECK(tied.tied[0] == 0);

    CHECK_THROWS_AS(main_prediction(IntMatrix(0, 3)), DataError);
}

TEST_CASE("main prediction matches a brute-force tally") {
    std::mt19937_64 rng(7);
    std::bernoulli_distribution coin(0.4);
    for (int rep = 0; rep < 50; ++rep) {
        IntMatrix votes(7, 5);
        for (Index t = 0; t < votes.rows(); ++t) {
            for (Index j = 0; j < votes.cols(); ++j) {
                votes(t, j) = coin(rng);
            }
        }
        const auto mp = main_prediction(votes);
        for (Index j = 0; j < votes.cols(); ++j) {
            int ones = 0;
            for (Index t = 0; t < votes.rows(); ++t) {
                ones += votes(t, j);
            }
            const int zeros = static_cast<int>(votes.rows()) - ones;
            CHECK(mp.y_m[j] == (ones > zeros ? 1 : 0));
        }
    }
}

TEST_CASE("bootstrap trials are deterministic and worker-independent") {
    GaussianSpec spec;
    spec.n_total = 300;
    const auto pool = generate_synthetic(spec, 5);
    Matrix eval = pool.features().topRows(10);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 3;
    const auto v1 = run_bootstrap_trials(pool, eval, cfg, 8, 11, 1);
    const auto v2 = run_bootstrap_trials(pool, eval, cfg, 8, 11, 3);
    CHECK(v1.rows() == 8);
    CHECK(v1.cols() == 10);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0);
    CHECK(v1.minCoeff() >= 0);
    CHECK(v1.maxCoeff() <= 1);

    CHECK_THROWS_AS(run_bootstrap_trials(pool, eval, cfg, 0, 11), ValueError);

    const auto mp = estimate_main_prediction(pool, eval, cfg, 8, 11);
    const auto direct = main_prediction(v1);
    CHECK((mp.y_m - direct.y_m).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("group decomposition on hand-built points") {
    // all-zero points: both groups decompose to zero
    std::vector<PointDecomposition> zero(4);
    const auto clean = group_decomposition(vec({0, 0, 1, 1}), zero, 10);
    CHECK(clean.group0.gamma == doctest::Approx(0.0));
    CHECK(clean.group1.gamma == doctest::Approx(0.0));
    CHECK(clean.variance_gap == doctest::Approx(0.0));

    // one group-1 point with pure bias, two clean group-0 points
    std::vector<PointDecomposition> pts(3);
    pts[2].bias = 1.0;
    const auto biased = group_decomposition(vec({0, 0, 1}), pts, 10);
    CHECK(biased.group1.gamma == doctest::Approx(1.0));
    CHECK(biased.group0.gamma == doctest::Approx(0.0));
    CHECK(biased.bias_gap == doctest::Approx(1.0));
    CHECK(biased.trials == 10);

    CHECK_THROWS_AS(group_decomposition(vec({1, 1}), std::vector<PointDecomposition>(2), 5),
                    UndefinedRateError);
    CHECK_THROWS_AS(group_decomposition(vec({0, 1}), std::vector<PointDecomposition>(3), 5),
                    ShapeError);
}

TEST_CASE("biased points contribute variance with a negative sign") {
    std::vector<PointDecomposition> pts(2);
    pts[0].bias = 1.0;
    pts[0].variance = 0.3;
    pts[0].noise = 0.1;
    pts[1].bias = 0.0;
    pts[1].variance = 0.2;
    pts[1].noise = 0.1;
    const auto report = group_decomposition(vec({1, 0}), pts, 4);
    // group 1 holds the biased point: c_v = -1, c_n = -(1 - 0.6) = -0.4
    CHECK(report.group1.variance == doctest::Approx(-0.3));
    CHECK(report.group1.noise == doctest::Approx(-0.4 * 0.1));
    CHECK(report.group1.gamma == doctest::Approx(1.0 - 0.3 - 0.04));
    // group 0 point is unbiased: c_v = +1, c_n = 1 - 0.4 = 0.6
    CHECK(report.group0.variance == doctest::Approx(0.2));
    CHECK(report.group0.noise == doctest::Approx(0.06));
    CHECK(report.group0.variance_plain == doctest::Approx(0.2));
    CHECK(report.group1.variance_plain == doctest::Approx(0.3));
}

TEST_CASE("group averages are convex combinations of point values") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<Scalar> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);
    std::vector<PointDecomposition> pts(40);
    IntVector prot(40);
    Scalar lo = 1.0, hi = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        pts[i].bias = coin(rng) ? 1.0 : 0.0;
        pts[i].variance = unit(rng);
        pts[i].noise = unit(rng);
        prot[static_cast<Index>(i)] = coin(rng);
        lo = std::min(lo, pts[i].bias);
        hi = std::max(hi, pts[i].bias);
    }
    prot[0] = 0;
    prot[1] = 1;
    const auto report = group_decomposition(prot, pts, 3);
    for (const GroupDecomposition* g : {&report.group0, &report.group1}) {
        CHECK(g->bias >= lo);
        CHECK(g->bias <= hi);
        CHECK(g->variance_plain >= 0.0);
        CHECK(g->variance_plain <= 1.0);
    }
}

TEST_CASE("expected loss identity holds with shared samples") {
    // Monte-Carlo loss over all (trial, draw) pairs equals
    // bias + c_v * variance + c_n * noise exactly in the binary case.
    std::mt19937_64 rng(29);
    std::bernoulli_distribution flip(0.3);
    std::bernoulli_distribution coin(0.5);
    for (int rep = 0; rep < 100; ++rep) {
        const int y_star = coin(rng);
        IntVector preds(20), draws(30);
        for (Index i = 0; i < preds.size(); ++i) {
            preds[i] = coin(rng);
        }
        for (Index i = 0; i < draws.size(); ++i) {
            draws[i] = flip(rng) ? 1 - y_star : y_star;
        }
        IntMatrix votes(preds.size(), 1);
        votes.col(0) = preds;
        const auto mp = main_prediction(votes);
        const auto p = decompose_point(y_star, mp.y_m[0], preds, draws);

        Scalar mc_loss = 0;
        for (Index t = 0; t < preds.size(); ++t) {
            for (Index r = 0; r < draws.size(); ++r) {
                mc_loss += preds[t] != draws[r] ? 1.0 : 0.0;
            }
        }
        mc_loss /= static_cast<Scalar>(preds.size() * draws.size());

        const Scalar c_v = 1.0 - 2.0 * p.bias;
        const Scalar c_n = c_v * (1.0 - 2.0 * p.variance);
        CHECK(mc_loss ==
              doctest::Approx(p.bias + c_v * p.variance + c_n * p.noise).epsilon(1e-12));
    }
}

TEST_CASE("pseudo noise cells on the worked examples") {
    const auto truth = vec({1, 1, 0, 0, 1, 1, 0, 0});
    const auto prot = vec({1, 1, 1, 1, 0, 0, 0, 0});

    const auto perfect = pseudo_noise_discrimination(truth, truth, prot);
    for (int a = 0; a < 2; ++a) {
        for (int y = 0; y < 2; ++y) {
            CHECK(perfect.cells[a][y] == doctest::Approx(0.0));
        }
    }
    CHECK(perfect.gap == doctest::Approx(0.0));

    IntVector flipped = truth;
    for (Index i = 0; i < flipped.size(); ++i) {
        flipped[i] = 1 - flipped[i];
    }
    const auto worst = pseudo_noise_discrimination(truth, flipped, prot);
    for (int a = 0; a < 2; ++a) {
        for (int y = 0; y < 2; ++y) {
            CHECK(worst.cells[a][y] == doctest::Approx(1.0));
        }
    }
    CHECK(worst.group0 == doctest::Approx(2.0));
    CHECK(worst.group1 == doctest::Approx(2.0));
    CHECK(worst.gap == doctest::Approx(0.0));
}

TEST_CASE("pseudo noise flags one half-corrupted cell") {
    // (y=1, a=1) rows: indices 0..3; flip half of them
    const auto truth = vec({1, 1, 1, 1, 0, 0, 1, 1, 0, 0});
    const auto prot = vec({1, 1, 1, 1, 1, 1, 0, 0, 0, 0});
    auto pseudo = truth;
    pseudo[0] = 0;
    pseudo[1] = 0;
    const auto report = pseudo_noise_discrimination(truth, pseudo, prot);
    CHECK(report.cells[1][1] == doctest::Approx(0.5));
    CHECK(report.cells[1][0] == doctest::Approx(0.0));
    CHECK(report.cells[0][1] == doctest::Approx(0.0));
    CHECK(report.cells[0][0] == doctest::Approx(0.0));
    CHECK(report.group1 == doctest::Approx(0.5));
    CHECK(report.group0 == doctest::Approx(0.0));
    CHECK(report.gap == doctest::Approx(0.5));
}

TEST_CASE("pseudo noise needs every cell populated") {
    const auto truth = vec({1, 1, 0});
    const auto prot = vec({1, 0, 1});  // no (y=0, a=0) row
    CHECK_THROWS_AS(pseudo_noise_discrimination(truth, truth, prot), UndefinedRateError);
    CHECK_THROWS_AS(pseudo_noise_discrimination(truth, vec({1, 1}), vec({1, 0})), ShapeError);
}

TEST_CASE("theorem check reports margin arithmetic") {
    std::vector<PointDecomposition> pts(4);
    const auto prot = vec({0, 0, 1, 1});
    const auto flat = group_decomposition(prot, pts, 2);
    const auto boundary = check_theorem1(flat, flat, 0.0);
    CHECK(boundary.holds);
    CHECK(boundary.margin == doctest::Approx(0.0));

    DecompositionReport sl = flat, ssl = flat;
    sl.variance_gap = 0.25;
    ssl.variance_gap = 0.15;
    const auto pass = check_theorem1(sl, ssl, 0.04);
    CHECK(pass.holds);
    CHECK(pass.margin == doctest::Approx(0.06));

    const auto fail = check_theorem1(sl, ssl, 0.2);
    CHECK_FALSE(fail.holds);
    CHECK(fail.margin == doctest::Approx(0.25 - 0.15 - 0.2));
}

TEST_CASE("decomposition reports serialize to csv") {
    std::vector<PointDecomposition> pts(4);
    pts[0].bias = 1.0;
    pts[1].variance = 0.25;
    const auto report = group_decomposition(vec({0, 0, 1, 1}), pts, 6);
    const auto path = std::filesystem::temp_directory_path() / "decomp.csv";
    write_decomposition_csv(report, path);
    std::ifstream in(path);
    std::string header, row0, row1;
    std::getline(in, header);
    std::getline(in, row0);
    std::getline(in, row1);
    CHECK(header ==
          "group,bias,variance,noise,gamma,variance_plain,noise_plain,n_points,trials");
    CHECK(row0.substr(0, 2) == "0,");
    CHECK(row1.substr(0, 2) == "1,");

    const auto truth = vec({1, 1, 0, 0});
    const auto prot = vec({1, 0, 1, 0});
    const auto noise = pseudo_noise_discrimination(truth, truth, prot);
    const auto npath = std::filesystem::temp_directory_path() / "pseudo_noise.csv";
    write_pseudo_noise_csv(noise, npath);
    std::ifstream nin(npath);
    std::string line;
    int lines = 0;
    while (std::getline(nin, line)) {
        ++lines;
    }
    CHECK(lines == 8);  // header + 4 cells + 2 groups + gap
}
