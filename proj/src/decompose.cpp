#include "fairsemi/decompose.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/parallel.hpp"
#include "fairsemi/rng.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace fairsemi {

namespace {

void check_binary_arg(int v, const char* what) {
    if (v != 0 && v != 1) {
        throw ValueError(std::string(what) + " must be 0 or 1, got " + std::to_string(v));
    }
}

Scalar mismatch_rate(const IntVector& values, int reference) {
    Index off = 0;
    for (Index i = 0; i < values.size(); ++i) {
        off += values[i] != reference ? 1 : 0;
    }
    return static_cast<Scalar>(off) / static_cast<Scalar>(values.size());
}

}  // namespace

IntMatrix run_bootstrap_trials(const Dataset& pool, const Matrix& eval_features,
                               const TrainConfig& config, int trials, std::uint64_t seed,
                               int workers) {
    if (trials < 1) {
        throw ValueError("trials must be at least 1, got " + std::to_string(trials));
    }
    if (pool.rows() == 0) {
        throw DataError("bootstrap pool is empty");
    }
    IntMatrix votes(trials, eval_features.rows());
    parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t t) {
        RandomEngine rng(seed + static_cast<std::uint64_t>(t));
        std::uniform_int_distribution<Index> pick(0, pool.rows() - 1);
        std::vector<Index> rows(static_cast<std::size_t>(pool.rows()));
        for (auto& r : rows) {
            r = pick(rng);
        }
        TrainConfig trial_cfg = config;
        trial_cfg.seed = config.seed + static_cast<std::uint64_t>(t);
        try {
            const auto model = train(pool.select(rows), trial_cfg);
            votes.row(static_cast<Index>(t)) = predict(model, eval_features).transpose();
        } catch (const TrainingError& e) {
            throw TrainingError("trial " + std::to_string(t) + ": " + e.what());
        } catch (const DataError& e) {
            throw TrainingError("trial " + std::to_string(t) + ": " + e.what());
        }
    });
    return votes;
}

MainPrediction main_prediction(const IntMatrix& votes) {
    if (votes.rows() == 0 || votes.cols() == 0) {
        throw DataError("empty vote matrix");
    }
    const Index trials = votes.rows();
    MainPrediction out;
    out.y_m.resize(votes.cols());
    out.agreement.resize(votes.cols());
    for (Index j = 0; j < votes.cols(); ++j) {
        const Index ones = votes.col(j).sum();
        const Index zeros = trials - ones;
        if (ones == zeros) {
            out.y_m[j] = 0;
            out.agreement[j] = 0.5;
            out.tied.push_back(j);
        } else {
            out.y_m[j] = ones > zeros ? 1 : 0;
            out.agreement[j] =
                static_cast<Scalar>(std::max(ones, zeros)) / static_cast<Scalar>(trials);
        }
    }
    return out;
}

MainPrediction estimate_main_prediction(const Dataset& pool, const Matrix& eval_features,
                                        const TrainConfig& config, int trials,
                                        std::uint64_t seed, int workers) {
    return main_prediction(
        run_bootstrap_trials(pool, eval_features, config, trials, seed, workers));
}

PointDecomposition decompose_point(int y_star, int y_m, const IntVector& trial_preds,
                                   const IntVector& label_draws) {
    check_binary_arg(y_star, "y_star");
    check_binary_arg(y_m, "y_m");
    if (trial_preds.size() == 0 || label_draws.size() == 0) {
        throw DataError("trial predictions and label draws must be nonempty");
    }
    PointDecomposition p;
    p.bias = y_star != y_m ? 1.0 : 0.0;
    p.variance = mismatch_rate(trial_preds, y_m);
    p.noise = mismatch_rate(label_draws, y_star);
    return p;
}

DecompositionReport group_decomposition(const IntVector& protected_attr,
                                        const std::vector<PointDecomposition>& points,
                                        Index trials) {
    if (static_cast<std::size_t>(protected_attr.size()) != points.size()) {
        throw ShapeError("protected attribute length " + std::to_string(protected_attr.size()) +
                         " does not match " + std::to_string(points.size()) + " points");
    }
    DecompositionReport report;
    report.trials = trials;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PointDecomposition& p = points[i];
        // zero-one-loss coefficients: a biased point flips the sign of its
        // variance, and the noise coefficient follows from how often the
        // trials land on the optimal label
        const Scalar c_v = 1.0 - 2.0 * p.bias;
        const Scalar c_n = c_v * (1.0 - 2.0 * p.variance);
        GroupDecomposition& g = protected_attr[static_cast<Index>(i)] == 1 ? report.group1
                                                                           : report.group0;
        g.bias += p.bias;
        g.variance += c_v * p.variance;
        g.noise += c_n * p.noise;
        g.variance_plain += p.variance;
        g.noise_plain += p.noise;
        g.n_points += 1;
    }
    for (GroupDecomposition* g : {&report.group0, &report.group1}) {
        if (g->n_points == 0) {
            throw UndefinedRateError(std::string("protected group ") +
                                     (g == &report.group0 ? "0" : "1") +
                                     " has no evaluation points");
        }
        const Scalar inv = 1.0 / static_cast<Scalar>(g->n_points);
        g->bias *= inv;
        g->variance *= inv;
        g->noise *= inv;
        g->variance_plain *= inv;
        g->noise_plain *= inv;
        g->gamma = g->bias + g->variance + g->noise;
    }
    report.bias_gap = std::abs(report.group0.bias - report.group1.bias);
    report.variance_gap = std::abs(report.group0.variance - report.group1.variance);
    report.noise_gap = std::abs(report.group0.noise - report.group1.noise);
    return report;
}

PseudoNoiseReport pseudo_noise_discrimination(const IntVector& true_labels,
                                              const IntVector& pseudo_labels,
                                              const IntVector& protected_attr) {
    if (true_labels.size() != pseudo_labels.size() ||
        true_labels.size() != protected_attr.size()) {
        throw ShapeError("label and protected vectors must share one length");
    }
    std::array<std::array<Index, 2>, 2> count{};
    std::array<std::array<Index, 2>, 2> wrong{};
    for (Index i = 0; i < true_labels.size(); ++i) {
        const int a = protected_attr[i];
        const int y = true_labels[i];
        check_binary_arg(a, "protected value");
        check_binary_arg(y, "true label");
        check_binary_arg(pseudo_labels[i], "pseudo label");
        count[a][y] += 1;
        wrong[a][y] += pseudo_labels[i] != y ? 1 : 0;
    }
    PseudoNoiseReport report;
    for (int a = 0; a < 2; ++a) {
        for (int y = 0; y < 2; ++y) {
            if (count[a][y] == 0) {
                throw UndefinedRateError("cell (protected=" + std::to_string(a) +
                                         ", label=" + std::to_string(y) +
                                         ") has no rows; mislabeling rate undefined");
            }
            report.cells[a][y] =
                static_cast<Scalar>(wrong[a][y]) / static_cast<Scalar>(count[a][y]);
        }
    }
    report.group0 = report.cells[0][0] + report.cells[0][1];
    report.group1 = report.cells[1][0] + report.cells[1][1];
    report.gap = std::abs(report.group1 - report.group0);
    return report;
}

Theorem1Check check_theorem1(const DecompositionReport& supervised,
                             const DecompositionReport& semi_supervised,
                             Scalar pseudo_noise_gap) {
    Theorem1Check check;
    check.margin =
        (supervised.variance_gap - semi_supervised.variance_gap) - pseudo_noise_gap;
    check.holds = check.margin >= 0;
    return check;
}

void write_decomposition_csv(const DecompositionReport& report,
                             const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot write '" + path.string() + "'");
    }
    out.precision(17);
    out << "group,bias,variance,noise,gamma,variance_plain,noise_plain,n_points,trials\n";
    const auto row = [&](int a, const GroupDecomposition& g) {
        out << a << ',' << g.bias << ',' << g.variance << ',' << g.noise << ',' << g.gamma
            << ',' << g.variance_plain << ',' << g.noise_plain << ',' << g.n_points << ','
            << report.trials << '\n';
    };
    row(0, report.group0);
    row(1, report.group1);
    if (!out) {
        throw SchemaError("write to '" + path.string() + "' failed");
    }
}

void write_pseudo_noise_csv(const PseudoNoiseReport& report,
                            const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot write '" + path.string() + "'");
    }
    out.precision(17);
    out << "quantity,value\n";
    for (int a = 0; a < 2; ++a) {
        for (int y = 0; y < 2; ++y) {
            out << "mislabel_a" << a << "_y" << y << ',' << report.cells[a][y] << '\n';
        }
    }
    out << "group0," << report.group0 << '\n';
    out << "group1," << report.group1 << '\n';
    out << "gap," << report.gap << '\n';
    if (!out) {
        throw SchemaError("write to '" + path.string() + "' failed");
    }
}

}  // namespace fairsemi
