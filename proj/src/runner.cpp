#include "fairsemi/runner.hpp"

#include "fairsemi/config.hpp"
#include "fairsemi/ensemble.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/pseudo_label.hpp"
#include "fairsemi/resample.hpp"
#include "fairsemi/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <span>
#include <sstream>

namespace fairsemi {

namespace {

// Stage tags for mix_seed: every random decision in a run draws from its own
// stream so no stage can perturb another.
enum SeedStage : std::uint64_t {
    kStagePool = 0,        // synthetic pool generation
    kStageCarve = 1,       // test carve / labeled-unlabeled halves shuffle
    kStageThin = 2,        // G_PP thinning
    kStageSkewCarve = 3,   // shuffle of the thinned data
    kStageTrainCap = 4,    // n_train subsampling
    kStageSplit = 5,       // CSV labeled train/test split
    kStageBaseModel = 6,   // ORI model / PS ranker / FS base model
    kStageResample = 7,    // US/PS rebalancing
    kStageFinalModel = 8,  // PS model trained on rebalanced data
    kStageRhoDraw = 9,     // unlabeled pool draw
    kStageFairDraws = 10,  // K balanced-dataset draws
    kStageMembers = 11,    // ensemble member training
    kStageBootSl = 12,     // bootstrap resamples, labeled-only pool
    kStageBootSsl = 13,    // bootstrap resamples, augmented pool
    kStageTrialSl = 14,    // trial model training, labeled-only pool
    kStageTrialSsl = 15,   // trial model training, augmented pool
    kStageLabelDraws = 16  // label redraws for the noise estimate
};

std::string fmt_scalar(Scalar v) {
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

Index min_group(const GroupCounts& counts) {
    return *std::min_element(counts.begin(), counts.end());
}

/// Integral axis value or ValueError.
Index integral_axis_value(Scalar value, const char* what) {
    Scalar r = std::round(value);
    if (!std::isfinite(value) || std::abs(value - r) > 1e-9 || r < 1)
        throw ValueError(std::string(what) + ": expected a positive integer, got " +
                         fmt_scalar(value));
    return static_cast<Index>(r);
}

Dataset cap_training_rows(const Dataset& train, Index n_train, std::uint64_t seed) {
    if (n_train < 1)
        throw ValueError("prepare_bundle: n_train must be at least 1");
    if (n_train > train.rows())
        throw ValueError("prepare_bundle: n_train " + std::to_string(n_train) +
                         " exceeds the " + std::to_string(train.rows()) +
                         " available training rows");
    RandomEngine rng(seed);
    auto order = shuffled_indices(train.rows(), rng);
    return train.select(std::span<const Index>(order).subspan(0, static_cast<std::size_t>(n_train)));
}

DataBundle finish_bundle(Dataset train, Dataset test, Dataset unlabeled_labeled,
                         std::optional<GaussianSpec> oracle, const ExperimentConfig& cfg,
                         std::uint64_t seed) {
    if (cfg.n_train)
        train = cap_training_rows(train, *cfg.n_train, mix_seed(seed, kStageTrainCap));
    DataBundle bundle{std::move(train), std::move(test), unlabeled_labeled.without_labels(),
                      unlabeled_labeled.labels(), std::move(oracle)};
    if (cfg.protected_as_feature) {
        bundle.train = bundle.train.with_protected_feature();
        bundle.test = bundle.test.with_protected_feature();
        bundle.unlabeled = bundle.unlabeled.with_protected_feature();
    }
    return bundle;
}

DataBundle prepare_synthetic(const ExperimentConfig& cfg, const SyntheticSource& src,
                             std::uint64_t seed) {
    validate(src.spec);
    if (src.test_size < 1)
        throw ValueError("prepare_bundle: test_size must be at least 1");
    Dataset pool = generate_synthetic(src.spec, mix_seed(seed, kStagePool));

    // Held-out test rows come off the top before any distortion, so this
    // test set reflects the undistorted population.
    RandomEngine carve_rng(mix_seed(seed, kStageCarve));
    auto order = shuffled_indices(pool.rows(), carve_rng);
    std::span<const Index> o(order);
    if (src.test_size >= pool.rows())
        throw DataError("prepare_bundle: test_size consumes the whole pool");
    Dataset fair_test = pool.select(o.subspan(0, static_cast<std::size_t>(src.test_size)));
    Dataset rest = pool.select(o.subspan(static_cast<std::size_t>(src.test_size)));

    Dataset thinned = src.gpp_keep
                          ? make_discriminatory(rest, *src.gpp_keep, mix_seed(seed, kStageThin))
                          : std::move(rest);

    // A second test set is carved from the (possibly thinned) data itself;
    // the leftovers split into halves: labeled training rows and the
    // unlabeled pool. Carving both test sets unconditionally keeps the
    // training partition identical whichever one is evaluated.
    RandomEngine skew_rng(mix_seed(seed, kStageSkewCarve));
    auto skew_order = shuffled_indices(thinned.rows(), skew_rng);
    std::span<const Index> so(skew_order);
    if (src.test_size + 2 > thinned.rows())
        throw DataError("prepare_bundle: too few rows left after thinning for a test set "
                        "plus training data");
    Dataset skew_test = thinned.select(so.subspan(0, static_cast<std::size_t>(src.test_size)));
    auto leftover = so.subspan(static_cast<std::size_t>(src.test_size));
    std::size_t labeled_n = leftover.size() / 2;
    Dataset train = thinned.select(leftover.subspan(0, labeled_n));
    Dataset unlabeled_src = thinned.select(leftover.subspan(labeled_n));

    Dataset test = src.test_kind == TestKind::Fair ? std::move(fair_test) : std::move(skew_test);
    return finish_bundle(std::move(train), std::move(test), std::move(unlabeled_src),
                         src.spec, cfg, seed);
}

DataBundle prepare_csv(const ExperimentConfig& cfg, const CsvSource& src, std::uint64_t seed) {
    Dataset data = load_csv(src.path, src.schema);
    if (!data.has_labels())
        throw SchemaError("prepare_bundle: the experiment file must have a label column");

    // Half the file plays the unlabeled pool; the labeled half is split
    // into train and test.
    RandomEngine carve_rng(mix_seed(seed, kStageCarve));
    auto order = shuffled_indices(data.rows(), carve_rng);
    std::span<const Index> o(order);
    std::size_t labeled_n = o.size() / 2;
    if (labeled_n < 2 || o.size() - labeled_n < 1)
        throw DataError("prepare_bundle: file too small to partition");
    Dataset labeled = data.select(o.subspan(0, labeled_n));
    Dataset unlabeled_src = data.select(o.subspan(labeled_n));

    auto [train, test] =
        split_train_test(labeled, SplitSpec{cfg.split_rate, mix_seed(seed, kStageSplit)});
    return finish_bundle(std::move(train), std::move(test), std::move(unlabeled_src),
                         std::nullopt, cfg, seed);
}

/// Mean and population standard deviation.
std::pair<Scalar, Scalar> mean_std(const std::vector<Scalar>& values) {
    Scalar mean = 0;
    for (Scalar v : values) mean += v;
    mean /= static_cast<Scalar>(values.size());
    Scalar var = 0;
    for (Scalar v : values) var += (v - mean) * (v - mean);
    var /= static_cast<Scalar>(values.size());
    return {mean, std::sqrt(var)};
}

}  // namespace

const char* method_name(Method method) {
    switch (method) {
        case Method::ORI: return "ORI";
        case Method::US: return "US";
        case Method::PS: return "PS";
        default: return "FS";
    }
}

Method method_from_name(const std::string& name) {
    if (name == "ORI") return Method::ORI;
    if (name == "US") return Method::US;
    if (name == "PS") return Method::PS;
    if (name == "FS") return Method::FS;
    throw ValueError("unknown method \"" + name + "\" (expected ORI, US, PS or FS)");
}

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Rho: return "rho";
        case SweepAxis::EnsembleSize: return "K";
        case SweepAxis::SampleSize: return "ns";
        default: return "n";
    }
}

SweepAxis axis_from_name(const std::string& name) {
    if (name == "rho") return SweepAxis::Rho;
    if (name == "K") return SweepAxis::EnsembleSize;
    if (name == "ns") return SweepAxis::SampleSize;
    if (name == "n") return SweepAxis::TrainSize;
    throw ValueError("unknown sweep axis \"" + name + "\" (expected rho, K, ns or n)");
}

void validate(const ExperimentConfig& cfg) {
    if (!(cfg.rho >= 0.0 && cfg.rho <= 1.0))
        throw ValueError("config: rho must lie in [0, 1]");
    if (cfg.K < 1) throw ValueError("config: K must be at least 1");
    if (cfg.repeats < 1) throw ValueError("config: repeats must be at least 1");
    if (!(cfg.split_rate > 0.0 && cfg.split_rate < 1.0))
        throw ValueError("config: split_rate must lie in (0, 1)");
    if (cfg.n_s && *cfg.n_s < 1) throw ValueError("config: n_s must be at least 1");
    if (cfg.n_train && *cfg.n_train < 1) throw ValueError("config: n_train must be at least 1");
    if (cfg.learner.epochs < 1) throw ValueError("config: epochs must be at least 1");
    if (cfg.learner.batch_size < 1) throw ValueError("config: batch_size must be at least 1");
    if (!(cfg.learner.learning_rate > 0)) throw ValueError("config: learning_rate must be positive");
    if (cfg.learner.l2 < 0) throw ValueError("config: l2 must be nonnegative");
}

DataBundle prepare_bundle(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (const auto* synth = std::get_if<SyntheticSource>(&cfg.source))
        return prepare_synthetic(cfg, *synth, seed);
    return prepare_csv(cfg, std::get<CsvSource>(cfg.source), seed);
}

std::uint64_t dataset_fingerprint(const Dataset& data) {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* ptr, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(ptr);
        for (std::size_t i = 0; i < n; ++i) h = (h ^ bytes[i]) * 1099511628211ULL;
    };
    for (Index r = 0; r < data.rows(); ++r) {
        for (Index c = 0; c < data.dim(); ++c) {
            Scalar v = data.features()(r, c);
            mix(&v, sizeof(v));
        }
        int a = data.protected_attr()[r];
        mix(&a, sizeof(a));
        if (data.has_labels()) {
            int y = data.labels()[r];
            mix(&y, sizeof(y));
        }
    }
    return h;
}

RunResult run_once(const ExperimentConfig& cfg, std::uint64_t seed, int workers) {
    validate(cfg);
    DataBundle bundle = prepare_bundle(cfg, seed);

    IntVector predictions;
    Index resolved_n_s = 0;
    switch (cfg.method) {
        case Method::ORI: {
            TrainConfig tc = cfg.learner;
            tc.seed = mix_seed(seed, kStageBaseModel);
            predictions = predict(train(bundle.train, tc), bundle.test);
            break;
        }
        case Method::US: {
            Dataset balanced = uniform_sampling(bundle.train, mix_seed(seed, kStageResample));
            TrainConfig tc = cfg.learner;
            tc.seed = mix_seed(seed, kStageBaseModel);
            predictions = predict(train(balanced, tc), bundle.test);
            break;
        }
        case Method::PS: {
            TrainConfig rank_cfg = cfg.learner;
            rank_cfg.seed = mix_seed(seed, kStageBaseModel);
            LinearModel ranker = train(bundle.train, rank_cfg);
            Dataset balanced =
                preferential_sampling(bundle.train, ranker, mix_seed(seed, kStageResample));
            TrainConfig tc = cfg.learner;
            tc.seed = mix_seed(seed, kStageFinalModel);
            predictions = predict(train(balanced, tc), bundle.test);
            break;
        }
        case Method::FS: {
            TrainConfig base_cfg = cfg.learner;
            base_cfg.seed = mix_seed(seed, kStageBaseModel);
            LinearModel base = train(bundle.train, base_cfg);
            Dataset sampled =
                sample_unlabeled(bundle.unlabeled, cfg.rho, mix_seed(seed, kStageRhoDraw));
            Dataset pool = build_new_training_set(bundle.train, pseudo_label(base, sampled));

            Index n_s = cfg.n_s ? *cfg.n_s : min_group(group_counts(pool));
            if (n_s < 1)
                throw DataError("run_once: a (protected, label) cell of the augmented "
                                "training set is empty; set n_s explicitly or adjust the data");
            ResampleConfig rcfg{n_s, cfg.K, mix_seed(seed, kStageFairDraws)};
            auto fair_sets = make_fair_datasets(pool, rcfg);
            TrainConfig member_cfg = cfg.learner;
            member_cfg.seed = mix_seed(seed, kStageMembers);
            EnsembleModel ensemble = train_ensemble(fair_sets, member_cfg, workers);
            predictions = ensemble_predict(ensemble, bundle.test);
            resolved_n_s = n_s;
            break;
        }
    }

    RunResult out;
    out.report = evaluate(predictions, bundle.test);
    out.test_fingerprint = dataset_fingerprint(bundle.test);
    out.resolved_n_s = resolved_n_s;
    return out;
}

AggregateResult run_repeated(const ExperimentConfig& cfg, int workers) {
    validate(cfg);
    AggregateResult agg;
    agg.runs.reserve(static_cast<std::size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r) {
        try {
            agg.runs.push_back(run_once(cfg, cfg.seed + static_cast<std::uint64_t>(r), workers));
        } catch (const Error& e) {
            throw Error("run_repeated: repeat " + std::to_string(r) + " of run \"" + cfg.run_id +
                        "\" (" + method_name(cfg.method) + ", seed " +
                        std::to_string(cfg.seed + static_cast<std::uint64_t>(r)) +
                        ") failed: " + e.what());
        }
    }

    std::vector<Scalar> acc, dis;
    for (const auto& run : agg.runs) {
        acc.push_back(run.report.accuracy);
        dis.push_back(run.report.discrimination);
    }
    std::tie(agg.acc_mean, agg.acc_std) = mean_std(acc);
    std::tie(agg.dis_mean, agg.dis_std) = mean_std(dis);
    for (std::size_t g = 0; g < 4; ++g) {
        Scalar total = 0;
        for (const auto& run : agg.runs)
            total += static_cast<Scalar>(run.report.positives_by_group[g]);
        agg.mean_positives[g] = total / static_cast<Scalar>(agg.runs.size());
    }
    return agg;
}

ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, Scalar value) {
    ExperimentConfig out = cfg;
    switch (axis) {
        case SweepAxis::Rho:
            if (!(value >= 0.0 && value <= 1.0))
                throw ValueError("sweep: rho value " + fmt_scalar(value) +
                                 " outside [0, 1]");
            out.rho = value;
            break;
        case SweepAxis::EnsembleSize:
            out.K = static_cast<int>(integral_axis_value(value, "sweep: K"));
            break;
        case SweepAxis::SampleSize:
            out.n_s = integral_axis_value(value, "sweep: n_s");
            break;
        case SweepAxis::TrainSize:
            out.n_train = integral_axis_value(value, "sweep: n_train");
            break;
    }
    return out;
}

SweepTable sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<Scalar>& values,
                 int workers) {
    validate(cfg);
    if (values.empty()) throw ValueError("sweep: empty value list");
    SweepTable table;
    table.axis = axis;
    for (Scalar value : values) {
        SweepRow row;
        row.axis_value = value;
        try {
            row.agg = run_repeated(apply_axis(cfg, axis, value), workers);
        } catch (const Error& e) {
            row.failed = true;
            row.error = e.what();
            std::cerr << "sweep: " << axis_name(axis) << " = " << value
                      << " failed: " << e.what() << "\n";
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CompareTable compare_methods(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                             int workers) {
    validate(cfg);
    if (methods.empty()) throw ValueError("compare_methods: empty method list");
    CompareTable table;
    for (Method method : methods) {
        ExperimentConfig variant = cfg;
        variant.method = method;
        table.methods.push_back(method);
        table.rows.push_back(run_repeated(variant, workers));
    }
    // the split protocol never reads the method, so every row must have
    // evaluated the same test rows; anything else is a protocol bug
    for (std::size_t m = 1; m < table.rows.size(); ++m)
        for (std::size_t r = 0; r < table.rows[m].runs.size(); ++r)
            if (table.rows[m].runs[r].test_fingerprint != table.rows[0].runs[r].test_fingerprint)
                throw Error("compare_methods: test partition diverged between methods " +
                            std::string(method_name(table.methods[0])) + " and " +
                            method_name(table.methods[m]) + " at repeat " + std::to_string(r));
    return table;
}

ReportRow make_report_row(const ExperimentConfig& cfg, const AggregateResult& agg) {
    ReportRow row;
    row.run_id = cfg.run_id;
    row.method = cfg.method;
    row.model = cfg.learner.loss;
    row.rho = cfg.rho;
    row.K = cfg.K;
    row.n_s = agg.runs.empty() ? 0 : agg.runs.front().resolved_n_s;
    row.acc_mean = agg.acc_mean;
    row.acc_std = agg.acc_std;
    row.dis_mean = agg.dis_mean;
    row.dis_std = agg.dis_std;
    row.mean_positives = agg.mean_positives;
    return row;
}

void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_report_csv: cannot open " + path.string());
    out << "run_id,method,model,rho,K,n_s,acc_mean,acc_std,dis_mean,dis_std,gpp,gup,gpn,gun\n";
    for (const auto& row : rows) {
        out << row.run_id << ',' << method_name(row.method) << ',' << loss_name(row.model) << ','
            << fmt_scalar(row.rho) << ',' << row.K << ',' << row.n_s << ','
            << fmt_scalar(row.acc_mean) << ',' << fmt_scalar(row.acc_std) << ','
            << fmt_scalar(row.dis_mean) << ',' << fmt_scalar(row.dis_std);
        for (Scalar count : row.mean_positives) out << ',' << fmt_scalar(count);
        out << '\n';
    }
    if (!out) throw DataError("write_report_csv: write failed for " + path.string());
}

void write_sweep_csv(const SweepTable& table, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("write_sweep_csv: cannot open " + path.string());
    constexpr Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
    out << "axis_value,acc_mean,acc_std,dis_mean,dis_std,failed\n";
    for (const auto& row : table.rows) {
        const auto& a = row.agg;
        out << fmt_scalar(row.axis_value) << ',' << fmt_scalar(row.failed ? nan : a.acc_mean)
            << ',' << fmt_scalar(row.failed ? nan : a.acc_std) << ','
            << fmt_scalar(row.failed ? nan : a.dis_mean) << ','
            << fmt_scalar(row.failed ? nan : a.dis_std) << ',' << (row.failed ? 1 : 0) << '\n';
    }
    if (!out) throw DataError("write_sweep_csv: write failed for " + path.string());
}

PlotSpec sweep_plot(const SweepTable& table, const std::string& title) {
    constexpr Scalar nan = std::numeric_limits<Scalar>::quiet_NaN();
    PlotSpec spec;
    spec.title = title;
    spec.x_label = axis_name(table.axis);
    spec.y_label = "rate";
    PlotSeries acc{"accuracy (mean)", {}};
    PlotSeries dis{"discrimination (mean)", {}};
    for (const auto& row : table.rows) {
        acc.points.emplace_back(row.axis_value, row.failed ? nan : row.agg.acc_mean);
        dis.points.emplace_back(row.axis_value, row.failed ? nan : row.agg.dis_mean);
    }
    spec.series = {std::move(acc), std::move(dis)};
    return spec;
}

DecompositionRun run_decomposition(const ExperimentConfig& cfg, const DecompositionOptions& opts,
                                   int workers) {
    validate(cfg);
    if (opts.trials < 1) throw ValueError("run_decomposition: trials must be at least 1");
    if (opts.eval_points < 1)
        throw ValueError("run_decomposition: eval_points must be at least 1");
    if (!opts.analytic_noise && opts.label_draws < 1)
        throw ValueError("run_decomposition: label_draws must be at least 1");

    DataBundle bundle = prepare_bundle(cfg, cfg.seed);
    if (opts.eval_points > bundle.test.rows())
        throw ValueError("run_decomposition: eval_points exceeds the " +
                         std::to_string(bundle.test.rows()) + " test rows");
    Dataset eval = bundle.test.select(std::span<const Index>(
        iota_indices(opts.eval_points)));
    const Matrix& eval_x = eval.features();
    const Index points = eval.rows();

    // the same base model the pipeline would pseudo-label with
    TrainConfig base_cfg = cfg.learner;
    base_cfg.seed = mix_seed(cfg.seed, kStageBaseModel);
    LinearModel base = train(bundle.train, base_cfg);
    Dataset sampled = sample_unlabeled(bundle.unlabeled, cfg.rho, mix_seed(cfg.seed, kStageRhoDraw));
    Dataset semi_pool = build_new_training_set(bundle.train, pseudo_label(base, sampled));

    // mislabel rates over the whole unlabeled pool: same expectation as over
    // the rho-draw, with less sampling error
    DecompositionRun out;
    out.pseudo_noise = pseudo_noise_discrimination(
        bundle.unlabeled_truth, predict(base, bundle.unlabeled), bundle.unlabeled.protected_attr());

    TrainConfig sl_cfg = cfg.learner;
    sl_cfg.seed = mix_seed(cfg.seed, kStageTrialSl);
    IntMatrix votes_sl = run_bootstrap_trials(bundle.train, eval_x, sl_cfg, opts.trials,
                                              mix_seed(cfg.seed, kStageBootSl), workers);
    TrainConfig ssl_cfg = cfg.learner;
    ssl_cfg.seed = mix_seed(cfg.seed, kStageTrialSsl);
    IntMatrix votes_ssl = run_bootstrap_trials(semi_pool, eval_x, ssl_cfg, opts.trials,
                                               mix_seed(cfg.seed, kStageBootSsl), workers);
    MainPrediction main_sl = main_prediction(votes_sl);
    MainPrediction main_ssl = main_prediction(votes_ssl);

    // Reference labels and label noise. With a generative oracle the
    // reference is the optimal label and noise comes from the posterior;
    // without one each pool's modal prediction serves as its own reference,
    // pinning bias and noise to zero so only the dispersion is reported.
    IntVector y_star_sl(points), y_star_ssl(points);
    std::vector<IntVector> draws(static_cast<std::size_t>(points));
    Vector posterior(points);
    if (bundle.oracle) {
        for (Index i = 0; i < points; ++i) {
            Vector2 x = eval_x.row(i).head<2>();
            y_star_sl[i] = bayes_optimal_label(x, *bundle.oracle);
            posterior[i] = positive_posterior(x, *bundle.oracle);
        }
        y_star_ssl = y_star_sl;
        RandomEngine rng(mix_seed(cfg.seed, kStageLabelDraws));
        for (Index i = 0; i < points; ++i) {
            auto& d = draws[static_cast<std::size_t>(i)];
            if (opts.analytic_noise) {
                d = IntVector::Constant(1, y_star_sl[i]);  // placeholder; noise is overwritten
            } else {
                d.resize(opts.label_draws);
                std::bernoulli_distribution coin(posterior[i]);
                for (int r = 0; r < opts.label_draws; ++r) d[r] = coin(rng) ? 1 : 0;
            }
        }
    } else {
        y_star_sl = main_sl.y_m;
        y_star_ssl = main_ssl.y_m;
    }

    auto decompose_pool = [&](const IntMatrix& votes, const MainPrediction& main,
                              const IntVector& y_star) {
        std::vector<PointDecomposition> parts;
        parts.reserve(static_cast<std::size_t>(points));
        for (Index i = 0; i < points; ++i) {
            IntVector trial_preds = votes.col(i);
            IntVector point_draws = bundle.oracle ? draws[static_cast<std::size_t>(i)]
                                                  : IntVector::Constant(1, y_star[i]);
            PointDecomposition part =
                decompose_point(y_star[i], main.y_m[i], trial_preds, point_draws);
            if (bundle.oracle && opts.analytic_noise)
                part.noise = std::min(posterior[i], 1.0 - posterior[i]);
            parts.push_back(part);
        }
        return group_decomposition(eval.protected_attr(), parts, opts.trials);
    };
    out.supervised = decompose_pool(votes_sl, main_sl, y_star_sl);
    out.semi_supervised = decompose_pool(votes_ssl, main_ssl, y_star_ssl);
    out.theorem = check_theorem1(out.supervised, out.semi_supervised, out.pseudo_noise.gap);
    return out;
}

namespace {

GaussianSpec spec_from_ini(const IniFile& ini) {
    GaussianSpec spec;
    if (ini.has("dataset", "n_total"))
        spec.n_total = to_index(ini.get("dataset", "n_total"), "dataset.n_total");
    auto read_vec2 = [&](const char* key, Vector2& target) {
        if (!ini.has("dataset", key)) return;
        auto values = to_scalar_list(ini.get("dataset", key), std::string("dataset.") + key);
        if (values.size() != 2)
            throw SchemaError(std::string("dataset.") + key + ": expected 2 numbers");
        target << values[0], values[1];
    };
    auto read_mat2 = [&](const char* key, Matrix2& target) {
        if (!ini.has("dataset", key)) return;
        auto values = to_scalar_list(ini.get("dataset", key), std::string("dataset.") + key);
        if (values.size() != 4)
            throw SchemaError(std::string("dataset.") + key +
                              ": expected 4 numbers (row-major 2x2)");
        target << values[0], values[1], values[2], values[3];
    };
    read_vec2("mean_pos", spec.mean_pos);
    read_mat2("cov_pos", spec.cov_pos);
    read_vec2("mean_neg", spec.mean_neg);
    read_mat2("cov_neg", spec.cov_neg);
    return spec;
}

}  // namespace

ExperimentConfig experiment_config_from_ini(const IniFile& ini) {
    ini.require_known_sections({"dataset", "method", "learner", "experiment"});
    ini.require_known_keys("method", {"method", "rho", "K", "n_s"});
    ini.require_known_keys("learner",
                           {"model", "learning_rate", "epochs", "batch_size", "l2"});
    ini.require_known_keys("experiment",
                           {"repeats", "split_rate", "seed", "run_id", "n_train"});

    ExperimentConfig cfg;
    std::string source = ini.get("dataset", "source");
    if (source == "synthetic") {
        ini.require_known_keys("dataset",
                               {"source", "n_total", "test_size", "gpp_keep", "test_kind",
                                "mean_pos", "cov_pos", "mean_neg", "cov_neg",
                                "protected_as_feature"});
        SyntheticSource synth;
        synth.spec = spec_from_ini(ini);
        if (ini.has("dataset", "test_size"))
            synth.test_size = to_index(ini.get("dataset", "test_size"), "dataset.test_size");
        if (ini.has("dataset", "gpp_keep"))
            synth.gpp_keep = to_index(ini.get("dataset", "gpp_keep"), "dataset.gpp_keep");
        std::string kind = ini.get_or("dataset", "test_kind", "fair");
        if (kind == "fair")
            synth.test_kind = TestKind::Fair;
        else if (kind == "skewed")
            synth.test_kind = TestKind::Skewed;
        else
            throw SchemaError("dataset.test_kind: expected fair or skewed, got \"" + kind + "\"");
        cfg.source = synth;
        cfg.protected_as_feature = true;
    } else if (source == "csv") {
        ini.require_known_keys(
            "dataset", {"source", "path", "label_column", "protected_column",
                        "protected_positive_value", "protected_positive_min",
                        "positive_label_value", "categorical_columns", "delimiter",
                        "protected_as_feature"});
        CsvSource csv;
        csv.path = ini.get("dataset", "path");
        csv.schema.label_column = ini.get("dataset", "label_column");
        csv.schema.protected_column = ini.get("dataset", "protected_column");
        if (ini.has("dataset", "protected_positive_value"))
            csv.schema.protected_positive_value = ini.get("dataset", "protected_positive_value");
        if (ini.has("dataset", "protected_positive_min"))
            csv.schema.protected_positive_min = to_scalar(
                ini.get("dataset", "protected_positive_min"), "dataset.protected_positive_min");
        csv.schema.positive_label_value = ini.get_or("dataset", "positive_label_value", "1");
        if (ini.has("dataset", "categorical_columns"))
            csv.schema.categorical_columns = split_list(ini.get("dataset", "categorical_columns"));
        if (ini.has("dataset", "delimiter")) {
            std::string d = ini.get("dataset", "delimiter");
            if (d.size() != 1)
                throw SchemaError("dataset.delimiter: expected a single character");
            csv.schema.delimiter = d[0];
        }
        cfg.source = csv;
        cfg.protected_as_feature = false;
    } else {
        throw SchemaError("dataset.source: expected synthetic or csv, got \"" + source + "\"");
    }
    if (ini.has("dataset", "protected_as_feature"))
        cfg.protected_as_feature =
            to_bool(ini.get("dataset", "protected_as_feature"), "dataset.protected_as_feature");

    if (ini.has("method", "method")) cfg.method = method_from_name(ini.get("method", "method"));
    if (ini.has("method", "rho")) cfg.rho = to_scalar(ini.get("method", "rho"), "method.rho");
    if (ini.has("method", "K")) cfg.K = to_int(ini.get("method", "K"), "method.K");
    if (ini.has("method", "n_s")) {
        std::string ns = ini.get("method", "n_s");
        if (ns != "auto") cfg.n_s = to_index(ns, "method.n_s");
    }

    if (ini.has("learner", "model"))
        cfg.learner.loss = loss_from_name(ini.get("learner", "model"));
    if (ini.has("learner", "learning_rate"))
        cfg.learner.learning_rate =
            to_scalar(ini.get("learner", "learning_rate"), "learner.learning_rate");
    if (ini.has("learner", "epochs"))
        cfg.learner.epochs = to_int(ini.get("learner", "epochs"), "learner.epochs");
    if (ini.has("learner", "batch_size"))
        cfg.learner.batch_size = to_int(ini.get("learner", "batch_size"), "learner.batch_size");
    if (ini.has("learner", "l2")) cfg.learner.l2 = to_scalar(ini.get("learner", "l2"), "learner.l2");

    if (ini.has("experiment", "repeats"))
        cfg.repeats = to_int(ini.get("experiment", "repeats"), "experiment.repeats");
    if (ini.has("experiment", "split_rate"))
        cfg.split_rate = to_scalar(ini.get("experiment", "split_rate"), "experiment.split_rate");
    if (ini.has("experiment", "seed"))
        cfg.seed = to_u64(ini.get("experiment", "seed"), "experiment.seed");
    if (ini.has("experiment", "run_id")) cfg.run_id = ini.get("experiment", "run_id");
    if (ini.has("experiment", "n_train"))
        cfg.n_train = to_index(ini.get("experiment", "n_train"), "experiment.n_train");

    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return experiment_config_from_ini(IniFile::parse(path));
}

}  // namespace fairsemi
