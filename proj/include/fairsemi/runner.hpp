#pragma once

#include "fairsemi/dataset.hpp"
#include "fairsemi/decompose.hpp"
#include "fairsemi/learners.hpp"
#include "fairsemi/metrics.hpp"
#include "fairsemi/svg_plot.hpp"
#include "fairsemi/synthetic.hpp"
#include "fairsemi/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fairsemi {

class IniFile;

/// The four training schemes under comparison: train on the original
/// labeled set (ORI), rebalance it uniformly (US) or by boundary distance
/// (PS) before training a single model, or run the full semi-supervised
/// pipeline (FS): pseudo-label a draw of the unlabeled pool, build K
/// group-balanced datasets, train an ensemble, and predict by majority vote.
enum class Method { ORI, US, PS, FS };

const char* method_name(Method method);
Method method_from_name(const std::string& name);

/// Which held-out slice run_once evaluates on for synthetic sources: a test
/// set carved from the pool before any thinning (fair), or one carved from
/// the thinned data itself (skewed the same way the training data is).
enum class TestKind { Fair, Skewed };

struct SyntheticSource {
    GaussianSpec spec;
    Index test_size = 2000;            // rows per held-out test set
    std::optional<Index> gpp_keep;     // thin the (protected=1, label=1)
                                       // cell to this size; absent = none
    TestKind test_kind = TestKind::Fair;
};

struct CsvSource {
    std::filesystem::path path;
    IngestSchema schema;
};

struct ExperimentConfig {
    std::variant<SyntheticSource, CsvSource> source;
    Method method = Method::FS;
    TrainConfig learner;
    Scalar split_rate = 0.8;          // labeled train/test split (CSV sources)
    Scalar rho = 1.0;                 // fraction of the unlabeled pool to use
    int K = 200;                      // ensemble size
    std::optional<Index> n_s;         // rows per group cell; absent = the
                                      // smallest cell of the training pool
    int repeats = 50;
    std::optional<Index> n_train;     // cap on labeled training rows
    std::uint64_t seed = 42;
    bool protected_as_feature = true; // append the protected attribute as a
                                      // feature column (CSV default: false)
    std::string run_id = "run";
};

/// One prepared train/test/unlabeled partition.
///
/// Synthetic sources: generate the pool, carve `test_size` rows for the fair
/// test set, optionally thin G_PP of the remainder, carve `test_size` rows
/// of the (possibly thinned) data for the skewed test set, and halve what is
/// left into labeled training data and an unlabeled pool. CSV sources: halve
/// the file into a labeled part and an unlabeled pool, then split the
/// labeled part train/test at split_rate. True labels of unlabeled rows are
/// retained separately for pseudo-label audits.
struct DataBundle {
    Dataset train;
    Dataset test;
    Dataset unlabeled;        // labels stripped
    IntVector unlabeled_truth;
    std::optional<GaussianSpec> oracle;  // synthetic sources only
};

DataBundle prepare_bundle(const ExperimentConfig& cfg, std::uint64_t seed);

/// Order-sensitive content hash of features, protected attribute, and
/// labels; used to assert that two runs saw the same test rows.
std::uint64_t dataset_fingerprint(const Dataset& data);

struct RunResult {
    FairnessReport report;
    std::uint64_t test_fingerprint = 0;
    Index resolved_n_s = 0;  // per-cell sample size actually used (FS only)
};

/// One end-to-end run of cfg.method at the given seed, evaluated on the
/// bundle's test rows. `workers` bounds concurrent ensemble training.
RunResult run_once(const ExperimentConfig& cfg, std::uint64_t seed, int workers = 1);

struct AggregateResult {
    Scalar acc_mean = 0;
    Scalar acc_std = 0;  // population standard deviation over repeats
    Scalar dis_mean = 0;
    Scalar dis_std = 0;
    std::array<Scalar, 4> mean_positives{};  // per-cell predicted-positive
                                             // counts, canonical group order
    std::vector<RunResult> runs;             // one entry per repeat, in order
};

/// cfg.repeats independent runs at seeds cfg.seed + r. A failed repeat
/// aborts with its index in the message.
AggregateResult run_repeated(const ExperimentConfig& cfg, int workers = 1);

enum class SweepAxis { Rho, EnsembleSize, SampleSize, TrainSize };

const char* axis_name(SweepAxis axis);              // rho | K | ns | n
SweepAxis axis_from_name(const std::string& name);

/// cfg with one axis value substituted. Throws ValueError when the value is
/// not representable on the axis (e.g. fractional K).
ExperimentConfig apply_axis(const ExperimentConfig& cfg, SweepAxis axis, Scalar value);

struct SweepRow {
    Scalar axis_value = 0;
    bool failed = false;
    std::string error;  // failure message when failed
    AggregateResult agg;
};

struct SweepTable {
    SweepAxis axis = SweepAxis::Rho;
    std::vector<SweepRow> rows;
};

/// run_repeated per value, in the given order. A failing value marks its
/// row failed and the sweep continues.
SweepTable sweep(const ExperimentConfig& cfg, SweepAxis axis,
                 const std::vector<Scalar>& values, int workers = 1);

struct CompareTable {
    std::vector<Method> methods;
    std::vector<AggregateResult> rows;  // parallel to methods
};

/// run_repeated once per method with everything else held fixed. All
/// methods see identical test partitions; a fingerprint mismatch aborts.
CompareTable compare_methods(const ExperimentConfig& cfg, const std::vector<Method>& methods,
                             int workers = 1);

/// One line of report.csv.
struct ReportRow {
    std::string run_id;
    Method method = Method::ORI;
    LossKind model = LossKind::Logistic;
    Scalar rho = 0;
    int K = 0;
    Index n_s = 0;  // resolved per-cell size (FS), 0 for single-model methods
    Scalar acc_mean = 0;
    Scalar acc_std = 0;
    Scalar dis_mean = 0;
    Scalar dis_std = 0;
    std::array<Scalar, 4> mean_positives{};
};

ReportRow make_report_row(const ExperimentConfig& cfg, const AggregateResult& agg);

/// Header: run_id,method,model,rho,K,n_s,acc_mean,acc_std,dis_mean,dis_std,
/// gpp,gup,gpn,gun
void write_report_csv(const std::vector<ReportRow>& rows, const std::filesystem::path& path);

/// Columns: axis_value,acc_mean,acc_std,dis_mean,dis_std,failed
void write_sweep_csv(const SweepTable& table, const std::filesystem::path& path);

/// Line chart of mean accuracy and mean discrimination against the axis.
PlotSpec sweep_plot(const SweepTable& table, const std::string& title);

struct DecompositionOptions {
    int trials = 50;       // bootstrap models per pool
    Index eval_points = 50;
    int label_draws = 1;   // label redraws per point for the noise estimate
    bool analytic_noise = false;  // use min(p, 1-p) instead of draws
};

/// Loss decomposition of the supervised pool (the labeled training set)
/// against the semi-supervised pool (training set plus pseudo-labeled
/// rows), plus pseudo-label mislabeling rates measured over the whole
/// unlabeled pool. With a synthetic source the reference label and the
/// noise come from the generating distribution; CSV sources fall back to
/// each pool's modal prediction as the reference, which pins bias and noise
/// to zero and leaves the variance (prediction dispersion) informative.
struct DecompositionRun {
    DecompositionReport supervised;
    DecompositionReport semi_supervised;
    PseudoNoiseReport pseudo_noise;
    Theorem1Check theorem;
};

DecompositionRun run_decomposition(const ExperimentConfig& cfg, const DecompositionOptions& opts,
                                   int workers = 1);

/// Throws ValueError on out-of-range settings (rho, K, repeats, rates,
/// learner hyperparameters). Every run entry point calls this first.
void validate(const ExperimentConfig& cfg);

/// Reads the [dataset] / [method] / [learner] / [experiment] sections.
/// Unknown sections or keys raise SchemaError.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
ExperimentConfig experiment_config_from_ini(const IniFile& ini);

}  // namespace fairsemi
