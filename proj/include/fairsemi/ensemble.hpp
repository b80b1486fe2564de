#pragma once

#include "fairsemi/learners.hpp"
#include "fairsemi/types.hpp"

#include <filesystem>
#include <vector>

namespace fairsemi {

class Dataset;

struct EnsembleModel {
    std::vector<LinearModel> members;
    int tie_label = 0;
};

/// Trains one member per dataset, member k with sub-seed config.seed + k.
/// Members may train concurrently (workers > 1); the result is identical
/// either way. Training failures carry the offending member index.
EnsembleModel train_ensemble(const std::vector<Dataset>& fair_sets, const TrainConfig& config,
                             int workers = 1);

/// The label with strictly more votes; an exact tie falls to tie_label.
/// Throws DataError on an empty vote vector, ValueError on non-binary votes.
int majority_vote(const IntVector& votes, int tie_label = 0);

/// Row-wise majority vote over member predictions.
IntVector ensemble_predict(const EnsembleModel& model, const Matrix& features);
IntVector ensemble_predict(const EnsembleModel& model, const Dataset& data);

/// Directory layout: manifest "ensemble.txt" plus one member_<k>.txt per
/// member; round-trips exactly.
void save_ensemble(const EnsembleModel& model, const std::filesystem::path& dir);
EnsembleModel load_ensemble(const std::filesystem::path& dir);

}  // namespace fairsemi
