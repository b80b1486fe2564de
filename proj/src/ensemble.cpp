#include "fairsemi/ensemble.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"
#include "fairsemi/parallel.hpp"

#include <fstream>
#include <string>

namespace fairsemi {

EnsembleModel train_ensemble(const std::vector<Dataset>& fair_sets, const TrainConfig& config,
                             int workers) {
    if (fair_sets.empty()) {
        throw DataError("no datasets to train an ensemble on");
    }
    EnsembleModel model;
    model.members.resize(fair_sets.size());
    parallel_for(fair_sets.size(), workers, [&](std::size_t k) {
        TrainConfig member_cfg = config;
        member_cfg.seed = config.seed + static_cast<std::uint64_t>(k);
        try {
            model.members[k] = train(fair_sets[k], member_cfg);
        } catch (const TrainingError& e) {
            throw TrainingError("member " + std::to_string(k) + ": " + e.what());
        }
    });
    for (std::size_t k = 1; k < model.members.size(); ++k) {
        if (model.members[k].weights.size() != model.members[0].weights.size()) {
            throw ShapeError("member " + std::to_string(k) + " trained with " +
                             std::to_string(model.members[k].weights.size()) +
                             " features, member 0 with " +
                             std::to_string(model.members[0].weights.size()));
        }
    }
    return model;
}

int majority_vote(const IntVector& votes, int tie_label) {
    if (votes.size() == 0) {
        throw DataError("empty vote vector");
    }
    Index ones = 0;
    for (Index i = 0; i < votes.size(); ++i) {
        if (votes[i] != 0 && votes[i] != 1) {
            throw ValueError("votes must be 0 or 1, got " + std::to_string(votes[i]));
        }
        ones += votes[i];
    }
    const Index zeros = votes.size() - ones;
    if (ones > zeros) {
        return 1;
    }
    if (zeros > ones) {
        return 0;
    }
    return tie_label;
}

IntVector ensemble_predict(const EnsembleModel& model, const Matrix& features) {
    if (model.members.empty()) {
        throw DataError("ensemble has no members");
    }
    const Index k = static_cast<Index>(model.members.size());
    IntVector ones = IntVector::Zero(features.rows());
    for (const LinearModel& member : model.members) {
        ones += predict(member, features);
    }
    IntVector out(features.rows());
    for (Index i = 0; i < features.rows(); ++i) {
        const Index zeros = k - ones[i];
        out[i] = ones[i] > zeros ? 1 : (zeros > ones[i] ? 0 : model.tie_label);
    }
    return out;
}

IntVector ensemble_predict(const EnsembleModel& model, const Dataset& data) {
    return ensemble_predict(model, data.features());
}

void save_ensemble(const EnsembleModel& model, const std::filesystem::path& dir) {
    if (model.members.empty()) {
        throw DataError("ensemble has no members");
    }
    std::filesystem::create_directories(dir);
    std::ofstream manifest(dir / "ensemble.txt", std::ios::binary);
    if (!manifest) {
        throw SchemaError("cannot write '" + (dir / "ensemble.txt").string() + "'");
    }
    manifest << "linear-ensemble 1\n" << model.members.size() << ' ' << model.tie_label << '\n';
    for (std::size_t k = 0; k < model.members.size(); ++k) {
        const std::string name = "member_" + std::to_string(k) + ".txt";
        manifest << name << '\n';
        save_model(model.members[k], dir / name);
    }
    if (!manifest) {
        throw SchemaError("write to '" + (dir / "ensemble.txt").string() + "' failed");
    }
}

EnsembleModel load_ensemble(const std::filesystem::path& dir) {
    std::ifstream manifest(dir / "ensemble.txt", std::ios::binary);
    if (!manifest) {
        throw SchemaError("cannot open '" + (dir / "ensemble.txt").string() + "'");
    }
    std::string magic;
    int version = 0;
    std::size_t count = 0;
    EnsembleModel model;
    manifest >> magic >> version >> count >> model.tie_label;
    if (!manifest || magic != "linear-ensemble" || version != 1) {
        throw SchemaError("'" + (dir / "ensemble.txt").string() +
                          "' is not an ensemble manifest");
    }
    if (count == 0 || (model.tie_label != 0 && model.tie_label != 1)) {
        throw SchemaError("'" + (dir / "ensemble.txt").string() + "' has invalid fields");
    }
    model.members.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::string name;
        manifest >> name;
        if (!manifest) {
            throw SchemaError("manifest lists fewer members than declared");
        }
        model.members.push_back(load_model(dir / name));
        if (model.members.back().weights.size() != model.members[0].weights.size()) {
            throw SchemaError("member files disagree on feature dimension");
        }
    }
    return model;
}

}  // namespace fairsemi
