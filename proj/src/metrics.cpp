#include "fairsemi/metrics.hpp"

#include "fairsemi/dataset.hpp"
#include "fairsemi/errors.hpp"

#include <cmath>

namespace fairsemi {

namespace {

void check_pair(const IntVector& a, const IntVector& b, const char* what) {
    if (a.size() != b.size()) {
        throw ShapeError(std::string(what) + ": lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " differ");
    }
    if (a.size() == 0) {
        throw DataError(std::string(what) + ": empty input");
    }
}

}  // namespace

Scalar accuracy(const IntVector& predicted, const IntVector& actual) {
    check_pair(predicted, actual, "accuracy");
    Index hits = 0;
    for (Index i = 0; i < predicted.size(); ++i) {
        hits += predicted[i] == actual[i] ? 1 : 0;
    }
    return static_cast<Scalar>(hits) / static_cast<Scalar>(predicted.size());
}

std::pair<Scalar, Scalar> demographic_parity(const IntVector& predicted,
                                             const IntVector& protected_attr) {
    check_pair(predicted, protected_attr, "demographic_parity");
    Index n0 = 0, n1 = 0, pos0 = 0, pos1 = 0;
    for (Index i = 0; i < predicted.size(); ++i) {
        if (protected_attr[i] == 1) {
            ++n1;
            pos1 += predicted[i] == 1 ? 1 : 0;
        } else {
            ++n0;
            pos0 += predicted[i] == 1 ? 1 : 0;
        }
    }
    if (n0 == 0 || n1 == 0) {
        throw UndefinedRateError(std::string("protected group ") + (n0 == 0 ? "0" : "1") +
                                 " is absent; positive rate undefined");
    }
    return {static_cast<Scalar>(pos0) / static_cast<Scalar>(n0),
            static_cast<Scalar>(pos1) / static_cast<Scalar>(n1)};
}

Scalar discrimination_level(const IntVector& predicted, const IntVector& protected_attr) {
    const auto [gamma0, gamma1] = demographic_parity(predicted, protected_attr);
    return std::abs(gamma0 - gamma1);
}

FairnessReport evaluate(const IntVector& predicted, const Dataset& test) {
    FairnessReport report;
    report.accuracy = accuracy(predicted, test.labels());
    const auto [gamma0, gamma1] = demographic_parity(predicted, test.protected_attr());
    report.gamma0 = gamma0;
    report.gamma1 = gamma1;
    report.discrimination = std::abs(gamma0 - gamma1);
    for (Index i = 0; i < predicted.size(); ++i) {
        const auto g =
            static_cast<std::size_t>(group_of(test.protected_attr()[i], test.labels()[i]));
        report.counts_by_group[g] += 1;
        report.positives_by_group[g] += predicted[i] == 1 ? 1 : 0;
    }
    return report;
}

}  // namespace fairsemi
