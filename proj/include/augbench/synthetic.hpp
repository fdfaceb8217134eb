#pragma once

#include <cstdint>

#include "augbench/common.hpp"
#include "augbench/dataset.hpp"

namespace augbench {

// Bundled benchmark generator: two Gaussian classes with identity covariance,
// class imbalance and pseudo-school groups. The class-mean separation is
// placed on the first feature and calibrated from the requested optimal AUC,
// so the analytic ceiling is known exactly.
struct SyntheticSpec {
    std::size_t rows = 1709;
    std::size_t features = 6;
    double bayes_auc = 0.69;     // analytic optimum of the ideal classifier
    double positive_ratio = 0.64;
    std::size_t n_groups = 4;
};

// Mean separation that yields the requested optimal AUC for equal-covariance
// Gaussian classes: delta = sqrt(2) * Phi^-1(auc).
double separation_for_bayes_auc(double auc);
double bayes_auc_for_separation(double delta);

TabularDataset make_synthetic(const SyntheticSpec& spec, const SeedStream& stream);

}  // namespace augbench
