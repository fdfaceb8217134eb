#pragma once

#include <string>
#include <vector>

#include "augbench/common.hpp"
#include "augbench/dataset.hpp"

namespace augbench {
namespace perturb {

enum class TransformKind {
    PolynomialFeatures,
    FeatureInteraction,
    Pca,
    Standardization,
    MinMaxScaling,
    RobustScaling,
    LogTransform,
    PowerTransform,
    NoiseAddition,
};

// Statistics captured on the training split; applying the transform never
// refits. Only the fields relevant to `kind` are populated.
struct FittedTransform {
    TransformKind kind;
    std::size_t input_cols = 0;

    std::vector<double> offsets;  // means / mins / medians / log shifts
    std::vector<double> scales;   // sds / ranges / iqrs (1.0 where guarded)
    std::vector<double> lambdas;  // Yeo-Johnson exponents per column

    // PCA: row-major rotation (input_cols x input_cols), columns = components
    std::vector<double> rotation;

    std::vector<double> noise_sigmas;  // per-column noise scale (train only)
    std::uint64_t noise_seed = 0;

    // constant-column guards and similar notices
    std::vector<std::string> warnings;

    std::vector<std::string> output_names;
};

struct PerturbOptions {
    double noise_sigma_multiplier = 0.05;  // sigma = multiplier * column sd
};

// Fits on the training rows only and returns the transformed training set.
// Row count, labels and groups are never changed. NoiseAddition is the only
// kind that consumes randomness, and only at fit time; apply_transform adds
// no noise, so evaluation rows stay clean.
std::pair<FittedTransform, TabularDataset> fit_transform(TransformKind kind,
                                                         const TabularDataset& train,
                                                         const SeedStream& stream,
                                                         const PerturbOptions& opts = {});

// Applies the fitted parameters to new data (same column count required).
TabularDataset apply_transform(const FittedTransform& t, const TabularDataset& data);

// Yeo-Johnson power function; exposed for direct testing (lambda = 1 is the
// identity).
double yeo_johnson(double x, double lambda);

// Maximum-likelihood exponent over [-5, 5] by golden-section search,
// tolerance 1e-5.
double yeo_johnson_mle_lambda(std::span<const double> column);

}  // namespace perturb
}  // namespace augbench
