#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "augbench/common.hpp"

namespace augbench {
namespace stats {

// One fold-level AUC observation with its provenance tags.
struct AucSample {
    double auc = 0.0;
    std::size_t fold_id = 0;
    std::uint64_t seed = 0;
    std::string technique;
    std::string model;
};

// Mann-Whitney AUC with midrank tie handling, O(n log n). Errors on
// single-class labels ("AUC undefined") or length mismatch.
double auc(std::span<const double> scores, std::span<const int> labels);

// B bootstrap means of the AUC values resampled with replacement.
// Per-replicate derived seeds keep the result schedule-independent.
std::vector<double> bootstrap_auc_distribution(std::span<const AucSample> samples,
                                               std::size_t B, const SeedStream& stream);

struct ComparisonResult {
    double z = 0.0;
    double p_value = 1.0;
    bool p_adjusted_significant = false;  // set by the BH pass
    bool degenerate = false;              // zero combined variance, unequal means
    double baseline_mean = 0.0;
    double candidate_mean = 0.0;
};

// z = (mean(cand) - mean(base)) / sqrt(var(cand) + var(base)) with sample
// variances; two-sided p from the standard normal. Zero combined variance
// with unequal means yields p = 0 flagged degenerate; with equal means,
// z = 0 and p = 1.
ComparisonResult compare_distributions(std::span<const double> base,
                                       std::span<const double> cand);

// Step-up false-discovery-rate procedure; rejections in original order.
std::vector<bool> benjamini_hochberg(std::span<const double> p_values, double q);

// Structural-component variance of the AUC estimate from placement values:
// var = S10/n1 + S01/n0 (sample variances of the placements).
double delong_variance(std::span<const double> scores, std::span<const int> labels);

// Monte-Carlo power of detecting an AUC difference: per replicate, two
// independent equal-variance binormal score sets at a 64/36 class ratio are
// simulated at the two AUC levels and compared two-sided at alpha = 0.05 with
// z = (auc_cand - auc_base) / sqrt(var_cand + var_base) from delong_variance.
double power_analysis(double delta_auc, std::size_t n, double base_auc, std::size_t reps,
                      const SeedStream& stream);

}  // namespace stats
}  // namespace augbench
