#pragma once

#include <cstddef>
#include <string>

#include "augbench/common.hpp"
#include "augbench/dataset.hpp"

namespace augbench {
namespace sampling {

enum class Technique {
    Smote,
    Adasyn,
    BorderlineSmote,
    KMeansSmote,
    SmoteTomek,
    SmoteEnn,
    RandomOversample,
    RandomUndersample,
    NearMiss,
};

struct SamplingSpec {
    Technique technique = Technique::Smote;
    std::size_t k_neighbors = 5;
    std::size_t enn_neighbors = 3;
    std::size_t kmeans_clusters = 8;
    int nearmiss_version = 1;  // 1, 2 or 3
};

// Interpolation primitive shared by the SMOTE family:
// result = x + lambda * (neighbor - x).
std::vector<double> interpolate_point(std::span<const double> x,
                                      std::span<const double> neighbor, double lambda);

// SMOTE: raises the minority count to the majority count with synthetic rows
// interpolated between each seed point and one of its k nearest minority
// neighbors (Euclidean, ties by lower row index). Original rows are kept
// verbatim, synthetics appended. Errors when minority size <= k.
TabularDataset smote(const TabularDataset& train, std::size_t k, const SeedStream& stream);

// ADASYN: per-point synthetic quota proportional to the fraction of majority
// points among its k nearest all-class neighbors, apportioned by largest
// remainder. Errors when every minority point has a pure-minority
// neighborhood ("classes fully separated").
TabularDataset adasyn(const TabularDataset& train, std::size_t k, const SeedStream& stream);

// Borderline variant: only "danger" minority points (more than k/2 but not
// all of their k nearest all-class neighbors are majority) seed
// interpolation. With no danger points the input is returned unchanged and
// *no_danger (if given) is set.
TabularDataset borderline_smote(const TabularDataset& train, std::size_t k,
                                const SeedStream& stream, bool* no_danger = nullptr);

// SMOTE constrained to k-means clusters whose minority fraction exceeds 0.5,
// with quotas proportional to within-cluster minority sparsity. Errors when
// no cluster is eligible.
TabularDataset kmeans_smote(const TabularDataset& train, std::size_t k, std::size_t clusters,
                            const SeedStream& stream);

// Edited-nearest-neighbour cleaning: removes every row whose label disagrees
// with the majority label of its enn_k nearest neighbors (self excluded);
// exact ties keep the row. Errors if the result would be empty or
// single-class.
TabularDataset enn_filter(const TabularDataset& data, std::size_t enn_k);

// Removes the majority-class member of every Tomek link (cross-class pair of
// mutual 1-nearest neighbors). No links means no change.
TabularDataset tomek_filter(const TabularDataset& data);

TabularDataset smote_enn(const TabularDataset& train, const SamplingSpec& spec,
                         const SeedStream& stream);
TabularDataset smote_tomek(const TabularDataset& train, const SamplingSpec& spec,
                           const SeedStream& stream);

enum class ResampleMode { Over, Under };

// Over: duplicate uniformly drawn minority rows until class counts are equal.
// Under: keep a uniform subsample of majority rows of minority size.
TabularDataset random_resample(const TabularDataset& train, ResampleMode mode,
                               const SeedStream& stream);

// Majority undersampling by distance ranking. v1 keeps majority rows with the
// smallest mean distance to their k nearest minority points, v2 to their k
// farthest minority points, v3 retains a neighborhood-candidate subset first.
TabularDataset nearmiss(const TabularDataset& train, int version, std::size_t k);

// Dispatch by spec.
TabularDataset apply_sampling(const TabularDataset& train, const SamplingSpec& spec,
                              const SeedStream& stream);

}  // namespace sampling
}  // namespace augbench
