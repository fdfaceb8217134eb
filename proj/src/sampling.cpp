#include "augbench/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace augbench {
namespace sampling {

namespace {

// indices of the k nearest rows to `query` among `candidates` (self excluded
// when exclude_self matches a candidate); ties broken by lower row index
std::vector<std::size_t> k_nearest(const Matrix& m, std::span<const double> query,
                                   std::span<const std::size_t> candidates, std::size_t k,
                                   std::size_t exclude_self) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(candidates.size());
    for (std::size_t idx : candidates) {
        if (idx == exclude_self) continue;
        dist.emplace_back(squared_distance(query, m.row(idx)), idx);
    }
    const std::size_t take = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + take, dist.end());
    std::vector<std::size_t> out(take);
    for (std::size_t i = 0; i < take; ++i) out[i] = dist[i].second;
    return out;
}

constexpr std::size_t kNoExclude = static_cast<std::size_t>(-1);

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

void append_synthetic(TabularDataset& out, std::span<const double> row, int label,
                      const std::string& group) {
    out.features.append_row(row);
    out.labels.push_back(label);
    out.groups.push_back(group);
}

struct ClassSplit {
    int minority_label;
    std::vector<std::size_t> minority;
    std::vector<std::size_t> majority;
};

ClassSplit split_classes(const TabularDataset& train) {
    if (!train.both_classes_present())
        throw std::invalid_argument("sampling: both classes must be present");
    ClassSplit s;
    s.minority_label = train.minority_label();
    s.minority = train.indices_of_label(s.minority_label);
    s.majority = train.indices_of_label(1 - s.minority_label);
    return s;
}

// k nearest minority neighbors of every minority point
std::vector<std::vector<std::size_t>> minority_neighbor_table(const TabularDataset& train,
                                                              const ClassSplit& s,
                                                              std::size_t k) {
    if (s.minority.size() <= k)
        throw std::invalid_argument("too few minority samples for k=" + std::to_string(k));
    std::vector<std::vector<std::size_t>> table(s.minority.size());
    for (std::size_t i = 0; i < s.minority.size(); ++i)
        table[i] = k_nearest(train.features, train.features.row(s.minority[i]), s.minority, k,
                             s.minority[i]);
    return table;
}

}  // namespace

std::vector<double> interpolate_point(std::span<const double> x,
                                      std::span<const double> neighbor, double lambda) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + lambda * (neighbor[i] - x[i]);
    return out;
}

TabularDataset smote(const TabularDataset& train, std::size_t k, const SeedStream& stream) {
    const ClassSplit s = split_classes(train);
    const std::size_t deficit = s.majority.size() - std::min(s.majority.size(), s.minority.size());
    TabularDataset out = train;
    if (deficit == 0) return out;

    const auto neighbors = minority_neighbor_table(train, s, k);
    Rng rng = stream.rng();
    for (std::size_t j = 0; j < deficit; ++j) {
        const std::size_t seed_pos = j % s.minority.size();
        const std::size_t seed_row = s.minority[seed_pos];
        const auto& nn = neighbors[seed_pos];
        const std::size_t neighbor_row = nn[rng.uniform_index(nn.size())];
        const double lambda = rng.uniform();
        const auto synth = interpolate_point(train.features.row(seed_row),
                                             train.features.row(neighbor_row), lambda);
        append_synthetic(out, synth, s.minority_label, train.groups[seed_row]);
    }
    return out;
}

TabularDataset adasyn(const TabularDataset& train, std::size_t k, const SeedStream& stream) {
    const ClassSplit s = split_classes(train);
    if (s.majority.size() <= s.minority.size()) return train;
    const std::size_t deficit = s.majority.size() - s.minority.size();

    const auto all = all_indices(train.size());
    std::vector<double> density(s.minority.size(), 0.0);
    bool any_positive = false;
    for (std::size_t i = 0; i < s.minority.size(); ++i) {
        const auto nn =
            k_nearest(train.features, train.features.row(s.minority[i]), all, k, s.minority[i]);
        std::size_t majority_count = 0;
        for (std::size_t idx : nn)
            if (train.labels[idx] != s.minority_label) ++majority_count;
        density[i] = static_cast<double>(majority_count) / static_cast<double>(nn.size());
        if (density[i] > 0.0) any_positive = true;
    }
    if (!any_positive)
        throw std::invalid_argument("ADASYN undefined: classes fully separated");

    const auto quotas = largest_remainder_apportion(density, deficit);
    const auto neighbors = minority_neighbor_table(train, s, k);

    TabularDataset out = train;
    Rng rng = stream.rng();
    for (std::size_t i = 0; i < s.minority.size(); ++i) {
        for (std::size_t q = 0; q < quotas[i]; ++q) {
            const auto& nn = neighbors[i];
            const std::size_t neighbor_row = nn[rng.uniform_index(nn.size())];
            const double lambda = rng.uniform();
            const auto synth = interpolate_point(train.features.row(s.minority[i]),
                                                 train.features.row(neighbor_row), lambda);
            append_synthetic(out, synth, s.minority_label, train.groups[s.minority[i]]);
        }
    }
    return out;
}

TabularDataset borderline_smote(const TabularDataset& train, std::size_t k,
                                const SeedStream& stream, bool* no_danger) {
    if (no_danger) *no_danger = false;
    const ClassSplit s = split_classes(train);
    if (s.majority.size() <= s.minority.size()) return train;
    const std::size_t deficit = s.majority.size() - s.minority.size();

    // danger: more than half but not all of the k all-class neighbors are majority
    const auto all = all_indices(train.size());
    std::vector<std::size_t> danger;  // positions within s.minority
    for (std::size_t i = 0; i < s.minority.size(); ++i) {
        const auto nn =
            k_nearest(train.features, train.features.row(s.minority[i]), all, k, s.minority[i]);
        std::size_t majority_count = 0;
        for (std::size_t idx : nn)
            if (train.labels[idx] != s.minority_label) ++majority_count;
        if (2 * majority_count > nn.size() && majority_count < nn.size()) danger.push_back(i);
    }
    if (danger.empty()) {
        if (no_danger) *no_danger = true;
        return train;
    }

    const auto neighbors = minority_neighbor_table(train, s, k);
    TabularDataset out = train;
    Rng rng = stream.rng();
    for (std::size_t j = 0; j < deficit; ++j) {
        const std::size_t seed_pos = danger[j % danger.size()];
        const std::size_t seed_row = s.minority[seed_pos];
        const auto& nn = neighbors[seed_pos];
        const std::size_t neighbor_row = nn[rng.uniform_index(nn.size())];
        const double lambda = rng.uniform();
        const auto synth = interpolate_point(train.features.row(seed_row),
                                             train.features.row(neighbor_row), lambda);
        append_synthetic(out, synth, s.minority_label, train.groups[seed_row]);
    }
    return out;
}

namespace {

struct KMeansResult {
    std::vector<std::size_t> assignment;
    std::size_t clusters;
};

KMeansResult kmeans(const Matrix& m, std::size_t k, Rng& rng) {
    const std::size_t n = m.rows();
    k = std::min(k, n);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(k);

    // k-means++ seeding
    std::vector<double> d2(n, std::numeric_limits<double>::max());
    {
        const std::size_t first = rng.uniform_index(n);
        centroids.emplace_back(m.row(first).begin(), m.row(first).end());
    }
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], squared_distance(m.row(i), centroids.back()));
            total += d2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (std::size_t i = 0; i < n; ++i) {
                target -= d2[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = rng.uniform_index(n);
        }
        centroids.emplace_back(m.row(pick).begin(), m.row(pick).end());
    }

    std::vector<std::size_t> assignment(n, 0);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (std::size_t c = 0; c < centroids.size(); ++c) {
                const double d = squared_distance(m.row(i), centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            std::vector<double> mean(m.cols(), 0.0);
            std::size_t count = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (assignment[i] == c) {
                    for (std::size_t j = 0; j < m.cols(); ++j) mean[j] += m(i, j);
                    ++count;
                }
            if (count == 0) continue;  // empty cluster keeps its centroid
            for (double& v : mean) v /= static_cast<double>(count);
            centroids[c] = std::move(mean);
        }
    }
    return {std::move(assignment), centroids.size()};
}

}  // namespace

TabularDataset kmeans_smote(const TabularDataset& train, std::size_t k, std::size_t clusters,
                            const SeedStream& stream) {
    if (clusters == 0) throw std::invalid_argument("kmeans_smote: clusters must be >= 1");
    const ClassSplit s = split_classes(train);
    if (s.majority.size() <= s.minority.size()) return train;
    const std::size_t deficit = s.majority.size() - s.minority.size();

    Rng rng = stream.rng();
    const auto km = kmeans(train.features, clusters, rng);

    // eligible: minority fraction strictly above one half
    std::vector<std::vector<std::size_t>> cluster_minority(km.clusters);
    std::vector<std::size_t> cluster_size(km.clusters, 0);
    for (std::size_t i = 0; i < train.size(); ++i) {
        ++cluster_size[km.assignment[i]];
        if (train.labels[i] == s.minority_label) cluster_minority[km.assignment[i]].push_back(i);
    }
    std::vector<std::size_t> eligible;
    for (std::size_t c = 0; c < km.clusters; ++c)
        if (cluster_size[c] > 0 &&
            2 * cluster_minority[c].size() > cluster_size[c])
            eligible.push_back(c);
    if (eligible.empty()) throw std::invalid_argument("no minority-dense cluster");

    // quota per eligible cluster proportional to minority sparsity
    std::vector<double> sparsity(eligible.size(), 0.0);
    bool any_positive = false;
    for (std::size_t e = 0; e < eligible.size(); ++e) {
        const auto& rows = cluster_minority[eligible[e]];
        if (rows.size() >= 2) {
            double total = 0.0;
            std::size_t pairs = 0;
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = a + 1; b < rows.size(); ++b) {
                    total += std::sqrt(
                        squared_distance(train.features.row(rows[a]), train.features.row(rows[b])));
                    ++pairs;
                }
            sparsity[e] = total / static_cast<double>(pairs);
        }
        if (sparsity[e] > 0.0) any_positive = true;
    }
    if (!any_positive) std::fill(sparsity.begin(), sparsity.end(), 1.0);
    const auto quotas = largest_remainder_apportion(sparsity, deficit);

    TabularDataset out = train;
    for (std::size_t e = 0; e < eligible.size(); ++e) {
        const auto& rows = cluster_minority[eligible[e]];
        const std::size_t k_local = std::min(k, rows.size() > 0 ? rows.size() - 1 : 0);
        for (std::size_t q = 0; q < quotas[e]; ++q) {
            const std::size_t seed_row = rows[q % rows.size()];
            std::vector<double> synth;
            if (k_local == 0) {
                synth.assign(train.features.row(seed_row).begin(),
                             train.features.row(seed_row).end());
            } else {
                const auto nn =
                    k_nearest(train.features, train.features.row(seed_row), rows, k_local, seed_row);
                const std::size_t neighbor_row = nn[rng.uniform_index(nn.size())];
                synth = interpolate_point(train.features.row(seed_row),
                                          train.features.row(neighbor_row), rng.uniform());
            }
            append_synthetic(out, synth, s.minority_label, train.groups[seed_row]);
        }
    }
    return out;
}

TabularDataset enn_filter(const TabularDataset& data, std::size_t enn_k) {
    if (enn_k < 1) throw std::invalid_argument("enn_filter: enn_k must be >= 1");
    if (data.size() <= enn_k)
        throw std::invalid_argument("enn_filter: need more than enn_k rows");

    const auto all = all_indices(data.size());
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto nn = k_nearest(data.features, data.features.row(i), all, enn_k, i);
        std::size_t agree = 0;
        for (std::size_t idx : nn)
            if (data.labels[idx] == data.labels[i]) ++agree;
        // removed only when a strict majority of neighbors disagrees
        if (2 * (nn.size() - agree) <= nn.size()) keep.push_back(i);
    }
    TabularDataset out = data.select(keep);
    if (out.size() == 0 || !out.both_classes_present())
        throw std::runtime_error("ENN removed a class");
    return out;
}

TabularDataset tomek_filter(const TabularDataset& data) {
    if (!data.both_classes_present())
        throw std::invalid_argument("tomek_filter: both classes must be present");
    const std::size_t n = data.size();
    const auto all = all_indices(n);
    std::vector<std::size_t> nn(n);
    for (std::size_t i = 0; i < n; ++i)
        nn[i] = k_nearest(data.features, data.features.row(i), all, 1, i)[0];

    const int majority = 1 - data.minority_label();
    std::vector<bool> remove(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = nn[i];
        if (i < j && nn[j] == i && data.labels[i] != data.labels[j]) {
            if (data.labels[i] == majority) remove[i] = true;
            if (data.labels[j] == majority) remove[j] = true;
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; ++i)
        if (!remove[i]) keep.push_back(i);
    return data.select(keep);
}

TabularDataset smote_enn(const TabularDataset& train, const SamplingSpec& spec,
                         const SeedStream& stream) {
    return enn_filter(smote(train, spec.k_neighbors, stream), spec.enn_neighbors);
}

TabularDataset smote_tomek(const TabularDataset& train, const SamplingSpec& spec,
                           const SeedStream& stream) {
    return tomek_filter(smote(train, spec.k_neighbors, stream));
}

TabularDataset random_resample(const TabularDataset& train, ResampleMode mode,
                               const SeedStream& stream) {
    const ClassSplit s = split_classes(train);
    Rng rng = stream.rng();
    if (mode == ResampleMode::Over) {
        TabularDataset out = train;
        const std::size_t deficit = s.majority.size() - s.minority.size();
        for (std::size_t j = 0; j < deficit; ++j) {
            const std::size_t row = s.minority[rng.uniform_index(s.minority.size())];
            append_synthetic(out, train.features.row(row), s.minority_label, train.groups[row]);
        }
        return out;
    }
    // under: uniform subsample of the majority, original order kept
    std::vector<std::size_t> majority = s.majority;
    rng.shuffle(majority);
    majority.resize(s.minority.size());
    std::vector<bool> chosen(train.size(), false);
    for (std::size_t idx : majority) chosen[idx] = true;
    for (std::size_t idx : s.minority) chosen[idx] = true;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (chosen[i]) keep.push_back(i);
    return train.select(keep);
}

TabularDataset nearmiss(const TabularDataset& train, int version, std::size_t k) {
    if (version < 1 || version > 3)
        throw std::invalid_argument("nearmiss: version must be 1, 2 or 3");
    const ClassSplit s = split_classes(train);
    if (s.majority.size() < s.minority.size())
        throw std::invalid_argument("nearmiss: majority class smaller than minority");
    if (k > s.minority.size())
        throw std::invalid_argument("nearmiss: k larger than minority size");

    const std::size_t target = s.minority.size();

    // mean distance from a majority row to its k nearest/farthest minority rows
    auto mean_distance = [&](std::size_t maj_row, bool nearest) {
        std::vector<double> d;
        d.reserve(s.minority.size());
        for (std::size_t m : s.minority)
            d.push_back(std::sqrt(
                squared_distance(train.features.row(maj_row), train.features.row(m))));
        std::sort(d.begin(), d.end());
        double sum = 0.0;
        if (nearest)
            for (std::size_t i = 0; i < k; ++i) sum += d[i];
        else
            for (std::size_t i = d.size() - k; i < d.size(); ++i) sum += d[i];
        return sum / static_cast<double>(k);
    };

    std::vector<std::size_t> kept_majority;
    if (version == 1 || version == 2) {
        std::vector<std::pair<double, std::size_t>> ranked;
        for (std::size_t maj : s.majority)
            ranked.emplace_back(mean_distance(maj, version == 1), maj);
        std::stable_sort(ranked.begin(), ranked.end());
        for (std::size_t i = 0; i < target; ++i) kept_majority.push_back(ranked[i].second);
    } else {
        // stage 1: majority rows appearing among some minority point's k nearest
        std::vector<bool> candidate(train.size(), false);
        for (std::size_t m : s.minority) {
            const auto nn =
                k_nearest(train.features, train.features.row(m), s.majority, k, kNoExclude);
            for (std::size_t idx : nn) candidate[idx] = true;
        }
        // stage 2: among candidates keep those farthest on average from their
        // k nearest minority rows; fill from non-candidates if short
        std::vector<std::pair<double, std::size_t>> cand_ranked, rest_ranked;
        for (std::size_t maj : s.majority) {
            const double d = -mean_distance(maj, true);  // negate: farthest first
            (candidate[maj] ? cand_ranked : rest_ranked).emplace_back(d, maj);
        }
        std::stable_sort(cand_ranked.begin(), cand_ranked.end());
        std::stable_sort(rest_ranked.begin(), rest_ranked.end());
        for (const auto& [d, idx] : cand_ranked) {
            if (kept_majority.size() == target) break;
            kept_majority.push_back(idx);
        }
        for (const auto& [d, idx] : rest_ranked) {
            if (kept_majority.size() == target) break;
            kept_majority.push_back(idx);
        }
    }

    std::vector<bool> chosen(train.size(), false);
    for (std::size_t idx : kept_majority) chosen[idx] = true;
    for (std::size_t idx : s.minority) chosen[idx] = true;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (chosen[i]) keep.push_back(i);
    return train.select(keep);
}

TabularDataset apply_sampling(const TabularDataset& train, const SamplingSpec& spec,
                              const SeedStream& stream) {
    switch (spec.technique) {
        case Technique::Smote:
            return smote(train, spec.k_neighbors, stream);
        case Technique::Adasyn:
            return adasyn(train, spec.k_neighbors, stream);
        case Technique::BorderlineSmote:
            return borderline_smote(train, spec.k_neighbors, stream);
        case Technique::KMeansSmote:
            return kmeans_smote(train, spec.k_neighbors, spec.kmeans_clusters, stream);
        case Technique::SmoteTomek:
            return smote_tomek(train, spec, stream);
        case Technique::SmoteEnn:
            return smote_enn(train, spec, stream);
        case Technique::RandomOversample:
            return random_resample(train, ResampleMode::Over, stream);
        case Technique::RandomUndersample:
            return random_resample(train, ResampleMode::Under, stream);
        case Technique::NearMiss:
            return nearmiss(train, spec.nearmiss_version, spec.k_neighbors);
    }
    throw std::logic_error("apply_sampling: unknown technique");
}

}  // namespace sampling
}  // namespace augbench
