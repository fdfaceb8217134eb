#include "augbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace augbench {
namespace stats {

namespace {

// midranks (1-based, ties averaged) of v
std::vector<double> midranks(std::span<const double> v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;  // average of i+1..j+1
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

void check_scores_labels(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("scores and labels must have equal length");
    bool has0 = false, has1 = false;
    for (int l : labels) {
        if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 or 1");
        (l == 0 ? has0 : has1) = true;
    }
    if (!has0 || !has1) throw std::invalid_argument("AUC undefined: single-class labels");
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
    check_scores_labels(scores, labels);
    const auto ranks = midranks(scores);
    double rank_sum_pos = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == 1) {
            rank_sum_pos += ranks[i];
            ++n1;
        }
    const std::size_t n0 = labels.size() - n1;
    const double u = rank_sum_pos - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1);
    return u / (static_cast<double>(n1) * static_cast<double>(n0));
}

std::vector<double> bootstrap_auc_distribution(std::span<const AucSample> samples,
                                               std::size_t B, const SeedStream& stream) {
    if (samples.empty()) throw std::invalid_argument("bootstrap: empty sample list");
    if (samples.size() < 2) throw std::invalid_argument("bootstrap: need at least 2 samples");
    if (B < 100) throw std::invalid_argument("bootstrap: B must be at least 100");
    const std::size_t n = samples.size();
    std::vector<double> out(B);
    for (std::size_t r = 0; r < B; ++r) {
        Rng rng = stream.child(r).rng();
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += samples[rng.uniform_index(n)].auc;
        out[r] = sum / static_cast<double>(n);
    }
    return out;
}

ComparisonResult compare_distributions(std::span<const double> base,
                                       std::span<const double> cand) {
    if (base.size() < 100 || cand.size() < 100)
        throw std::invalid_argument("compare_distributions: need at least 100 values per side");
    ComparisonResult r;
    r.baseline_mean = mean_of(base);
    r.candidate_mean = mean_of(cand);
    const double var_sum = variance_sample(base) + variance_sample(cand);
    if (var_sum == 0.0) {
        if (r.baseline_mean == r.candidate_mean) {
            r.z = 0.0;
            r.p_value = 1.0;
        } else {
            r.z = r.candidate_mean > r.baseline_mean ? std::numeric_limits<double>::infinity()
                                                     : -std::numeric_limits<double>::infinity();
            r.p_value = 0.0;
            r.degenerate = true;
        }
        return r;
    }
    r.z = (r.candidate_mean - r.baseline_mean) / std::sqrt(var_sum);
    r.p_value = std::erfc(std::abs(r.z) / std::sqrt(2.0));
    return r;
}

std::vector<bool> benjamini_hochberg(std::span<const double> p_values, double q) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0))
            throw std::invalid_argument("benjamini_hochberg: p-values must be in [0,1]");
    if (!(q > 0.0 && q < 1.0))
        throw std::invalid_argument("benjamini_hochberg: q must be in (0,1)");

    const std::size_t m = p_values.size();
    std::vector<bool> reject(m, false);
    if (m == 0) return reject;

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    // step-up: largest i (1-based) with p_(i) <= i*q/m
    std::size_t cutoff = 0;
    for (std::size_t i = m; i >= 1; --i) {
        if (p_values[order[i - 1]] <=
            static_cast<double>(i) * q / static_cast<double>(m)) {
            cutoff = i;
            break;
        }
    }
    for (std::size_t i = 0; i < cutoff; ++i) reject[order[i]] = true;
    return reject;
}

double delong_variance(std::span<const double> scores, std::span<const int> labels) {
    check_scores_labels(scores, labels);
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < labels.size(); ++i)
        (labels[i] == 1 ? pos : neg).push_back(scores[i]);
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    const double n1 = static_cast<double>(pos.size());
    const double n0 = static_cast<double>(neg.size());

    // placement of x among sorted other-class values, with 0.5 tie credit
    auto placement = [](double x, const std::vector<double>& other, bool count_below) {
        const auto lo = std::lower_bound(other.begin(), other.end(), x);
        const auto hi = std::upper_bound(other.begin(), other.end(), x);
        const double below = static_cast<double>(lo - other.begin());
        const double ties = static_cast<double>(hi - lo);
        const double strict = count_below ? below : static_cast<double>(other.size()) - below - ties;
        return (strict + 0.5 * ties) / static_cast<double>(other.size());
    };

    std::vector<double> v10(pos.size()), v01(neg.size());
    for (std::size_t i = 0; i < pos.size(); ++i) v10[i] = placement(pos[i], neg, true);
    for (std::size_t i = 0; i < neg.size(); ++i) v01[i] = placement(neg[i], pos, false);
    return variance_sample(v10) / n1 + variance_sample(v01) / n0;
}

double power_analysis(double delta_auc, std::size_t n, double base_auc, std::size_t reps,
                      const SeedStream& stream) {
    if (!(base_auc >= 0.5)) throw std::invalid_argument("power_analysis: base_auc must be >= 0.5");
    if (!(base_auc + delta_auc < 1.0) || !(base_auc + delta_auc > 0.0))
        throw std::invalid_argument("power_analysis: infeasible AUC targets");
    if (n < 20) throw std::invalid_argument("power_analysis: n must be at least 20");
    if (reps < 100) throw std::invalid_argument("power_analysis: reps must be at least 100");

    constexpr double kPositiveRatio = 0.64;  // enrollment-style class balance
    const std::size_t n1 =
        static_cast<std::size_t>(std::llround(kPositiveRatio * static_cast<double>(n)));
    const std::size_t n0 = n - n1;

    // equal-variance binormal separation achieving each AUC
    const double mu_base = std::sqrt(2.0) * normal_quantile(base_auc);
    const double mu_cand = std::sqrt(2.0) * normal_quantile(base_auc + delta_auc);

    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i < n1 ? 1 : 0;

    std::size_t rejections = 0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
        Rng rng = stream.child(rep).rng();
        std::vector<double> s_base(n), s_cand(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double shift_b = labels[i] == 1 ? mu_base : 0.0;
            const double shift_c = labels[i] == 1 ? mu_cand : 0.0;
            s_base[i] = rng.gaussian() + shift_b;
            s_cand[i] = rng.gaussian() + shift_c;
        }
        const double auc_b = auc(s_base, labels);
        const double auc_c = auc(s_cand, labels);
        const double var_sum = delong_variance(s_base, labels) + delong_variance(s_cand, labels);
        if (var_sum <= 0.0) continue;
        const double z = (auc_c - auc_b) / std::sqrt(var_sum);
        if (std::abs(z) >= kZTwoSided05) ++rejections;
    }
    return static_cast<double>(rejections) / static_cast<double>(reps);
}

}  // namespace stats
}  // namespace augbench
