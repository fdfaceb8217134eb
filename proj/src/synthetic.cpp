#include "augbench/synthetic.hpp"

#include <numeric>
#include <stdexcept>

namespace augbench {

double separation_for_bayes_auc(double auc) {
    if (!(auc > 0.5 && auc < 1.0))
        throw std::invalid_argument("separation_for_bayes_auc: auc must be in (0.5, 1)");
    return std::sqrt(2.0) * normal_quantile(auc);
}

double bayes_auc_for_separation(double delta) { return normal_cdf(delta / std::sqrt(2.0)); }

TabularDataset make_synthetic(const SyntheticSpec& spec, const SeedStream& stream) {
    if (spec.rows < 2 || spec.features == 0 || spec.n_groups == 0)
        throw std::invalid_argument("make_synthetic: invalid shape");
    if (!(spec.positive_ratio > 0.0 && spec.positive_ratio < 1.0))
        throw std::invalid_argument("make_synthetic: positive_ratio must be in (0,1)");

    const double delta = separation_for_bayes_auc(spec.bayes_auc);
    const std::size_t n_pos =
        static_cast<std::size_t>(std::llround(spec.positive_ratio * static_cast<double>(spec.rows)));

    Rng rng = stream.rng();
    std::vector<int> labels(spec.rows, 0);
    for (std::size_t i = 0; i < n_pos; ++i) labels[i] = 1;
    rng.shuffle(labels);

    TabularDataset ds;
    ds.features = Matrix(spec.rows, spec.features);
    ds.labels = labels;
    for (std::size_t f = 0; f < spec.features; ++f)
        ds.feature_names.push_back("f" + std::to_string(f + 1));
    for (std::size_t r = 0; r < spec.rows; ++r) {
        auto row = ds.features.row(r);
        for (std::size_t f = 0; f < spec.features; ++f) row[f] = rng.gaussian();
        // all class separation on the first feature; identity covariance
        if (labels[r] == 1) row[0] += delta;
        ds.groups.push_back("school_" + std::to_string(rng.uniform_index(spec.n_groups) + 1));
    }
    ds.validate();
    return ds;
}

}  // namespace augbench
