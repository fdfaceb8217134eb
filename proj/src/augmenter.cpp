#include "augbench/augmenter.hpp"

#include <algorithm>
#include <stdexcept>

namespace augbench {
namespace harness {

std::string category_name(StageCategory c) {
    switch (c) {
        case StageCategory::Sampling: return "sampling";
        case StageCategory::Perturbation: return "perturbation";
        case StageCategory::Generation: return "generation";
    }
    return "?";
}

std::string AugmenterSpec::tag() const {
    if (stages.empty()) return "baseline";
    std::string out = stages[0].name;
    for (std::size_t i = 1; i < stages.size(); ++i) out += "+" + stages[i].name;
    return out;
}

std::string AugmenterSpec::category() const {
    if (stages.empty()) return "none";
    std::string out = category_name(stages[0].category);
    for (std::size_t i = 1; i < stages.size(); ++i)
        out += "+" + category_name(stages[i].category);
    return out;
}

void AugmenterSpec::validate() const {
    if (stages.size() > 2)
        throw std::invalid_argument("AugmenterSpec: at most 2 stages");
    if (stages.size() == 2) {
        if (stages[0].name == stages[1].name)
            throw std::invalid_argument("AugmenterSpec: a chain must not repeat a technique");
        const auto pair = std::make_pair(stages[0].category, stages[1].category);
        const bool allowed =
            pair == std::make_pair(StageCategory::Sampling, StageCategory::Generation) ||
            pair == std::make_pair(StageCategory::Perturbation, StageCategory::Sampling) ||
            pair == std::make_pair(StageCategory::Perturbation, StageCategory::Generation);
        if (!allowed)
            throw std::invalid_argument(
                "AugmenterSpec: chain categories must be sampling->generation, "
                "perturbation->sampling or perturbation->generation");
    }
}

namespace {

StageFn make_sampling_stage(sampling::Technique technique, const TechniqueParams& params) {
    sampling::SamplingSpec spec = params.sampling;
    spec.technique = technique;
    return [spec](const TabularDataset& train, const TabularDataset& test,
                  const SeedStream& stream) {
        return StagePair{sampling::apply_sampling(train, spec, stream), test};
    };
}

StageFn make_perturbation_stage(perturb::TransformKind kind, const TechniqueParams& params) {
    const perturb::PerturbOptions opts = params.perturb;
    return [kind, opts](const TabularDataset& train, const TabularDataset& test,
                        const SeedStream& stream) {
        auto [fitted, transformed_train] = perturb::fit_transform(kind, train, stream, opts);
        StagePair out{std::move(transformed_train), {}};
        if (test.size() > 0) {
            out.test = perturb::apply_transform(fitted, test);
        } else {
            out.test = test;
            out.test.feature_names = fitted.output_names;
        }
        return out;
    };
}

StageFn make_generation_stage(gen::GenKind kind, const TechniqueParams& params) {
    const gen::GenerationConfig cfg = params.generation;
    return [kind, cfg](const TabularDataset& train, const TabularDataset& test,
                       const SeedStream& stream) {
        gen::GeneratorModel model;
        switch (kind) {
            case gen::GenKind::Gan: model = gen::train_gan(train, cfg, stream.child("train")); break;
            case gen::GenKind::Vae: model = gen::train_vae(train, cfg, stream.child("train")); break;
            case gen::GenKind::Cgan:
                model = gen::train_cgan(train, cfg, stream.child("train"));
                break;
        }
        return StagePair{gen::augment_by_generation(train, model, stream.child("sample")), test};
    };
}

}  // namespace

Catalog::Catalog(TechniqueParams params) : params_(std::move(params)) {
    auto add = [this](const std::string& name, StageCategory cat, StageFn fn) {
        entries_.emplace(name, Entry{cat, std::move(fn), order_.size()});
        order_.push_back(name);
    };

    using sampling::Technique;
    add("smote", StageCategory::Sampling, make_sampling_stage(Technique::Smote, params_));
    add("adasyn", StageCategory::Sampling, make_sampling_stage(Technique::Adasyn, params_));
    add("borderline_smote", StageCategory::Sampling,
        make_sampling_stage(Technique::BorderlineSmote, params_));
    add("kmeans_smote", StageCategory::Sampling,
        make_sampling_stage(Technique::KMeansSmote, params_));
    add("smote_tomek", StageCategory::Sampling,
        make_sampling_stage(Technique::SmoteTomek, params_));
    add("smote_enn", StageCategory::Sampling, make_sampling_stage(Technique::SmoteEnn, params_));
    add("random_oversample", StageCategory::Sampling,
        make_sampling_stage(Technique::RandomOversample, params_));
    add("random_undersample", StageCategory::Sampling,
        make_sampling_stage(Technique::RandomUndersample, params_));
    add("nearmiss", StageCategory::Sampling, make_sampling_stage(Technique::NearMiss, params_));

    using perturb::TransformKind;
    add("polynomial_features", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::PolynomialFeatures, params_));
    add("feature_interaction", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::FeatureInteraction, params_));
    add("pca", StageCategory::Perturbation, make_perturbation_stage(TransformKind::Pca, params_));
    add("standardization", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::Standardization, params_));
    add("minmax_scaling", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::MinMaxScaling, params_));
    add("robust_scaling", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::RobustScaling, params_));
    add("log_transform", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::LogTransform, params_));
    add("power_transform", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::PowerTransform, params_));
    add("noise_addition", StageCategory::Perturbation,
        make_perturbation_stage(TransformKind::NoiseAddition, params_));

    add("gan", StageCategory::Generation, make_generation_stage(gen::GenKind::Gan, params_));
    add("vae", StageCategory::Generation, make_generation_stage(gen::GenKind::Vae, params_));
    add("cgan", StageCategory::Generation, make_generation_stage(gen::GenKind::Cgan, params_));
}

bool Catalog::contains(const std::string& name) const { return entries_.count(name) > 0; }

StageCategory Catalog::category_of(const std::string& name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end())
        throw std::invalid_argument("catalog: unknown technique '" + name + "'");
    return it->second.category;
}

StageFn Catalog::make_stage(const std::string& name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end())
        throw std::invalid_argument("catalog: unknown technique '" + name + "'");
    return it->second.fn;
}

std::vector<std::string> Catalog::technique_names() const { return order_; }

std::vector<std::string> Catalog::technique_names(StageCategory c) const {
    std::vector<std::string> out;
    for (const auto& name : order_)
        if (entries_.at(name).category == c) out.push_back(name);
    return out;
}

void Catalog::register_custom(const std::string& name, StageCategory category, StageFn fn) {
    if (entries_.count(name))
        throw std::invalid_argument("catalog: technique '" + name + "' already registered");
    entries_.emplace(name, Entry{category, std::move(fn), order_.size()});
    order_.push_back(name);
}

std::vector<AugmenterSpec> enumerate_chains(const Catalog& catalog) {
    auto sorted = [&](StageCategory c) {
        auto names = catalog.technique_names(c);
        std::sort(names.begin(), names.end());
        return names;
    };
    const auto samp = sorted(StageCategory::Sampling);
    const auto pert = sorted(StageCategory::Perturbation);

    std::vector<AugmenterSpec> out;
    // 9 sampling -> GAN (the fastest generation technique carries the chain)
    for (const auto& s : samp)
        out.push_back({{StageSpec{StageCategory::Sampling, s},
                        StageSpec{StageCategory::Generation, "gan"}}});
    // 81 perturbation -> sampling
    for (const auto& p : pert)
        for (const auto& s : samp)
            out.push_back({{StageSpec{StageCategory::Perturbation, p},
                            StageSpec{StageCategory::Sampling, s}}});
    // 9 perturbation -> GAN
    for (const auto& p : pert)
        out.push_back({{StageSpec{StageCategory::Perturbation, p},
                        StageSpec{StageCategory::Generation, "gan"}}});
    for (const auto& spec : out) spec.validate();
    return out;
}

StagePair apply_augmenter(const AugmenterSpec& spec, const Catalog& catalog,
                          const TabularDataset& train, const TabularDataset& test,
                          const SeedStream& stream) {
    spec.validate();
    StagePair cur{train, test};
    for (std::size_t i = 0; i < spec.stages.size(); ++i) {
        const StageFn fn = catalog.make_stage(spec.stages[i].name);
        cur = fn(cur.train, cur.test, stream.child("stage").child(i));
    }
    return cur;
}

}  // namespace harness
}  // namespace augbench
