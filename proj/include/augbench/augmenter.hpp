#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "augbench/common.hpp"
#include "augbench/dataset.hpp"
#include "augbench/generation.hpp"
#include "augbench/perturbation.hpp"
#include "augbench/sampling.hpp"

namespace augbench {
namespace harness {

enum class StageCategory { Sampling, Perturbation, Generation };

std::string category_name(StageCategory c);

// One technique reference inside an augmentation pipeline.
struct StageSpec {
    StageCategory category;
    std::string name;  // canonical id, e.g. "smote_enn"

    friend bool operator==(const StageSpec&, const StageSpec&) = default;
};

// Ordered list of 0 (baseline), 1, or 2 stages. Allowed chain category pairs:
// sampling->generation, perturbation->sampling, perturbation->generation; a
// chain never repeats a technique.
struct AugmenterSpec {
    std::vector<StageSpec> stages;

    bool is_baseline() const { return stages.empty(); }
    std::string tag() const;       // "baseline" or "a+b"
    std::string category() const;  // "none", "sampling", "perturbation+sampling", ...
    void validate() const;

    friend bool operator==(const AugmenterSpec&, const AugmenterSpec&) = default;
};

// A stage transforms the training split and, for perturbation, the test
// split; sampling and generation leave test rows untouched.
struct StagePair {
    TabularDataset train;
    TabularDataset test;
};
using StageFn =
    std::function<StagePair(const TabularDataset& train, const TabularDataset& test,
                            const SeedStream& stream)>;

// Per-technique hyperparameters shared across the catalog.
struct TechniqueParams {
    sampling::SamplingSpec sampling;
    perturb::PerturbOptions perturb;
    gen::GenerationConfig generation;
};

// Registry of the 21 canonical techniques (9 sampling, 9 perturbation,
// 3 generation) plus any custom stages registered by callers.
class Catalog {
public:
    explicit Catalog(TechniqueParams params = {});

    bool contains(const std::string& name) const;
    StageCategory category_of(const std::string& name) const;
    StageFn make_stage(const std::string& name) const;

    // canonical ids in catalog order, optionally restricted to one category
    std::vector<std::string> technique_names() const;
    std::vector<std::string> technique_names(StageCategory c) const;

    const TechniqueParams& params() const { return params_; }

    // extension point (used by fault-injection tests)
    void register_custom(const std::string& name, StageCategory category, StageFn fn);

private:
    struct Entry {
        StageCategory category;
        StageFn fn;
        std::size_t order;
    };
    TechniqueParams params_;
    std::map<std::string, Entry> entries_;
    std::vector<std::string> order_;
};

// The evaluated chain grid: 9 sampling->GAN, 81 perturbation->sampling,
// 9 perturbation->GAN = 99 specs, sorted by (category pair, stage names).
std::vector<AugmenterSpec> enumerate_chains(const Catalog& catalog);

// Applies all stages of `spec` in order, fitting on train rows only.
StagePair apply_augmenter(const AugmenterSpec& spec, const Catalog& catalog,
                          const TabularDataset& train, const TabularDataset& test,
                          const SeedStream& stream);

}  // namespace harness
}  // namespace augbench
