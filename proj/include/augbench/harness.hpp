#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "augbench/augmenter.hpp"
#include "augbench/classifiers.hpp"
#include "augbench/dataset.hpp"
#include "augbench/folds.hpp"
#include "augbench/stats.hpp"

namespace augbench {
namespace harness {

enum class Mode { Replicate, Augment };

struct ExperimentConfig {
    std::vector<models::ModelSpec> models;
    std::vector<AugmenterSpec> techniques;  // baseline is always run in addition
    std::size_t n_seeds = 100;
    std::size_t bootstrap_B = 1000;
    double fdr_q = 0.05;
    std::uint64_t master_seed = 0;
    bool use_ffs = false;
    Mode mode = Mode::Augment;
    bool bh_per_model = false;  // default: one BH family across the whole report
    std::size_t jobs = 1;
    double unreliable_fraction = 0.05;

    void validate() const;
};

// Result of one (model, technique, seed) run.
struct RunRecord {
    std::string model;
    std::string technique;
    std::uint64_t seed = 0;
    std::vector<double> fold_aucs;
    double mean_auc = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;  // diagnostic with (model, technique, seed, fold) context
};

// Observer for leakage auditing: receives the original-dataset row indices
// handed to the augmentation stages of each (seed, fold) fit. Must be
// thread-safe if jobs > 1.
using AuditSink = std::function<void(const std::string& model, const std::string& technique,
                                     std::uint64_t seed, std::size_t fold,
                                     std::span<const std::size_t> fit_indices)>;

// Runs one experiment cell: per seed and fold, fit the augmentation stages on
// the fold's training rows only, train the model, score the untouched test
// rows. Deterministic models run seed 0 once and replicate the record.
std::vector<RunRecord> run_cell(const models::ModelSpec& model, const AugmenterSpec& aug,
                                const TabularDataset& data, const GroupedFolds& folds,
                                const ExperimentConfig& cfg, const Catalog& catalog,
                                const AuditSink& audit = {});

struct CellSummary {
    std::string model;
    std::string technique;
    std::string category;
    double mean_auc = 0.0;
    double sd_auc = 0.0;  // across seeds
    stats::ComparisonResult comparison;
    double runtime_seconds = 0.0;
    std::size_t failed_runs = 0;
    bool unreliable = false;
};

struct Report {
    std::vector<std::string> model_order;
    std::vector<std::string> technique_order;  // baseline first
    std::vector<std::string> technique_categories;
    std::vector<CellSummary> cells;  // technique-major, model-minor

    const CellSummary* find(const std::string& model, const std::string& technique) const;
};

// Bootstrap comparison of every cell against the same model's baseline, BH
// adjustment across all p-values (or per model when configured). Errors when
// a model lacks its baseline cell.
Report aggregate(const std::vector<RunRecord>& records, const ExperimentConfig& cfg);

// Full grid: baseline + cfg.techniques for every model, executed by a work
// queue of cfg.jobs threads; record identity is independent of the schedule.
std::vector<RunRecord> run_grid(const ExperimentConfig& cfg, const TabularDataset& data,
                                const Catalog& catalog, const AuditSink& audit = {});

std::string format_hhmmss(double seconds);

void write_report_csv(const Report& report, const std::string& path);
void write_report_md(const Report& report, const std::string& path);

}  // namespace harness
}  // namespace augbench
