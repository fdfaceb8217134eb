#pragma once

#include <string>
#include <variant>
#include <vector>

#include "augbench/common.hpp"
#include "augbench/dataset.hpp"
#include "augbench/folds.hpp"
#include "augbench/netcore.hpp"

namespace augbench {
namespace models {

enum class Architecture { LR, SVM, RF, MLP };

std::string architecture_name(Architecture a);
Architecture architecture_from_name(const std::string& name);

// Hyperparameters pinned to the published defaults of the usual reference
// implementations; all overridable.
struct ModelSpec {
    Architecture architecture = Architecture::LR;

    // LR: L2-regularized logistic loss, Newton iterations
    double lr_c = 1.0;
    double lr_grad_tol = 1e-6;
    std::size_t lr_max_iter = 1000;

    // SVM: RBF kernel dual solved by SMO; gamma <= 0 means 1 / (d * Var(X))
    double svm_c = 1.0;
    double svm_gamma = 0.0;
    double svm_kkt_tol = 1e-3;

    // RF: Gini splits, bootstrap rows, sqrt(d) features per split
    std::size_t rf_trees = 100;

    // MLP: one rectified-linear hidden layer, adaptive-moment minibatches
    std::size_t mlp_hidden = 100;
    double mlp_alpha = 1e-4;
    double mlp_learning_rate = 1e-3;
    std::size_t mlp_max_epochs = 200;
    std::size_t mlp_batch_size = 200;
    double mlp_plateau_tol = 1e-5;
    std::size_t mlp_plateau_epochs = 10;

    bool deterministic() const {
        return architecture == Architecture::LR || architecture == Architecture::SVM;
    }
};

struct LrModel {
    std::vector<double> weights;
    double intercept = 0.0;
};

struct SvmModel {
    Matrix support_vectors;          // all training rows (alphas may be zero)
    std::vector<double> alphas;      // dual coefficients in [0, C]
    std::vector<int> sv_labels;      // +1/-1
    double bias = 0.0;
    double gamma = 0.0;
};

struct RfModel {
    struct Node {
        int feature = -1;  // -1 = leaf
        double threshold = 0.0;
        int left = -1, right = -1;
        int vote = 0;  // leaf class
    };
    struct Tree {
        std::vector<Node> nodes;
    };
    std::vector<Tree> trees;
};

struct MlpModel {
    net::NetCore net;
};

struct TrainedModel {
    Architecture architecture;
    std::size_t feature_count = 0;
    std::variant<LrModel, SvmModel, RfModel, MlpModel> impl;
};

// Errors on single-class data, fewer than 2 rows or non-finite features.
// Deterministic architectures ignore the stream entirely.
TrainedModel train(const ModelSpec& spec, const TabularDataset& train, const SeedStream& stream);

// LR/MLP: class-1 probability; SVM: decision-function value; RF: fraction of
// trees voting class 1. Errors on feature-count mismatch.
std::vector<double> score(const TrainedModel& model, const TabularDataset& data);
std::vector<double> score_matrix(const TrainedModel& model, const Matrix& features);

// Greedy selection maximizing mean cross-fold AUC; stops when no candidate
// improves the mean by more than `min_improvement`.
std::vector<std::size_t> forward_feature_selection(const ModelSpec& spec,
                                                   const TabularDataset& train,
                                                   const GroupedFolds& folds,
                                                   const SeedStream& stream,
                                                   double min_improvement = 1e-4);

}  // namespace models
}  // namespace augbench
