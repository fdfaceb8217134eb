#include "augbench/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "augbench/stats.hpp"

namespace augbench {
namespace models {

std::string architecture_name(Architecture a) {
    switch (a) {
        case Architecture::LR: return "lr";
        case Architecture::SVM: return "svm";
        case Architecture::RF: return "rf";
        case Architecture::MLP: return "mlp";
    }
    return "?";
}

Architecture architecture_from_name(const std::string& name) {
    if (name == "lr") return Architecture::LR;
    if (name == "svm") return Architecture::SVM;
    if (name == "rf") return Architecture::RF;
    if (name == "mlp") return Architecture::MLP;
    throw std::invalid_argument("unknown model architecture '" + name + "'");
}

namespace {

void check_trainable(const TabularDataset& train) {
    if (train.size() < 2) throw std::invalid_argument("train: need at least 2 rows");
    if (!train.both_classes_present())
        throw std::invalid_argument("train: both classes must be present");
    if (!train.features.all_finite())
        throw std::invalid_argument("train: non-finite features");
}

// ----------------------------------------------------------------------
// Logistic regression: 0.5*|w|^2 + C * sum log(1+exp(-t*z)), Newton steps
// with backtracking, intercept unpenalized.
// ----------------------------------------------------------------------

// Cholesky solve of A x = b for symmetric positive definite A (row-major),
// with a small jitter retry.
std::vector<double> cholesky_solve(std::vector<double> a, std::vector<double> b,
                                   std::size_t n) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        std::vector<double> l(n * n, 0.0);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = a[i * n + j];
                for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
                if (i == j) {
                    if (s <= 0.0) {
                        ok = false;
                        break;
                    }
                    l[i * n + i] = std::sqrt(s);
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        if (ok) {
            std::vector<double> y(n), x(n);
            for (std::size_t i = 0; i < n; ++i) {
                double s = b[i];
                for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * y[k];
                y[i] = s / l[i * n + i];
            }
            for (std::size_t i = n; i-- > 0;) {
                double s = y[i];
                for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * x[k];
                x[i] = s / l[i * n + i];
            }
            return x;
        }
        const double jitter = std::pow(10.0, attempt - 8);
        for (std::size_t i = 0; i < n; ++i) a[i * n + i] += jitter;
    }
    throw std::runtime_error("cholesky_solve: matrix not positive definite");
}

LrModel train_lr(const ModelSpec& spec, const TabularDataset& train) {
    const Matrix& x = train.features;
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const double c = spec.lr_c;

    std::vector<double> w(d, 0.0);
    double b = 0.0;

    auto loss_and_grad = [&](const std::vector<double>& wv, double bv,
                             std::vector<double>* grad) {
        double loss = 0.0;
        for (std::size_t j = 0; j < d; ++j) loss += 0.5 * wv[j] * wv[j];
        if (grad) {
            grad->assign(d + 1, 0.0);
            for (std::size_t j = 0; j < d; ++j) (*grad)[j] = wv[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            double z = bv;
            for (std::size_t j = 0; j < d; ++j) z += wv[j] * row[j];
            const double t = train.labels[i] == 1 ? 1.0 : -1.0;
            const double m = -t * z;
            loss += c * (m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)));
            if (grad) {
                const double p = 1.0 / (1.0 + std::exp(-z));
                const double g = c * (p - static_cast<double>(train.labels[i]));
                for (std::size_t j = 0; j < d; ++j) (*grad)[j] += g * row[j];
                (*grad)[d] += g;
            }
        }
        return loss;
    };

    std::vector<double> grad;
    double loss = loss_and_grad(w, b, &grad);
    for (std::size_t iter = 0; iter < spec.lr_max_iter; ++iter) {
        double gnorm = 0.0;
        for (double g : grad) gnorm += g * g;
        if (std::sqrt(gnorm) <= spec.lr_grad_tol) break;

        // Hessian: [I + C X^T R X,  C X^T r; ..., C sum(r)] with r = p(1-p)
        std::vector<double> h((d + 1) * (d + 1), 0.0);
        for (std::size_t j = 0; j < d; ++j) h[j * (d + 1) + j] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto row = x.row(i);
            double z = b;
            for (std::size_t j = 0; j < d; ++j) z += w[j] * row[j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double r = std::max(c * p * (1.0 - p), 1e-12);
            for (std::size_t a = 0; a < d; ++a) {
                const double ra = r * row[a];
                for (std::size_t bcol = a; bcol < d; ++bcol)
                    h[a * (d + 1) + bcol] += ra * row[bcol];
                h[a * (d + 1) + d] += ra;
            }
            h[d * (d + 1) + d] += r;
        }
        for (std::size_t a = 0; a < d + 1; ++a)
            for (std::size_t bcol = 0; bcol < a; ++bcol)
                h[a * (d + 1) + bcol] = h[bcol * (d + 1) + a];

        std::vector<double> neg_grad(d + 1);
        for (std::size_t j = 0; j < d + 1; ++j) neg_grad[j] = -grad[j];
        const auto step = cholesky_solve(std::move(h), std::move(neg_grad), d + 1);

        double scale = 1.0;
        for (int bt = 0; bt < 30; ++bt) {
            std::vector<double> w2 = w;
            for (std::size_t j = 0; j < d; ++j) w2[j] += scale * step[j];
            const double b2 = b + scale * step[d];
            const double loss2 = loss_and_grad(w2, b2, nullptr);
            if (loss2 <= loss) {
                w = std::move(w2);
                b = b2;
                loss = loss2;
                break;
            }
            scale *= 0.5;
        }
        loss = loss_and_grad(w, b, &grad);
    }
    return LrModel{std::move(w), b};
}

// ----------------------------------------------------------------------
// SVM: RBF-kernel dual solved by SMO with maximal-violating-pair selection.
// ----------------------------------------------------------------------

class RbfKernel {
public:
    RbfKernel(const Matrix& x, double gamma) : x_(x), gamma_(gamma) {
        if (x.rows() <= kFullCacheLimit) {
            full_.assign(x.rows() * x.rows(), 0.0f);
            for (std::size_t i = 0; i < x.rows(); ++i)
                for (std::size_t j = i; j < x.rows(); ++j) {
                    const float v = static_cast<float>(value(i, j));
                    full_[i * x.rows() + j] = v;
                    full_[j * x.rows() + i] = v;
                }
        }
    }

    double operator()(std::size_t i, std::size_t j) const {
        if (!full_.empty()) return full_[i * x_.rows() + j];
        return value(i, j);
    }

private:
    static constexpr std::size_t kFullCacheLimit = 4000;
    double value(std::size_t i, std::size_t j) const {
        return std::exp(-gamma_ * squared_distance(x_.row(i), x_.row(j)));
    }
    const Matrix& x_;
    double gamma_;
    std::vector<float> full_;
};

SvmModel train_svm(const ModelSpec& spec, const TabularDataset& train) {
    const Matrix& x = train.features;
    const std::size_t n = x.rows();
    const double c = spec.svm_c;

    double gamma = spec.svm_gamma;
    if (gamma <= 0.0) {
        // 1 / (d * Var(X)) over all feature values pooled
        double var = variance_population(std::span<const double>(x.data()));
        if (var <= 0.0) var = 1.0;
        gamma = 1.0 / (static_cast<double>(x.cols()) * var);
    }

    std::vector<int> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = train.labels[i] == 1 ? 1 : -1;

    const RbfKernel kernel(x, gamma);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G_i = sum_j alpha_j t_i t_j K_ij - 1

    const std::size_t max_iter = std::max<std::size_t>(10'000'000, 100 * n);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        // working pair: most violating on each side
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        std::size_t i_up = n, i_low = n;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = -static_cast<double>(t[i]) * grad[i];
            const bool in_up = (t[i] == 1 && alpha[i] < c) || (t[i] == -1 && alpha[i] > 0.0);
            const bool in_low = (t[i] == 1 && alpha[i] > 0.0) || (t[i] == -1 && alpha[i] < c);
            if (in_up && v > m_up) {
                m_up = v;
                i_up = i;
            }
            if (in_low && v < m_low) {
                m_low = v;
                i_low = i;
            }
        }
        if (i_up == n || i_low == n || m_up - m_low <= spec.svm_kkt_tol) break;

        const std::size_t i = i_up, j = i_low;
        const double kii = kernel(i, i), kjj = kernel(j, j), kij = kernel(i, j);
        double eta = kii + kjj - 2.0 * kij;
        if (eta <= 0.0) eta = 1e-12;

        // f_k without bias; bias cancels in the pair update
        const double fi = t[i] * (grad[i] + 1.0);
        const double fj = t[j] * (grad[j] + 1.0);
        const double ei = fi - t[i];
        const double ej = fj - t[j];

        double lo, hi;
        const double s = static_cast<double>(t[i] * t[j]);
        if (t[i] != t[j]) {
            lo = std::max(0.0, alpha[j] - alpha[i]);
            hi = std::min(c, c + alpha[j] - alpha[i]);
        } else {
            lo = std::max(0.0, alpha[i] + alpha[j] - c);
            hi = std::min(c, alpha[i] + alpha[j]);
        }
        if (hi - lo < 1e-15) continue;

        double aj = alpha[j] + static_cast<double>(t[j]) * (ei - ej) / eta;
        aj = std::clamp(aj, lo, hi);
        const double ai = alpha[i] + s * (alpha[j] - aj);
        const double dai = ai - alpha[i];
        const double daj = aj - alpha[j];
        if (std::abs(dai) < 1e-15 && std::abs(daj) < 1e-15) break;
        alpha[i] = ai;
        alpha[j] = aj;
        for (std::size_t k = 0; k < n; ++k)
            grad[k] += t[k] * (t[i] * dai * kernel(k, i) + t[j] * daj * kernel(k, j));
    }

    // bias from free vectors, midpoint of the KKT bounds otherwise
    double b = 0.0;
    std::size_t free_count = 0;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        const double fi = t[i] * (grad[i] + 1.0);
        if (alpha[i] > 1e-12 && alpha[i] < c - 1e-12) {
            b += t[i] - fi;
            ++free_count;
        }
        const double v = -static_cast<double>(t[i]) * grad[i];
        const bool in_up = (t[i] == 1 && alpha[i] < c) || (t[i] == -1 && alpha[i] > 0.0);
        const bool in_low = (t[i] == 1 && alpha[i] > 0.0) || (t[i] == -1 && alpha[i] < c);
        if (in_up) m_up = std::max(m_up, v);
        if (in_low) m_low = std::min(m_low, v);
    }
    b = free_count > 0 ? b / static_cast<double>(free_count) : (m_up + m_low) / 2.0;

    SvmModel model;
    model.support_vectors = x;
    model.alphas = std::move(alpha);
    model.sv_labels = std::move(t);
    model.bias = b;
    model.gamma = gamma;
    return model;
}

// ----------------------------------------------------------------------
// Random forest: bootstrap rows, Gini splits over sqrt(d) feature draws.
// ----------------------------------------------------------------------

struct SplitCandidate {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double impurity = std::numeric_limits<double>::max();
};

SplitCandidate best_split(const Matrix& x, const std::vector<int>& labels,
                          const std::vector<std::size_t>& rows,
                          std::span<const std::size_t> features) {
    SplitCandidate best;
    const double total = static_cast<double>(rows.size());
    std::vector<std::pair<double, int>> sorted;
    for (std::size_t f : features) {
        sorted.clear();
        for (std::size_t r : rows) sorted.emplace_back(x(r, f), labels[r]);
        std::sort(sorted.begin(), sorted.end());
        std::size_t total_pos = 0;
        for (const auto& [v, l] : sorted) total_pos += static_cast<std::size_t>(l);

        std::size_t left_n = 0, left_pos = 0;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            ++left_n;
            left_pos += static_cast<std::size_t>(sorted[i].second);
            if (sorted[i].first == sorted[i + 1].first) continue;
            const double ln = static_cast<double>(left_n);
            const double rn = total - ln;
            const double lp = static_cast<double>(left_pos) / ln;
            const double rp = static_cast<double>(total_pos - left_pos) / rn;
            const double gini =
                ln / total * 2.0 * lp * (1.0 - lp) + rn / total * 2.0 * rp * (1.0 - rp);
            if (gini < best.impurity - 1e-15) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
                best.impurity = gini;
            }
        }
    }
    return best;
}

RfModel::Tree grow_tree(const Matrix& x, const std::vector<int>& labels, Rng& rng) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const std::size_t mtry =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));

    std::vector<std::size_t> boot(n);
    for (std::size_t i = 0; i < n; ++i) boot[i] = rng.uniform_index(n);

    RfModel::Tree tree;
    struct Work {
        std::vector<std::size_t> rows;
        int node;
    };
    std::vector<Work> stack;
    tree.nodes.emplace_back();
    stack.push_back({std::move(boot), 0});

    std::vector<std::size_t> all_features(d);
    std::iota(all_features.begin(), all_features.end(), std::size_t{0});

    while (!stack.empty()) {
        Work work = std::move(stack.back());
        stack.pop_back();
        auto& rows = work.rows;

        std::size_t pos = 0;
        for (std::size_t r : rows) pos += static_cast<std::size_t>(labels[r]);
        const bool pure = pos == 0 || pos == rows.size();

        SplitCandidate split;
        if (!pure && rows.size() >= 2) {
            // feature subsample without replacement
            std::vector<std::size_t> feats = all_features;
            for (std::size_t i = 0; i < mtry; ++i) {
                const std::size_t j = i + rng.uniform_index(d - i);
                std::swap(feats[i], feats[j]);
            }
            split = best_split(x, labels, rows, std::span(feats.data(), mtry));
        }

        if (!split.found) {
            tree.nodes[work.node].feature = -1;
            tree.nodes[work.node].vote = 2 * pos > rows.size() ? 1 : 0;
            continue;
        }

        std::vector<std::size_t> left, right;
        for (std::size_t r : rows)
            (x(r, split.feature) <= split.threshold ? left : right).push_back(r);
        if (left.empty() || right.empty()) {
            tree.nodes[work.node].feature = -1;
            tree.nodes[work.node].vote = 2 * pos > rows.size() ? 1 : 0;
            continue;
        }

        tree.nodes[work.node].feature = split.feature;
        tree.nodes[work.node].threshold = split.threshold;
        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        tree.nodes[work.node].left = left_id;
        tree.nodes[work.node].right = left_id + 1;
        stack.push_back({std::move(right), left_id + 1});
        stack.push_back({std::move(left), left_id});
    }
    return tree;
}

RfModel train_rf(const ModelSpec& spec, const TabularDataset& train, const SeedStream& stream) {
    RfModel model;
    model.trees.reserve(spec.rf_trees);
    // per-tree streams derived by index: tree order never matters
    for (std::size_t tr = 0; tr < spec.rf_trees; ++tr) {
        Rng rng = stream.child("tree").child(tr).rng();
        model.trees.push_back(grow_tree(train.features, train.labels, rng));
    }
    return model;
}

int tree_vote(const RfModel::Tree& tree, std::span<const double> row) {
    int node = 0;
    while (tree.nodes[node].feature >= 0) {
        node = row[tree.nodes[node].feature] <= tree.nodes[node].threshold
                   ? tree.nodes[node].left
                   : tree.nodes[node].right;
    }
    return tree.nodes[node].vote;
}

// ----------------------------------------------------------------------
// MLP: one rectified-linear hidden layer on the shared net core.
// ----------------------------------------------------------------------

MlpModel train_mlp(const ModelSpec& spec, const TabularDataset& train, const SeedStream& stream) {
    const std::size_t n = train.size();
    const std::size_t d = train.features.cols();
    Rng init_rng = stream.child("init").rng();
    net::NetCore netw({d, spec.mlp_hidden, 1},
                      {net::Activation::Relu, net::Activation::Linear}, init_rng);

    const net::AdamConfig adam{spec.mlp_learning_rate, 0.9, 0.999, 1e-8};
    Rng rng = stream.child("train").rng();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    const std::size_t batch = std::min(spec.mlp_batch_size, n);

    double best_loss = std::numeric_limits<double>::infinity();
    std::size_t no_improve = 0;
    for (std::size_t epoch = 0; epoch < spec.mlp_max_epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += batch) {
            const std::size_t len = std::min(batch, n - start);
            const std::span<const std::size_t> idx(order.data() + start, len);
            Matrix xb = train.features.select_rows(idx);
            std::vector<double> yb(len);
            for (std::size_t i = 0; i < len; ++i) yb[i] = train.labels[idx[i]];

            net::NetCore::Cache cache;
            Matrix logits = netw.forward(xb, cache);
            Matrix dlogits(len, 1);
            double loss = net::bce_with_logits(logits, yb, &dlogits);
            net::NetCore::Gradients grads = netw.zero_gradients();
            netw.backward(cache, dlogits, grads);
            loss += netw.l2_weight_penalty(spec.mlp_alpha, &grads);
            if (!std::isfinite(loss))
                throw std::runtime_error("MLP training diverged at epoch " + std::to_string(epoch));
            netw.adam_step(grads, adam);
            epoch_loss += loss;
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);

        // plateau early stop on training loss
        if (best_loss - epoch_loss > spec.mlp_plateau_tol * std::max(std::abs(best_loss), 1e-12))
            no_improve = 0;
        else
            ++no_improve;
        best_loss = std::min(best_loss, epoch_loss);
        if (no_improve >= spec.mlp_plateau_epochs) break;
    }
    return MlpModel{std::move(netw)};
}

}  // namespace

TrainedModel train(const ModelSpec& spec, const TabularDataset& train, const SeedStream& stream) {
    check_trainable(train);
    TrainedModel model;
    model.architecture = spec.architecture;
    model.feature_count = train.features.cols();
    switch (spec.architecture) {
        case Architecture::LR: model.impl = train_lr(spec, train); break;
        case Architecture::SVM: model.impl = train_svm(spec, train); break;
        case Architecture::RF: model.impl = train_rf(spec, train, stream); break;
        case Architecture::MLP: model.impl = train_mlp(spec, train, stream); break;
    }
    return model;
}

std::vector<double> score_matrix(const TrainedModel& model, const Matrix& features) {
    if (features.cols() != model.feature_count)
        throw std::invalid_argument("score: feature width mismatch");
    const std::size_t n = features.rows();
    std::vector<double> out(n, 0.0);

    if (const auto* lr = std::get_if<LrModel>(&model.impl)) {
        for (std::size_t i = 0; i < n; ++i) {
            auto row = features.row(i);
            double z = lr->intercept;
            for (std::size_t j = 0; j < row.size(); ++j) z += lr->weights[j] * row[j];
            out[i] = 1.0 / (1.0 + std::exp(-z));
        }
    } else if (const auto* svm = std::get_if<SvmModel>(&model.impl)) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = svm->bias;
            for (std::size_t v = 0; v < svm->alphas.size(); ++v) {
                if (svm->alphas[v] <= 0.0) continue;
                s += svm->alphas[v] * svm->sv_labels[v] *
                     std::exp(-svm->gamma *
                              squared_distance(features.row(i), svm->support_vectors.row(v)));
            }
            out[i] = s;
        }
    } else if (const auto* rf = std::get_if<RfModel>(&model.impl)) {
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t votes = 0;
            for (const auto& tree : rf->trees)
                votes += static_cast<std::size_t>(tree_vote(tree, features.row(i)));
            out[i] = static_cast<double>(votes) / static_cast<double>(rf->trees.size());
        }
    } else if (const auto* mlp = std::get_if<MlpModel>(&model.impl)) {
        Matrix logits = mlp->net.forward(features);
        for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-logits(i, 0)));
    }
    return out;
}

std::vector<double> score(const TrainedModel& model, const TabularDataset& data) {
    return score_matrix(model, data.features);
}

namespace {

TabularDataset select_features(const TabularDataset& ds, std::span<const std::size_t> cols) {
    TabularDataset out;
    out.features = ds.features.select_cols(cols);
    out.labels = ds.labels;
    out.groups = ds.groups;
    for (std::size_t c : cols) out.feature_names.push_back(ds.feature_names[c]);
    return out;
}

}  // namespace

std::vector<std::size_t> forward_feature_selection(const ModelSpec& spec,
                                                   const TabularDataset& train,
                                                   const GroupedFolds& folds,
                                                   const SeedStream& stream,
                                                   double min_improvement) {
    const std::size_t d = train.features.cols();
    if (d == 0) throw std::invalid_argument("forward_feature_selection: need at least 1 feature");

    const SeedStream ffs_stream = stream.child("ffs");
    auto mean_cv_auc = [&](const std::vector<std::size_t>& cols) {
        const TabularDataset sub = select_features(train, cols);
        double total = 0.0;
        for (std::size_t f = 0; f < folds.folds.size(); ++f) {
            const auto& fold = folds.folds[f];
            const TabularDataset tr = sub.select(fold.train);
            const TabularDataset te = sub.select(fold.test);
            const TrainedModel m = train(spec, tr, ffs_stream.child(cols.back()).child(f));
            total += stats::auc(score(m, te), te.labels);
        }
        return total / static_cast<double>(folds.folds.size());
    };

    std::vector<std::size_t> selected;
    std::vector<bool> used(d, false);
    double best_score = -std::numeric_limits<double>::infinity();
    while (selected.size() < d) {
        double round_best = -std::numeric_limits<double>::infinity();
        std::size_t round_feature = d;
        for (std::size_t f = 0; f < d; ++f) {
            if (used[f]) continue;
            std::vector<std::size_t> candidate = selected;
            candidate.push_back(f);
            const double s = mean_cv_auc(candidate);
            if (s > round_best) {
                round_best = s;
                round_feature = f;
            }
        }
        if (round_feature == d || round_best - best_score <= min_improvement) break;
        selected.push_back(round_feature);
        used[round_feature] = true;
        best_score = round_best;
    }
    if (selected.empty()) selected.push_back(0);
    return selected;
}

}  // namespace models
}  // namespace augbench
