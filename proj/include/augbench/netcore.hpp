#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "augbench/common.hpp"
#include "augbench/matrix.hpp"

namespace augbench {
namespace net {

enum class Activation { Linear, Relu, Sigmoid, Tanh };

struct AdamConfig {
    double learning_rate = 2e-4;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

// Small fully-connected network with manual backpropagation and an adaptive
// moment optimizer. Batches are row-major (rows = samples).
class NetCore {
public:
    struct Gradients {
        std::vector<Matrix> dw;
        std::vector<std::vector<double>> db;
        void scale(double f);
        void add(const Gradients& other);
    };

    struct Cache {
        std::vector<Matrix> inputs;  // input to each layer
        std::vector<Matrix> pre;     // pre-activation of each layer
        Matrix output;
    };

    NetCore() = default;
    // layer_sizes = {in, h1, ..., out}; one activation per weight layer
    NetCore(const std::vector<std::size_t>& layer_sizes,
            const std::vector<Activation>& activations, Rng& init_rng);

    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, Cache& cache) const;

    // grad_out = dLoss/d(output); accumulates parameter gradients into
    // `grads` (which must be zeros_like this net) and returns dLoss/d(input).
    Matrix backward(const Cache& cache, const Matrix& grad_out, Gradients& grads) const;

    Gradients zero_gradients() const;

    void adam_step(const Gradients& grads, const AdamConfig& cfg);

    std::size_t input_size() const;
    std::size_t output_size() const;
    bool all_finite() const;

    // flat parameter view for finite-difference checks
    std::size_t parameter_count() const;
    double get_parameter(std::size_t i) const;
    void set_parameter(std::size_t i, double v);
    static double flat_gradient(const Gradients& g, std::size_t i);

    // L2 penalty on weight matrices only (biases excluded); adds its
    // gradient into `grads` if given, returns the penalty value.
    double l2_weight_penalty(double alpha, Gradients* grads = nullptr) const;

private:
    struct Layer {
        Matrix w;  // out x in
        std::vector<double> b;
        Activation act;
    };
    std::vector<Layer> layers_;

    // optimizer state: first/second moment accumulators, step count
    std::vector<Matrix> mw_, vw_;
    std::vector<std::vector<double>> mb_, vb_;
    std::uint64_t step_ = 0;
};

// Mean over the batch of the per-sample stable binary cross-entropy on raw
// logits. Writes dLoss/dlogits into *dlogits if given.
double bce_with_logits(const Matrix& logits, std::span<const double> targets,
                       Matrix* dlogits = nullptr);

// Mean over the batch of per-sample squared-error sums.
double mse_loss(const Matrix& pred, const Matrix& target, Matrix* dpred = nullptr);

// Mean over the batch of per-sample KL(q(z|x) || N(0, I)) given the encoder's
// mean and log-variance halves.
double kl_standard_normal(const Matrix& mu, const Matrix& logvar, Matrix* dmu = nullptr,
                          Matrix* dlogvar = nullptr);

// Central-difference check of d loss / d parameters. `loss` must be a pure
// function of the net's parameters that also accumulates analytic gradients
// when handed a Gradients pointer. Returns the maximum relative error
// |ga - gfd| / max(|ga|, |gfd|, 1e-3).
double gradient_check(NetCore& net,
                      const std::function<double(NetCore&, NetCore::Gradients*)>& loss,
                      double fd_epsilon = 1e-5);

}  // namespace net
}  // namespace augbench
