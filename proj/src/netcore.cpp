#include "augbench/netcore.hpp"

#include <cmath>
#include <stdexcept>

namespace augbench {
namespace net {

namespace {

double activate(Activation a, double z) {
    switch (a) {
        case Activation::Linear: return z;
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::Tanh: return std::tanh(z);
    }
    return z;
}

double activate_grad(Activation a, double z) {
    switch (a) {
        case Activation::Linear: return 1.0;
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
    }
    return 1.0;
}

}  // namespace

void NetCore::Gradients::scale(double f) {
    for (auto& m : dw)
        for (double& v : m.data()) v *= f;
    for (auto& b : db)
        for (double& v : b) v *= f;
}

void NetCore::Gradients::add(const Gradients& other) {
    for (std::size_t l = 0; l < dw.size(); ++l) {
        for (std::size_t i = 0; i < dw[l].data().size(); ++i)
            dw[l].data()[i] += other.dw[l].data()[i];
        for (std::size_t i = 0; i < db[l].size(); ++i) db[l][i] += other.db[l][i];
    }
}

NetCore::NetCore(const std::vector<std::size_t>& layer_sizes,
                 const std::vector<Activation>& activations, Rng& init_rng) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("NetCore: need at least input and output sizes");
    if (activations.size() != layer_sizes.size() - 1)
        throw std::invalid_argument("NetCore: one activation per weight layer required");
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        Layer layer;
        const std::size_t fan_in = layer_sizes[l];
        const std::size_t fan_out = layer_sizes[l + 1];
        layer.w = Matrix(fan_out, fan_in);
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& v : layer.w.data()) v = init_rng.uniform(-limit, limit);
        layer.b.assign(fan_out, 0.0);
        layer.act = activations[l];
        layers_.push_back(std::move(layer));

        mw_.emplace_back(fan_out, fan_in);
        vw_.emplace_back(fan_out, fan_in);
        mb_.emplace_back(fan_out, 0.0);
        vb_.emplace_back(fan_out, 0.0);
    }
}

Matrix NetCore::forward(const Matrix& x) const {
    Cache cache;
    return forward(x, cache);
}

Matrix NetCore::forward(const Matrix& x, Cache& cache) const {
    if (x.cols() != input_size()) throw std::invalid_argument("NetCore::forward: width mismatch");
    cache.inputs.clear();
    cache.pre.clear();
    Matrix cur = x;
    for (const Layer& layer : layers_) {
        cache.inputs.push_back(cur);
        const std::size_t out_n = layer.w.rows();
        Matrix pre(cur.rows(), out_n);
        for (std::size_t r = 0; r < cur.rows(); ++r) {
            auto in_row = cur.row(r);
            auto pre_row = pre.row(r);
            for (std::size_t o = 0; o < out_n; ++o) {
                double s = layer.b[o];
                auto w_row = layer.w.row(o);
                for (std::size_t i = 0; i < w_row.size(); ++i) s += w_row[i] * in_row[i];
                pre_row[o] = s;
            }
        }
        cache.pre.push_back(pre);
        Matrix post(pre.rows(), pre.cols());
        for (std::size_t i = 0; i < pre.data().size(); ++i)
            post.data()[i] = activate(layer.act, pre.data()[i]);
        cur = std::move(post);
    }
    cache.output = cur;
    return cur;
}

NetCore::Gradients NetCore::zero_gradients() const {
    Gradients g;
    for (const Layer& layer : layers_) {
        g.dw.emplace_back(layer.w.rows(), layer.w.cols());
        g.db.emplace_back(layer.b.size(), 0.0);
    }
    return g;
}

Matrix NetCore::backward(const Cache& cache, const Matrix& grad_out, Gradients& grads) const {
    Matrix grad = grad_out;  // dLoss/d(post-activation) of the top layer
    for (std::size_t l = layers_.size(); l-- > 0;) {
        const Layer& layer = layers_[l];
        const Matrix& pre = cache.pre[l];
        const Matrix& input = cache.inputs[l];

        // through the activation
        Matrix dz(grad.rows(), grad.cols());
        for (std::size_t i = 0; i < grad.data().size(); ++i)
            dz.data()[i] = grad.data()[i] * activate_grad(layer.act, pre.data()[i]);

        // parameter gradients
        for (std::size_t r = 0; r < dz.rows(); ++r) {
            auto dz_row = dz.row(r);
            auto in_row = input.row(r);
            for (std::size_t o = 0; o < dz.cols(); ++o) {
                const double g = dz_row[o];
                grads.db[l][o] += g;
                auto dw_row = grads.dw[l].row(o);
                for (std::size_t i = 0; i < in_row.size(); ++i) dw_row[i] += g * in_row[i];
            }
        }

        // gradient w.r.t. the layer input
        Matrix dx(dz.rows(), layer.w.cols());
        for (std::size_t r = 0; r < dz.rows(); ++r) {
            auto dz_row = dz.row(r);
            auto dx_row = dx.row(r);
            for (std::size_t o = 0; o < dz.cols(); ++o) {
                const double g = dz_row[o];
                auto w_row = layer.w.row(o);
                for (std::size_t i = 0; i < w_row.size(); ++i) dx_row[i] += g * w_row[i];
            }
        }
        grad = std::move(dx);
    }
    return grad;
}

void NetCore::adam_step(const Gradients& grads, const AdamConfig& cfg) {
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        auto& w = layers_[l].w.data();
        const auto& gw = grads.dw[l].data();
        auto& mw = mw_[l].data();
        auto& vw = vw_[l].data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            mw[i] = cfg.beta1 * mw[i] + (1.0 - cfg.beta1) * gw[i];
            vw[i] = cfg.beta2 * vw[i] + (1.0 - cfg.beta2) * gw[i] * gw[i];
            w[i] -= cfg.learning_rate * (mw[i] / bc1) / (std::sqrt(vw[i] / bc2) + cfg.epsilon);
        }
        auto& b = layers_[l].b;
        const auto& gb = grads.db[l];
        auto& mb = mb_[l];
        auto& vb = vb_[l];
        for (std::size_t i = 0; i < b.size(); ++i) {
            mb[i] = cfg.beta1 * mb[i] + (1.0 - cfg.beta1) * gb[i];
            vb[i] = cfg.beta2 * vb[i] + (1.0 - cfg.beta2) * gb[i] * gb[i];
            b[i] -= cfg.learning_rate * (mb[i] / bc1) / (std::sqrt(vb[i] / bc2) + cfg.epsilon);
        }
    }
}

std::size_t NetCore::input_size() const { return layers_.front().w.cols(); }
std::size_t NetCore::output_size() const { return layers_.back().w.rows(); }

bool NetCore::all_finite() const {
    for (const Layer& layer : layers_) {
        if (!layer.w.all_finite()) return false;
        for (double v : layer.b)
            if (!std::isfinite(v)) return false;
    }
    return true;
}

std::size_t NetCore::parameter_count() const {
    std::size_t n = 0;
    for (const Layer& layer : layers_) n += layer.w.data().size() + layer.b.size();
    return n;
}

double NetCore::get_parameter(std::size_t i) const {
    for (const Layer& layer : layers_) {
        if (i < layer.w.data().size()) return layer.w.data()[i];
        i -= layer.w.data().size();
        if (i < layer.b.size()) return layer.b[i];
        i -= layer.b.size();
    }
    throw std::out_of_range("NetCore::get_parameter");
}

void NetCore::set_parameter(std::size_t i, double v) {
    for (Layer& layer : layers_) {
        if (i < layer.w.data().size()) {
            layer.w.data()[i] = v;
            return;
        }
        i -= layer.w.data().size();
        if (i < layer.b.size()) {
            layer.b[i] = v;
            return;
        }
        i -= layer.b.size();
    }
    throw std::out_of_range("NetCore::set_parameter");
}

double NetCore::flat_gradient(const Gradients& g, std::size_t i) {
    for (std::size_t l = 0; l < g.dw.size(); ++l) {
        if (i < g.dw[l].data().size()) return g.dw[l].data()[i];
        i -= g.dw[l].data().size();
        if (i < g.db[l].size()) return g.db[l][i];
        i -= g.db[l].size();
    }
    throw std::out_of_range("NetCore::flat_gradient");
}

double NetCore::l2_weight_penalty(double alpha, Gradients* grads) const {
    double penalty = 0.0;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& w = layers_[l].w.data();
        for (std::size_t i = 0; i < w.size(); ++i) {
            penalty += w[i] * w[i];
            if (grads) grads->dw[l].data()[i] += alpha * w[i];
        }
    }
    return 0.5 * alpha * penalty;
}

double bce_with_logits(const Matrix& logits, std::span<const double> targets, Matrix* dlogits) {
    if (logits.cols() != 1 || logits.rows() != targets.size())
        throw std::invalid_argument("bce_with_logits: expects one logit per target");
    const double inv_n = 1.0 / static_cast<double>(logits.rows());
    double loss = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const double z = logits(r, 0);
        const double t = targets[r];
        loss += std::max(z, 0.0) - z * t + std::log1p(std::exp(-std::abs(z)));
        if (dlogits) (*dlogits)(r, 0) = (1.0 / (1.0 + std::exp(-z)) - t) * inv_n;
    }
    return loss * inv_n;
}

double mse_loss(const Matrix& pred, const Matrix& target, Matrix* dpred) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols())
        throw std::invalid_argument("mse_loss: shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(pred.rows());
    double loss = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        const double d = pred.data()[i] - target.data()[i];
        loss += d * d;
        if (dpred) dpred->data()[i] = 2.0 * d * inv_n;
    }
    return loss * inv_n;
}

double kl_standard_normal(const Matrix& mu, const Matrix& logvar, Matrix* dmu, Matrix* dlogvar) {
    if (mu.rows() != logvar.rows() || mu.cols() != logvar.cols())
        throw std::invalid_argument("kl_standard_normal: shape mismatch");
    const double inv_n = 1.0 / static_cast<double>(mu.rows());
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.data().size(); ++i) {
        const double m = mu.data()[i];
        const double lv = logvar.data()[i];
        kl += 0.5 * (m * m + std::exp(lv) - lv - 1.0);
        if (dmu) dmu->data()[i] = m * inv_n;
        if (dlogvar) dlogvar->data()[i] = 0.5 * (std::exp(lv) - 1.0) * inv_n;
    }
    return kl * inv_n;
}

double gradient_check(NetCore& net,
                      const std::function<double(NetCore&, NetCore::Gradients*)>& loss,
                      double fd_epsilon) {
    NetCore::Gradients analytic = net.zero_gradients();
    loss(net, &analytic);

    double worst = 0.0;
    const std::size_t n = net.parameter_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double orig = net.get_parameter(i);
        net.set_parameter(i, orig + fd_epsilon);
        const double up = loss(net, nullptr);
        net.set_parameter(i, orig - fd_epsilon);
        const double down = loss(net, nullptr);
        net.set_parameter(i, orig);
        const double fd = (up - down) / (2.0 * fd_epsilon);
        const double ga = NetCore::flat_gradient(analytic, i);
        const double rel = std::abs(ga - fd) / std::max({std::abs(ga), std::abs(fd), 1e-3});
        worst = std::max(worst, rel);
    }
    return worst;
}

}  // namespace net
}  // namespace augbench
