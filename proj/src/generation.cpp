#include "augbench/generation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace augbench {
namespace gen {

namespace {

using net::Activation;
using net::NetCore;

std::vector<std::size_t> net_shape(std::size_t in, const std::vector<std::size_t>& hidden,
                                   std::size_t out) {
    std::vector<std::size_t> shape{in};
    shape.insert(shape.end(), hidden.begin(), hidden.end());
    shape.push_back(out);
    return shape;
}

std::vector<Activation> relu_stack(std::size_t hidden_layers) {
    std::vector<Activation> acts(hidden_layers, Activation::Relu);
    acts.push_back(Activation::Linear);
    return acts;
}

Matrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = rng.gaussian();
    return m;
}

std::size_t effective_batch(const GenerationConfig& cfg, std::size_t n) {
    if (!cfg.batches_per_epoch_mode) return cfg.batch_size;
    // alternative reading: cfg.batch_size counts minibatches per epoch
    return std::max<std::size_t>(1, (n + cfg.batch_size - 1) / cfg.batch_size);
}

void check_finite(double loss, const char* what, std::size_t epoch) {
    if (!std::isfinite(loss))
        throw std::runtime_error(std::string(what) + " training diverged (non-finite loss) at epoch " +
                                 std::to_string(epoch));
}

struct ClipBounds {
    std::vector<double> lo, hi;
};

ClipBounds clip_bounds(const Matrix& x) {
    ClipBounds b;
    b.lo.resize(x.cols());
    b.hi.resize(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double lo = x(0, c), hi = x(0, c);
        for (std::size_t r = 1; r < x.rows(); ++r) {
            lo = std::min(lo, x(r, c));
            hi = std::max(hi, x(r, c));
        }
        b.lo[c] = lo;
        b.hi[c] = hi;
    }
    return b;
}

Matrix with_label_column(const Matrix& x, std::span<const int> labels) {
    Matrix out(x.rows(), x.cols() + 1);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto src = x.row(r);
        auto dst = out.row(r);
        for (std::size_t c = 0; c < x.cols(); ++c) dst[c] = src[c];
        dst[x.cols()] = static_cast<double>(labels[r]);
    }
    return out;
}

// one adversarial minibatch: discriminator update on real+fake, then
// generator update through the frozen discriminator
std::pair<double, double> adversarial_step(NetCore& generator, NetCore& critic,
                                           const Matrix& real_in, const Matrix& gen_in,
                                           const Matrix& gen_in2,
                                           std::span<const int> fake_labels, bool conditional,
                                           const net::AdamConfig& adam) {
    const std::size_t b = real_in.rows();

    // discriminator pass
    NetCore::Cache g_cache;
    Matrix fake_features = generator.forward(gen_in, g_cache);
    Matrix fake_in = conditional ? with_label_column(fake_features, fake_labels) : fake_features;

    Matrix d_batch(0, real_in.cols());
    d_batch.append_rows(real_in);
    d_batch.append_rows(fake_in);
    std::vector<double> d_targets(2 * b, 0.0);
    for (std::size_t i = 0; i < b; ++i) d_targets[i] = 1.0;

    NetCore::Cache d_cache;
    Matrix d_logits = critic.forward(d_batch, d_cache);
    Matrix d_grad(d_logits.rows(), 1);
    const double loss_d = net::bce_with_logits(d_logits, d_targets, &d_grad);
    NetCore::Gradients d_grads = critic.zero_gradients();
    critic.backward(d_cache, d_grad, d_grads);
    critic.adam_step(d_grads, adam);

    // generator pass: push fakes toward the "real" target
    NetCore::Cache g_cache2;
    Matrix fake2 = generator.forward(gen_in2, g_cache2);
    Matrix fake2_in = conditional ? with_label_column(fake2, fake_labels) : fake2;
    NetCore::Cache d_cache2;
    Matrix g_logits = critic.forward(fake2_in, d_cache2);
    const std::vector<double> ones(b, 1.0);
    Matrix g_grad_logits(b, 1);
    const double loss_g = net::bce_with_logits(g_logits, ones, &g_grad_logits);

    NetCore::Gradients d_scratch = critic.zero_gradients();
    Matrix d_input_grad = critic.backward(d_cache2, g_grad_logits, d_scratch);
    if (conditional) {
        // drop the label column's gradient
        Matrix trimmed(b, d_input_grad.cols() - 1);
        for (std::size_t r = 0; r < b; ++r)
            for (std::size_t c = 0; c + 1 < d_input_grad.cols(); ++c)
                trimmed(r, c) = d_input_grad(r, c);
        d_input_grad = std::move(trimmed);
    }
    NetCore::Gradients g_grads = generator.zero_gradients();
    generator.backward(g_cache2, d_input_grad, g_grads);
    generator.adam_step(g_grads, adam);

    return {loss_g, loss_d};
}

GeneratorModel train_adversarial(const TabularDataset& train, const GenerationConfig& cfg,
                                 const SeedStream& stream, bool conditional) {
    if (train.size() == 0) throw std::invalid_argument("generation: empty training set");
    if (!train.features.all_finite())
        throw std::invalid_argument("generation: non-finite features");
    if (conditional && !train.both_classes_present())
        throw std::invalid_argument("CGAN: single-class training data (conditioning is vacuous)");
    cfg.validate(train.size());

    const std::size_t d = train.features.cols();
    const std::size_t n = train.size();
    const std::size_t batch = effective_batch(cfg, n);

    Rng init_rng = stream.child("init").rng();
    const std::size_t g_in = cfg.latent_dim + (conditional ? 1 : 0);
    const std::size_t d_in = d + (conditional ? 1 : 0);
    GeneratorModel model;
    model.kind = conditional ? GenKind::Cgan : GenKind::Gan;
    model.generator =
        NetCore(net_shape(g_in, cfg.hidden_sizes, d), relu_stack(cfg.hidden_sizes.size()), init_rng);
    model.critic =
        NetCore(net_shape(d_in, cfg.hidden_sizes, 1), relu_stack(cfg.hidden_sizes.size()), init_rng);
    model.latent_dim = cfg.latent_dim;
    model.feature_dim = d;
    const ClipBounds bounds = clip_bounds(train.features);
    model.clip_lo = bounds.lo;
    model.clip_hi = bounds.hi;
    model.positive_ratio =
        static_cast<double>(train.count_label(1)) / static_cast<double>(n);

    const net::AdamConfig adam{cfg.learning_rate, 0.5, 0.999, 1e-8};
    Rng rng = stream.child("train").rng();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double sum_g = 0.0, sum_d = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start + batch <= n; start += batch) {
            const std::span<const std::size_t> idx(order.data() + start, batch);
            Matrix real = train.features.select_rows(idx);
            std::vector<int> batch_labels(batch);
            for (std::size_t i = 0; i < batch; ++i) batch_labels[i] = train.labels[idx[i]];
            Matrix real_in = conditional ? with_label_column(real, batch_labels) : real;

            Matrix z1 = gaussian_matrix(batch, cfg.latent_dim, rng);
            Matrix z2 = gaussian_matrix(batch, cfg.latent_dim, rng);
            Matrix g_in1 = conditional ? with_label_column(z1, batch_labels) : z1;
            Matrix g_in2 = conditional ? with_label_column(z2, batch_labels) : z2;

            const auto [loss_g, loss_d] = adversarial_step(model.generator, model.critic, real_in,
                                                           g_in1, g_in2, batch_labels,
                                                           conditional, adam);
            check_finite(loss_g, conditional ? "CGAN" : "GAN", epoch);
            check_finite(loss_d, conditional ? "CGAN" : "GAN", epoch);
            sum_g += loss_g;
            sum_d += loss_d;
            ++batches;
        }
        if (batches == 0) {
            // dataset smaller than one batch never happens (validated), but guard
            throw std::runtime_error("generation: no full minibatch available");
        }
        model.losses.push_back({sum_g / batches, sum_d / batches});
        if (!model.generator.all_finite() || !model.critic.all_finite())
            throw std::runtime_error("GAN training diverged (non-finite parameters) at epoch " +
                                     std::to_string(epoch));
    }
    return model;
}

}  // namespace

void GenerationConfig::validate(std::size_t train_rows) const {
    if (latent_dim == 0 || batch_size == 0 || learning_rate <= 0.0)
        throw std::invalid_argument("GenerationConfig: latent_dim, batch_size and learning_rate must be positive");
    for (std::size_t h : hidden_sizes)
        if (h == 0) throw std::invalid_argument("GenerationConfig: hidden sizes must be positive");
    if (!batches_per_epoch_mode && batch_size > train_rows)
        throw std::invalid_argument("GenerationConfig: batch_size exceeds training rows");
}

Matrix GeneratorModel::sample(std::size_t n, Rng& rng) const {
    Matrix z(n, latent_dim);
    for (double& v : z.data()) v = rng.gaussian();
    Matrix out;
    if (kind == GenKind::Cgan) {
        throw std::logic_error("GeneratorModel::sample: CGAN requires sample_class");
    }
    out = generator.forward(z);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < out.cols(); ++c)
            row[c] = std::clamp(row[c], clip_lo[c], clip_hi[c]);
    }
    return out;
}

Matrix GeneratorModel::sample_class(std::size_t n, int label, Rng& rng) const {
    if (kind != GenKind::Cgan)
        throw std::logic_error("GeneratorModel::sample_class: model is not class-conditional");
    Matrix z(n, latent_dim + 1);
    for (std::size_t r = 0; r < n; ++r) {
        auto row = z.row(r);
        for (std::size_t c = 0; c < latent_dim; ++c) row[c] = rng.gaussian();
        row[latent_dim] = static_cast<double>(label);
    }
    Matrix out = generator.forward(z);
    for (std::size_t r = 0; r < out.rows(); ++r) {
        auto row = out.row(r);
        for (std::size_t c = 0; c < out.cols(); ++c)
            row[c] = std::clamp(row[c], clip_lo[c], clip_hi[c]);
    }
    return out;
}

void GeneratorModel::dump_losses_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_losses_csv: cannot open " + path);
    out << (kind == GenKind::Vae ? "epoch,recon,kl\n" : "epoch,loss_g,loss_d\n");
    for (std::size_t e = 0; e < losses.size(); ++e)
        out << e << ',' << losses[e].a << ',' << losses[e].b << '\n';
}

GeneratorModel train_gan(const TabularDataset& train, const GenerationConfig& cfg,
                         const SeedStream& stream) {
    return train_adversarial(train, cfg, stream, /*conditional=*/false);
}

GeneratorModel train_cgan(const TabularDataset& train, const GenerationConfig& cfg,
                          const SeedStream& stream) {
    return train_adversarial(train, cfg, stream, /*conditional=*/true);
}

GeneratorModel train_vae(const TabularDataset& train, const GenerationConfig& cfg,
                         const SeedStream& stream) {
    if (train.size() == 0) throw std::invalid_argument("generation: empty training set");
    if (!train.features.all_finite())
        throw std::invalid_argument("generation: non-finite features");
    cfg.validate(train.size());

    const std::size_t d = train.features.cols();
    const std::size_t n = train.size();
    const std::size_t batch = effective_batch(cfg, n);
    const std::size_t latent = cfg.latent_dim;

    Rng init_rng = stream.child("init").rng();
    GeneratorModel model;
    model.kind = GenKind::Vae;
    // encoder emits mean and log-variance halves side by side
    model.critic = NetCore(net_shape(d, cfg.hidden_sizes, 2 * latent),
                           relu_stack(cfg.hidden_sizes.size()), init_rng);
    model.generator = NetCore(net_shape(latent, cfg.hidden_sizes, d),
                              relu_stack(cfg.hidden_sizes.size()), init_rng);
    model.latent_dim = latent;
    model.feature_dim = d;
    const ClipBounds bounds = clip_bounds(train.features);
    model.clip_lo = bounds.lo;
    model.clip_hi = bounds.hi;
    model.positive_ratio =
        static_cast<double>(train.count_label(1)) / static_cast<double>(n);

    const net::AdamConfig adam{cfg.learning_rate, 0.9, 0.999, 1e-8};
    Rng rng = stream.child("train").rng();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double sum_recon = 0.0, sum_kl = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start + batch <= n; start += batch) {
            const std::span<const std::size_t> idx(order.data() + start, batch);
            Matrix x = train.features.select_rows(idx);

            NetCore::Cache enc_cache;
            Matrix enc_out = model.critic.forward(x, enc_cache);
            Matrix mu(batch, latent), logvar(batch, latent), eps(batch, latent), z(batch, latent);
            for (std::size_t r = 0; r < batch; ++r)
                for (std::size_t c = 0; c < latent; ++c) {
                    mu(r, c) = enc_out(r, c);
                    logvar(r, c) = enc_out(r, c + latent);
                    eps(r, c) = rng.gaussian();
                    z(r, c) = mu(r, c) + std::exp(0.5 * logvar(r, c)) * eps(r, c);
                }

            NetCore::Cache dec_cache;
            Matrix recon = model.generator.forward(z, dec_cache);
            Matrix drecon(batch, d);
            const double recon_loss = net::mse_loss(recon, x, &drecon);
            Matrix dmu(batch, latent), dlogvar(batch, latent);
            const double kl = net::kl_standard_normal(mu, logvar, &dmu, &dlogvar);
            check_finite(recon_loss + kl, "VAE", epoch);

            NetCore::Gradients dec_grads = model.generator.zero_gradients();
            Matrix dz = model.generator.backward(dec_cache, drecon, dec_grads);

            // reparameterization: z = mu + exp(logvar/2) * eps
            Matrix denc(batch, 2 * latent);
            for (std::size_t r = 0; r < batch; ++r)
                for (std::size_t c = 0; c < latent; ++c) {
                    denc(r, c) = dz(r, c) + dmu(r, c);
                    denc(r, c + latent) =
                        dz(r, c) * 0.5 * std::exp(0.5 * logvar(r, c)) * eps(r, c) + dlogvar(r, c);
                }
            NetCore::Gradients enc_grads = model.critic.zero_gradients();
            model.critic.backward(enc_cache, denc, enc_grads);

            model.generator.adam_step(dec_grads, adam);
            model.critic.adam_step(enc_grads, adam);
            sum_recon += recon_loss;
            sum_kl += kl;
            ++batches;
        }
        if (batches == 0) throw std::runtime_error("generation: no full minibatch available");
        model.losses.push_back({sum_recon / batches, sum_kl / batches});
        if (!model.generator.all_finite() || !model.critic.all_finite())
            throw std::runtime_error("VAE training diverged (non-finite parameters) at epoch " +
                                     std::to_string(epoch));
    }
    return model;
}

TabularDataset augment_by_generation(const TabularDataset& train, const GeneratorModel& model,
                                     const SeedStream& stream) {
    if (train.size() == 0) throw std::invalid_argument("augment_by_generation: empty training set");
    if (train.features.cols() != model.feature_dim)
        throw std::invalid_argument("augment_by_generation: feature width mismatch");

    const std::size_t n = train.size();
    const double c1 = static_cast<double>(train.count_label(1));
    const double c0 = static_cast<double>(train.count_label(0));
    const std::vector<double> weights{c1, c0};
    const auto counts = largest_remainder_apportion(weights, n);

    Rng rng = stream.rng();
    TabularDataset out = train;
    if (model.kind == GenKind::Cgan) {
        Matrix pos = model.sample_class(counts[0], 1, rng);
        Matrix neg = model.sample_class(counts[1], 0, rng);
        for (std::size_t r = 0; r < pos.rows(); ++r) {
            out.features.append_row(pos.row(r));
            out.labels.push_back(1);
            out.groups.emplace_back("synthetic");
        }
        for (std::size_t r = 0; r < neg.rows(); ++r) {
            out.features.append_row(neg.row(r));
            out.labels.push_back(0);
            out.groups.emplace_back("synthetic");
        }
    } else {
        Matrix synth = model.sample(n, rng);
        std::vector<int> synth_labels(n, 0);
        for (std::size_t i = 0; i < counts[0]; ++i) synth_labels[i] = 1;
        rng.shuffle(synth_labels);
        for (std::size_t r = 0; r < n; ++r) {
            out.features.append_row(synth.row(r));
            out.labels.push_back(synth_labels[r]);
            out.groups.emplace_back("synthetic");
        }
    }
    return out;
}

}  // namespace gen
}  // namespace augbench
