#pragma once

#include <string>
#include <vector>

#include "augbench/common.hpp"
#include "augbench/dataset.hpp"
#include "augbench/netcore.hpp"

namespace augbench {
namespace gen {

enum class GenKind { Gan, Vae, Cgan };

struct GenerationConfig {
    std::size_t latent_dim = 100;
    std::size_t epochs = 100;
    std::size_t batch_size = 64;
    double learning_rate = 2e-4;
    std::vector<std::size_t> hidden_sizes = {128, 128};
    // alternative reading of the batching hyperparameter: treat 64 as the
    // number of minibatches per epoch instead of the minibatch size
    bool batches_per_epoch_mode = false;

    void validate(std::size_t train_rows) const;
};

struct EpochLoss {
    double a = 0.0;  // generator loss / reconstruction
    double b = 0.0;  // discriminator loss / KL
};

struct GeneratorModel {
    GenKind kind;
    net::NetCore generator;  // GAN/CGAN: latent -> features; VAE: decoder
    net::NetCore critic;     // GAN/CGAN: discriminator; VAE: encoder
    std::size_t latent_dim = 0;
    std::size_t feature_dim = 0;
    std::vector<double> clip_lo, clip_hi;  // training min/max per column
    double positive_ratio = 0.0;           // empirical class-1 fraction of training data
    std::vector<EpochLoss> losses;         // per-epoch training losses

    // n synthetic feature rows, clipped to the training box
    Matrix sample(std::size_t n, Rng& rng) const;
    // CGAN only: rows generated for the requested class
    Matrix sample_class(std::size_t n, int label, Rng& rng) const;

    // epoch,loss_g,loss_d (adversarial) or epoch,recon,kl (VAE)
    void dump_losses_csv(const std::string& path) const;
};

// Alternating adversarial training of a generator/discriminator pair on the
// standard minibatch losses. Throws with the epoch index if a loss goes
// non-finite.
GeneratorModel train_gan(const TabularDataset& train, const GenerationConfig& cfg,
                         const SeedStream& stream);

// Reparameterized variational autoencoder; loss = reconstruction MSE +
// KL(q(z|x) || N(0,I)).
GeneratorModel train_vae(const TabularDataset& train, const GenerationConfig& cfg,
                         const SeedStream& stream);

// As train_gan with the class label concatenated to both generator and
// discriminator inputs; errors on single-class training data.
GeneratorModel train_cgan(const TabularDataset& train, const GenerationConfig& cfg,
                          const SeedStream& stream);

// Appends exactly train.size() synthetic rows. GAN/VAE synthetic labels are
// drawn to preserve the empirical class ratio (largest-remainder counts);
// CGAN rows are requested per class. Synthetic rows carry the sentinel group
// "synthetic".
TabularDataset augment_by_generation(const TabularDataset& train, const GeneratorModel& model,
                                     const SeedStream& stream);

}  // namespace gen
}  // namespace augbench
