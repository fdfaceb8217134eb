#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace augbench {

// ---------------------------------------------------------------------------
// Deterministic randomness
// ---------------------------------------------------------------------------

namespace detail {

// splitmix64 finalizer; used both as a stream-mixing function and to expand
// a 64-bit state into engine seed material.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t hash_tag(std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace detail

// Uniform/Gaussian draws with explicitly pinned algorithms so that output is
// identical across platforms and standard libraries. mt19937_64 is fully
// specified by the standard; std::*_distribution is not, so we avoid it.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(detail::mix64(seed)) {}

    // uniform double in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // unbiased integer in [0, n); n must be > 0
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
        if ((n & (n - 1)) == 0) return engine_() & (n - 1);
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    // standard normal via Marsaglia polar method, spare value cached
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double gaussian(double mean, double sd) { return mean + sd * gaussian(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_index(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Splittable deterministic randomness source. A stream is an immutable 64-bit
// key; child() derives an independent stream, rng() yields a generator seeded
// from the key. Derivation is pure, so any (master seed, path) pair names the
// same stream regardless of execution schedule.
class SeedStream {
public:
    explicit SeedStream(std::uint64_t seed) : state_(detail::mix64(seed)) {}

    SeedStream child(std::uint64_t index) const {
        return SeedStream(raw(detail::mix64(state_ ^ (index + 0x9e3779b97f4a7c15ull))));
    }

    SeedStream child(std::string_view tag) const {
        return SeedStream(raw(detail::mix64(state_ ^ detail::hash_tag(tag))));
    }

    Rng rng() const { return Rng(state_); }

    std::uint64_t state() const { return state_; }

private:
    struct raw {
        std::uint64_t v;
        explicit raw(std::uint64_t x) : v(x) {}
    };
    explicit SeedStream(raw r) : state_(r.v) {}
    std::uint64_t state_;
};

// ---------------------------------------------------------------------------
// Small numeric helpers
// ---------------------------------------------------------------------------

inline double mean_of(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean_of: empty input");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// population variance (divide by n)
inline double variance_population(std::span<const double> v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

// sample variance (divide by n-1); 0 for n < 2
inline double variance_sample(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Inverse standard normal CDF: Acklam's rational approximation refined with
// one Halley step against erfc. Accurate to ~1e-15 on (0,1).
double normal_quantile(double p);

// Apportions `total` into parts proportional to nonnegative `weights` using
// largest-remainder rounding; the parts sum to `total` exactly.
std::vector<std::size_t> largest_remainder_apportion(std::span<const double> weights,
                                                     std::size_t total);

constexpr double kZTwoSided05 = 1.959963984540054;  // Phi^-1(0.975)

}  // namespace augbench
