#include "augbench/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace augbench {
namespace perturb {

namespace {

double quantile_linear(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double h = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

// cyclic Jacobi eigendecomposition of a symmetric matrix; eigenvectors end up
// as columns of v, paired with eigvals
void jacobi_eigen(std::vector<double>& a, std::size_t d, std::vector<double>& eigvals,
                  std::vector<double>& v) {
    v.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t p = 0; p < d; ++p)
            for (std::size_t q = p + 1; q < d; ++q) s += a[p * d + q] * a[p * d + q];
        return std::sqrt(2.0 * s);
    };

    double base = 0.0;
    for (std::size_t i = 0; i < d * d; ++i) base += a[i] * a[i];
    base = std::sqrt(base);
    const double tol = std::max(base, 1.0) * 1e-14;

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p < d; ++p) {
            for (std::size_t q = p + 1; q < d; ++q) {
                const double apq = a[p * d + q];
                if (std::abs(apq) <= tol / static_cast<double>(d * d)) continue;
                const double app = a[p * d + p];
                const double aqq = a[q * d + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < d; ++i) {
                    const double aip = a[i * d + p];
                    const double aiq = a[i * d + q];
                    a[i * d + p] = c * aip - s * aiq;
                    a[i * d + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double api = a[p * d + i];
                    const double aqi = a[q * d + i];
                    a[p * d + i] = c * api - s * aqi;
                    a[q * d + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < d; ++i) {
                    const double vip = v[i * d + p];
                    const double viq = v[i * d + q];
                    v[i * d + p] = c * vip - s * viq;
                    v[i * d + q] = s * vip + c * viq;
                }
            }
        }
    }
    eigvals.resize(d);
    for (std::size_t i = 0; i < d; ++i) eigvals[i] = a[i * d + i];
}

std::vector<double> column_means(const Matrix& m) {
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c];
    }
    for (double& v : out) v /= static_cast<double>(m.rows());
    return out;
}

std::vector<double> column_population_sds(const Matrix& m, const std::vector<double>& means) {
    std::vector<double> out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const double dlt = row[c] - means[c];
            out[c] += dlt * dlt;
        }
    }
    for (double& v : out) v = std::sqrt(v / static_cast<double>(m.rows()));
    return out;
}

void guard_scale(FittedTransform& t, std::size_t col, double& scale,
                 const std::string& feature_name) {
    if (scale == 0.0) {
        scale = 1.0;
        t.warnings.push_back("column '" + feature_name + "' constant; passed through unchanged");
    }
}

Matrix expand_degree2(const Matrix& x, bool include_squares) {
    const std::size_t d = x.cols();
    const std::size_t extra = (include_squares ? d : 0) + d * (d - 1) / 2;
    Matrix out(x.rows(), d + extra);
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto src = x.row(r);
        auto dst = out.row(r);
        std::size_t c = 0;
        for (; c < d; ++c) dst[c] = src[c];
        if (include_squares)
            for (std::size_t i = 0; i < d; ++i) dst[c++] = src[i] * src[i];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) dst[c++] = src[i] * src[j];
    }
    return out;
}

std::vector<std::string> degree2_names(const std::vector<std::string>& names,
                                       bool include_squares) {
    std::vector<std::string> out = names;
    if (include_squares)
        for (const auto& n : names) out.push_back(n + "^2");
    for (std::size_t i = 0; i < names.size(); ++i)
        for (std::size_t j = i + 1; j < names.size(); ++j)
            out.push_back(names[i] + "*" + names[j]);
    return out;
}

}  // namespace

double yeo_johnson(double x, double lambda) {
    if (x >= 0.0) {
        if (std::abs(lambda) < 1e-12) return std::log1p(x);
        return (std::pow(x + 1.0, lambda) - 1.0) / lambda;
    }
    if (std::abs(lambda - 2.0) < 1e-12) return -std::log1p(-x);
    return -(std::pow(1.0 - x, 2.0 - lambda) - 1.0) / (2.0 - lambda);
}

double yeo_johnson_mle_lambda(std::span<const double> column) {
    const std::size_t n = column.size();
    if (n == 0) throw std::invalid_argument("yeo_johnson_mle_lambda: empty column");

    double jacobian_sum = 0.0;  // (lambda - 1) multiplies this in the log-likelihood
    for (double x : column) jacobian_sum += (x >= 0.0 ? 1.0 : -1.0) * std::log1p(std::abs(x));

    auto log_likelihood = [&](double lambda) {
        std::vector<double> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = yeo_johnson(column[i], lambda);
        const double var = variance_population(t);
        if (!(var > 0.0) || !std::isfinite(var))
            return -std::numeric_limits<double>::infinity();
        return -0.5 * static_cast<double>(n) * std::log(var) + (lambda - 1.0) * jacobian_sum;
    };

    // golden-section maximization on [-5, 5]
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = -5.0, b = 5.0;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = log_likelihood(x1), f2 = log_likelihood(x2);
    while (b - a > 1e-5) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = log_likelihood(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = log_likelihood(x1);
        }
    }
    return 0.5 * (a + b);
}

namespace {

Matrix apply_fitted(const FittedTransform& t, const Matrix& x, bool fit_time, Rng* noise_rng) {
    const std::size_t d = t.input_cols;
    switch (t.kind) {
        case TransformKind::PolynomialFeatures:
            return expand_degree2(x, true);
        case TransformKind::FeatureInteraction:
            return expand_degree2(x, false);
        case TransformKind::Pca: {
            Matrix out(x.rows(), d);
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto src = x.row(r);
                auto dst = out.row(r);
                for (std::size_t c = 0; c < d; ++c) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < d; ++i)
                        s += (src[i] - t.offsets[i]) * t.rotation[i * d + c];
                    dst[c] = s;
                }
            }
            return out;
        }
        case TransformKind::Standardization:
        case TransformKind::MinMaxScaling:
        case TransformKind::RobustScaling:
        case TransformKind::PowerTransform: {
            Matrix out(x.rows(), d);
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto src = x.row(r);
                auto dst = out.row(r);
                for (std::size_t c = 0; c < d; ++c) {
                    double v = src[c];
                    if (t.kind == TransformKind::PowerTransform)
                        v = yeo_johnson(v, t.lambdas[c]);
                    dst[c] = (v - t.offsets[c]) / t.scales[c];
                }
            }
            return out;
        }
        case TransformKind::LogTransform: {
            Matrix out(x.rows(), d);
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto src = x.row(r);
                auto dst = out.row(r);
                for (std::size_t c = 0; c < d; ++c) {
                    // shift learned on train keeps arguments nonnegative there;
                    // unseen rows are clamped into log1p's domain
                    const double shifted =
                        std::max(src[c] + t.offsets[c], -1.0 + 1e-12);
                    dst[c] = std::log1p(shifted);
                }
            }
            return out;
        }
        case TransformKind::NoiseAddition: {
            Matrix out = x;
            if (fit_time && noise_rng) {
                for (std::size_t r = 0; r < out.rows(); ++r) {
                    auto row = out.row(r);
                    for (std::size_t c = 0; c < d; ++c)
                        if (t.noise_sigmas[c] > 0.0)
                            row[c] += noise_rng->gaussian(0.0, t.noise_sigmas[c]);
                }
            }
            return out;
        }
    }
    throw std::logic_error("apply_fitted: unknown transform kind");
}

}  // namespace

std::pair<FittedTransform, TabularDataset> fit_transform(TransformKind kind,
                                                         const TabularDataset& train,
                                                         const SeedStream& stream,
                                                         const PerturbOptions& opts) {
    if (train.size() == 0) throw std::invalid_argument("fit_transform: empty training set");
    const Matrix& x = train.features;
    const std::size_t d = x.cols();

    FittedTransform t;
    t.kind = kind;
    t.input_cols = d;
    t.output_names = train.feature_names;

    const auto means = column_means(x);
    const auto sds = column_population_sds(x, means);

    switch (kind) {
        case TransformKind::PolynomialFeatures:
            t.output_names = degree2_names(train.feature_names, true);
            break;
        case TransformKind::FeatureInteraction:
            t.output_names = degree2_names(train.feature_names, false);
            break;
        case TransformKind::Pca: {
            t.offsets = means;
            // sample covariance of the centered training features
            std::vector<double> cov(d * d, 0.0);
            const double denom = x.rows() > 1 ? static_cast<double>(x.rows() - 1) : 1.0;
            for (std::size_t r = 0; r < x.rows(); ++r) {
                auto row = x.row(r);
                for (std::size_t i = 0; i < d; ++i)
                    for (std::size_t j = i; j < d; ++j)
                        cov[i * d + j] += (row[i] - means[i]) * (row[j] - means[j]);
            }
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) {
                    cov[i * d + j] /= denom;
                    cov[j * d + i] = cov[i * d + j];
                }
            std::vector<double> eigvals, vecs;
            jacobi_eigen(cov, d, eigvals, vecs);

            // order components by descending eigenvalue, fix sign so the
            // largest-magnitude loading is positive
            std::vector<std::size_t> order(d);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t l, std::size_t r) { return eigvals[l] > eigvals[r]; });
            t.rotation.assign(d * d, 0.0);
            t.output_names.clear();
            for (std::size_t c = 0; c < d; ++c) {
                const std::size_t src = order[c];
                std::size_t arg = 0;
                for (std::size_t i = 1; i < d; ++i)
                    if (std::abs(vecs[i * d + src]) > std::abs(vecs[arg * d + src])) arg = i;
                const double sign = vecs[arg * d + src] < 0.0 ? -1.0 : 1.0;
                for (std::size_t i = 0; i < d; ++i)
                    t.rotation[i * d + c] = sign * vecs[i * d + src];
                t.output_names.push_back("pc" + std::to_string(c + 1));
            }
            break;
        }
        case TransformKind::Standardization: {
            t.offsets = means;
            t.scales = sds;
            for (std::size_t c = 0; c < d; ++c)
                guard_scale(t, c, t.scales[c], train.feature_names[c]);
            break;
        }
        case TransformKind::MinMaxScaling: {
            t.offsets.resize(d);
            t.scales.resize(d);
            for (std::size_t c = 0; c < d; ++c) {
                double lo = x(0, c), hi = x(0, c);
                for (std::size_t r = 1; r < x.rows(); ++r) {
                    lo = std::min(lo, x(r, c));
                    hi = std::max(hi, x(r, c));
                }
                t.offsets[c] = lo;
                t.scales[c] = hi - lo;
                guard_scale(t, c, t.scales[c], train.feature_names[c]);
            }
            break;
        }
        case TransformKind::RobustScaling: {
            t.offsets.resize(d);
            t.scales.resize(d);
            for (std::size_t c = 0; c < d; ++c) {
                auto col = x.column(c);
                t.offsets[c] = quantile_linear(col, 0.5);
                t.scales[c] = quantile_linear(col, 0.75) - quantile_linear(col, 0.25);
                guard_scale(t, c, t.scales[c], train.feature_names[c]);
            }
            break;
        }
        case TransformKind::LogTransform: {
            t.offsets.assign(d, 0.0);
            for (std::size_t c = 0; c < d; ++c) {
                double lo = x(0, c);
                for (std::size_t r = 1; r < x.rows(); ++r) lo = std::min(lo, x(r, c));
                if (lo < 0.0) t.offsets[c] = -lo;  // shift negative columns to zero minimum
            }
            break;
        }
        case TransformKind::PowerTransform: {
            t.lambdas.resize(d);
            t.offsets.resize(d);
            t.scales.resize(d);
            for (std::size_t c = 0; c < d; ++c) {
                const auto col = x.column(c);
                if (sds[c] == 0.0) {
                    t.lambdas[c] = 1.0;
                    t.offsets[c] = 0.0;
                    t.scales[c] = 1.0;
                    t.warnings.push_back("column '" + train.feature_names[c] +
                                         "' constant; passed through unchanged");
                    continue;
                }
                t.lambdas[c] = yeo_johnson_mle_lambda(col);
                std::vector<double> transformed(col.size());
                for (std::size_t i = 0; i < col.size(); ++i)
                    transformed[i] = yeo_johnson(col[i], t.lambdas[c]);
                t.offsets[c] = mean_of(transformed);
                t.scales[c] = std::sqrt(variance_population(transformed));
                guard_scale(t, c, t.scales[c], train.feature_names[c]);
            }
            break;
        }
        case TransformKind::NoiseAddition: {
            t.noise_sigmas.resize(d);
            for (std::size_t c = 0; c < d; ++c)
                t.noise_sigmas[c] = opts.noise_sigma_multiplier * sds[c];
            t.noise_seed = stream.state();
            break;
        }
    }

    TabularDataset out;
    Rng noise_rng = stream.rng();
    out.features = apply_fitted(t, x, /*fit_time=*/true, &noise_rng);
    out.labels = train.labels;
    out.groups = train.groups;
    out.feature_names = t.output_names;
    return {std::move(t), std::move(out)};
}

TabularDataset apply_transform(const FittedTransform& t, const TabularDataset& data) {
    if (data.features.cols() != t.input_cols)
        throw std::invalid_argument("apply_transform: column count mismatch");
    TabularDataset out;
    out.features = apply_fitted(t, data.features, /*fit_time=*/false, nullptr);
    out.labels = data.labels;
    out.groups = data.groups;
    out.feature_names = t.output_names;
    return out;
}

}  // namespace perturb
}  // namespace augbench
