#pragma once

// Second-order factorization machine over binary features:
//
//   y = w0 + sum_i w_i x_i + sum_{i<j} <v_i, v_j> x_i x_j
//
// Feature i is the bit at text position i of a BitString.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fmatsp/bit_string.hpp"
#include "fmatsp/error.hpp"

namespace fmatsp {

struct FmModel {
    std::size_t n = 0;  // features
    std::size_t k = 0;  // latent dimension
    double w0 = 0.0;
    std::vector<double> w;  // n
    std::vector<double> v;  // n x k, row-major

    FmModel() = default;
    FmModel(std::size_t features, std::size_t latent) : n(features), k(latent), w(features, 0.0), v(features * latent, 0.0) {}

    double& latent(std::size_t i, std::size_t f) { return v[i * k + f]; }
    double latent(std::size_t i, std::size_t f) const { return v[i * k + f]; }

    std::span<const double> latent_row(std::size_t i) const { return {v.data() + i * k, k}; }

    bool finite() const {
        auto ok = [](double x) { return std::isfinite(x); };
        return std::isfinite(w0) && std::all_of(w.begin(), w.end(), ok) && std::all_of(v.begin(), v.end(), ok);
    }

    friend bool operator==(const FmModel&, const FmModel&) = default;
};

struct TrainingSample {
    BitString x;
    double y = 0.0;
};

/// Bit-string/energy pairs sharing one feature length.
class TrainingSet {
public:
    TrainingSet() = default;
    explicit TrainingSet(std::size_t features) : features_(features) {}

    void add(BitString x, double y) {
        if (samples_.empty() && features_ == 0) features_ = x.size();
        if (x.size() != features_) {
            throw ValidationError("training sample has " + std::to_string(x.size()) + " bits, expected " +
                                  std::to_string(features_));
        }
        if (!std::isfinite(y)) throw ValidationError("training target must be finite");
        samples_.push_back({std::move(x), y});
    }

    std::size_t features() const noexcept { return features_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    const TrainingSample& operator[](std::size_t idx) const { return samples_[idx]; }
    auto begin() const { return samples_.begin(); }
    auto end() const { return samples_.end(); }

private:
    std::size_t features_ = 0;
    std::vector<TrainingSample> samples_;
};

namespace detail {

inline void check_features(const FmModel& model, const BitString& x) {
    if (x.size() != model.n) {
        throw ValidationError("input has " + std::to_string(x.size()) + " bits, model expects " +
                              std::to_string(model.n));
    }
}

/// Prediction plus the per-factor sums s_f = sum_i v_if x_i (reused by the gradient).
inline double predict_with_sums(const FmModel& model, const BitString& x, std::span<double> sums) {
    double y = model.w0;
    double pairwise = 0.0;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < model.n; ++i) {
        if (!x[i]) continue;
        y += model.w[i];
        const double* row = model.v.data() + i * model.k;
        for (std::size_t f = 0; f < model.k; ++f) {
            sums[f] += row[f];
            pairwise -= row[f] * row[f];
        }
    }
    for (std::size_t f = 0; f < model.k; ++f) pairwise += sums[f] * sums[f];
    return y + 0.5 * pairwise;
}

}  // namespace detail

/// O(kn) evaluation through the factorized pairwise identity.
inline double fm_predict(const FmModel& model, const BitString& x) {
    detail::check_features(model, x);
    std::vector<double> sums(model.k);
    return detail::predict_with_sums(model, x, sums);
}

inline double fm_mse(const FmModel& model, const TrainingSet& data) {
    if (data.empty()) throw ValidationError("mean squared error of an empty training set");
    std::vector<double> sums(model.k);
    double total = 0.0;
    for (const auto& s : data) {
        detail::check_features(model, s.x);
        const double err = detail::predict_with_sums(model, s.x, sums) - s.y;
        total += err * err;
    }
    return total / static_cast<double>(data.size());
}

/// Gradient of (fm_predict(model, x) - y)^2, laid out like the model itself.
inline FmModel fm_gradient(const FmModel& model, const BitString& x, double y) {
    detail::check_features(model, x);
    std::vector<double> sums(model.k);
    const double scale = 2.0 * (detail::predict_with_sums(model, x, sums) - y);
    FmModel grad(model.n, model.k);
    grad.w0 = scale;
    for (std::size_t i = 0; i < model.n; ++i) {
        if (!x[i]) continue;
        grad.w[i] = scale;
        for (std::size_t f = 0; f < model.k; ++f) grad.latent(i, f) = scale * (sums[f] - model.latent(i, f));
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Training

struct FmHyperParams {
    std::size_t k = 8;
    double learning_rate = 0.01;
    int epochs = 200;
    double init_scale = 0.01;
    std::size_t batch_size = 1;
    std::uint64_t seed = 0;
    bool center_targets = true;
};

/// Random initial model: zero bias and weights, V ~ N(0, init_scale^2).
inline FmModel fm_initial_model(std::size_t features, const FmHyperParams& hyper) {
    FmModel model(features, hyper.k);
    std::mt19937_64 rng(hyper.seed);
    std::normal_distribution<double> gauss(0.0, hyper.init_scale);
    for (double& value : model.v) value = gauss(rng);
    return model;
}

/// Minibatch SGD on the mean squared error. With `center_targets`, training
/// runs on y - mean(y) and the mean is folded into w0 afterwards. If
/// `warm_start` is given it replaces the random initial model.
///
/// The returned model never has a higher training MSE than the starting
/// model; if SGD ends worse, the starting model is returned.
inline FmModel fm_train(const TrainingSet& data, const FmHyperParams& hyper,
                        const std::optional<FmModel>& warm_start = std::nullopt) {
    if (data.empty()) throw ValidationError("cannot train on an empty training set");
    if (hyper.k < 1) throw ValidationError("latent dimension k must be at least 1");
    if (hyper.epochs < 0) throw ValidationError("epochs must be nonnegative");
    if (hyper.batch_size < 1) throw ValidationError("batch size must be at least 1");
    if (!(hyper.learning_rate > 0.0)) throw ValidationError("learning rate must be positive");

    const std::size_t n = data.features();
    FmModel model = warm_start ? *warm_start : fm_initial_model(n, hyper);
    if (model.n != n || model.k != hyper.k) {
        throw ValidationError("warm-start model shape does not match training data and k");
    }

    double shift = 0.0;
    if (hyper.center_targets) {
        for (const auto& s : data) shift += s.y;
        shift /= static_cast<double>(data.size());
    }
    if (warm_start) model.w0 -= shift;

    TrainingSet centered(n);
    for (const auto& s : data) centered.add(s.x, s.y - shift);

    const FmModel initial = model;
    const double initial_mse = fm_mse(initial, centered);

    std::vector<std::size_t> order(centered.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(hyper.seed ^ 0x9E3779B97F4A7C15ULL);
    std::vector<double> sums(hyper.k);
    FmModel step(n, hyper.k);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
            const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
            const double rate = hyper.learning_rate / static_cast<double>(stop - start);
            step.w0 = 0.0;
            std::fill(step.w.begin(), step.w.end(), 0.0);
            std::fill(step.v.begin(), step.v.end(), 0.0);
            for (std::size_t b = start; b < stop; ++b) {
                const auto& s = centered[order[b]];
                const double err = detail::predict_with_sums(model, s.x, sums) - s.y;
                epoch_loss += err * err;
                const double scale = 2.0 * err;
                step.w0 += scale;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!s.x[i]) continue;
                    step.w[i] += scale;
                    for (std::size_t f = 0; f < hyper.k; ++f) {
                        step.latent(i, f) += scale * (sums[f] - model.latent(i, f));
                    }
                }
            }
            model.w0 -= rate * step.w0;
            for (std::size_t i = 0; i < n; ++i) model.w[i] -= rate * step.w[i];
            for (std::size_t idx = 0; idx < model.v.size(); ++idx) model.v[idx] -= rate * step.v[idx];
        }
        if (!std::isfinite(epoch_loss) || !model.finite()) {
            throw TrainingError("factorization machine training diverged", epoch);
        }
    }

    FmModel result = fm_mse(model, centered) <= initial_mse ? model : initial;
    result.w0 += shift;
    return result;
}

}  // namespace fmatsp
