#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "robustnet/dataset.hpp"
#include "robustnet/matrix.hpp"
#include "robustnet/rng.hpp"

namespace robustnet {

enum class Activation { ReLU };

// Feed-forward architecture: input width, hidden widths, output class count.
// Hidden layers use inverted dropout at train time (kept units scaled by
// 1/keep), so inference runs mask-free.
struct NetworkConfig {
    std::vector<std::size_t> layer_sizes;
    double hidden_dropout = 0.5;
    Activation activation = Activation::ReLU;
};

// The reference architecture: 149 inputs, hidden layers 128/256/128, 7
// health-state classes, 50% hidden dropout.
inline NetworkConfig default_network_config(std::size_t input_dim = 149,
                                            std::size_t class_count = 7) {
    return NetworkConfig{{input_dim, 128, 256, 128, class_count}, 0.5, Activation::ReLU};
}

inline void validate_network_config(const NetworkConfig& config) {
    if (config.layer_sizes.size() < 2) {
        throw std::invalid_argument("network config: need at least input and output layers");
    }
    for (std::size_t s : config.layer_sizes) {
        if (s < 1) throw std::invalid_argument("network config: layer size must be at least 1");
    }
    if (config.hidden_dropout < 0.0 || config.hidden_dropout >= 1.0) {
        throw std::invalid_argument("network config: hidden_dropout must be in [0, 1), got " +
                                    std::to_string(config.hidden_dropout));
    }
}

// Weight and bias tensors per layer transition; weights[k] is
// layer_sizes[k] x layer_sizes[k+1], biases[k] is 1 x layer_sizes[k+1].
struct Parameters {
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;
};

enum class Optimizer { Adam, SgdMomentum };

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;
inline constexpr double kSgdMomentum = 0.9;

struct TrainConfig {
    std::size_t epochs = 15;
    std::size_t batch_size = 128;
    double learning_rate = 1e-3;
    Optimizer optimizer = Optimizer::Adam;
    std::uint64_t seed = 0;
};

struct TrainedModel {
    NetworkConfig config;
    TrainConfig train_config;
    Parameters params;
    StandardizerStats standardizer;
    std::string label;
    double final_loss = 0.0;
};

struct TrainingDivergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {
constexpr std::uint64_t kSaltInit = 0x1417;
constexpr std::uint64_t kSaltShuffle = 0x5417;
constexpr std::uint64_t kSaltDropout = 0xd417;
}  // namespace detail

// He scheme: zero-mean Gaussian weights with std sqrt(2 / fan_in), which
// pairs with ReLU; biases start at zero.
inline Parameters init_params(const NetworkConfig& config, std::uint64_t seed) {
    validate_network_config(config);
    Rng rng(seed);
    Parameters params;
    for (std::size_t k = 0; k + 1 < config.layer_sizes.size(); ++k) {
        const std::size_t fan_in = config.layer_sizes[k];
        const std::size_t fan_out = config.layer_sizes[k + 1];
        const double std_dev = std::sqrt(2.0 / static_cast<double>(fan_in));
        Matrix w(fan_in, fan_out);
        for (double& v : w.values()) v = std_dev * rng.gaussian();
        params.weights.push_back(std::move(w));
        params.biases.emplace_back(1, fan_out, 0.0);
    }
    return params;
}

// Activations of every layer from one pass: input, hidden layers after
// activation (and after the dropout mask in train mode), and the softmax
// output. Masks hold the scaled dropout factors (0 or 1/keep) and are empty
// for inference or dropout 0.
struct ForwardTrace {
    std::vector<Matrix> activations;
    std::vector<Matrix> masks;
};

namespace detail {

inline void check_forward_input(const Parameters& params, const NetworkConfig& config,
                                const Matrix& x) {
    validate_network_config(config);
    const std::size_t transitions = config.layer_sizes.size() - 1;
    if (params.weights.size() != transitions || params.biases.size() != transitions) {
        throw std::invalid_argument("forward: parameters hold " +
                                    std::to_string(params.weights.size()) +
                                    " layers, config expects " + std::to_string(transitions));
    }
    if (x.cols() != config.layer_sizes.front()) {
        throw std::invalid_argument("forward: input is " + x.shape() + ", network expects " +
                                    std::to_string(config.layer_sizes.front()) + " columns");
    }
}

inline void softmax_rows_inplace(Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double* row = m.row_ptr(i);
        double mx = row[0];
        for (std::size_t j = 1; j < m.cols(); ++j) mx = std::max(mx, row[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            row[j] = std::exp(row[j] - mx);
            sum += row[j];
        }
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] /= sum;
    }
}

inline ForwardTrace forward_impl(const Parameters& params, const NetworkConfig& config,
                                 const Matrix& x, Rng* dropout_rng) {
    check_forward_input(params, config, x);
    const std::size_t transitions = params.weights.size();
    const double keep = 1.0 - config.hidden_dropout;

    ForwardTrace trace;
    trace.activations.reserve(transitions + 1);
    trace.activations.push_back(x);
    for (std::size_t k = 0; k < transitions; ++k) {
        Matrix z = add_row_broadcast(matmul(trace.activations.back(), params.weights[k]),
                                     params.biases[k]);
        if (k + 1 < transitions) {
            for (double& v : z.values()) v = v > 0.0 ? v : 0.0;
            if (dropout_rng != nullptr && config.hidden_dropout > 0.0) {
                Matrix mask(z.rows(), z.cols());
                const double inv_keep = 1.0 / keep;
                for (std::size_t e = 0; e < mask.values().size(); ++e) {
                    mask.values()[e] = dropout_rng->uniform() < keep ? inv_keep : 0.0;
                    z.values()[e] *= mask.values()[e];
                }
                trace.masks.push_back(std::move(mask));
            }
        } else {
            softmax_rows_inplace(z);
        }
        trace.activations.push_back(std::move(z));
    }
    return trace;
}

}  // namespace detail

// Training-mode pass: hidden dropout masks are drawn from a stream derived
// from (seed, step), so a training run is a pure function of its seed.
inline ForwardTrace forward_train(const Parameters& params, const NetworkConfig& config,
                                  const Matrix& x, std::uint64_t seed, std::uint64_t step) {
    Rng rng(derive_seed(seed, detail::kSaltDropout, step));
    return detail::forward_impl(params, config, x, &rng);
}

// Inference pass: no masks, no rescaling, bit-deterministic.
inline ForwardTrace forward_infer(const Parameters& params, const NetworkConfig& config,
                                  const Matrix& x) {
    return detail::forward_impl(params, config, x, nullptr);
}

struct LossGrad {
    double loss;
    Matrix grad_logits;
};

// Mean cross-entropy of softmax outputs against integer labels, with the
// gradient taken with respect to the pre-softmax logits: (probs - onehot)/n.
inline LossGrad loss_softmax_ce(const Matrix& probs, const std::vector<int>& labels) {
    if (labels.size() != probs.rows()) {
        throw std::invalid_argument("loss_softmax_ce: " + std::to_string(labels.size()) +
                                    " labels for " + std::to_string(probs.rows()) + " rows");
    }
    const std::size_t n = probs.rows();
    const std::size_t c = probs.cols();
    LossGrad out{0.0, probs};
    for (std::size_t i = 0; i < n; ++i) {
        const int label = labels[i];
        if (label < 0 || static_cast<std::size_t>(label) >= c) {
            throw std::invalid_argument("loss_softmax_ce: label " + std::to_string(label) +
                                        " at row " + std::to_string(i) + " outside [0, " +
                                        std::to_string(c) + ")");
        }
        out.loss += -std::log(probs(i, static_cast<std::size_t>(label)) + 1e-12);
        out.grad_logits(i, static_cast<std::size_t>(label)) -= 1.0;
    }
    out.loss /= static_cast<double>(n);
    for (double& v : out.grad_logits.values()) v /= static_cast<double>(n);
    return out;
}

// Exact gradients of the masked-network loss; units removed by a dropout
// mask propagate zero gradient.
inline Parameters backward(const Parameters& params, const NetworkConfig& config,
                           const ForwardTrace& trace, const Matrix& grad_logits) {
    const std::size_t transitions = params.weights.size();
    if (trace.activations.size() != transitions + 1) {
        throw std::invalid_argument("backward: trace holds " +
                                    std::to_string(trace.activations.size()) +
                                    " activations, expected " + std::to_string(transitions + 1));
    }
    if (!trace.masks.empty() && trace.masks.size() != transitions - 1) {
        throw std::invalid_argument("backward: trace holds " + std::to_string(trace.masks.size()) +
                                    " masks, expected " + std::to_string(transitions - 1));
    }
    const Matrix& probs = trace.activations.back();
    if (grad_logits.rows() != probs.rows() || grad_logits.cols() != probs.cols()) {
        throw std::invalid_argument("backward: grad_logits is " + grad_logits.shape() +
                                    ", output is " + probs.shape());
    }

    Parameters grads;
    grads.weights.reserve(transitions);
    grads.biases.reserve(transitions);
    // placeholders so we can assign in reverse order
    for (std::size_t k = 0; k < transitions; ++k) {
        grads.weights.emplace_back(1, 1);
        grads.biases.emplace_back(1, 1);
    }

    Matrix delta = grad_logits;
    for (std::size_t k = transitions; k-- > 0;) {
        grads.weights[k] = matmul(transpose(trace.activations[k]), delta);
        Matrix bias_grad(1, delta.cols(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            const double* row = delta.row_ptr(i);
            for (std::size_t j = 0; j < delta.cols(); ++j) bias_grad(0, j) += row[j];
        }
        grads.biases[k] = std::move(bias_grad);

        if (k > 0) {
            Matrix upstream = matmul(delta, transpose(params.weights[k]));
            const Matrix& act = trace.activations[k];
            if (!trace.masks.empty()) {
                const Matrix& mask = trace.masks[k - 1];
                for (std::size_t e = 0; e < upstream.values().size(); ++e) {
                    upstream.values()[e] *= mask.values()[e];
                }
            }
            // ReLU gate; post-mask activation is positive exactly where the
            // pre-mask one was, up to cells the mask already zeroed
            for (std::size_t e = 0; e < upstream.values().size(); ++e) {
                if (!(act.values()[e] > 0.0)) upstream.values()[e] = 0.0;
            }
            delta = std::move(upstream);
        }
    }
    return grads;
}

namespace detail {

inline Matrix take_rows(const Matrix& m, std::span<const std::size_t> idx) {
    Matrix out(idx.size(), m.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const double* src = m.row_ptr(idx[i]);
        double* dst = out.row_ptr(i);
        for (std::size_t j = 0; j < m.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

struct AdamState {
    std::vector<Matrix> m_w, v_w, m_b, v_b;
};

inline void adam_update(Matrix& value, Matrix& m, Matrix& v, const Matrix& grad, double lr,
                        std::size_t t) {
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(t));
    for (std::size_t e = 0; e < value.values().size(); ++e) {
        const double g = grad.values()[e];
        m.values()[e] = kAdamBeta1 * m.values()[e] + (1.0 - kAdamBeta1) * g;
        v.values()[e] = kAdamBeta2 * v.values()[e] + (1.0 - kAdamBeta2) * g * g;
        const double m_hat = m.values()[e] / bc1;
        const double v_hat = v.values()[e] / bc2;
        value.values()[e] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
    }
}

inline void momentum_update(Matrix& value, Matrix& velocity, const Matrix& grad, double lr) {
    for (std::size_t e = 0; e < value.values().size(); ++e) {
        velocity.values()[e] = kSgdMomentum * velocity.values()[e] + grad.values()[e];
        value.values()[e] -= lr * velocity.values()[e];
    }
}

}  // namespace detail

// Minibatch training. The dataset must already be standardized, with any
// input-level corruption applied by the caller; input dropout is a dataset
// transform, not a network layer. Runs epochs * ceil(n/batch) optimizer
// steps with the batch order reshuffled per epoch from the seed. Aborts
// with TrainingDivergedError if the loss leaves the finite range.
inline TrainedModel train(const Dataset& dataset_standardized, const NetworkConfig& config,
                          const TrainConfig& tc, const StandardizerStats& standardizer,
                          std::string label = {}) {
    validate_network_config(config);
    validate_dataset(dataset_standardized);
    const std::size_t n = dataset_standardized.size();
    if (tc.epochs < 1) {
        throw std::invalid_argument("train: epochs must be at least 1");
    }
    if (tc.batch_size < 1 || tc.batch_size > n) {
        throw std::invalid_argument("train: batch_size " + std::to_string(tc.batch_size) +
                                    " outside [1, " + std::to_string(n) + "]");
    }
    if (!(tc.learning_rate > 0.0)) {
        throw std::invalid_argument("train: learning_rate must be positive");
    }
    if (dataset_standardized.dim() != config.layer_sizes.front()) {
        throw std::invalid_argument("train: dataset has " +
                                    std::to_string(dataset_standardized.dim()) +
                                    " attributes, network expects " +
                                    std::to_string(config.layer_sizes.front()));
    }
    const std::size_t classes = config.layer_sizes.back();
    for (int label_value : dataset_standardized.labels) {
        if (label_value < 0 || static_cast<std::size_t>(label_value) >= classes) {
            throw std::invalid_argument("train: label " + std::to_string(label_value) +
                                        " outside network output range [0, " +
                                        std::to_string(classes) + ")");
        }
    }
    if (standardizer.dim() != config.layer_sizes.front()) {
        throw std::invalid_argument("train: standardizer dimension " +
                                    std::to_string(standardizer.dim()) +
                                    " does not match input width " +
                                    std::to_string(config.layer_sizes.front()));
    }

    Parameters params = init_params(config, derive_seed(tc.seed, detail::kSaltInit));
    detail::AdamState adam;
    std::vector<Matrix> velocity_w, velocity_b;
    for (std::size_t k = 0; k < params.weights.size(); ++k) {
        const Matrix zero_w(params.weights[k].rows(), params.weights[k].cols(), 0.0);
        const Matrix zero_b(1, params.biases[k].cols(), 0.0);
        if (tc.optimizer == Optimizer::Adam) {
            adam.m_w.push_back(zero_w);
            adam.v_w.push_back(zero_w);
            adam.m_b.push_back(zero_b);
            adam.v_b.push_back(zero_b);
        } else {
            velocity_w.push_back(zero_w);
            velocity_b.push_back(zero_b);
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::uint64_t step = 0;
    double epoch_loss = 0.0;
    for (std::size_t epoch = 0; epoch < tc.epochs; ++epoch) {
        Rng shuffle_rng(derive_seed(tc.seed, detail::kSaltShuffle, epoch));
        fisher_yates_shuffle(order, shuffle_rng);

        epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < n; begin += tc.batch_size) {
            const std::size_t count = std::min(tc.batch_size, n - begin);
            const std::span<const std::size_t> batch_idx(order.data() + begin, count);
            Matrix x = detail::take_rows(dataset_standardized.features, batch_idx);
            std::vector<int> y(count);
            for (std::size_t i = 0; i < count; ++i) {
                y[i] = dataset_standardized.labels[batch_idx[i]];
            }

            ForwardTrace trace = forward_train(params, config, x, tc.seed, step);
            LossGrad lg = loss_softmax_ce(trace.activations.back(), y);
            if (!std::isfinite(lg.loss)) {
                throw TrainingDivergedError("train: loss diverged at step " +
                                            std::to_string(step) + " (epoch " +
                                            std::to_string(epoch) + ")");
            }
            epoch_loss += lg.loss * static_cast<double>(count);

            Parameters grads = backward(params, config, trace, lg.grad_logits);
            ++step;
            for (std::size_t k = 0; k < params.weights.size(); ++k) {
                if (tc.optimizer == Optimizer::Adam) {
                    detail::adam_update(params.weights[k], adam.m_w[k], adam.v_w[k],
                                        grads.weights[k], tc.learning_rate, step);
                    detail::adam_update(params.biases[k], adam.m_b[k], adam.v_b[k],
                                        grads.biases[k], tc.learning_rate, step);
                } else {
                    detail::momentum_update(params.weights[k], velocity_w[k], grads.weights[k],
                                            tc.learning_rate);
                    detail::momentum_update(params.biases[k], velocity_b[k], grads.biases[k],
                                            tc.learning_rate);
                }
            }
        }
        epoch_loss /= static_cast<double>(n);
    }

    return TrainedModel{config, tc, std::move(params), standardizer, std::move(label),
                        epoch_loss};
}

// Standardizes raw inputs with the model's own statistics, runs a mask-free
// forward pass and takes the per-row argmax.
inline std::vector<int> predict(const TrainedModel& model, const Matrix& x_raw) {
    if (x_raw.cols() != model.config.layer_sizes.front()) {
        throw std::invalid_argument("predict: input is " + x_raw.shape() + ", model expects " +
                                    std::to_string(model.config.layer_sizes.front()) +
                                    " columns");
    }
    Matrix x = x_raw;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double* row = x.row_ptr(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            row[j] = (row[j] - model.standardizer.means[j]) / model.standardizer.stds[j];
        }
    }
    const ForwardTrace trace = forward_infer(model.params, model.config, x);
    const std::vector<std::size_t> arg = argmax_rows(trace.activations.back());
    std::vector<int> labels(arg.size());
    for (std::size_t i = 0; i < arg.size(); ++i) labels[i] = static_cast<int>(arg[i]);
    return labels;
}

inline double accuracy(const TrainedModel& model, const Dataset& dataset) {
    if (dataset.size() == 0) {
        throw std::invalid_argument("accuracy: empty dataset");
    }
    const std::vector<int> predicted = predict(model, dataset.features);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (predicted[i] == dataset.labels[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(dataset.size());
}

}  // namespace robustnet
