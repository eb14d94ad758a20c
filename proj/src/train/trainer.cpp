#include "train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "common/error.hpp"
#include "common/seed.hpp"

namespace nd::train {

using nn::Activation;
using nn::MlpModel;

void TrainConfig::validate() const {
    auto bad = [](const char* what) { throw Error(ErrorCode::Config, what); };
    if (!(learning_rate > 0.0)) bad("[training] learning_rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) bad("[training] momentum must lie in [0, 1)");
    if (epochs == 0) bad("[training] epochs must be positive");
    if (batch_size == 0) bad("[training] batch_size must be positive");
    if (!(neg_pos_ratio >= 1.0)) bad("[training] neg_pos_ratio must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) bad("[training] train_fraction must lie in (0, 1)");
}

std::vector<double*> parameter_pointers(MlpModel& m) {
    std::vector<double*> out;
    if (m.front_end)
        for (auto& k : m.front_end->kernels) out.push_back(&k);
    for (auto& l : m.layers) {
        for (auto& w : l.weights) out.push_back(&w);
        for (auto& b : l.biases) out.push_back(&b);
    }
    return out;
}

std::vector<double> flatten_parameters(const MlpModel& m) {
    std::vector<double> out;
    if (m.front_end) out.insert(out.end(), m.front_end->kernels.begin(), m.front_end->kernels.end());
    for (const auto& l : m.layers) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.biases.begin(), l.biases.end());
    }
    return out;
}

void initialize(MlpModel& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    if (m.front_end) {
        auto& fe = *m.front_end;
        const double limit = std::sqrt(6.0 / static_cast<double>(fe.kernel_len + fe.n_kernels));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (auto& k : fe.kernels) k = u(rng);
    }
    for (auto& l : m.layers) {
        const double limit = std::sqrt(6.0 / static_cast<double>(l.in + l.out));
        std::uniform_real_distribution<double> u(-limit, limit);
        for (auto& w : l.weights) w = u(rng);
        std::fill(l.biases.begin(), l.biases.end(), 0.0);
    }
}

namespace {

double derivative(Activation a, double z, double out) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Logistic: return out * (1.0 - out);
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

// log(1 + exp(z)) - y z, evaluated without overflow.
double bce_from_logit(double z, double y) { return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// Per-sample forward cache: pre-activations and activations of every stage.
struct Trace {
    std::vector<double> conv_pre;
    std::vector<double> conv_out;
    std::vector<std::vector<double>> pre;
    std::vector<std::vector<double>> act;
};

double forward_trace(const MlpModel& m, std::span<const double> x, Trace& tr) {
    std::span<const double> input = x;
    if (m.front_end) {
        const auto& fe = *m.front_end;
        const std::size_t n_out = fe.output_len(x.size());
        tr.conv_pre.assign(fe.n_kernels * n_out, 0.0);
        tr.conv_out.assign(fe.n_kernels * n_out, 0.0);
        for (std::size_t k = 0; k < fe.n_kernels; ++k)
            for (std::size_t i = 0; i < n_out; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < fe.kernel_len; ++j)
                    acc += fe.kernels[k * fe.kernel_len + j] * x[i * fe.stride + j];
                tr.conv_pre[k * n_out + i] = acc;
                tr.conv_out[k * n_out + i] = nn::activate(fe.activation, acc);
            }
        input = tr.conv_out;
    }
    tr.pre.resize(m.layers.size());
    tr.act.resize(m.layers.size());
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        const auto& layer = m.layers[l];
        auto& pre = tr.pre[l];
        auto& act = tr.act[l];
        pre.assign(layer.out, 0.0);
        act.assign(layer.out, 0.0);
        for (std::size_t o = 0; o < layer.out; ++o) {
            double acc = layer.biases[o];
            for (std::size_t i = 0; i < layer.in; ++i) acc += layer.weights[o * layer.in + i] * input[i];
            pre[o] = acc;
            act[o] = nn::activate(layer.activation, acc);
        }
        input = act;
    }
    return tr.pre.back()[0];
}

}  // namespace

double bce_loss(const MlpModel& m, const WindowedDataset& ds, std::span<const std::size_t> rows) {
    if (rows.empty()) return 0.0;
    Trace tr;
    double sum = 0.0;
    for (auto r : rows) sum += bce_from_logit(forward_trace(m, ds.window(r), tr), ds.labels[r]);
    return sum / static_cast<double>(rows.size());
}

double bce_loss(const MlpModel& m, const WindowedDataset& ds) {
    std::vector<std::size_t> rows(ds.size());
    std::iota(rows.begin(), rows.end(), 0);
    return bce_loss(m, ds, rows);
}

LossGradient loss_gradient(const MlpModel& m, const WindowedDataset& ds, std::span<const std::size_t> rows) {
    if (m.layers.empty() || m.layers.back().activation != Activation::Logistic || m.layers.back().out != 1)
        throw Error(ErrorCode::InvalidArgument, "training requires a single logistic output unit");
    if (ds.window_len != m.input_len)
        throw Error(ErrorCode::Dimension, "dataset window length " + std::to_string(ds.window_len) +
                                              " does not match model input " + std::to_string(m.input_len));

    LossGradient out;
    out.gradient.assign(m.parameter_count(), 0.0);
    if (rows.empty()) return out;

    // Offsets of each parameter block inside the flat gradient.
    const std::size_t conv_params = m.front_end ? m.front_end->parameter_count() : 0;
    std::vector<std::size_t> w_off(m.layers.size()), b_off(m.layers.size());
    std::size_t off = conv_params;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
        w_off[l] = off;
        off += m.layers[l].weights.size();
        b_off[l] = off;
        off += m.layers[l].biases.size();
    }

    Trace tr;
    std::vector<double> delta, prev_delta;
    double loss = 0.0;
    for (auto r : rows) {
        const auto x = ds.window(r);
        const double y = ds.labels[r];
        const double z = forward_trace(m, x, tr);
        loss += bce_from_logit(z, y);

        delta.assign(1, sigmoid(z) - y);  // dL/dz at the output
        for (std::size_t l = m.layers.size(); l-- > 0;) {
            const auto& layer = m.layers[l];
            std::span<const double> input = l > 0 ? std::span<const double>(tr.act[l - 1])
                                                  : (m.front_end ? std::span<const double>(tr.conv_out) : x);
            for (std::size_t o = 0; o < layer.out; ++o) {
                out.gradient[b_off[l] + o] += delta[o];
                for (std::size_t i = 0; i < layer.in; ++i) out.gradient[w_off[l] + o * layer.in + i] += delta[o] * input[i];
            }
            const bool has_prev = l > 0 || m.front_end.has_value();
            if (!has_prev) break;
            prev_delta.assign(layer.in, 0.0);
            for (std::size_t o = 0; o < layer.out; ++o)
                for (std::size_t i = 0; i < layer.in; ++i) prev_delta[i] += layer.weights[o * layer.in + i] * delta[o];
            if (l > 0) {
                const auto& below = m.layers[l - 1];
                for (std::size_t i = 0; i < layer.in; ++i)
                    prev_delta[i] *= derivative(below.activation, tr.pre[l - 1][i], tr.act[l - 1][i]);
            } else {
                const auto& fe = *m.front_end;
                for (std::size_t i = 0; i < layer.in; ++i)
                    prev_delta[i] *= derivative(fe.activation, tr.conv_pre[i], tr.conv_out[i]);
            }
            std::swap(delta, prev_delta);
        }
        if (m.front_end) {
            // delta now holds dL/d(conv pre-activation).
            const auto& fe = *m.front_end;
            const std::size_t n_out = fe.output_len(x.size());
            for (std::size_t k = 0; k < fe.n_kernels; ++k)
                for (std::size_t i = 0; i < n_out; ++i) {
                    const double d = delta[k * n_out + i];
                    if (d == 0.0) continue;
                    for (std::size_t j = 0; j < fe.kernel_len; ++j)
                        out.gradient[k * fe.kernel_len + j] += d * x[i * fe.stride + j];
                }
        }
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    out.loss = loss * inv;
    for (auto& g : out.gradient) g *= inv;
    return out;
}

TrainResult train_mlp(const WindowedDataset& train, const WindowedDataset& validation, const MlpModel& topology,
                      const TrainConfig& config) {
    config.validate();
    topology.validate();
    if (train.size() == 0) throw Error(ErrorCode::InvalidArgument, "training set is empty");
    if (train.window_len != topology.input_len || (validation.size() && validation.window_len != topology.input_len))
        throw Error(ErrorCode::Dimension, "dataset window length does not match model input length");

    MlpModel model = topology;
    initialize(model, derive_seed(config.seed, {0x1417}));
    auto params = parameter_pointers(model);
    std::vector<double> velocity(params.size(), 0.0);

    std::mt19937_64 rng(derive_seed(config.seed, {0x5107}));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const auto n = std::min(config.batch_size, order.size() - start);
            const auto g = loss_gradient(model, train, std::span(order).subspan(start, n));
            if (!std::isfinite(g.loss)) throw DivergenceError(epoch, "non-finite training loss");
            for (std::size_t p = 0; p < params.size(); ++p) {
                velocity[p] = config.momentum * velocity[p] - config.learning_rate * g.gradient[p];
                *params[p] += velocity[p];
            }
        }
        const double tl = bce_loss(model, train);
        const double vl = validation.size() ? bce_loss(model, validation) : tl;
        if (!std::isfinite(tl) || !std::isfinite(vl)) throw DivergenceError(epoch, "non-finite loss");
        result.history.train.push_back(tl);
        result.history.validation.push_back(vl);
        if (vl < best) {
            best = vl;
            result.history.best_epoch = epoch;
            result.model = model;
        }
    }
    return result;
}

}  // namespace nd::train
