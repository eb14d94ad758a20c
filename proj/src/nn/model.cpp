#include "nn/model.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace nd::nn {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Relu: return "relu";
        case Activation::Logistic: return "logistic";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation parse_activation(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "logistic") return Activation::Logistic;
    if (s == "identity") return Activation::Identity;
    throw Error(ErrorCode::Parse, "unknown activation '" + s + "'");
}

double logistic(double z) {
    constexpr double lo = 1e-15;
    const double p = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return std::clamp(p, lo, 1.0 - lo);
}

double activate(Activation a, double z) {
    switch (a) {
        case Activation::Relu: return z > 0.0 ? z : 0.0;
        case Activation::Logistic: return logistic(z);
        case Activation::Identity: return z;
    }
    return z;
}

std::size_t ConvFrontEnd::output_len(std::size_t input_len) const {
    if (kernel_len == 0 || stride == 0 || kernel_len > input_len) return 0;
    return (input_len - kernel_len) / stride + 1;
}

void MlpModel::validate() const {
    if (input_len == 0) throw Error(ErrorCode::Dimension, "input_len must be positive");
    if (layers.empty()) throw Error(ErrorCode::Dimension, "model has no dense layers");
    std::size_t width = input_len;
    if (front_end) {
        const auto& fe = *front_end;
        if (fe.stride == 0 || fe.n_kernels == 0) throw Error(ErrorCode::Dimension, "conv front end is empty");
        if (fe.kernel_len == 0 || fe.kernel_len > input_len)
            throw Error(ErrorCode::Dimension, "conv kernel length " + std::to_string(fe.kernel_len) +
                                                  " does not fit window " + std::to_string(input_len));
        if (fe.kernels.size() != fe.n_kernels * fe.kernel_len)
            throw Error(ErrorCode::Dimension, "conv kernel bank size mismatch");
        width = fe.feature_count(input_len);
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.in != width)
            throw Error(ErrorCode::Dimension, "layer " + std::to_string(l) + " expects " + std::to_string(layer.in) +
                                                  " inputs but receives " + std::to_string(width));
        if (layer.weights.size() != layer.in * layer.out || layer.biases.size() != layer.out)
            throw Error(ErrorCode::Dimension, "layer " + std::to_string(l) + " parameter arrays mismatch");
        auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
            !std::all_of(layer.biases.begin(), layer.biases.end(), finite))
            throw Error(ErrorCode::Numeric, "layer " + std::to_string(l) + " has non-finite parameters");
        width = layer.out;
    }
    if (width != 1) throw Error(ErrorCode::Dimension, "model must end in a single output unit");
    if (layers.back().activation != Activation::Logistic)
        throw Error(ErrorCode::InvalidArgument, "output unit must be logistic");
}

std::size_t MlpModel::parameter_count() const {
    std::size_t n = front_end ? front_end->parameter_count() : 0;
    for (const auto& l : layers) n += l.parameter_count();
    return n;
}

std::vector<std::size_t> MlpModel::hidden_sizes() const {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) out.push_back(layers[l].out);
    return out;
}

namespace {

void append_dense_head(MlpModel& m, std::size_t width, std::span<const std::size_t> hidden) {
    for (auto h : hidden) {
        if (h == 0) throw Error(ErrorCode::Dimension, "hidden layer size must be positive");
        m.layers.push_back({width, h, std::vector<double>(width * h), std::vector<double>(h), Activation::Relu});
        width = h;
    }
    m.layers.push_back({width, 1, std::vector<double>(width), std::vector<double>(1), Activation::Logistic});
}

}  // namespace

MlpModel make_mlp(std::size_t input_len, std::span<const std::size_t> hidden) {
    if (input_len == 0) throw Error(ErrorCode::Dimension, "input_len must be positive");
    MlpModel m;
    m.input_len = input_len;
    append_dense_head(m, input_len, hidden);
    return m;
}

MlpModel make_cnn(std::size_t input_len, std::size_t n_kernels, std::size_t kernel_len, std::size_t stride,
                  std::span<const std::size_t> hidden) {
    MlpModel m;
    m.input_len = input_len;
    m.front_end = ConvFrontEnd{n_kernels, kernel_len, stride, std::vector<double>(n_kernels * kernel_len),
                               Activation::Relu};
    if (kernel_len == 0 || kernel_len > input_len || stride == 0 || n_kernels == 0)
        throw Error(ErrorCode::Dimension, "conv front end does not fit the input window");
    append_dense_head(m, m.front_end->feature_count(input_len), hidden);
    return m;
}

std::vector<double> conv1d_forward(const ConvFrontEnd& fe, std::span<const double> window) {
    if (fe.kernel_len == 0 || fe.kernel_len > window.size())
        throw Error(ErrorCode::Dimension, "conv kernel longer than the window");
    const std::size_t n_out = fe.output_len(window.size());
    std::vector<double> out(fe.n_kernels * n_out);
    for (std::size_t k = 0; k < fe.n_kernels; ++k) {
        const double* kernel = fe.kernels.data() + k * fe.kernel_len;
        for (std::size_t i = 0; i < n_out; ++i) {
            double acc = 0.0;
            const double* x = window.data() + i * fe.stride;
            for (std::size_t j = 0; j < fe.kernel_len; ++j) acc += kernel[j] * x[j];
            out[k * n_out + i] = activate(fe.activation, acc);
        }
    }
    return out;
}

std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> input) {
    if (input.size() != layer.in)
        throw Error(ErrorCode::Dimension, "dense layer expects " + std::to_string(layer.in) + " inputs, got " +
                                              std::to_string(input.size()));
    std::vector<double> out(layer.out);
    for (std::size_t o = 0; o < layer.out; ++o) {
        double acc = layer.biases[o];
        const double* w = layer.weights.data() + o * layer.in;
        for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * input[i];
        out[o] = activate(layer.activation, acc);
    }
    return out;
}

double mlp_forward(const MlpModel& model, std::span<const double> window) {
    if (window.size() != model.input_len)
        throw Error(ErrorCode::Dimension, "window length " + std::to_string(window.size()) +
                                              " does not match model input " + std::to_string(model.input_len));
    std::vector<double> act = model.front_end ? conv1d_forward(*model.front_end, window)
                                              : std::vector<double>(window.begin(), window.end());
    for (const auto& layer : model.layers) act = dense_forward(layer, act);
    return act.at(0);
}

}  // namespace nd::nn
