#include "nn/quantized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common/error.hpp"

namespace nd::nn {

static_assert(accumulator_bound(256) < std::numeric_limits<std::int32_t>::max());

QuantizedTensor quantize_tensor(std::span<const double> values) {
    double peak = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::Numeric, "cannot quantize a non-finite value");
        peak = std::max(peak, std::abs(v));
    }
    QuantizedTensor t;
    t.scale = peak > 0.0 ? peak / kQuantMax : 1.0;
    t.codes.reserve(values.size());
    for (double v : values) {
        const double c = std::clamp(std::round(v / t.scale), -double(kQuantMax), double(kQuantMax));
        t.codes.push_back(static_cast<std::int8_t>(c));
    }
    return t;
}

std::vector<double> dequantize_tensor(const QuantizedTensor& t) {
    std::vector<double> out;
    out.reserve(t.codes.size());
    for (auto c : t.codes) out.push_back(c * t.scale);
    return out;
}

std::size_t QuantizedMlp::parameter_count() const {
    std::size_t n = front_end ? front_end->kernels.codes.size() : 0;
    for (const auto& l : layers) n += l.weights.codes.size() + l.biases.codes.size();
    return n;
}

QuantizedMlp quantize_model(const MlpModel& model) {
    model.validate();
    QuantizedMlp q;
    q.input_len = model.input_len;
    if (model.front_end) {
        const auto& fe = *model.front_end;
        q.front_end = QuantizedConv{fe.n_kernels, fe.kernel_len, fe.stride, quantize_tensor(fe.kernels),
                                    fe.activation};
    }
    for (const auto& l : model.layers)
        q.layers.push_back({l.in, l.out, quantize_tensor(l.weights), quantize_tensor(l.biases), l.activation});
    return q;
}

MlpModel dequantize_model(const QuantizedMlp& q) {
    MlpModel m;
    m.input_len = q.input_len;
    if (q.front_end) {
        const auto& fe = *q.front_end;
        m.front_end = ConvFrontEnd{fe.n_kernels, fe.kernel_len, fe.stride, dequantize_tensor(fe.kernels),
                                   fe.activation};
    }
    for (const auto& l : q.layers)
        m.layers.push_back({l.in, l.out, dequantize_tensor(l.weights), dequantize_tensor(l.biases), l.activation});
    return m;
}

namespace {

std::int32_t dot(const std::int8_t* a, const std::int8_t* b, std::size_t n) {
    std::int32_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<std::int32_t>(a[i]) * b[i];
    return acc;
}

}  // namespace

double mlp_forward_quantized(const QuantizedMlp& q, std::span<const double> window) {
    if (window.size() != q.input_len)
        throw Error(ErrorCode::Dimension, "window length " + std::to_string(window.size()) +
                                              " does not match model input " + std::to_string(q.input_len));
    if (q.input_len > 256 || q.layers.empty())
        throw Error(ErrorCode::Unsupported, "quantized inference supports 1..256 inputs with at least one layer");

    std::vector<double> act(window.begin(), window.end());
    if (q.front_end) {
        const auto& fe = *q.front_end;
        if (fe.kernel_len == 0 || fe.kernel_len > act.size() || fe.stride == 0)
            throw Error(ErrorCode::Dimension, "conv kernel longer than the window");
        const auto x = quantize_tensor(act);
        const std::size_t n_out = (act.size() - fe.kernel_len) / fe.stride + 1;
        std::vector<double> features(fe.n_kernels * n_out);
        for (std::size_t k = 0; k < fe.n_kernels; ++k)
            for (std::size_t i = 0; i < n_out; ++i) {
                const auto acc = dot(fe.kernels.codes.data() + k * fe.kernel_len, x.codes.data() + i * fe.stride,
                                     fe.kernel_len);
                features[k * n_out + i] = activate(fe.activation, acc * fe.kernels.scale * x.scale);
            }
        act = std::move(features);
    }

    for (const auto& layer : q.layers) {
        if (act.size() != layer.in) throw Error(ErrorCode::Dimension, "quantized layer width mismatch");
        if (layer.in > 256) throw Error(ErrorCode::Unsupported, "quantized layer wider than 256 inputs");
        const auto x = quantize_tensor(act);
        std::vector<double> next(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const auto acc = dot(layer.weights.codes.data() + o * layer.in, x.codes.data(), layer.in);
            const double z = acc * layer.weights.scale * x.scale + layer.biases.codes[o] * layer.biases.scale;
            next[o] = activate(layer.activation, z);
        }
        act = std::move(next);
    }
    return act.at(0);
}

}  // namespace nd::nn
