#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nn/model.hpp"

namespace nd::nn {

inline constexpr int kQuantMax = 127;

/// Symmetric per-tensor 8-bit codes: value ~= code * scale, codes in [-127, 127].
struct QuantizedTensor {
    std::vector<std::int8_t> codes;
    double scale = 1.0;
};

/// Scale = max|v| / 127 (1 for an all-zero tensor); code = round(v / scale).
QuantizedTensor quantize_tensor(std::span<const double> values);
std::vector<double> dequantize_tensor(const QuantizedTensor& t);

struct QuantizedLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    QuantizedTensor weights;
    QuantizedTensor biases;
    Activation activation = Activation::Relu;
};

struct QuantizedConv {
    std::size_t n_kernels = 0;
    std::size_t kernel_len = 0;
    std::size_t stride = 1;
    QuantizedTensor kernels;
    Activation activation = Activation::Relu;
};

struct QuantizedMlp {
    std::size_t input_len = 0;
    std::optional<QuantizedConv> front_end;
    std::vector<QuantizedLayer> layers;

    std::size_t parameter_count() const;
};

/// Post-training quantization. Weights and biases of each layer get their own
/// symmetric scale. Throws Numeric on non-finite parameters.
QuantizedMlp quantize_model(const MlpModel& model);
MlpModel dequantize_model(const QuantizedMlp& q);

/// Integer inference: every layer input is quantized to 8-bit codes with a
/// per-vector symmetric scale, products accumulate in int32, and the
/// accumulator is rescaled to real before the bias and activation are applied.
double mlp_forward_quantized(const QuantizedMlp& q, std::span<const double> window);

/// Worst-case |accumulator| for a dot product of length n over 8-bit codes.
constexpr std::int64_t accumulator_bound(std::size_t n) {
    return static_cast<std::int64_t>(n) * kQuantMax * kQuantMax;
}

}  // namespace nd::nn
