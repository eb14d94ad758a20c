#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dsp/filter_chain.hpp"
#include "nn/model.hpp"
#include "nn/quantized.hpp"

namespace nd::eval {

/// Structural description of one processing stage.
struct BiquadStage {};
struct EnvelopeStage {};
struct DenseStage {
    std::size_t in = 0;
    std::size_t out = 0;
};
struct ConvStage {
    std::size_t n_kernels = 0;
    std::size_t kernel_len = 0;
    std::size_t output_len = 0;
};
struct ConsensusStage {};
using Stage = std::variant<BiquadStage, EnvelopeStage, DenseStage, ConvStage, ConsensusStage>;

/// Counts by construction:
///   biquad     5 MACs/sample, five Q2.13 int16 coefficients, four int32 delay taps
///   envelope   1 multiply/sample, one int32 accumulator
///   dense      out*in MACs per window; int8 weights and biases plus two float32 scales
///   conv       n_kernels*kernel_len*output_len MACs per window; int8 kernels plus one scale
///   consensus  three float32 outputs
/// Network stages are amortized over `window_len` samples and also hold the
/// int8 input window and int32 layer outputs as state.
struct ResourceReport {
    double macs_per_sample = 0.0;
    std::size_t macs_per_window = 0;
    std::size_t parameters = 0;
    std::size_t coefficient_bytes = 0;
    std::size_t state_bytes = 0;
};

ResourceReport resource_report(std::span<const Stage> stages, std::size_t window_len = 1);

std::vector<Stage> filter_stages(const dsp::FilterDesign& design);
std::vector<Stage> network_stages(const nn::MlpModel& model, bool consensus = false);

ResourceReport resource_report(const dsp::FilterDesign& design);
ResourceReport resource_report(const nn::MlpModel& model, bool consensus = false);
ResourceReport resource_report(const nn::QuantizedMlp& model, bool consensus = false);

}  // namespace nd::eval
