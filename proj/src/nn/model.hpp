#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nd::nn {

enum class Activation { Relu, Logistic, Identity };

std::string to_string(Activation a);
Activation parse_activation(const std::string& s);
double activate(Activation a, double z);

/// Numerically stable logistic function; result is clamped into the open
/// interval (0, 1) so downstream log-losses stay finite.
double logistic(double z);

/// Dense layer; weights are row-major, out x in.
struct DenseLayer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;
    std::vector<double> biases;
    Activation activation = Activation::Relu;

    double weight(std::size_t o, std::size_t i) const { return weights[o * in + i]; }
    std::size_t parameter_count() const { return out * in + out; }
};

/// Valid-mode 1-D filter bank. Kernels are row-major, n_kernels x kernel_len.
struct ConvFrontEnd {
    std::size_t n_kernels = 0;
    std::size_t kernel_len = 0;
    std::size_t stride = 1;
    std::vector<double> kernels;
    Activation activation = Activation::Relu;

    std::size_t output_len(std::size_t input_len) const;
    std::size_t feature_count(std::size_t input_len) const { return n_kernels * output_len(input_len); }
    std::size_t parameter_count() const { return n_kernels * kernel_len; }
};

struct MlpModel {
    std::size_t input_len = 0;
    std::optional<ConvFrontEnd> front_end;
    std::vector<DenseLayer> layers;

    /// Throws Dimension / InvalidArgument when the chain is inconsistent.
    void validate() const;
    std::size_t parameter_count() const;
    std::vector<std::size_t> hidden_sizes() const;
};

/// Zero-initialized input_len -> hidden... -> 1 network with rectifier hidden
/// units and a logistic output.
MlpModel make_mlp(std::size_t input_len, std::span<const std::size_t> hidden);

/// Same dense head behind a convolutional front end.
MlpModel make_cnn(std::size_t input_len, std::size_t n_kernels, std::size_t kernel_len, std::size_t stride,
                  std::span<const std::size_t> hidden);

std::vector<double> conv1d_forward(const ConvFrontEnd& front_end, std::span<const double> window);
std::vector<double> dense_forward(const DenseLayer& layer, std::span<const double> input);

/// Probability for one window of full-scale samples.
double mlp_forward(const MlpModel& model, std::span<const double> window);

}  // namespace nd::nn
