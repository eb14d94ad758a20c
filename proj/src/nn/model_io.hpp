#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "nn/stream.hpp"

namespace nd::nn {

/// Text model file (INI layout):
///
///   [model]   format = float | int8, input_len, layers, front_end = none | conv
///   [conv]    kernels, kernel_len, stride, activation, scale (int8), weights
///   [layerN]  in, out, activation, weight_scale / bias_scale (int8), weights, biases
///
/// Reals are written in shortest round-trip form, so both formats reload
/// bit-identically.
void write_network(const Network& net, std::ostream& out, const std::string& provenance = {});
void save_network(const Network& net, const std::filesystem::path& path, const std::string& provenance = {});
Network read_network(const std::string& text);
Network load_network(const std::filesystem::path& path);

}  // namespace nd::nn
