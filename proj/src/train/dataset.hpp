#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "synth/recording.hpp"

namespace nd::train {

/// Fixed-length windows of full-scale samples with binary labels. Row i spans
/// recording samples [starts[i], starts[i] + window_len).
struct WindowedDataset {
    std::size_t window_len = 0;
    std::vector<double> windows;
    std::vector<std::uint8_t> labels;
    std::vector<std::size_t> starts;

    std::size_t size() const { return labels.size(); }
    std::span<const double> window(std::size_t i) const { return {windows.data() + i * window_len, window_len}; }
    std::size_t positives() const;
    std::size_t negatives() const { return size() - positives(); }
};

/// Tiles the recording with windows at `stride`. A window is positive when at
/// least half of its samples fall inside an annotated event.
WindowedDataset window_dataset(const synth::Recording& rec, std::size_t window_len, std::size_t stride);

WindowedDataset subset(const WindowedDataset& ds, std::span<const std::size_t> rows);

/// Keeps every positive and a seeded uniform sample of negatives, without
/// replacement, of size round(ratio * positives) (all negatives if fewer).
/// Rows keep their original order.
WindowedDataset rebalance(const WindowedDataset& ds, double neg_pos_ratio, std::uint64_t seed);

struct Split {
    WindowedDataset train;
    WindowedDataset validation;
    std::vector<std::string> warnings;
};

/// Stratified split: per class, round(fraction * class size) rows go to
/// training. A class with fewer than two members goes wholly to training and
/// produces a warning.
Split split_dataset(const WindowedDataset& ds, double train_fraction, std::uint64_t seed);

}  // namespace nd::train
