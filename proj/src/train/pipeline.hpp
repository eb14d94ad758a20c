#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nn/model.hpp"
#include "synth/recording.hpp"
#include "train/dataset.hpp"
#include "train/trainer.hpp"

namespace nd::train {

struct PipelineResult {
    nn::MlpModel model;
    LossHistory history;
    Split split;
};

/// Window (stride = window length) -> rebalance -> split -> train. Stage seeds
/// are derived from config.seed so one seed fixes the whole run.
PipelineResult run_pipeline(const synth::Recording& rec, const nn::MlpModel& topology, const TrainConfig& config);

struct GridCell {
    std::size_t window_len = 0;
    std::size_t hidden = 0;
    std::uint64_t seed = 0;
    /// Validation BCE of the selected (best-epoch) model.
    std::optional<double> loss;
    std::string error;
};

/// Row-major |window_lens| x |hidden_sizes| surface.
struct LossSurface {
    std::vector<std::size_t> window_lens;
    std::vector<std::size_t> hidden_sizes;
    std::vector<GridCell> cells;

    const GridCell& at(std::size_t w, std::size_t h) const { return cells[w * hidden_sizes.size() + h]; }
};

std::uint64_t grid_cell_seed(std::uint64_t seed, std::size_t window_len, std::size_t hidden);

/// One pipeline run per (window_len, hidden) cell with a single hidden layer.
/// A failing cell records its error instead of aborting the grid. Cells run on
/// up to `threads` workers (0 = hardware concurrency); results do not depend
/// on the thread count.
LossSurface grid_search(const synth::Recording& rec, const std::vector<std::size_t>& window_lens,
                        const std::vector<std::size_t>& hidden_sizes, const TrainConfig& config,
                        unsigned threads = 0);

}  // namespace nd::train
