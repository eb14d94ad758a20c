#include "train/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "common/error.hpp"
#include "common/seed.hpp"

namespace nd::train {

PipelineResult run_pipeline(const synth::Recording& rec, const nn::MlpModel& topology, const TrainConfig& config) {
    config.validate();
    topology.validate();
    const auto ds = window_dataset(rec, topology.input_len, topology.input_len);
    const auto balanced = rebalance(ds, config.neg_pos_ratio, derive_seed(config.seed, {10}));
    PipelineResult out;
    out.split = split_dataset(balanced, config.train_fraction, derive_seed(config.seed, {11}));
    TrainConfig tc = config;
    tc.seed = derive_seed(config.seed, {12});
    auto trained = train_mlp(out.split.train, out.split.validation, topology, tc);
    out.model = std::move(trained.model);
    out.history = std::move(trained.history);
    return out;
}

std::uint64_t grid_cell_seed(std::uint64_t seed, std::size_t window_len, std::size_t hidden) {
    return derive_seed(seed, {window_len, hidden});
}

LossSurface grid_search(const synth::Recording& rec, const std::vector<std::size_t>& window_lens,
                        const std::vector<std::size_t>& hidden_sizes, const TrainConfig& config, unsigned threads) {
    if (window_lens.empty() || hidden_sizes.empty()) throw Error(ErrorCode::InvalidArgument, "grid axes must be non-empty");
    config.validate();

    LossSurface surface{window_lens, hidden_sizes, {}};
    for (auto w : window_lens)
        for (auto h : hidden_sizes) surface.cells.push_back({w, h, grid_cell_seed(config.seed, w, h), std::nullopt, {}});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < surface.cells.size();) {
            auto& cell = surface.cells[i];
            try {
                const std::size_t hidden[] = {cell.hidden};
                TrainConfig tc = config;
                tc.seed = cell.seed;
                cell.loss = run_pipeline(rec, nn::make_mlp(cell.window_len, hidden), tc).history.best_validation();
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, surface.cells.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return surface;
}

}  // namespace nd::train
