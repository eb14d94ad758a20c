#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsp/filter_chain.hpp"
#include "nn/consensus.hpp"
#include "synth/generator.hpp"
#include "train/trainer.hpp"

namespace nd::app {

struct MlpSection {
    std::size_t input_len = 20;
    std::vector<std::size_t> hidden = {8};
    nn::ConsensusRule consensus_rule = nn::ConsensusRule::Mean;
    double decision_threshold = 0.5;
};

struct CnnSection {
    std::size_t n_kernels = 4;
    std::size_t kernel_len = 8;
    std::size_t stride = 2;
    std::vector<std::size_t> hidden = {8};
};

struct EvalSection {
    /// Every classifier is compared at its highest threshold reaching this sample-level TPR.
    double target_tpr = 0.9;
    double latency_bin_s = 0.25;
    double overlap_bin_pct = 10.0;
};

struct SweepSection {
    std::vector<std::size_t> window_lens = {5, 10, 20, 40, 80};
    std::vector<std::size_t> hidden_sizes = {2, 4, 8, 16, 32};
};

struct FreqMapSection {
    std::vector<double> freqs_hz;
    std::vector<double> amps_uv = {2.5, 5.0, 10.0, 14.142135623730951, 20.0, 30.0, 40.0};
    double tone_s = 1.0;
    int repeats = 10;
    double noise_rms_uv = 4.0;
    double preroll_s = 1.0;
};

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> output_dir;
    unsigned threads = 0;
    synth::SynthConfig synth;
    dsp::FilterChainConfig filter;
    /// Pick the envelope threshold on the training recording at eval.target_tpr.
    bool filter_auto_threshold = true;
    MlpSection mlp;
    CnnSection cnn;
    train::TrainConfig training;
    std::size_t window_len = 20;
    EvalSection eval;
    SweepSection sweep;
    FreqMapSection freqmap;
    std::optional<std::filesystem::path> recording_path;
    std::optional<std::filesystem::path> model_path;

    ExperimentConfig();

    /// Checks every section; throws Config naming the offending field.
    void validate() const;
};

/// Built-in configurations: "full" (full-size run) and "demo" (minutes-scale).
std::optional<ExperimentConfig> builtin_config(const std::string& name);

/// A built-in name or a path to an INI file. Unknown sections and keys are
/// rejected. Relative [paths] entries resolve against the file's directory.
ExperimentConfig load_config(const std::string& name_or_path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Fully resolved INI text; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& config);

/// Stage seeds derived from the experiment seed.
struct Seeds {
    std::uint64_t train_recording;
    std::uint64_t test_recording;
    std::uint64_t mlp_training;
    std::uint64_t cnn_training;
    std::uint64_t freqmap;
    std::uint64_t sweep;
};
Seeds stage_seeds(std::uint64_t seed);

}  // namespace nd::app
