#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "dsp/filter_chain.hpp"
#include "eval/events.hpp"
#include "eval/roc.hpp"
#include "nn/stream.hpp"
#include "synth/recording.hpp"
#include "train/pipeline.hpp"

namespace nd::app {

inline constexpr const char* kOutputDirEnv = "ND_OUTPUT_DIR";

/// --out override, then [experiment] output_dir, then $ND_OUTPUT_DIR, then ./nd_out.
std::filesystem::path resolve_output_dir(const ExperimentConfig& config, const std::optional<std::filesystem::path>& override_dir);

/// "# "-prefixed header naming the command, the seed and the resolved config.
std::string provenance(const ExperimentConfig& config, const std::string& command);

const std::vector<std::string>& command_names();
const std::vector<std::string>& classifier_names();

/// Sample-level evaluation of one classifier on one recording.
struct ClassifierEval {
    std::string name;
    eval::RocCurve roc;
    eval::OperatingPoint operating;
    eval::EventMetrics events;
};
ClassifierEval evaluate_trace(const std::string& name, const eval::StreamTrace& trace, const synth::Recording& rec,
                              double target_tpr);

/// Lazily built inputs shared by the commands.
class Experiment {
public:
    explicit Experiment(ExperimentConfig config);

    const ExperimentConfig& config() const { return config_; }

    const synth::Recording& training_recording();
    /// Held-out recording generated from its own derived seed.
    const synth::Recording& test_recording();
    const train::PipelineResult& mlp_training();
    const train::PipelineResult& cnn_training();
    /// The MLP from [paths] model when set, otherwise the trained one.
    std::shared_ptr<const nn::Network> mlp_network();
    std::shared_ptr<const nn::Network> mlp_q8_network();
    std::shared_ptr<const nn::Network> cnn_network();
    /// Filter with its threshold resolved (picked on the training recording when auto).
    const dsp::FilterChainClassifier& filter();

    std::unique_ptr<StreamingClassifier> classifier(const std::string& name);

private:
    ExperimentConfig config_;
    std::optional<synth::Recording> train_rec_, test_rec_;
    std::optional<train::PipelineResult> mlp_, cnn_;
    std::shared_ptr<const nn::Network> mlp_net_, mlp_q8_net_, cnn_net_;
    std::optional<dsp::FilterChainClassifier> filter_;
};

struct RunResult {
    std::vector<std::filesystem::path> artifacts;
    std::vector<std::string> warnings;
};

/// Runs gen | train | eval | sweep | freqmap | resources | compare. Outputs are
/// written to a staging directory inside `out_dir` and renamed into place only
/// when every artifact succeeded; on failure nothing new is left behind.
/// `classifier` selects the network for train (mlp, cnn), eval and freqmap.
RunResult run_command(const ExperimentConfig& config, const std::string& command, const std::filesystem::path& out_dir,
                      const std::string& classifier = {});

}  // namespace nd::app
