#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "common/streaming.hpp"
#include "nn/consensus.hpp"
#include "nn/model.hpp"
#include "nn/quantized.hpp"

namespace nd::nn {

using Network = std::variant<MlpModel, QuantizedMlp>;

double forward(const Network& net, std::span<const double> window);
std::size_t input_len(const Network& net);

struct WindowedOptions {
    bool consensus = false;
    double threshold = 0.5;
    ConsensusRule rule = ConsensusRule::Mean;
};

/// Runs a network once per complete, non-overlapping window and holds the
/// result until the next window completes. With consensus enabled the score is
/// the mean of the last three window probabilities and nothing is emitted until
/// three windows have been seen.
class WindowedNetClassifier : public StreamingClassifier {
public:
    WindowedNetClassifier(std::shared_ptr<const Network> net, WindowedOptions options);

    StreamOutput step(double x) override;
    void reset() override;
    std::unique_ptr<StreamingClassifier> clone() const override;
    std::string name() const override;

    /// Probability of the most recent complete window, if any.
    std::optional<double> last_probability() const { return last_p_; }
    const WindowedOptions& options() const { return options_; }

private:
    std::shared_ptr<const Network> net_;
    WindowedOptions options_;
    std::vector<double> window_;
    std::size_t filled_ = 0;
    ConsensusBuffer consensus_;
    StreamOutput held_{};
    std::optional<double> last_p_;
};

}  // namespace nd::nn
