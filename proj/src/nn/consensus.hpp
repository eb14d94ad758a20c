#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

namespace nd::nn {

enum class ConsensusRule {
    Mean,       // mean of the last three probabilities > threshold
    Majority,   // at least two of three above threshold
    Unanimity,  // all three above threshold
};

std::string to_string(ConsensusRule r);
ConsensusRule parse_consensus_rule(const std::string& s);

/// Sliding buffer over the last three window outputs.
class ConsensusBuffer {
public:
    static constexpr std::size_t kDepth = 3;

    explicit ConsensusBuffer(double threshold = 0.5, ConsensusRule rule = ConsensusRule::Mean);

    /// Pushes a probability; returns a label once three outputs are buffered.
    std::optional<bool> push(double p);
    /// Mean of the buffered outputs, or nullopt until the buffer is full.
    std::optional<double> mean() const;
    bool full() const { return count_ >= kDepth; }
    void reset();

    double threshold() const { return threshold_; }
    ConsensusRule rule() const { return rule_; }

private:
    std::array<double, kDepth> ring_{};
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    double threshold_;
    ConsensusRule rule_;
};

inline std::optional<bool> consensus_output(ConsensusBuffer& buffer, double p_new) { return buffer.push(p_new); }

}  // namespace nd::nn
