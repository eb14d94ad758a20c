#include "nn/consensus.hpp"

#include "common/error.hpp"

namespace nd::nn {

std::string to_string(ConsensusRule r) {
    switch (r) {
        case ConsensusRule::Mean: return "mean";
        case ConsensusRule::Majority: return "majority";
        case ConsensusRule::Unanimity: return "unanimity";
    }
    return "mean";
}

ConsensusRule parse_consensus_rule(const std::string& s) {
    if (s == "mean") return ConsensusRule::Mean;
    if (s == "majority") return ConsensusRule::Majority;
    if (s == "unanimity") return ConsensusRule::Unanimity;
    throw Error(ErrorCode::Parse, "unknown consensus rule '" + s + "'");
}

ConsensusBuffer::ConsensusBuffer(double threshold, ConsensusRule rule) : threshold_(threshold), rule_(rule) {
    if (!(threshold > 0.0 && threshold < 1.0))
        throw Error(ErrorCode::InvalidArgument, "consensus threshold must lie in (0, 1)");
}

std::optional<bool> ConsensusBuffer::push(double p) {
    ring_[head_] = p;
    head_ = (head_ + 1) % kDepth;
    if (count_ < kDepth) ++count_;
    if (!full()) return std::nullopt;

    switch (rule_) {
        case ConsensusRule::Mean: return *mean() > threshold_;
        case ConsensusRule::Majority:
        case ConsensusRule::Unanimity: {
            std::size_t above = 0;
            for (double v : ring_) above += v > threshold_ ? 1 : 0;
            return rule_ == ConsensusRule::Majority ? above >= 2 : above == kDepth;
        }
    }
    return std::nullopt;
}

std::optional<double> ConsensusBuffer::mean() const {
    if (!full()) return std::nullopt;
    return (ring_[0] + ring_[1] + ring_[2]) / 3.0;
}

void ConsensusBuffer::reset() {
    ring_.fill(0.0);
    head_ = 0;
    count_ = 0;
}

}  // namespace nd::nn
