#pragma once

#include <cstdint>

namespace nd::dsp {

/// Full-wave rectifier followed by a first-order moving average with gain
/// 1/decay_samples per sample.
struct EnvelopeState {
    double env = 0.0;
    int decay_samples = 32;
};

double envelope_step(EnvelopeState& state, double x);

/// Integer envelope follower on Q1.15 input. The running value keeps
/// kExtraBits below the sample LSB so that small steps do not stall.
class FixedEnvelope {
public:
    static constexpr int kExtraBits = 8;

    explicit FixedEnvelope(int decay_samples = 32);

    std::int32_t step(std::int32_t x_q15);
    void reset() { acc_ = 0; }
    /// Envelope in full-scale units.
    double value() const;
    int decay_samples() const { return decay_; }

private:
    std::int32_t acc_ = 0;
    int decay_;
};

}  // namespace nd::dsp
