#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "synth/recording.hpp"

namespace nd::synth {

struct SynthConfig {
    double duration_s = 1800.0;
    double fs_hz = 256.0;
    int n_events = 10;
    double event_min_s = 10.0;
    double event_max_s = 30.0;
    double background_rms_uv = 4.0;
    double event_low_hz = 8.0;
    double event_high_hz = 22.0;
    double event_rms_uv = 10.0;
    double ramp_s = 0.5;
    double full_scale_uv = 50.0;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Pink (1/f) noise from Gaussian white noise through a sum of first-order
/// recursive sections (Kellet's economy filter).
class PinkNoise {
public:
    explicit PinkNoise(std::uint64_t seed);
    double next();

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> white_{0.0, 1.0};
    double b0_ = 0.0, b1_ = 0.0, b2_ = 0.0;
};

/// `n` samples of pink noise rescaled to exactly `rms` over the block.
std::vector<double> pink_noise_block(std::size_t n, double rms, std::uint64_t seed);

/// Background of pink noise plus n_events oscillatory bursts. Each burst sweeps
/// its instantaneous frequency across the event band, is amplitude modulated,
/// normalized to event_rms_uv, and shaped by raised-cosine onset/offset ramps.
/// Event boundaries are snapped to the sample grid. Samples are clipped to
/// full scale.
Recording generate_recording(const SynthConfig& config);

}  // namespace nd::synth
