#pragma once

#include <cstdint>
#include <vector>

#include "common/streaming.hpp"

namespace nd::eval {

struct FreqAmpMap {
    std::vector<double> freqs_hz;
    std::vector<double> amps_uv;
    /// Row-major |freqs| x |amps| mean responses.
    std::vector<double> values;

    double at(std::size_t f, std::size_t a) const { return values[f * amps_uv.size() + a]; }
};

struct FreqMapOptions {
    double tone_s = 1.0;
    int repeats = 10;
    /// Background noise before and under the tone; zero gives silence.
    double noise_rms_uv = 4.0;
    /// Noise-only lead-in that lets the classifier settle before the tone.
    double preroll_s = 1.0;
    double fs_hz = 256.0;
    double full_scale_uv = 50.0;
    std::uint64_t seed = 1;
    unsigned threads = 0;
};

/// Mean classifier response over a tone a*sin(2 pi f t + phi), phi seeded per
/// repeat, embedded in pink background noise. The classifier is cloned per
/// cell and reset before every trial.
FreqAmpMap frequency_response_map(const StreamingClassifier& classifier, const std::vector<double>& freqs_hz,
                                  const std::vector<double>& amps_uv, const FreqMapOptions& options);

}  // namespace nd::eval
