#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "common/streaming.hpp"
#include "synth/recording.hpp"

namespace nd::eval {

struct EventMetrics {
    /// Seconds from onset to the first positive sample inside the event; empty for a miss.
    std::vector<std::optional<double>> latencies;
    std::vector<double> overlaps;
    std::size_t detected = 0;
    std::size_t missed = 0;

    /// Mean over detected events; nullopt when every event was missed.
    std::optional<double> mean_latency() const;
    double mean_overlap() const;
};

/// Onset sample index of an event (first n with n / fs >= start_s) and its
/// exclusive end index, clipped to `n_samples`.
struct SampleSpan {
    std::size_t begin = 0;
    std::size_t end = 0;
};
SampleSpan event_span(const synth::EventAnnotation& e, double fs_hz, std::size_t n_samples);

std::optional<double> detection_latency(std::span<const std::uint8_t> labels, const synth::EventAnnotation& event,
                                        double fs_hz);
double overlap_percent(std::span<const std::uint8_t> labels, const synth::EventAnnotation& event, double fs_hz);
EventMetrics event_metrics(std::span<const std::uint8_t> labels, const std::vector<synth::EventAnnotation>& events,
                           double fs_hz);

/// Zero-order hold of per-window values to sample rate, causal: window k
/// (samples [kL, (k+1)L)) becomes available at its last sample and is held
/// until the next window completes. Samples before the first window are 0.
template <typename T>
std::vector<T> hold_expand(std::span<const T> per_window, std::size_t window_len, std::size_t n_samples) {
    std::vector<T> out(n_samples, T{});
    for (std::size_t n = 0; n < n_samples; ++n) {
        const std::size_t done = (n + 1) / window_len;
        if (done > 0 && done - 1 < per_window.size()) out[n] = per_window[done - 1];
        else if (done > per_window.size() && !per_window.empty()) out[n] = per_window.back();
    }
    return out;
}

/// Per-sample outputs of a streaming classifier run over a whole recording.
struct StreamTrace {
    std::vector<double> score;
    std::vector<std::uint8_t> label;
    std::vector<double> response;
};
StreamTrace run_stream(StreamingClassifier& classifier, const synth::Recording& rec);

/// Labels obtained by thresholding `score` (score >= threshold).
std::vector<std::uint8_t> threshold_labels(std::span<const double> score, double threshold);

}  // namespace nd::eval
