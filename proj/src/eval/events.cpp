#include "eval/events.hpp"

#include <algorithm>
#include <cmath>

namespace nd::eval {

std::optional<double> EventMetrics::mean_latency() const {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& l : latencies)
        if (l) {
            sum += *l;
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

double EventMetrics::mean_overlap() const {
    if (overlaps.empty()) return 0.0;
    double sum = 0.0;
    for (double o : overlaps) sum += o;
    return sum / static_cast<double>(overlaps.size());
}

SampleSpan event_span(const synth::EventAnnotation& e, double fs_hz, std::size_t n_samples) {
    const auto idx = [&](double t) {
        const double v = std::ceil(t * fs_hz - 1e-9);
        return std::min(n_samples, static_cast<std::size_t>(std::max(0.0, v)));
    };
    return {idx(e.start_s), idx(e.end_s)};
}

std::optional<double> detection_latency(std::span<const std::uint8_t> labels, const synth::EventAnnotation& event,
                                        double fs_hz) {
    const auto s = event_span(event, fs_hz, labels.size());
    for (std::size_t n = s.begin; n < s.end; ++n)
        if (labels[n]) return static_cast<double>(n - s.begin) / fs_hz;
    return std::nullopt;
}

double overlap_percent(std::span<const std::uint8_t> labels, const synth::EventAnnotation& event, double fs_hz) {
    const auto s = event_span(event, fs_hz, labels.size());
    if (s.end <= s.begin) return 0.0;
    std::size_t hits = 0;
    for (std::size_t n = s.begin; n < s.end; ++n) hits += labels[n] ? 1 : 0;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(s.end - s.begin);
}

EventMetrics event_metrics(std::span<const std::uint8_t> labels, const std::vector<synth::EventAnnotation>& events,
                           double fs_hz) {
    EventMetrics m;
    for (const auto& e : events) {
        const auto l = detection_latency(labels, e, fs_hz);
        m.latencies.push_back(l);
        (l ? m.detected : m.missed) += 1;
        m.overlaps.push_back(overlap_percent(labels, e, fs_hz));
    }
    return m;
}

StreamTrace run_stream(StreamingClassifier& classifier, const synth::Recording& rec) {
    StreamTrace t;
    const auto n = rec.samples.size();
    t.score.resize(n);
    t.label.resize(n);
    t.response.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto o = classifier.step(rec.normalized(i));
        t.score[i] = o.score;
        t.label[i] = o.label ? 1 : 0;
        t.response[i] = o.response;
    }
    return t;
}

std::vector<std::uint8_t> threshold_labels(std::span<const double> score, double threshold) {
    std::vector<std::uint8_t> out(score.size());
    for (std::size_t i = 0; i < score.size(); ++i) out[i] = score[i] >= threshold ? 1 : 0;
    return out;
}

}  // namespace nd::eval
