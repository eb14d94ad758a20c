#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nd::synth {

struct EventAnnotation {
    double start_s = 0.0;
    double end_s = 0.0;
    std::string label = "seizure";

    bool operator==(const EventAnnotation&) const = default;
};

/// Single-channel recording in microvolts.
struct Recording {
    std::vector<float> samples;
    double fs_hz = 256.0;
    double full_scale_uv = 50.0;
    std::vector<EventAnnotation> events;

    double duration_s() const { return static_cast<double>(samples.size()) / fs_hz; }
    /// Sample value divided by full scale.
    double normalized(std::size_t i) const { return samples[i] / full_scale_uv; }
    /// Throws when any documented invariant is violated.
    void validate() const;
};

/// Per-sample 0/1 labels from the annotations; sample n is inside an event
/// when start_s <= n / fs < end_s.
std::vector<std::uint8_t> sample_labels(const Recording& rec);

/// Files written for a base path `dir/name`:
///   name.hdr         text header: fs_hz, n_samples, full_scale_uv (+ provenance comments)
///   name.f32         raw payload, IEEE-754 float32 little-endian, n_samples values
///   name.events.csv  one "start_s,end_s,label" row per event
struct RecordingPaths {
    std::filesystem::path header;
    std::filesystem::path payload;
    std::filesystem::path annotations;
};

RecordingPaths recording_paths(const std::filesystem::path& base);

void save_recording(const Recording& rec, const std::filesystem::path& base, const std::string& provenance = {});
/// Accepts either the base path or the .hdr path.
Recording load_recording(const std::filesystem::path& path);

std::vector<EventAnnotation> parse_annotations(const std::string& text);
std::string format_annotations(const std::vector<EventAnnotation>& events);

}  // namespace nd::synth
