#include "synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "common/error.hpp"
#include "common/seed.hpp"

namespace nd::synth {

void SynthConfig::validate() const {
    auto bad = [](const char* what) { throw Error(ErrorCode::Config, what); };
    if (!(duration_s > 0.0)) bad("[synth] duration_s must be positive");
    if (!(fs_hz > 0.0)) bad("[synth] fs_hz must be positive");
    if (n_events < 0) bad("[synth] n_events must be non-negative");
    if (!(event_min_s > 0.0 && event_min_s <= event_max_s)) bad("[synth] need 0 < event_min_s <= event_max_s");
    if (!(background_rms_uv > 0.0)) bad("[synth] background_rms_uv must be positive");
    if (!(event_rms_uv > 0.0)) bad("[synth] event_rms_uv must be positive");
    if (!(event_low_hz > 0.0 && event_low_hz < event_high_hz && event_high_hz < fs_hz / 2.0))
        bad("[synth] event band must satisfy 0 < low < high < fs/2");
    if (!(ramp_s >= 0.0)) bad("[synth] ramp_s must be non-negative");
    if (!(full_scale_uv > 0.0)) bad("[synth] full_scale_uv must be positive");
}

PinkNoise::PinkNoise(std::uint64_t seed) : rng_(seed) {}

double PinkNoise::next() {
    const double white = white_(rng_);
    b0_ = 0.99765 * b0_ + white * 0.0990460;
    b1_ = 0.96300 * b1_ + white * 0.2965164;
    b2_ = 0.57000 * b2_ + white * 1.0526913;
    return b0_ + b1_ + b2_ + white * 0.1848;
}

std::vector<double> pink_noise_block(std::size_t n, double rms, std::uint64_t seed) {
    std::vector<double> out(n);
    if (n == 0) return out;
    PinkNoise gen(seed);
    // Discard the start-up transient of the slowest section.
    for (int i = 0; i < 2000; ++i) gen.next();
    double sum_sq = 0.0;
    for (auto& v : out) {
        v = gen.next();
        sum_sq += v * v;
    }
    const double measured = std::sqrt(sum_sq / static_cast<double>(n));
    const double gain = measured > 0.0 ? rms / measured : 0.0;
    for (auto& v : out) v *= gain;
    return out;
}

namespace {

struct Span {
    std::size_t start;
    std::size_t end;
};

std::vector<Span> place_events(const SynthConfig& c, std::size_t n_samples, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dur(c.event_min_s, c.event_max_s);
    std::vector<std::size_t> lengths;
    std::size_t total = 0;
    for (int i = 0; i < c.n_events; ++i) {
        const auto len = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(dur(rng) * c.fs_hz)));
        lengths.push_back(len);
        total += len;
    }
    if (total > n_samples)
        throw Error(ErrorCode::Placement, "cannot place " + std::to_string(c.n_events) + " events (" +
                                              std::to_string(total / c.fs_hz) + " s) inside " +
                                              std::to_string(c.duration_s) + " s without overlap");
    // Uniform order statistics over the free time, then stack the events.
    const std::size_t free = n_samples - total;
    std::uniform_int_distribution<std::size_t> pos(0, free);
    std::vector<std::size_t> offsets(lengths.size());
    for (auto& o : offsets) o = pos(rng);
    std::sort(offsets.begin(), offsets.end());
    std::vector<Span> spans;
    std::size_t consumed = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        const std::size_t start = offsets[i] + consumed;
        spans.push_back({start, start + lengths[i]});
        consumed += lengths[i];
    }
    return spans;
}

void add_event(std::vector<double>& x, Span span, const SynthConfig& c, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double sweep_period = 3.0 + 5.0 * u(rng);
    const double sweep_phase = 2.0 * std::numbers::pi * u(rng);
    const double am_period = 1.0 + 3.0 * u(rng);
    const double am_phase = 2.0 * std::numbers::pi * u(rng);
    const double centre = 0.5 * (c.event_low_hz + c.event_high_hz);
    const double half = 0.5 * (c.event_high_hz - c.event_low_hz) * 0.95;

    const std::size_t len = span.end - span.start;
    std::vector<double> burst(len);
    double phase = 2.0 * std::numbers::pi * u(rng);
    double sum_sq = 0.0;
    for (std::size_t n = 0; n < len; ++n) {
        const double t = static_cast<double>(n) / c.fs_hz;
        const double f = centre + half * std::sin(2.0 * std::numbers::pi * t / sweep_period + sweep_phase);
        const double am = 1.0 + 0.3 * std::sin(2.0 * std::numbers::pi * t / am_period + am_phase);
        burst[n] = am * std::sin(phase);
        phase += 2.0 * std::numbers::pi * f / c.fs_hz;
        sum_sq += burst[n] * burst[n];
    }
    const double gain = c.event_rms_uv / std::sqrt(sum_sq / static_cast<double>(len));
    const double ramp = std::min(c.ramp_s * c.fs_hz, static_cast<double>(len) / 2.0);
    for (std::size_t n = 0; n < len; ++n) {
        double w = 1.0;
        const double from_start = static_cast<double>(n);
        const double to_end = static_cast<double>(len - 1 - n);
        if (ramp > 0.0 && from_start < ramp) w = 0.5 * (1.0 - std::cos(std::numbers::pi * from_start / ramp));
        if (ramp > 0.0 && to_end < ramp) w = std::min(w, 0.5 * (1.0 - std::cos(std::numbers::pi * to_end / ramp)));
        x[span.start + n] += gain * w * burst[n];
    }
}

}  // namespace

Recording generate_recording(const SynthConfig& c) {
    c.validate();
    const auto n_samples = static_cast<std::size_t>(std::llround(c.duration_s * c.fs_hz));
    if (n_samples == 0) throw Error(ErrorCode::Config, "[synth] recording would be empty");

    std::mt19937_64 event_rng(derive_seed(c.seed, {1}));
    const auto spans = place_events(c, n_samples, event_rng);

    auto x = pink_noise_block(n_samples, c.background_rms_uv, derive_seed(c.seed, {2}));
    for (const auto& s : spans) add_event(x, s, c, event_rng);

    Recording rec;
    rec.fs_hz = c.fs_hz;
    rec.full_scale_uv = c.full_scale_uv;
    rec.samples.resize(n_samples);
    const auto fs = static_cast<float>(c.full_scale_uv);
    for (std::size_t i = 0; i < n_samples; ++i) rec.samples[i] = std::clamp(static_cast<float>(x[i]), -fs, fs);
    for (const auto& s : spans)
        rec.events.push_back({static_cast<double>(s.start) / c.fs_hz, static_cast<double>(s.end) / c.fs_hz, "seizure"});
    return rec;
}

}  // namespace nd::synth
