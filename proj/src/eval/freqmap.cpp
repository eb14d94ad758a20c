#include "eval/freqmap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "common/error.hpp"
#include "common/seed.hpp"
#include "synth/generator.hpp"

namespace nd::eval {

FreqAmpMap frequency_response_map(const StreamingClassifier& classifier, const std::vector<double>& freqs_hz,
                                  const std::vector<double>& amps_uv, const FreqMapOptions& o) {
    if (o.repeats < 1) throw Error(ErrorCode::InvalidArgument, "repeats must be >= 1");
    if (!(o.tone_s > 0.0) || !(o.preroll_s >= 0.0) || !(o.noise_rms_uv >= 0.0) || !(o.fs_hz > 0.0) ||
        !(o.full_scale_uv > 0.0))
        throw Error(ErrorCode::InvalidArgument, "invalid frequency map options");
    for (double f : freqs_hz)
        if (!(f >= 0.0 && f <= o.fs_hz / 2.0))
            throw Error(ErrorCode::InvalidArgument, "tone frequency " + std::to_string(f) + " Hz is above Nyquist (" +
                                                        std::to_string(o.fs_hz / 2.0) + " Hz)");
    for (double a : amps_uv)
        if (!(a >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tone amplitude must be non-negative");

    FreqAmpMap map{freqs_hz, amps_uv, std::vector<double>(freqs_hz.size() * amps_uv.size(), 0.0)};
    const auto n_pre = static_cast<std::size_t>(std::llround(o.preroll_s * o.fs_hz));
    const auto n_tone = static_cast<std::size_t>(std::llround(o.tone_s * o.fs_hz));
    if (n_tone == 0) throw Error(ErrorCode::InvalidArgument, "tone is shorter than one sample");

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        auto clf = classifier.clone();
        for (std::size_t cell; (cell = next.fetch_add(1)) < map.values.size();) {
            const std::size_t fi = cell / amps_uv.size();
            const std::size_t ai = cell % amps_uv.size();
            double sum = 0.0;
            for (int r = 0; r < o.repeats; ++r) {
                const auto ur = static_cast<std::uint64_t>(r);
                auto noise = synth::pink_noise_block(n_pre + n_tone, o.noise_rms_uv, derive_seed(o.seed, {fi, ai, ur, 1}));
                std::mt19937_64 rng(derive_seed(o.seed, {fi, ai, ur, 2}));
                const double phi = std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
                clf->reset();
                double acc = 0.0;
                for (std::size_t n = 0; n < n_pre + n_tone; ++n) {
                    double x = noise[n];
                    if (n >= n_pre) {
                        const double t = static_cast<double>(n - n_pre) / o.fs_hz;
                        x += amps_uv[ai] * std::sin(2.0 * std::numbers::pi * freqs_hz[fi] * t + phi);
                    }
                    const double v = std::clamp(x / o.full_scale_uv, -1.0, 1.0);
                    const auto out = clf->step(v);
                    if (n >= n_pre) acc += out.response;
                }
                sum += acc / static_cast<double>(n_tone);
            }
            map.values[cell] = sum / static_cast<double>(o.repeats);
        }
    };
    unsigned threads = o.threads ? o.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, map.values.size()));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return map;
}

}  // namespace nd::eval
