#include "dsp/biquad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "common/error.hpp"

namespace nd::dsp {

namespace {

constexpr std::int64_t kAccMax = std::numeric_limits<std::int32_t>::max();
constexpr std::int64_t kAccMin = std::numeric_limits<std::int32_t>::min();

std::int32_t saturate32(std::int64_t v, SaturationCounter& sat) {
    if (v > kAccMax) {
        ++sat.count;
        return static_cast<std::int32_t>(kAccMax);
    }
    if (v < kAccMin) {
        ++sat.count;
        return static_cast<std::int32_t>(kAccMin);
    }
    return static_cast<std::int32_t>(v);
}

std::int32_t saturate_sample(std::int64_t v, SaturationCounter& sat) {
    if (v > kSampleMax) {
        ++sat.count;
        return kSampleMax;
    }
    if (v < kSampleMin) {
        ++sat.count;
        return kSampleMin;
    }
    return static_cast<std::int32_t>(v);
}

// Saturating multiply-accumulate on a 32-bit accumulator.
std::int32_t mac(std::int32_t acc, std::int32_t coeff, std::int32_t value, SaturationCounter& sat) {
    const std::int64_t prod = static_cast<std::int64_t>(coeff) * value;
    return saturate32(static_cast<std::int64_t>(acc) + saturate32(prod, sat), sat);
}

std::int16_t quantize_one(double v, int frac_bits, const char* name, std::size_t section) {
    const double limit = std::ldexp(1.0, 15 - frac_bits);
    if (!std::isfinite(v) || std::abs(v) >= limit) {
        throw Error(ErrorCode::QuantizationOverflow,
                    "coefficient " + std::string(name) + " of section " + std::to_string(section) + " (" +
                        std::to_string(v) + ") exceeds the Q" + std::to_string(15 - frac_bits) + "." +
                        std::to_string(frac_bits) + " range");
    }
    // std::round is ties-away-from-zero.
    const double code = std::round(std::ldexp(v, frac_bits));
    return static_cast<std::int16_t>(std::clamp(code, -32768.0, 32767.0));
}

}  // namespace

double biquad_step(BiquadState& s, const BiquadCoeffs& c, double x) {
    const double y = c.b0 * x + c.b1 * s.x1 + c.b2 * s.x2 - c.a1 * s.y1 - c.a2 * s.y2;
    s.x2 = s.x1;
    s.x1 = x;
    s.y2 = s.y1;
    s.y1 = y;
    return y;
}

std::int32_t biquad_step(FixedBiquadState& s, const FixedBiquadCoeffs& c, std::int32_t x,
                         SaturationCounter& sat) {
    std::int32_t acc = 0;
    acc = mac(acc, c.b0, x, sat);
    acc = mac(acc, c.b1, s.x1, sat);
    acc = mac(acc, c.b2, s.x2, sat);
    acc = mac(acc, -static_cast<std::int32_t>(c.a1), s.y1, sat);
    acc = mac(acc, -static_cast<std::int32_t>(c.a2), s.y2, sat);

    const std::int64_t rounded =
        c.frac_bits > 0 ? (static_cast<std::int64_t>(acc) + (std::int64_t{1} << (c.frac_bits - 1))) >> c.frac_bits
                        : static_cast<std::int64_t>(acc);
    const std::int32_t y = saturate_sample(rounded, sat);

    s.x2 = s.x1;
    s.x1 = x;
    s.y2 = s.y1;
    s.y1 = y;
    return y;
}

double max_pole_radius(const BiquadCoeffs& c) {
    // Roots of z^2 + a1 z + a2.
    const std::complex<double> disc = std::sqrt(std::complex<double>(c.a1 * c.a1 - 4.0 * c.a2, 0.0));
    const auto r1 = std::abs((-c.a1 + disc) / 2.0);
    const auto r2 = std::abs((-c.a1 - disc) / 2.0);
    return std::max(r1, r2);
}

bool is_stable(const BiquadCoeffs& c) { return max_pole_radius(c) < 1.0 - 1e-9; }

std::complex<double> frequency_response(const BiquadCoeffs& c, double freq_hz, double fs_hz) {
    const double w = 2.0 * std::numbers::pi * freq_hz / fs_hz;
    const std::complex<double> z1 = std::polar(1.0, -w);
    const std::complex<double> z2 = z1 * z1;
    return (c.b0 + c.b1 * z1 + c.b2 * z2) / (1.0 + c.a1 * z1 + c.a2 * z2);
}

double cascade_magnitude(std::span<const BiquadCoeffs> cascade, double freq_hz, double fs_hz) {
    std::complex<double> h{1.0, 0.0};
    for (const auto& s : cascade) h *= frequency_response(s, freq_hz, fs_hz);
    return std::abs(h);
}

std::vector<FixedBiquadCoeffs> quantize_coeffs(std::span<const BiquadCoeffs> cascade, int frac_bits) {
    if (frac_bits < 0 || frac_bits > 15)
        throw Error(ErrorCode::InvalidArgument, "frac_bits must be in [0, 15]");
    std::vector<FixedBiquadCoeffs> out;
    out.reserve(cascade.size());
    for (std::size_t i = 0; i < cascade.size(); ++i) {
        const auto& c = cascade[i];
        out.push_back({quantize_one(c.b0, frac_bits, "b0", i), quantize_one(c.b1, frac_bits, "b1", i),
                       quantize_one(c.b2, frac_bits, "b2", i), quantize_one(c.a1, frac_bits, "a1", i),
                       quantize_one(c.a2, frac_bits, "a2", i), frac_bits});
    }
    return out;
}

BiquadCoeffs dequantize(const FixedBiquadCoeffs& q) {
    const auto d = [&](std::int16_t v) { return std::ldexp(static_cast<double>(v), -q.frac_bits); };
    return {d(q.b0), d(q.b1), d(q.b2), d(q.a1), d(q.a2)};
}

std::int32_t to_q15(double x, SaturationCounter& sat) {
    const double scaled = std::round(x * 32768.0);
    if (scaled > kSampleMax) {
        ++sat.count;
        return kSampleMax;
    }
    if (scaled < kSampleMin) {
        ++sat.count;
        return kSampleMin;
    }
    return static_cast<std::int32_t>(scaled);
}

FloatCascade::FloatCascade(std::vector<BiquadCoeffs> sections)
    : sections_(std::move(sections)), state_(sections_.size()) {}

double FloatCascade::process(double x) {
    for (std::size_t i = 0; i < sections_.size(); ++i) x = biquad_step(state_[i], sections_[i], x);
    return x;
}

void FloatCascade::reset() { std::fill(state_.begin(), state_.end(), BiquadState{}); }

FixedCascade::FixedCascade(std::vector<FixedBiquadCoeffs> sections)
    : sections_(std::move(sections)), state_(sections_.size()) {}

std::int32_t FixedCascade::process(std::int32_t x) {
    for (std::size_t i = 0; i < sections_.size(); ++i) x = biquad_step(state_[i], sections_[i], x, sat_);
    return x;
}

void FixedCascade::reset() { std::fill(state_.begin(), state_.end(), FixedBiquadState{}); }

}  // namespace nd::dsp
