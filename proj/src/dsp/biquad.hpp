#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace nd::dsp {

/// Second-order section, a0 normalized to 1:
///   y[n] = b0 x[n] + b1 x[n-1] + b2 x[n-2] - a1 y[n-1] - a2 y[n-2]
struct BiquadCoeffs {
    double b0 = 1.0;
    double b1 = 0.0;
    double b2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};

struct FixedBiquadCoeffs {
    std::int16_t b0 = 0;
    std::int16_t b1 = 0;
    std::int16_t b2 = 0;
    std::int16_t a1 = 0;
    std::int16_t a2 = 0;
    int frac_bits = 13;
};

/// Direct Form I delay line.
struct BiquadState {
    double x1 = 0.0;
    double x2 = 0.0;
    double y1 = 0.0;
    double y2 = 0.0;
};

struct FixedBiquadState {
    std::int32_t x1 = 0;
    std::int32_t x2 = 0;
    std::int32_t y1 = 0;
    std::int32_t y2 = 0;
};

/// Q1.15 sample format used on the fixed-point signal path.
inline constexpr int kSampleFracBits = 15;
inline constexpr std::int32_t kSampleMax = 32767;
inline constexpr std::int32_t kSampleMin = -32768;

/// Counts clipping events on the fixed-point path. Never reset implicitly.
struct SaturationCounter {
    std::uint64_t count = 0;
};

double biquad_step(BiquadState& state, const BiquadCoeffs& c, double x);

/// Fixed-point Direct Form I step. Products are summed in a saturating 32-bit
/// accumulator, renormalized by frac_bits with round-half-up, and the output is
/// clamped to Q1.15. Every clamp increments `sat`.
std::int32_t biquad_step(FixedBiquadState& state, const FixedBiquadCoeffs& c, std::int32_t x,
                         SaturationCounter& sat);

/// Both poles strictly inside |z| < 1 - 1e-9.
bool is_stable(const BiquadCoeffs& c);
double max_pole_radius(const BiquadCoeffs& c);

std::complex<double> frequency_response(const BiquadCoeffs& c, double freq_hz, double fs_hz);
double cascade_magnitude(std::span<const BiquadCoeffs> cascade, double freq_hz, double fs_hz);

/// Round-to-nearest (ties away from zero) into 16-bit codes with `frac_bits`
/// fractional bits. Throws QuantizationOverflow naming the offending coefficient.
std::vector<FixedBiquadCoeffs> quantize_coeffs(std::span<const BiquadCoeffs> cascade, int frac_bits);
BiquadCoeffs dequantize(const FixedBiquadCoeffs& q);

/// Converts a full-scale sample in [-1, 1] to Q1.15 with saturation.
std::int32_t to_q15(double x, SaturationCounter& sat);
inline double from_q15(std::int32_t q) { return static_cast<double>(q) / 32768.0; }

class FloatCascade {
public:
    FloatCascade() = default;
    explicit FloatCascade(std::vector<BiquadCoeffs> sections);

    double process(double x);
    void reset();
    const std::vector<BiquadCoeffs>& sections() const { return sections_; }

private:
    std::vector<BiquadCoeffs> sections_;
    std::vector<BiquadState> state_;
};

class FixedCascade {
public:
    FixedCascade() = default;
    explicit FixedCascade(std::vector<FixedBiquadCoeffs> sections);

    std::int32_t process(std::int32_t x);
    void reset();
    std::uint64_t saturation_count() const { return sat_.count; }
    const std::vector<FixedBiquadCoeffs>& sections() const { return sections_; }

private:
    std::vector<FixedBiquadCoeffs> sections_;
    std::vector<FixedBiquadState> state_;
    SaturationCounter sat_;
};

}  // namespace nd::dsp
