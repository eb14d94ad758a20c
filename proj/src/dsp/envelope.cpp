#include "dsp/envelope.hpp"

#include <cmath>
#include <cstdlib>

#include "common/error.hpp"

namespace nd::dsp {

double envelope_step(EnvelopeState& s, double x) {
    if (s.decay_samples < 1) throw Error(ErrorCode::InvalidArgument, "decay_samples must be >= 1");
    s.env += (std::abs(x) - s.env) / s.decay_samples;
    return s.env;
}

FixedEnvelope::FixedEnvelope(int decay_samples) : decay_(decay_samples) {
    if (decay_samples < 1) throw Error(ErrorCode::InvalidArgument, "decay_samples must be >= 1");
}

std::int32_t FixedEnvelope::step(std::int32_t x_q15) {
    // |x| <= 2^15, so the widened target stays below 2^23.
    const std::int32_t target = std::abs(x_q15) << kExtraBits;
    acc_ += (target - acc_) / decay_;
    return acc_ >> kExtraBits;
}

double FixedEnvelope::value() const { return std::ldexp(static_cast<double>(acc_), -(15 + kExtraBits)); }

}  // namespace nd::dsp
