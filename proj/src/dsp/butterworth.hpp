#pragma once

#include <vector>

#include "dsp/biquad.hpp"

namespace nd::dsp {

/// Digital Butterworth band-pass via the bilinear transform with both band
/// edges pre-warped. `order` is the band-pass order (twice the low-pass
/// prototype order) and must be even; the result has order/2 sections.
///
/// Every section carries one zero at z = 1 and one at z = -1 and is scaled to
/// unit gain at the digital centre frequency, so the cascade gain there is 1.
/// Sections are ordered by ascending pole radius, the sharpest resonance last.
std::vector<BiquadCoeffs> design_butterworth_bandpass(double low_hz, double high_hz, double fs_hz, int order);

}  // namespace nd::dsp
