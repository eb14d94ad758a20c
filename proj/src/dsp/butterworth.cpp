#include "dsp/butterworth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "common/error.hpp"

namespace nd::dsp {

namespace {

using cplx = std::complex<double>;

cplx bilinear(cplx s, double fs) { return (2.0 * fs + s) / (2.0 * fs - s); }

BiquadCoeffs section_from_poles(cplx p1, cplx p2, double center_w) {
    BiquadCoeffs c;
    c.a1 = -(p1 + p2).real();
    c.a2 = (p1 * p2).real();
    c.b0 = 1.0;
    c.b1 = 0.0;
    c.b2 = -1.0;
    const cplx z1 = std::polar(1.0, -center_w);
    const cplx z2 = z1 * z1;
    const double gain = std::abs((1.0 - z2) / (1.0 + c.a1 * z1 + c.a2 * z2));
    c.b0 /= gain;
    c.b2 /= gain;
    return c;
}

}  // namespace

std::vector<BiquadCoeffs> design_butterworth_bandpass(double low_hz, double high_hz, double fs_hz, int order) {
    if (!(fs_hz > 0.0) || !(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < fs_hz / 2.0))
        throw Error(ErrorCode::InvalidArgument, "band edges must satisfy 0 < low < high < fs/2");
    if (order < 2 || order % 2 != 0)
        throw Error(ErrorCode::InvalidArgument, "band-pass order must be even and >= 2");

    const int proto_order = order / 2;
    const double wl = 2.0 * fs_hz * std::tan(std::numbers::pi * low_hz / fs_hz);
    const double wh = 2.0 * fs_hz * std::tan(std::numbers::pi * high_hz / fs_hz);
    const double w0 = std::sqrt(wl * wh);
    const double bw = wh - wl;
    const double center_w = 2.0 * std::atan(w0 / (2.0 * fs_hz));

    // Analog prototype poles on the left half of the unit circle, each mapped to
    // a pair of band-pass poles by s -> (s^2 + w0^2) / (bw s), then to z.
    std::vector<cplx> upper;
    std::vector<double> real_poles;
    for (int k = 0; k < proto_order; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + proto_order + 1) / (2.0 * proto_order);
        const cplx p = std::polar(1.0, theta);
        const cplx root = std::sqrt(p * p * bw * bw - 4.0 * w0 * w0);
        for (const cplx s : {(p * bw + root) / 2.0, (p * bw - root) / 2.0}) {
            const cplx z = bilinear(s, fs_hz);
            if (std::abs(z.imag()) < 1e-12)
                real_poles.push_back(z.real());
            else if (z.imag() > 0.0)
                upper.push_back(z);
        }
    }

    std::vector<std::pair<cplx, cplx>> pairs;
    for (const auto& z : upper) pairs.emplace_back(z, std::conj(z));
    std::sort(real_poles.begin(), real_poles.end());
    for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) pairs.emplace_back(real_poles[i], real_poles[i + 1]);

    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        return std::max(std::abs(a.first), std::abs(a.second)) < std::max(std::abs(b.first), std::abs(b.second));
    });

    std::vector<BiquadCoeffs> sections;
    sections.reserve(pairs.size());
    for (const auto& [p1, p2] : pairs) sections.push_back(section_from_poles(p1, p2, center_w));
    if (sections.size() != static_cast<std::size_t>(proto_order))
        throw Error(ErrorCode::Numeric, "pole pairing failed for the requested band");
    return sections;
}

}  // namespace nd::dsp
