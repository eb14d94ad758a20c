#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <vector>

#include "common/error.hpp"
#include "dsp/biquad.hpp"
#include "dsp/butterworth.hpp"
#include "dsp/envelope.hpp"
#include "dsp/filter_chain.hpp"

using namespace nd::dsp;
using Catch::Approx;

namespace {

// Reference magnitude of the bilinear-transformed analog Butterworth band-pass,
// evaluated directly from the analog prototype rather than from coefficients.
double reference_bandpass_magnitude(double f, double lo, double hi, double fs, int order) {
    auto w = [&](double x) { return 2.0 * fs * std::tan(std::numbers::pi * x / fs); };
    const double wl = w(lo), wh = w(hi), wa = w(f);
    const double w0sq = wl * wh;
    const double ratio = (wa * wa - w0sq) / ((wh - wl) * wa);
    return 1.0 / std::sqrt(1.0 + std::pow(ratio, order));
}

double db(double x) { return 20.0 * std::log10(x); }

std::vector<double> logspace(double a, double b, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(a * std::pow(b / a, static_cast<double>(i) / (n - 1)));
    return out;
}

}  // namespace

TEST_CASE("Butterworth band-pass matches the analog reference", "[dsp][design]") {
    const auto cascade = design_butterworth_bandpass(8, 22, 256, 4);
    REQUIRE(cascade.size() == 2);

    SECTION("unity gain at geometric centre") {
        const double fc = std::sqrt(8.0 * 22.0);
        CHECK(std::abs(db(cascade_magnitude(cascade, fc, 256))) < 0.1);
    }

    SECTION("50 log-spaced frequencies within 0.1 dB of the reference") {
        for (double f : logspace(0.5, 127.0, 50)) {
            const double got = cascade_magnitude(cascade, f, 256);
            const double want = reference_bandpass_magnitude(f, 8, 22, 256, 4);
            INFO("f = " << f);
            CHECK(std::abs(db(got) - db(want)) < 0.1);
        }
    }

    SECTION("agrees with frozen second-order-section values from an external design tool") {
        // scipy.signal.butter(2, [8, 22], btype='band', fs=256, output='sos')
        CHECK(cascade_magnitude(cascade, 8.0, 256) == Approx(0.7071067811865438).margin(1e-9));
        CHECK(cascade_magnitude(cascade, 22.0, 256) == Approx(0.7071067811865472).margin(1e-9));
        CHECK(cascade_magnitude(cascade, 50.0, 256) == Approx(0.07153625237825081).margin(1e-9));
        CHECK(cascade_magnitude(cascade, 4.0, 256) == Approx(0.12329613408473389).margin(1e-9));
        CHECK(cascade[0].a1 == Approx(-1.5229032700415839).margin(1e-12));
        CHECK(cascade[0].a2 == Approx(0.7185489300802355).margin(1e-12));
        CHECK(cascade[1].a1 == Approx(-1.8110673844800163).margin(1e-12));
        CHECK(cascade[1].a2 == Approx(0.8562056223879557).margin(1e-12));
    }

    SECTION("exact zeros at DC and Nyquist") {
        for (const auto& s : cascade) {
            CHECK(s.b0 + s.b1 + s.b2 == 0.0);
            CHECK(s.b0 - s.b1 + s.b2 == 0.0);
        }
        CHECK(cascade_magnitude(cascade, 0.0, 256) == 0.0);
    }

    SECTION("sections ordered by pole radius") {
        CHECK(max_pole_radius(cascade[0]) < max_pole_radius(cascade[1]));
    }
}

TEST_CASE("Butterworth design rejects invalid parameters", "[dsp][design]") {
    CHECK_THROWS_AS(design_butterworth_bandpass(8, 22, 256, 3), nd::Error);
    CHECK_THROWS_AS(design_butterworth_bandpass(8, 22, 256, 0), nd::Error);
    CHECK_THROWS_AS(design_butterworth_bandpass(22, 8, 256, 4), nd::Error);
    CHECK_THROWS_AS(design_butterworth_bandpass(0, 22, 256, 4), nd::Error);
    CHECK_THROWS_AS(design_butterworth_bandpass(8, 128, 256, 4), nd::Error);
}

TEST_CASE("Designed sections are stable for random valid bands", "[dsp][design][property]") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double fs = 64.0 + 4000.0 * u(rng);
        const double lo = fs * (0.001 + 0.45 * u(rng));
        const double hi = lo + (fs / 2.0 - lo) * (0.02 + 0.96 * u(rng));
        const int order = 2 * (1 + static_cast<int>(u(rng) * 5));
        const auto cascade = design_butterworth_bandpass(lo, hi, fs, order);
        REQUIRE(cascade.size() == static_cast<std::size_t>(order / 2));
        for (const auto& s : cascade) {
            INFO("fs=" << fs << " lo=" << lo << " hi=" << hi << " order=" << order);
            CHECK(is_stable(s));
        }
        const double fc = 2.0 * fs * std::atan(std::sqrt(std::tan(std::numbers::pi * lo / fs) *
                                                         std::tan(std::numbers::pi * hi / fs))) /
                          (2.0 * std::numbers::pi);
        CHECK(cascade_magnitude(cascade, fc, fs) == Approx(1.0).margin(1e-9));
    }
}

TEST_CASE("Coefficient quantization", "[dsp][quantize]") {
    SECTION("exact and rounded codes") {
        const std::vector<BiquadCoeffs> c{{1.0, -1.9998, 0.5 / 8192, -0.5 / 8192, 0.0}};
        const auto q = quantize_coeffs(c, 13);
        CHECK(q[0].b0 == 8192);
        CHECK(q[0].b1 == -16382);
        CHECK(q[0].b2 == 1);   // tie rounds away from zero
        CHECK(q[0].a1 == -1);  // tie rounds away from zero
        CHECK(q[0].frac_bits == 13);
    }

    SECTION("out-of-range coefficient names the offender") {
        const std::vector<BiquadCoeffs> c{{0.1, 0.0, -0.1, -4.0, 0.9}};
        try {
            quantize_coeffs(c, 13);
            FAIL("expected overflow");
        } catch (const nd::Error& e) {
            CHECK(e.code() == nd::ErrorCode::QuantizationOverflow);
            CHECK(std::string(e.what()).find("a1") != std::string::npos);
        }
    }

    SECTION("dequantized values within half an LSB") {
        const auto cascade = design_butterworth_bandpass(8, 22, 256, 4);
        const auto q = quantize_coeffs(cascade, 13);
        const double half_lsb = 0.5 / 8192.0;
        for (std::size_t i = 0; i < cascade.size(); ++i) {
            const auto d = dequantize(q[i]);
            CHECK(std::abs(d.b0 - cascade[i].b0) <= half_lsb);
            CHECK(std::abs(d.b2 - cascade[i].b2) <= half_lsb);
            CHECK(std::abs(d.a1 - cascade[i].a1) <= half_lsb);
            CHECK(std::abs(d.a2 - cascade[i].a2) <= half_lsb);
        }
    }

    SECTION("quantized passband within 0.5 dB of float") {
        const auto cascade = design_butterworth_bandpass(8, 22, 256, 4);
        const auto q = quantize_coeffs(cascade, 13);
        std::vector<BiquadCoeffs> dq;
        for (const auto& s : q) dq.push_back(dequantize(s));
        for (double f = 8.0; f <= 22.0; f += 0.25) {
            INFO("f = " << f);
            CHECK(std::abs(db(cascade_magnitude(dq, f, 256)) - db(cascade_magnitude(cascade, f, 256))) < 0.5);
        }
    }
}

TEST_CASE("Biquad step", "[dsp][biquad]") {
    SECTION("identity section") {
        BiquadState s;
        CHECK(biquad_step(s, BiquadCoeffs{1.0, 0, 0, 0, 0}, 0.5) == 0.5);
    }

    SECTION("impulse response of the designed cascade decays") {
        FloatCascade cascade(design_butterworth_bandpass(8, 22, 256, 4));
        double tail = 0.0;
        for (int n = 0; n < 12000; ++n) {
            const double y = cascade.process(n == 0 ? 1.0 : 0.0);
            if (n > 10000) tail = std::max(tail, std::abs(y));
        }
        CHECK(tail < 1e-6);
    }

    SECTION("fixed-point path tracks float path on white noise at half full scale") {
        const auto design = design_butterworth_bandpass(8, 22, 256, 4);
        FloatCascade flt(design);
        FixedCascade fix(quantize_coeffs(design, 13));
        std::mt19937_64 rng(1234);
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        SaturationCounter sat;
        double worst = 0.0;
        for (int n = 0; n < 256; ++n) {
            const auto xq = to_q15(u(rng), sat);
            const double yf = flt.process(from_q15(xq));
            const double yq = from_q15(fix.process(xq));
            worst = std::max(worst, std::abs(yf - yq));
        }
        CHECK(sat.count == 0);
        CHECK(fix.saturation_count() == 0);
        CHECK(worst <= std::ldexp(1.0, -10));
    }

    SECTION("float path is linear") {
        const auto design = design_butterworth_bandpass(8, 22, 256, 4);
        std::mt19937_64 rng(99);
        std::normal_distribution<double> g;
        FloatCascade h1(design), h2(design), h12(design);
        const double a = 0.7, b = -1.3;
        for (int n = 0; n < 2000; ++n) {
            const double x1 = g(rng), x2 = g(rng);
            const double lhs = h12.process(a * x1 + b * x2);
            const double rhs = a * h1.process(x1) + b * h2.process(x2);
            CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
        }
    }
}

TEST_CASE("Fixed-point saturation never wraps", "[dsp][biquad][property]") {
    // High-gain sections driven with adversarial full-scale inputs.
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> coeff(-32768, 32767);
    for (int trial = 0; trial < 200; ++trial) {
        FixedBiquadCoeffs c{static_cast<std::int16_t>(coeff(rng)), static_cast<std::int16_t>(coeff(rng)),
                            static_cast<std::int16_t>(coeff(rng)), static_cast<std::int16_t>(coeff(rng)),
                            static_cast<std::int16_t>(coeff(rng)), 13};
        FixedBiquadState s;
        SaturationCounter sat;
        for (int n = 0; n < 64; ++n) {
            const std::int32_t x = (n % 2 == 0) ? kSampleMax : kSampleMin;
            const std::int64_t exact = static_cast<std::int64_t>(c.b0) * x + static_cast<std::int64_t>(c.b1) * s.x1 +
                                       static_cast<std::int64_t>(c.b2) * s.x2 -
                                       static_cast<std::int64_t>(c.a1) * s.y1 -
                                       static_cast<std::int64_t>(c.a2) * s.y2;
            const auto before = sat.count;
            const std::int32_t y = biquad_step(s, c, x, sat);
            REQUIRE(y >= kSampleMin);
            REQUIRE(y <= kSampleMax);
            const std::int64_t ideal = (exact + (1 << 12)) >> 13;
            if (ideal > kSampleMax) {
                CHECK(y == kSampleMax);
                CHECK(sat.count > before);
            } else if (ideal < kSampleMin) {
                CHECK(y == kSampleMin);
                CHECK(sat.count > before);
            }
        }
    }

    SECTION("explicit overload saturates positive") {
        FixedBiquadCoeffs c{32767, 32767, 32767, -32768, 0, 13};
        FixedBiquadState s;
        SaturationCounter sat;
        std::int32_t y = 0;
        for (int n = 0; n < 8; ++n) y = biquad_step(s, c, kSampleMax, sat);
        CHECK(y == kSampleMax);
        CHECK(sat.count > 0);
    }
}

TEST_CASE("Envelope follower", "[dsp][envelope]") {
    SECTION("constant input converges monotonically") {
        EnvelopeState s{0.0, 32};
        double prev = 0.0;
        for (int n = 0; n < 2000; ++n) {
            const double e = envelope_step(s, -0.25);
            CHECK(e >= prev);
            CHECK(e <= 0.25);
            prev = e;
        }
        CHECK(prev == Approx(0.25).margin(1e-12));
    }

    SECTION("step response after 32 samples matches closed form") {
        EnvelopeState s{0.0, 32};
        double e = 0.0;
        for (int n = 0; n < 32; ++n) e = envelope_step(s, 1.0);
        CHECK(e == Approx(1.0 - std::pow(31.0 / 32.0, 32)).margin(1e-12));
        CHECK(e == Approx(0.6378).margin(2e-4));
    }

    SECTION("steady state of a rectified unit sine is near 2/pi") {
        EnvelopeState s{0.0, 32};
        double sum = 0.0;
        int count = 0;
        for (int n = 0; n < 256 * 20; ++n) {
            const double e = envelope_step(s, std::sin(2.0 * std::numbers::pi * 13.0 * n / 256.0));
            if (n >= 256 * 10) {
                sum += e;
                ++count;
            }
        }
        CHECK(std::abs(sum / count - 2.0 / std::numbers::pi) < 0.05 * 2.0 / std::numbers::pi);
    }

    SECTION("non-negative and bounded for arbitrary input") {
        std::mt19937_64 rng(3);
        std::normal_distribution<double> g(0.0, 3.0);
        EnvelopeState s{0.0, 7};
        FixedEnvelope fe(32);
        SaturationCounter sat;
        double peak = 0.0, peak_q = 0.0;
        for (int n = 0; n < 5000; ++n) {
            const double x = g(rng);
            peak = std::max(peak, std::abs(x));
            const double e = envelope_step(s, x);
            CHECK(e >= 0.0);
            CHECK(e <= peak);
            const auto q = to_q15(x / 16.0, sat);
            peak_q = std::max(peak_q, std::abs(from_q15(q)));
            fe.step(q);
            CHECK(fe.value() >= 0.0);
            CHECK(fe.value() <= peak_q);
        }
    }

    SECTION("invalid decay") {
        EnvelopeState s{0.0, 0};
        CHECK_THROWS_AS(envelope_step(s, 1.0), nd::Error);
        CHECK_THROWS_AS(FixedEnvelope(0), nd::Error);
    }
}

TEST_CASE("Filter-chain classifier", "[dsp][classifier]") {
    FilterChainConfig cfg;
    cfg.threshold = 0.02;
    const double amp = 10.0 * threshold_equivalent_amplitude(cfg.threshold);

    auto run_tone = [&](FilterChainClassifier& clf, double f) {
        std::vector<bool> labels;
        for (int n = 0; n < 256; ++n) labels.push_back(clf.process(amp * std::sin(2.0 * std::numbers::pi * f * n / 256.0)).label);
        return labels;
    };

    for (auto arith : {Arithmetic::Fixed, Arithmetic::Float}) {
        cfg.arithmetic = arith;
        DYNAMIC_SECTION("arithmetic " << (arith == Arithmetic::Fixed ? "fixed" : "float")) {
            SECTION("13 Hz tone turns the label on after a positive delay") {
                FilterChainClassifier clf(cfg);
                const auto labels = run_tone(clf, 13.0);
                CHECK_FALSE(labels[0]);
                const auto first = std::find(labels.begin(), labels.end(), true);
                REQUIRE(first != labels.end());
                CHECK(first - labels.begin() > 0);
                CHECK(labels.back());
                CHECK(clf.saturation_count() == 0);
            }

            SECTION("50 Hz tone stays below threshold") {
                FilterChainClassifier clf(cfg);
                const auto labels = run_tone(clf, 50.0);
                CHECK(std::none_of(labels.begin(), labels.end(), [](bool b) { return b; }));
            }

            SECTION("label is envelope > threshold on every sample") {
                FilterChainClassifier clf(cfg);
                std::mt19937_64 rng(5);
                std::normal_distribution<double> g(0.0, 0.05);
                for (int n = 0; n < 2000; ++n) {
                    const auto s = clf.process(g(rng));
                    CHECK(s.label == (s.envelope > cfg.threshold));
                }
            }
        }
    }

    SECTION("reset restores the initial state") {
        FilterChainClassifier clf(cfg);
        std::vector<double> first, second;
        for (int n = 0; n < 100; ++n) first.push_back(clf.process(0.3 * std::sin(n * 0.3)).envelope);
        clf.reset();
        for (int n = 0; n < 100; ++n) second.push_back(clf.process(0.3 * std::sin(n * 0.3)).envelope);
        CHECK(first == second);
    }
}

TEST_CASE("Filter design file round trip", "[dsp][io]") {
    FilterChainConfig cfg;
    cfg.threshold = 0.0123;
    const auto design = make_design(cfg);
    const auto path = std::filesystem::temp_directory_path() / "nd_test_design.ini";
    save_design(design, path);
    const auto loaded = load_design(path);
    std::filesystem::remove(path);
    REQUIRE(loaded.sections.size() == design.sections.size());
    for (std::size_t i = 0; i < design.sections.size(); ++i) {
        CHECK(loaded.sections[i].b0 == design.sections[i].b0);
        CHECK(loaded.sections[i].a1 == design.sections[i].a1);
        CHECK(loaded.sections[i].a2 == design.sections[i].a2);
        CHECK(loaded.fixed_sections[i].a1 == design.fixed_sections[i].a1);
        CHECK(loaded.fixed_sections[i].b0 == design.fixed_sections[i].b0);
    }
    CHECK(loaded.config.threshold == cfg.threshold);
    CHECK(loaded.config.frac_bits == 13);
    CHECK(loaded.config.decay_samples == 32);
}
