#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "common/streaming.hpp"
#include "dsp/biquad.hpp"
#include "dsp/envelope.hpp"

namespace nd::dsp {

enum class Arithmetic { Fixed, Float };

struct FilterChainConfig {
    double low_hz = 8.0;
    double high_hz = 22.0;
    double fs_hz = 256.0;
    int order = 4;
    int frac_bits = 13;
    int decay_samples = 32;
    /// Envelope threshold in full-scale units.
    double threshold = 0.0;
    Arithmetic arithmetic = Arithmetic::Fixed;
};

/// Designed cascade in both number formats, as exported to design files.
struct FilterDesign {
    FilterChainConfig config;
    std::vector<BiquadCoeffs> sections;
    std::vector<FixedBiquadCoeffs> fixed_sections;
};

FilterDesign make_design(const FilterChainConfig& config);

void save_design(const FilterDesign& design, const std::filesystem::path& path, const std::string& provenance = {});
FilterDesign load_design(const std::filesystem::path& path);

/// Band-pass -> rectify -> moving average -> compare. The comparator has no
/// hysteresis; label = envelope > threshold.
class FilterChainClassifier : public StreamingClassifier {
public:
    struct Step {
        double envelope = 0.0;
        bool label = false;
    };

    explicit FilterChainClassifier(const FilterChainConfig& config);
    explicit FilterChainClassifier(FilterDesign design);

    Step process(double x);

    StreamOutput step(double x) override;
    void reset() override;
    std::unique_ptr<StreamingClassifier> clone() const override;
    std::string name() const override { return "filter"; }

    void set_threshold(double t) { design_.config.threshold = t; }
    double threshold() const { return design_.config.threshold; }
    const FilterDesign& design() const { return design_; }
    std::uint64_t saturation_count() const { return fixed_.saturation_count() + input_sat_.count; }

private:
    FilterDesign design_;
    FloatCascade floating_;
    FixedCascade fixed_;
    EnvelopeState env_;
    FixedEnvelope fixed_env_;
    SaturationCounter input_sat_;
};

/// Tone amplitude (full scale) whose steady rectified mean equals `threshold`
/// for a unity-gain passband: threshold * pi / 2.
double threshold_equivalent_amplitude(double threshold);

}  // namespace nd::dsp
