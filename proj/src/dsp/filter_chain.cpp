#include "dsp/filter_chain.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include "common/error.hpp"
#include "common/ini.hpp"
#include "common/text.hpp"
#include "dsp/butterworth.hpp"

namespace nd::dsp {

namespace {

const char* arithmetic_name(Arithmetic a) { return a == Arithmetic::Fixed ? "fixed" : "float"; }

Arithmetic parse_arithmetic(const std::string& s) {
    if (s == "fixed") return Arithmetic::Fixed;
    if (s == "float") return Arithmetic::Float;
    throw Error(ErrorCode::Parse, "unknown arithmetic '" + s + "'");
}

}  // namespace

FilterDesign make_design(const FilterChainConfig& config) {
    if (config.decay_samples < 1) throw Error(ErrorCode::InvalidArgument, "decay_samples must be >= 1");
    FilterDesign d;
    d.config = config;
    d.sections = design_butterworth_bandpass(config.low_hz, config.high_hz, config.fs_hz, config.order);
    d.fixed_sections = quantize_coeffs(d.sections, config.frac_bits);
    return d;
}

void save_design(const FilterDesign& d, const std::filesystem::path& path, const std::string& provenance) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    out << "# neurodetect filter design\n";
    if (!provenance.empty()) out << provenance;
    ini::Tree t;
    auto& c = t.put_child("design", {});
    c.put("fs_hz", text::format_double(d.config.fs_hz));
    c.put("low_hz", text::format_double(d.config.low_hz));
    c.put("high_hz", text::format_double(d.config.high_hz));
    c.put("order", std::to_string(d.config.order));
    c.put("frac_bits", std::to_string(d.config.frac_bits));
    c.put("decay_samples", std::to_string(d.config.decay_samples));
    c.put("threshold", text::format_double(d.config.threshold));
    c.put("arithmetic", arithmetic_name(d.config.arithmetic));
    c.put("sections", std::to_string(d.sections.size()));
    for (std::size_t i = 0; i < d.sections.size(); ++i) {
        const auto& s = d.sections[i];
        const auto& q = d.fixed_sections[i];
        const double coeffs[] = {s.b0, s.b1, s.b2, s.a1, s.a2};
        const int codes[] = {q.b0, q.b1, q.b2, q.a1, q.a2};
        auto& sec = t.put_child(ini::Tree::path_type("section" + std::to_string(i), '\0'), {});
        sec.put("coeffs", text::join<double>(coeffs));
        sec.put("codes", text::join<int>(codes));
    }
    ini::write(t, out);
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

FilterDesign load_design(const std::filesystem::path& path) {
    const auto t = ini::read(path);
    FilterDesign d;
    auto& c = d.config;
    try {
        c.fs_hz = ini::require_double(t, "design", "fs_hz");
        c.low_hz = ini::require_double(t, "design", "low_hz");
        c.high_hz = ini::require_double(t, "design", "high_hz");
        c.order = static_cast<int>(ini::require_int(t, "design", "order"));
        c.frac_bits = static_cast<int>(ini::require_int(t, "design", "frac_bits"));
        c.decay_samples = static_cast<int>(ini::get_int(t, "design", "decay_samples", 32));
        c.threshold = ini::get_double(t, "design", "threshold", 0.0);
        c.arithmetic = parse_arithmetic(ini::find(t, "design", "arithmetic").value_or("fixed"));
        const auto n = ini::require_int(t, "design", "sections");
        for (long long i = 0; i < n; ++i) {
            const auto sec = "section" + std::to_string(i);
            const auto coeffs = ini::get_list(t, sec, "coeffs", {});
            const auto codes = ini::get_list(t, sec, "codes", {});
            if (coeffs.size() != 5 || codes.size() != 5)
                throw Error(ErrorCode::Corrupt, path.string() + ": " + sec + " needs 5 coeffs and 5 codes");
            d.sections.push_back({coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4]});
            auto code = [&](int k) {
                if (codes[k] < -32768 || codes[k] > 32767)
                    throw Error(ErrorCode::Corrupt, path.string() + ": " + sec + " code out of 16-bit range");
                return static_cast<std::int16_t>(codes[k]);
            };
            d.fixed_sections.push_back({code(0), code(1), code(2), code(3), code(4), c.frac_bits});
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Config) throw Error(ErrorCode::Parse, path.string() + ": " + e.what());
        throw;
    }
    return d;
}

FilterChainClassifier::FilterChainClassifier(const FilterChainConfig& config)
    : FilterChainClassifier(make_design(config)) {}

FilterChainClassifier::FilterChainClassifier(FilterDesign design)
    : design_(std::move(design)),
      floating_(design_.sections),
      fixed_(design_.fixed_sections),
      env_{0.0, design_.config.decay_samples},
      fixed_env_(design_.config.decay_samples) {}

FilterChainClassifier::Step FilterChainClassifier::process(double x) {
    double env = 0.0;
    if (design_.config.arithmetic == Arithmetic::Fixed) {
        fixed_env_.step(fixed_.process(to_q15(x, input_sat_)));
        env = fixed_env_.value();
    } else {
        env = envelope_step(env_, floating_.process(x));
    }
    return {env, env > design_.config.threshold};
}

StreamOutput FilterChainClassifier::step(double x) {
    const auto s = process(x);
    return {s.envelope, s.label, s.label ? 1.0 : 0.0};
}

void FilterChainClassifier::reset() {
    floating_.reset();
    fixed_.reset();
    fixed_env_.reset();
    env_.env = 0.0;
}

std::unique_ptr<StreamingClassifier> FilterChainClassifier::clone() const {
    auto c = std::make_unique<FilterChainClassifier>(design_);
    return c;
}

double threshold_equivalent_amplitude(double threshold) { return threshold * std::numbers::pi / 2.0; }

}  // namespace nd::dsp
