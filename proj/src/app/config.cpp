#include "app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "common/error.hpp"
#include "common/ini.hpp"
#include "common/seed.hpp"
#include "common/text.hpp"

namespace nd::app {

namespace {

std::string field(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

[[noreturn]] void bad(const std::string& section, const std::string& key, const std::string& why) {
    throw Error(ErrorCode::Config, "field " + field(section, key) + " " + why);
}

// Typed lookups that remember which keys were read so leftovers can be reported.
class Reader {
public:
    explicit Reader(const ini::Tree& tree) : tree_(tree) {}

    void real(const std::string& s, const std::string& k, double& out) {
        touch(s, k);
        out = ini::get_double(tree_, s, k, out);
    }
    template <typename Int>
    void integer(const std::string& s, const std::string& k, Int& out) {
        touch(s, k);
        const auto v = ini::get_int(tree_, s, k, static_cast<long long>(out));
        if constexpr (std::is_unsigned_v<Int>)
            if (v < 0) bad(s, k, "must be non-negative");
        out = static_cast<Int>(v);
    }
    void reals(const std::string& s, const std::string& k, std::vector<double>& out) {
        touch(s, k);
        out = ini::get_list(tree_, s, k, out);
    }
    void sizes(const std::string& s, const std::string& k, std::vector<std::size_t>& out) {
        touch(s, k);
        if (!ini::find(tree_, s, k)) return;
        out.clear();
        for (double v : ini::get_list(tree_, s, k, {})) {
            if (!(v >= 1.0) || v != std::floor(v)) bad(s, k, "must list positive integers");
            out.push_back(static_cast<std::size_t>(v));
        }
    }
    std::optional<std::string> string(const std::string& s, const std::string& k) {
        touch(s, k);
        return ini::find(tree_, s, k);
    }

    void reject_unknown() const {
        static const std::set<std::string> sections = {"experiment", "synth", "filter", "mlp",     "cnn",
                                                       "training",   "eval",  "sweep",  "freqmap", "paths"};
        for (const auto& [sec, body] : tree_) {
            if (!sections.count(sec)) throw Error(ErrorCode::Config, "unknown section [" + sec + "]");
            if (body.data().size() && body.empty())
                throw Error(ErrorCode::Config, "key " + sec + " appears outside any section");
            for (const auto& [key, value] : body)
                if (!used_.count({sec, key})) throw Error(ErrorCode::Config, "unknown field " + field(sec, key));
        }
    }

private:
    void touch(const std::string& s, const std::string& k) { used_.insert({s, k}); }

    const ini::Tree& tree_;
    std::set<std::pair<std::string, std::string>> used_;
};

std::string sizes_text(const std::vector<std::size_t>& v) { return text::join<std::size_t>(v, ", "); }
std::string reals_text(const std::vector<double>& v) { return text::join<double>(v, ", "); }

}  // namespace

ExperimentConfig::ExperimentConfig() {
    for (int f = 2; f <= 60; f += 2) freqmap.freqs_hz.push_back(f);
}

void ExperimentConfig::validate() const {
    synth.validate();
    training.validate();

    const auto& f = filter;
    if (!(f.low_hz > 0.0 && f.low_hz < f.high_hz)) bad("filter", "low_hz", "must satisfy 0 < low_hz < high_hz");
    if (!(f.high_hz < synth.fs_hz / 2.0)) bad("filter", "high_hz", "must lie below Nyquist");
    if (f.fs_hz != synth.fs_hz) bad("filter", "fs_hz", "must equal [synth] fs_hz");
    if (f.order < 2 || f.order % 2) bad("filter", "order", "must be an even number >= 2");
    if (f.frac_bits < 1 || f.frac_bits > 14) bad("filter", "frac_bits", "must lie in [1, 14]");
    if (f.decay_samples < 1) bad("filter", "decay_samples", "must be >= 1");
    if (!filter_auto_threshold && !(f.threshold >= 0.0)) bad("filter", "threshold", "must be >= 0 or auto");

    if (mlp.input_len == 0) bad("mlp", "input_len", "must be >= 1");
    if (mlp.hidden.empty()) bad("mlp", "hidden", "must list at least one layer width");
    if (!(mlp.decision_threshold > 0.0 && mlp.decision_threshold < 1.0))
        bad("mlp", "decision_threshold", "must lie in (0, 1)");
    if (window_len != mlp.input_len)
        bad("training", "window_len",
            "(" + std::to_string(window_len) + ") does not match [mlp] input_len (" + std::to_string(mlp.input_len) + ")");
    if (mlp.input_len > 256) bad("mlp", "input_len", "must be <= 256 for 8-bit inference");
    for (auto h : mlp.hidden)
        if (h > 256) bad("mlp", "hidden", "widths must be <= 256 for 8-bit inference");

    if (cnn.n_kernels == 0) bad("cnn", "n_kernels", "must be >= 1");
    if (cnn.kernel_len == 0 || cnn.kernel_len > mlp.input_len)
        bad("cnn", "kernel_len", "must lie in [1, [mlp] input_len]");
    if (cnn.stride == 0) bad("cnn", "stride", "must be >= 1");
    if (cnn.hidden.empty()) bad("cnn", "hidden", "must list at least one layer width");

    if (!(eval.target_tpr > 0.0 && eval.target_tpr <= 1.0)) bad("eval", "target_tpr", "must lie in (0, 1]");
    if (!(eval.latency_bin_s > 0.0)) bad("eval", "latency_bin_s", "must be positive");
    if (!(eval.overlap_bin_pct > 0.0 && eval.overlap_bin_pct <= 100.0))
        bad("eval", "overlap_bin_pct", "must lie in (0, 100]");

    if (sweep.window_lens.empty()) bad("sweep", "window_lens", "must not be empty");
    if (sweep.hidden_sizes.empty()) bad("sweep", "hidden_sizes", "must not be empty");

    if (freqmap.freqs_hz.empty()) bad("freqmap", "freqs_hz", "must not be empty");
    for (double v : freqmap.freqs_hz)
        if (!(v > 0.0 && v <= synth.fs_hz / 2.0)) bad("freqmap", "freqs_hz", "entries must lie in (0, fs/2]");
    if (freqmap.amps_uv.empty()) bad("freqmap", "amps_uv", "must not be empty");
    for (double v : freqmap.amps_uv)
        if (!(v >= 0.0)) bad("freqmap", "amps_uv", "entries must be non-negative");
    if (!(freqmap.tone_s > 0.0)) bad("freqmap", "tone_s", "must be positive");
    if (freqmap.repeats < 1) bad("freqmap", "repeats", "must be >= 1");
    if (!(freqmap.noise_rms_uv >= 0.0)) bad("freqmap", "noise_rms_uv", "must be non-negative");
    if (!(freqmap.preroll_s >= 0.0)) bad("freqmap", "preroll_s", "must be non-negative");
}

std::optional<ExperimentConfig> builtin_config(const std::string& name) {
    ExperimentConfig c;
    if (name == "full") return c;
    if (name == "demo") {
        c.synth.duration_s = 600.0;
        c.synth.n_events = 5;
        c.training.epochs = 40;
        c.sweep.window_lens = {5, 20};
        c.sweep.hidden_sizes = {2, 8};
        c.freqmap.freqs_hz = {4, 8, 13, 18, 22, 30, 50};
        c.freqmap.amps_uv = {5.0, 14.142135623730951, 40.0};
        c.freqmap.repeats = 3;
        return c;
    }
    return std::nullopt;
}

ExperimentConfig parse_config(const std::string& body, const std::filesystem::path& base_dir) {
    const auto tree = ini::read_string(body);
    Reader r(tree);
    ExperimentConfig c;

    r.integer("experiment", "seed", c.seed);
    if (auto v = r.string("experiment", "output_dir")) c.output_dir = base_dir / *v;
    r.integer("experiment", "threads", c.threads);

    auto& s = c.synth;
    r.real("synth", "duration_s", s.duration_s);
    r.real("synth", "fs_hz", s.fs_hz);
    r.integer("synth", "n_events", s.n_events);
    r.real("synth", "event_min_s", s.event_min_s);
    r.real("synth", "event_max_s", s.event_max_s);
    r.real("synth", "background_rms_uv", s.background_rms_uv);
    r.real("synth", "event_low_hz", s.event_low_hz);
    r.real("synth", "event_high_hz", s.event_high_hz);
    r.real("synth", "event_rms_uv", s.event_rms_uv);
    r.real("synth", "ramp_s", s.ramp_s);
    r.real("synth", "full_scale_uv", s.full_scale_uv);

    auto& f = c.filter;
    f.fs_hz = s.fs_hz;
    r.real("filter", "low_hz", f.low_hz);
    r.real("filter", "high_hz", f.high_hz);
    r.integer("filter", "order", f.order);
    r.integer("filter", "frac_bits", f.frac_bits);
    r.integer("filter", "decay_samples", f.decay_samples);
    if (auto v = r.string("filter", "arithmetic")) {
        if (*v == "fixed") f.arithmetic = dsp::Arithmetic::Fixed;
        else if (*v == "float") f.arithmetic = dsp::Arithmetic::Float;
        else bad("filter", "arithmetic", "must be fixed or float");
    }
    if (auto v = r.string("filter", "threshold")) {
        c.filter_auto_threshold = *v == "auto";
        if (!c.filter_auto_threshold && !text::parse_double(*v, f.threshold))
            bad("filter", "threshold", "must be a number or auto");
    }

    r.integer("mlp", "input_len", c.mlp.input_len);
    r.sizes("mlp", "hidden", c.mlp.hidden);
    if (auto v = r.string("mlp", "consensus_rule")) {
        try {
            c.mlp.consensus_rule = nn::parse_consensus_rule(*v);
        } catch (const Error&) {
            bad("mlp", "consensus_rule", "must be mean, majority or unanimity");
        }
    }
    r.real("mlp", "decision_threshold", c.mlp.decision_threshold);

    r.integer("cnn", "n_kernels", c.cnn.n_kernels);
    r.integer("cnn", "kernel_len", c.cnn.kernel_len);
    r.integer("cnn", "stride", c.cnn.stride);
    r.sizes("cnn", "hidden", c.cnn.hidden);

    auto& t = c.training;
    c.window_len = c.mlp.input_len;
    r.integer("training", "window_len", c.window_len);
    r.real("training", "learning_rate", t.learning_rate);
    r.real("training", "momentum", t.momentum);
    r.integer("training", "epochs", t.epochs);
    r.integer("training", "batch_size", t.batch_size);
    r.real("training", "neg_pos_ratio", t.neg_pos_ratio);
    r.real("training", "train_fraction", t.train_fraction);

    r.real("eval", "target_tpr", c.eval.target_tpr);
    r.real("eval", "latency_bin_s", c.eval.latency_bin_s);
    r.real("eval", "overlap_bin_pct", c.eval.overlap_bin_pct);

    r.sizes("sweep", "window_lens", c.sweep.window_lens);
    r.sizes("sweep", "hidden_sizes", c.sweep.hidden_sizes);

    r.reals("freqmap", "freqs_hz", c.freqmap.freqs_hz);
    r.reals("freqmap", "amps_uv", c.freqmap.amps_uv);
    r.real("freqmap", "tone_s", c.freqmap.tone_s);
    r.integer("freqmap", "repeats", c.freqmap.repeats);
    r.real("freqmap", "noise_rms_uv", c.freqmap.noise_rms_uv);
    r.real("freqmap", "preroll_s", c.freqmap.preroll_s);

    if (auto v = r.string("paths", "recording")) c.recording_path = base_dir / *v;
    if (auto v = r.string("paths", "model")) c.model_path = base_dir / *v;

    r.reject_unknown();
    return c;
}

ExperimentConfig load_config(const std::string& name_or_path) {
    if (auto c = builtin_config(name_or_path)) return *c;
    std::ifstream in(name_or_path);
    if (!in) throw Error(ErrorCode::Config, "config '" + name_or_path + "' is neither a built-in name (demo, full) nor a readable file");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str(), std::filesystem::path(name_or_path).parent_path());
    } catch (const ParseError& e) {
        throw ParseError(e.line(), name_or_path + ": " + e.detail());
    }
}

std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream o;
    auto d = [](double v) { return text::format_double(v); };
    o << "[experiment]\nseed = " << c.seed << '\n';
    if (c.output_dir) o << "output_dir = " << c.output_dir->string() << '\n';
    o << "threads = " << c.threads << "\n\n";
    const auto& s = c.synth;
    o << "[synth]\nduration_s = " << d(s.duration_s) << "\nfs_hz = " << d(s.fs_hz) << "\nn_events = " << s.n_events
      << "\nevent_min_s = " << d(s.event_min_s) << "\nevent_max_s = " << d(s.event_max_s)
      << "\nbackground_rms_uv = " << d(s.background_rms_uv) << "\nevent_low_hz = " << d(s.event_low_hz)
      << "\nevent_high_hz = " << d(s.event_high_hz) << "\nevent_rms_uv = " << d(s.event_rms_uv)
      << "\nramp_s = " << d(s.ramp_s) << "\nfull_scale_uv = " << d(s.full_scale_uv) << "\n\n";
    const auto& f = c.filter;
    o << "[filter]\nlow_hz = " << d(f.low_hz) << "\nhigh_hz = " << d(f.high_hz) << "\norder = " << f.order
      << "\nfrac_bits = " << f.frac_bits << "\ndecay_samples = " << f.decay_samples
      << "\narithmetic = " << (f.arithmetic == dsp::Arithmetic::Fixed ? "fixed" : "float")
      << "\nthreshold = " << (c.filter_auto_threshold ? std::string("auto") : d(f.threshold)) << "\n\n";
    o << "[mlp]\ninput_len = " << c.mlp.input_len << "\nhidden = " << sizes_text(c.mlp.hidden)
      << "\nconsensus_rule = " << nn::to_string(c.mlp.consensus_rule)
      << "\ndecision_threshold = " << d(c.mlp.decision_threshold) << "\n\n";
    o << "[cnn]\nn_kernels = " << c.cnn.n_kernels << "\nkernel_len = " << c.cnn.kernel_len
      << "\nstride = " << c.cnn.stride << "\nhidden = " << sizes_text(c.cnn.hidden) << "\n\n";
    const auto& t = c.training;
    o << "[training]\nwindow_len = " << c.window_len << "\nlearning_rate = " << d(t.learning_rate)
      << "\nmomentum = " << d(t.momentum) << "\nepochs = " << t.epochs << "\nbatch_size = " << t.batch_size
      << "\nneg_pos_ratio = " << d(t.neg_pos_ratio) << "\ntrain_fraction = " << d(t.train_fraction) << "\n\n";
    o << "[eval]\ntarget_tpr = " << d(c.eval.target_tpr) << "\nlatency_bin_s = " << d(c.eval.latency_bin_s)
      << "\noverlap_bin_pct = " << d(c.eval.overlap_bin_pct) << "\n\n";
    o << "[sweep]\nwindow_lens = " << sizes_text(c.sweep.window_lens)
      << "\nhidden_sizes = " << sizes_text(c.sweep.hidden_sizes) << "\n\n";
    const auto& m = c.freqmap;
    o << "[freqmap]\nfreqs_hz = " << reals_text(m.freqs_hz) << "\namps_uv = " << reals_text(m.amps_uv)
      << "\ntone_s = " << d(m.tone_s) << "\nrepeats = " << m.repeats << "\nnoise_rms_uv = " << d(m.noise_rms_uv)
      << "\npreroll_s = " << d(m.preroll_s) << '\n';
    if (c.recording_path || c.model_path) {
        o << "\n[paths]\n";
        if (c.recording_path) o << "recording = " << c.recording_path->string() << '\n';
        if (c.model_path) o << "model = " << c.model_path->string() << '\n';
    }
    return o.str();
}

Seeds stage_seeds(std::uint64_t seed) {
    return {derive_seed(seed, {1}), derive_seed(seed, {2}), derive_seed(seed, {3}),
            derive_seed(seed, {4}), derive_seed(seed, {5}), derive_seed(seed, {6})};
}

}  // namespace nd::app
