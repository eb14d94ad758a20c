#include "neurodetect.h"

#include <memory>
#include <new>
#include <string>
#include <vector>

#include "app/config.hpp"
#include "app/experiment.hpp"
#include "common/error.hpp"
#include "dsp/filter_chain.hpp"
#include "nn/consensus.hpp"
#include "nn/model_io.hpp"
#include "nn/stream.hpp"
#include "synth/recording.hpp"

struct nd_recording {
    nd::synth::Recording rec;
};

struct nd_classifier {
    std::unique_ptr<nd::StreamingClassifier> impl;
    std::string name;
};

struct nd_experiment {
    nd::app::ExperimentConfig config;
    std::optional<std::filesystem::path> out;
    std::string classifier;
    std::vector<std::string> artifacts;
    std::vector<std::string> warnings;
    std::string config_text;
};

namespace {

thread_local std::string g_last_error;

nd_status to_status(nd::ErrorCode c) {
    using nd::ErrorCode;
    switch (c) {
        case ErrorCode::InvalidArgument: return ND_ERR_INVALID_ARGUMENT;
        case ErrorCode::Dimension: return ND_ERR_DIMENSION;
        case ErrorCode::QuantizationOverflow: return ND_ERR_QUANTIZATION_OVERFLOW;
        case ErrorCode::Io: return ND_ERR_IO;
        case ErrorCode::Parse: return ND_ERR_PARSE;
        case ErrorCode::Corrupt: return ND_ERR_CORRUPT;
        case ErrorCode::Config: return ND_ERR_CONFIG;
        case ErrorCode::Numeric: return ND_ERR_NUMERIC;
        case ErrorCode::Placement: return ND_ERR_PLACEMENT;
        case ErrorCode::Unsupported: return ND_ERR_UNSUPPORTED;
    }
    return ND_ERR_INTERNAL;
}

nd_status fail(nd_status s, const std::string& what) {
    g_last_error = what;
    return s;
}

template <typename F>
nd_status guarded(F&& f) {
    try {
        f();
        g_last_error.clear();
        return ND_OK;
    } catch (const nd::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(ND_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(ND_ERR_INTERNAL, e.what());
    }
}

#define ND_REQUIRE(cond, msg) \
    if (!(cond)) return fail(ND_ERR_INVALID_ARGUMENT, msg)

}  // namespace

extern "C" {

const char* nd_last_error(void) { return g_last_error.c_str(); }

const char* nd_status_name(nd_status s) {
    switch (s) {
        case ND_OK: return "ok";
        case ND_ERR_INVALID_ARGUMENT: return "invalid argument";
        case ND_ERR_DIMENSION: return "dimension mismatch";
        case ND_ERR_QUANTIZATION_OVERFLOW: return "quantization overflow";
        case ND_ERR_IO: return "i/o error";
        case ND_ERR_PARSE: return "parse error";
        case ND_ERR_CORRUPT: return "corrupt file";
        case ND_ERR_CONFIG: return "configuration error";
        case ND_ERR_NUMERIC: return "numeric error";
        case ND_ERR_PLACEMENT: return "event placement error";
        case ND_ERR_UNSUPPORTED: return "unsupported";
        case ND_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* nd_version(void) { return "0.1.0"; }

nd_status nd_recording_load(const char* path, nd_recording** out) {
    ND_REQUIRE(path && out, "path and out must be non-null");
    *out = nullptr;
    return guarded([&] { *out = new nd_recording{nd::synth::load_recording(path)}; });
}

nd_status nd_recording_save(const nd_recording* rec, const char* base_path) {
    ND_REQUIRE(rec && base_path, "recording and path must be non-null");
    return guarded([&] { nd::synth::save_recording(rec->rec, base_path); });
}

void nd_recording_free(nd_recording* rec) { delete rec; }
size_t nd_recording_length(const nd_recording* rec) { return rec ? rec->rec.samples.size() : 0; }
double nd_recording_fs(const nd_recording* rec) { return rec ? rec->rec.fs_hz : 0.0; }
double nd_recording_full_scale(const nd_recording* rec) { return rec ? rec->rec.full_scale_uv : 0.0; }
const float* nd_recording_samples(const nd_recording* rec) { return rec ? rec->rec.samples.data() : nullptr; }
size_t nd_recording_event_count(const nd_recording* rec) { return rec ? rec->rec.events.size() : 0; }

nd_status nd_recording_event(const nd_recording* rec, size_t index, double* start_s, double* end_s) {
    ND_REQUIRE(rec && start_s && end_s, "arguments must be non-null");
    if (index >= rec->rec.events.size()) return fail(ND_ERR_INVALID_ARGUMENT, "event index out of range");
    *start_s = rec->rec.events[index].start_s;
    *end_s = rec->rec.events[index].end_s;
    return ND_OK;
}

nd_filter_params nd_filter_defaults(void) {
    const nd::dsp::FilterChainConfig c;
    return {c.low_hz, c.high_hz, c.fs_hz, c.order, c.frac_bits, c.decay_samples, c.threshold, 1};
}

nd_status nd_classifier_create_filter(const nd_filter_params* p, nd_classifier** out) {
    ND_REQUIRE(p && out, "params and out must be non-null");
    *out = nullptr;
    return guarded([&] {
        nd::dsp::FilterChainConfig c;
        c.low_hz = p->low_hz;
        c.high_hz = p->high_hz;
        c.fs_hz = p->fs_hz;
        c.order = p->order;
        c.frac_bits = p->frac_bits;
        c.decay_samples = p->decay_samples;
        c.threshold = p->threshold;
        c.arithmetic = p->fixed_point ? nd::dsp::Arithmetic::Fixed : nd::dsp::Arithmetic::Float;
        auto impl = std::make_unique<nd::dsp::FilterChainClassifier>(c);
        auto name = impl->name();
        *out = new nd_classifier{std::move(impl), std::move(name)};
    });
}

nd_status nd_classifier_load_model(const char* model_path, const char* consensus_rule, double threshold,
                                   nd_classifier** out) {
    ND_REQUIRE(model_path && out, "path and out must be non-null");
    *out = nullptr;
    return guarded([&] {
        nd::nn::WindowedOptions opt;
        opt.threshold = threshold;
        if (consensus_rule) {
            opt.consensus = true;
            opt.rule = nd::nn::parse_consensus_rule(consensus_rule);
        }
        auto net = std::make_shared<const nd::nn::Network>(nd::nn::load_network(model_path));
        auto impl = std::make_unique<nd::nn::WindowedNetClassifier>(net, opt);
        auto name = impl->name();
        *out = new nd_classifier{std::move(impl), std::move(name)};
    });
}

nd_status nd_classifier_step(nd_classifier* c, double x, nd_output* out) {
    ND_REQUIRE(c && out, "classifier and out must be non-null");
    return guarded([&] {
        const auto o = c->impl->step(x);
        *out = {o.score, o.label ? 1 : 0, o.response};
    });
}

nd_status nd_classifier_reset(nd_classifier* c) {
    ND_REQUIRE(c, "classifier must be non-null");
    c->impl->reset();
    return ND_OK;
}

const char* nd_classifier_name(const nd_classifier* c) { return c ? c->name.c_str() : ""; }
void nd_classifier_free(nd_classifier* c) { delete c; }

nd_status nd_experiment_load(const char* config, nd_experiment** out) {
    ND_REQUIRE(config && out, "config and out must be non-null");
    *out = nullptr;
    return guarded([&] {
        auto e = std::make_unique<nd_experiment>();
        e->config = nd::app::load_config(config);
        *out = e.release();
    });
}

nd_status nd_experiment_set_seed(nd_experiment* e, uint64_t seed) {
    ND_REQUIRE(e, "experiment must be non-null");
    e->config.seed = seed;
    return ND_OK;
}

nd_status nd_experiment_set_output_dir(nd_experiment* e, const char* dir) {
    ND_REQUIRE(e && dir && *dir, "experiment and directory must be non-empty");
    e->out = dir;
    return ND_OK;
}

nd_status nd_experiment_set_classifier(nd_experiment* e, const char* name) {
    ND_REQUIRE(e && name, "experiment and name must be non-null");
    e->classifier = name;
    return ND_OK;
}

nd_status nd_experiment_run(nd_experiment* e, const char* command) {
    ND_REQUIRE(e && command, "experiment and command must be non-null");
    return guarded([&] {
        e->artifacts.clear();
        e->warnings.clear();
        const auto dir = nd::app::resolve_output_dir(e->config, e->out);
        const auto r = nd::app::run_command(e->config, command, dir, e->classifier);
        for (const auto& p : r.artifacts) e->artifacts.push_back(p.string());
        e->warnings = r.warnings;
    });
}

size_t nd_experiment_artifact_count(const nd_experiment* e) { return e ? e->artifacts.size() : 0; }
const char* nd_experiment_artifact(const nd_experiment* e, size_t i) {
    return e && i < e->artifacts.size() ? e->artifacts[i].c_str() : nullptr;
}
size_t nd_experiment_warning_count(const nd_experiment* e) { return e ? e->warnings.size() : 0; }
const char* nd_experiment_warning(const nd_experiment* e, size_t i) {
    return e && i < e->warnings.size() ? e->warnings[i].c_str() : nullptr;
}

const char* nd_experiment_config_text(nd_experiment* e) {
    if (!e) return "";
    e->config_text = nd::app::to_ini(e->config);
    return e->config_text.c_str();
}

void nd_experiment_free(nd_experiment* e) { delete e; }

}  // extern "C"
