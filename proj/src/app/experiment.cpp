#include "app/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <unistd.h>

#include "common/error.hpp"
#include "common/text.hpp"
#include "eval/freqmap.hpp"
#include "eval/resources.hpp"
#include "nn/model_io.hpp"
#include "nn/quantized.hpp"
#include "synth/generator.hpp"

namespace nd::app {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

class Staging {
public:
    Staging(const fs::path& out, const std::string& command) : out_(out) {
        std::error_code ec;
        fs::create_directories(out_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + out_.string() + ": " + ec.message());
        dir_ = out_ / (".staging-" + command + "-" + std::to_string(::getpid()));
        fs::remove_all(dir_, ec);
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorCode::Io, "cannot create staging directory " + dir_.string() + ": " + ec.message());
    }
    ~Staging() {
        std::error_code ec;
        fs::remove_all(dir_, ec);
    }
    Staging(const Staging&) = delete;
    Staging& operator=(const Staging&) = delete;

    fs::path file(const std::string& name) {
        names_.push_back(name);
        return dir_ / name;
    }
    const fs::path& dir() const { return dir_; }

    void write(const std::string& name, const std::string& body) {
        std::ofstream out(file(name), std::ios::binary);
        out << body;
        if (!out) throw Error(ErrorCode::Io, "cannot write " + (dir_ / name).string());
    }

    std::vector<fs::path> commit() {
        std::vector<fs::path> done;
        for (const auto& n : names_) {
            std::error_code ec;
            fs::rename(dir_ / n, out_ / n, ec);
            if (ec) throw Error(ErrorCode::Io, "cannot move " + n + " into " + out_.string() + ": " + ec.message());
            done.push_back(out_ / n);
        }
        return done;
    }

private:
    fs::path out_;
    fs::path dir_;
    std::vector<std::string> names_;
};

ExperimentConfig without_output_dir(ExperimentConfig c) {
    c.output_dir.reset();
    return c;
}

std::string fmt(double v) { return text::format_double(v); }

ordered_json nullable(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json header_json(const ExperimentConfig& c, const std::string& command) {
    ordered_json j;
    j["command"] = command;
    j["seed"] = c.seed;
    j["config"] = to_ini(without_output_dir(c));
    return j;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// Drops curve points closer than 1e-3 (in both coordinates) to the last kept one.
std::string roc_csv(const eval::RocCurve& roc, const std::string& prov) {
    std::string out = prov + "# points closer than 0.001 to their predecessor are omitted\nfpr,tpr,threshold\n";
    const eval::RocPoint* last = nullptr;
    for (std::size_t i = 0; i < roc.points.size(); ++i) {
        const auto& p = roc.points[i];
        const bool keep = !last || i + 1 == roc.points.size() || std::abs(p.fpr - last->fpr) >= 1e-3 ||
                          std::abs(p.tpr - last->tpr) >= 1e-3;
        if (!keep) continue;
        out += fmt(p.fpr) + "," + fmt(p.tpr) + "," + fmt(p.threshold) + "\n";
        last = &p;
    }
    return out;
}

std::string events_csv(const ClassifierEval& ce, const synth::Recording& rec, const std::string& prov) {
    std::string out = prov + "event,start_s,end_s,latency_s,overlap_pct\n";
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
        const auto& e = rec.events[i];
        const auto& l = ce.events.latencies[i];
        out += std::to_string(i) + "," + fmt(e.start_s) + "," + fmt(e.end_s) + "," + (l ? fmt(*l) : "miss") + "," +
               fmt(ce.events.overlaps[i]) + "\n";
    }
    return out;
}

std::string histogram_csv(const std::vector<double>& values, double width, double lo, double hi_min,
                          const std::string& unit, const std::string& prov) {
    double hi = hi_min;
    for (double v : values) hi = std::max(hi, v);
    // The last bin is closed so the maximum lands inside it.
    const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / width)));
    std::vector<std::size_t> counts(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>(std::floor((v - lo) / width));
        counts[std::min(b, bins - 1)] += 1;
    }
    std::string out = prov + "bin_start_" + unit + ",bin_end_" + unit + ",count\n";
    for (std::size_t b = 0; b < bins; ++b)
        out += fmt(lo + static_cast<double>(b) * width) + "," + fmt(lo + static_cast<double>(b + 1) * width) + "," +
               std::to_string(counts[b]) + "\n";
    return out;
}

ordered_json classifier_json(const ClassifierEval& ce) {
    ordered_json j;
    j["name"] = ce.name;
    j["auc"] = ce.roc.auc;
    j["operating_point"] = {{"threshold", ce.operating.threshold}, {"tpr", ce.operating.tpr}, {"fpr", ce.operating.fpr}};
    j["mean_latency_s"] = nullable(ce.events.mean_latency());
    j["detected"] = ce.events.detected;
    j["missed"] = ce.events.missed;
    j["mean_overlap_pct"] = ce.events.mean_overlap();
    ordered_json lat = ordered_json::array();
    for (const auto& l : ce.events.latencies) lat.push_back(nullable(l));
    j["latencies_s"] = lat;
    j["overlaps_pct"] = ce.events.overlaps;
    return j;
}

// roc / events / histogram files for one evaluated classifier.
void write_classifier_files(Staging& st, const ClassifierEval& ce, const synth::Recording& rec,
                            const ExperimentConfig& c, const std::string& prov) {
    st.write("roc_" + ce.name + ".csv", roc_csv(ce.roc, prov));
    st.write("events_" + ce.name + ".csv", events_csv(ce, rec, prov));
    std::vector<double> lat;
    for (const auto& l : ce.events.latencies)
        if (l) lat.push_back(*l);
    st.write("latency_hist_" + ce.name + ".csv", histogram_csv(lat, c.eval.latency_bin_s, 0.0, c.eval.latency_bin_s, "s", prov));
    st.write("overlap_hist_" + ce.name + ".csv",
             histogram_csv(ce.events.overlaps, c.eval.overlap_bin_pct, 0.0, 100.0, "pct", prov));
}

std::string history_csv(const train::LossHistory& h, const std::string& prov) {
    std::string out = prov + "# best_epoch = " + std::to_string(h.best_epoch) + "\nepoch,train_bce,validation_bce\n";
    for (std::size_t e = 0; e < h.train.size(); ++e)
        out += std::to_string(e) + "," + fmt(h.train[e]) + "," + fmt(h.validation[e]) + "\n";
    return out;
}

double window_auc(const nn::Network& net, const train::WindowedDataset& ds) {
    if (ds.positives() == 0 || ds.negatives() == 0) return std::nan("");
    std::vector<double> s;
    for (std::size_t i = 0; i < ds.size(); ++i) s.push_back(nn::forward(net, ds.window(i)));
    return eval::roc_curve(s, ds.labels).auc;
}

}  // namespace

fs::path resolve_output_dir(const ExperimentConfig& c, const std::optional<fs::path>& override_dir) {
    if (override_dir) return *override_dir;
    if (c.output_dir) return *c.output_dir;
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
    return "nd_out";
}

std::string provenance(const ExperimentConfig& c, const std::string& command) {
    std::string out = "# neurodetect " + command + "\n# seed = " + std::to_string(c.seed) + "\n# resolved config:\n";
    std::istringstream in(to_ini(without_output_dir(c)));
    for (std::string line; std::getline(in, line);) out += line.empty() ? "#\n" : "#   " + line + "\n";
    return out;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"gen", "train", "eval", "sweep", "freqmap", "resources", "compare"};
    return names;
}

const std::vector<std::string>& classifier_names() {
    static const std::vector<std::string> names = {"filter", "mlp", "mlp_consensus", "mlp_q8", "mlp_q8_consensus",
                                                   "cnn",    "cnn_consensus"};
    return names;
}

ClassifierEval evaluate_trace(const std::string& name, const eval::StreamTrace& trace, const synth::Recording& rec,
                              double target_tpr) {
    ClassifierEval ce;
    ce.name = name;
    ce.roc = eval::roc_curve(trace.score, synth::sample_labels(rec));
    ce.operating = eval::operating_point(ce.roc, target_tpr);
    ce.events = eval::event_metrics(eval::threshold_labels(trace.score, ce.operating.threshold), rec.events, rec.fs_hz);
    return ce;
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) { config_.validate(); }

const synth::Recording& Experiment::training_recording() {
    if (!train_rec_) {
        if (config_.recording_path) {
            train_rec_ = synth::load_recording(*config_.recording_path);
            if (train_rec_->fs_hz != config_.synth.fs_hz)
                throw Error(ErrorCode::Config, "recording " + config_.recording_path->string() + " is sampled at " +
                                                   fmt(train_rec_->fs_hz) + " Hz but [synth] fs_hz is " +
                                                   fmt(config_.synth.fs_hz));
        } else {
            auto sc = config_.synth;
            sc.seed = stage_seeds(config_.seed).train_recording;
            train_rec_ = synth::generate_recording(sc);
        }
    }
    return *train_rec_;
}

const synth::Recording& Experiment::test_recording() {
    if (!test_rec_) {
        auto sc = config_.synth;
        sc.seed = stage_seeds(config_.seed).test_recording;
        test_rec_ = synth::generate_recording(sc);
    }
    return *test_rec_;
}

const train::PipelineResult& Experiment::mlp_training() {
    if (!mlp_) {
        auto tc = config_.training;
        tc.seed = stage_seeds(config_.seed).mlp_training;
        mlp_ = train::run_pipeline(training_recording(), nn::make_mlp(config_.mlp.input_len, config_.mlp.hidden), tc);
    }
    return *mlp_;
}

const train::PipelineResult& Experiment::cnn_training() {
    if (!cnn_) {
        auto tc = config_.training;
        tc.seed = stage_seeds(config_.seed).cnn_training;
        const auto& k = config_.cnn;
        cnn_ = train::run_pipeline(training_recording(),
                                   nn::make_cnn(config_.mlp.input_len, k.n_kernels, k.kernel_len, k.stride, k.hidden), tc);
    }
    return *cnn_;
}

std::shared_ptr<const nn::Network> Experiment::mlp_network() {
    if (!mlp_net_) {
        if (config_.model_path) {
            auto net = nn::load_network(*config_.model_path);
            if (nn::input_len(net) != config_.mlp.input_len)
                throw Error(ErrorCode::Config, "model " + config_.model_path->string() + " expects " +
                                                   std::to_string(nn::input_len(net)) + " inputs but [mlp] input_len is " +
                                                   std::to_string(config_.mlp.input_len));
            mlp_net_ = std::make_shared<const nn::Network>(std::move(net));
        } else {
            mlp_net_ = std::make_shared<const nn::Network>(mlp_training().model);
        }
    }
    return mlp_net_;
}

std::shared_ptr<const nn::Network> Experiment::mlp_q8_network() {
    if (!mlp_q8_net_) {
        const auto base = mlp_network();
        if (std::holds_alternative<nn::QuantizedMlp>(*base))
            mlp_q8_net_ = base;
        else
            mlp_q8_net_ = std::make_shared<const nn::Network>(nn::quantize_model(std::get<nn::MlpModel>(*base)));
    }
    return mlp_q8_net_;
}

std::shared_ptr<const nn::Network> Experiment::cnn_network() {
    if (!cnn_net_) cnn_net_ = std::make_shared<const nn::Network>(cnn_training().model);
    return cnn_net_;
}

const dsp::FilterChainClassifier& Experiment::filter() {
    if (!filter_) {
        dsp::FilterChainClassifier f(config_.filter);
        if (config_.filter_auto_threshold) {
            const auto tr = eval::run_stream(f, training_recording());
            const auto roc = eval::roc_curve(tr.score, synth::sample_labels(training_recording()));
            f.set_threshold(eval::operating_point(roc, config_.eval.target_tpr).threshold);
            f.reset();
        }
        filter_.emplace(std::move(f));
    }
    return *filter_;
}

std::unique_ptr<StreamingClassifier> Experiment::classifier(const std::string& name) {
    nn::WindowedOptions opt{false, config_.mlp.decision_threshold, config_.mlp.consensus_rule};
    const bool consensus = name.ends_with("_consensus");
    opt.consensus = consensus;
    const auto base = consensus ? name.substr(0, name.size() - std::string("_consensus").size()) : name;
    if (name == "filter") return filter().clone();
    if (base == "mlp") return std::make_unique<nn::WindowedNetClassifier>(mlp_network(), opt);
    if (base == "mlp_q8") return std::make_unique<nn::WindowedNetClassifier>(mlp_q8_network(), opt);
    if (base == "cnn") return std::make_unique<nn::WindowedNetClassifier>(cnn_network(), opt);
    std::string known;
    for (const auto& n : classifier_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error(ErrorCode::Config, "unknown classifier '" + name + "' (expected one of " + known + ")");
}

namespace {

RunResult cmd_gen(Experiment& ex, Staging& st, const std::string& prov) {
    const auto paths = synth::recording_paths(st.dir() / "recording");
    for (const auto& p : {paths.header, paths.payload, paths.annotations}) st.file(p.filename().string());
    synth::save_recording(ex.training_recording(), st.dir() / "recording", prov);
    return {};
}

RunResult cmd_train(Experiment& ex, Staging& st, const std::string& prov, const std::string& which) {
    const auto& c = ex.config();
    if (which != "mlp" && which != "cnn")
        throw Error(ErrorCode::Config, "train supports --classifier mlp or cnn, not '" + which + "'");
    const auto& res = which == "mlp" ? ex.mlp_training() : ex.cnn_training();
    const nn::Network fnet = res.model;
    const nn::Network qnet = nn::quantize_model(res.model);
    {
        std::ofstream out(st.file(which + ".ini"));
        nn::write_network(fnet, out, prov);
    }
    {
        std::ofstream out(st.file(which + "_q8.ini"));
        nn::write_network(qnet, out, prov);
    }
    st.write("history_" + which + ".csv", history_csv(res.history, prov));

    auto j = header_json(c, "train");
    j["classifier"] = which;
    j["parameters"] = res.model.parameter_count();
    j["train_windows"] = res.split.train.size();
    j["validation_windows"] = res.split.validation.size();
    j["best_epoch"] = res.history.best_epoch;
    j["best_validation_bce"] = res.history.best_validation();
    j["validation_auc"] = window_auc(fnet, res.split.validation);
    j["validation_auc_q8"] = window_auc(qnet, res.split.validation);
    j["warnings"] = res.split.warnings;
    st.write("train_" + which + ".json", dump(j));
    return {{}, res.split.warnings};
}

RunResult cmd_eval(Experiment& ex, Staging& st, const std::string& prov, const std::vector<std::string>& names,
                   const std::string& command) {
    const auto& c = ex.config();
    const auto& rec = ex.test_recording();
    auto j = header_json(c, command);
    j["evaluation_recording"] = {{"duration_s", rec.duration_s()}, {"events", rec.events.size()}};
    j["target_tpr"] = c.eval.target_tpr;
    ordered_json list = ordered_json::array();
    std::vector<ClassifierEval> evals;
    for (const auto& name : names) {
        auto clf = ex.classifier(name);
        const auto ce = evaluate_trace(name, eval::run_stream(*clf, rec), rec, c.eval.target_tpr);
        write_classifier_files(st, ce, rec, c, prov);
        auto cj = classifier_json(ce);
        if (name == "filter") cj["deployed_threshold"] = ex.filter().threshold();
        list.push_back(cj);
        evals.push_back(ce);
    }
    j["classifiers"] = list;

    if (command == "compare") {
        const auto find = [&](const std::string& n) -> const ClassifierEval& {
            for (const auto& e : evals)
                if (e.name == n) return e;
            throw Error(ErrorCode::InvalidArgument, "missing " + n);
        };
        const auto& f = find("filter");
        const auto& sa = find("mlp");
        const auto& co = find("mlp_consensus");
        const auto fl = f.events.mean_latency();
        const auto cl = co.events.mean_latency();
        j["comparison"] = {
            {"filter_mean_latency_s", nullable(fl)},
            {"mlp_consensus_mean_latency_s", nullable(cl)},
            {"mlp_consensus_faster_than_filter", fl && cl && *cl < *fl},
            {"mlp_fpr_at_target_tpr", sa.operating.fpr},
            {"mlp_consensus_fpr_at_target_tpr", co.operating.fpr},
            {"consensus_fpr_not_above_standalone", co.operating.fpr <= sa.operating.fpr},
        };
        save_design(ex.filter().design(), st.file("filter_design.ini"), prov);
        if (!c.model_path) {
            std::ofstream out(st.file("mlp.ini"));
            nn::write_network(*ex.mlp_network(), out, prov);
        }
        st.write("compare_report.json", dump(j));
    } else {
        st.write("eval_" + names.front() + ".json", dump(j));
    }
    return {};
}

RunResult cmd_sweep(Experiment& ex, Staging& st, const std::string& prov) {
    const auto& c = ex.config();
    auto tc = c.training;
    tc.seed = stage_seeds(c.seed).sweep;
    const auto surface =
        train::grid_search(ex.training_recording(), c.sweep.window_lens, c.sweep.hidden_sizes, tc, c.threads);
    RunResult r;
    std::string out = prov + "window_len,hidden,seed,validation_bce,error\n";
    for (const auto& cell : surface.cells) {
        out += std::to_string(cell.window_len) + "," + std::to_string(cell.hidden) + "," + std::to_string(cell.seed) +
               "," + (cell.loss ? fmt(*cell.loss) : "") + ",";
        if (!cell.error.empty()) {
            std::string e = cell.error;
            for (auto& ch : e)
                if (ch == ',' || ch == '\n') ch = ' ';
            out += e;
            r.warnings.push_back("cell (" + std::to_string(cell.window_len) + ", " + std::to_string(cell.hidden) +
                                 ") failed: " + cell.error);
        }
        out += "\n";
    }
    st.write("loss_surface.csv", out);
    return r;
}

RunResult cmd_freqmap(Experiment& ex, Staging& st, const std::string& prov, const std::string& name) {
    const auto& c = ex.config();
    auto clf = ex.classifier(name);
    eval::FreqMapOptions o;
    o.tone_s = c.freqmap.tone_s;
    o.repeats = c.freqmap.repeats;
    o.noise_rms_uv = c.freqmap.noise_rms_uv;
    o.preroll_s = c.freqmap.preroll_s;
    o.fs_hz = c.synth.fs_hz;
    o.full_scale_uv = c.synth.full_scale_uv;
    o.seed = stage_seeds(c.seed).freqmap;
    o.threads = c.threads;
    const auto map = eval::frequency_response_map(*clf, c.freqmap.freqs_hz, c.freqmap.amps_uv, o);
    std::string out = prov;
    if (name == "filter") out += "# filter threshold = " + fmt(ex.filter().threshold()) + "\n";
    out += "freq_hz,amp_uv,mean_response\n";
    for (std::size_t f = 0; f < map.freqs_hz.size(); ++f)
        for (std::size_t a = 0; a < map.amps_uv.size(); ++a)
            out += fmt(map.freqs_hz[f]) + "," + fmt(map.amps_uv[a]) + "," + fmt(map.at(f, a)) + "\n";
    st.write("freqmap_" + name + ".csv", out);
    return {};
}

RunResult cmd_resources(Experiment& ex, Staging& st, const std::string& prov) {
    const auto& c = ex.config();
    const auto mlp = nn::make_mlp(c.mlp.input_len, c.mlp.hidden);
    const auto cnn = nn::make_cnn(c.mlp.input_len, c.cnn.n_kernels, c.cnn.kernel_len, c.cnn.stride, c.cnn.hidden);
    const std::vector<std::pair<std::string, eval::ResourceReport>> rows = {
        {"filter", eval::resource_report(dsp::make_design(c.filter))},
        {"mlp_q8", eval::resource_report(mlp)},
        {"mlp_q8_consensus", eval::resource_report(mlp, true)},
        {"cnn_q8", eval::resource_report(cnn)},
    };
    std::string out = prov + "classifier,macs_per_sample,macs_per_window,parameters,coefficient_bytes,state_bytes\n";
    for (const auto& [name, r] : rows)
        out += name + "," + fmt(r.macs_per_sample) + "," + std::to_string(r.macs_per_window) + "," +
               std::to_string(r.parameters) + "," + std::to_string(r.coefficient_bytes) + "," +
               std::to_string(r.state_bytes) + "\n";
    st.write("resources.csv", out);
    return {};
}

}  // namespace

RunResult run_command(const ExperimentConfig& config, const std::string& command, const fs::path& out_dir,
                      const std::string& classifier) {
    bool known = false;
    for (const auto& n : command_names()) known = known || n == command;
    if (!known) throw Error(ErrorCode::InvalidArgument, "unknown command '" + command + "'");

    if (!classifier.empty()) {
        const auto& names = classifier_names();
        if (std::find(names.begin(), names.end(), classifier) == names.end())
            throw Error(ErrorCode::Config, "unknown classifier '" + classifier + "'");
    }
    Experiment ex(config);
    Staging st(out_dir, command);
    const auto prov = provenance(config, command);

    RunResult r;
    if (command == "gen") r = cmd_gen(ex, st, prov);
    else if (command == "train") r = cmd_train(ex, st, prov, classifier.empty() ? "mlp" : classifier);
    else if (command == "eval") r = cmd_eval(ex, st, prov, {classifier.empty() ? "mlp" : classifier}, "eval");
    else if (command == "compare") r = cmd_eval(ex, st, prov, {"filter", "mlp", "mlp_consensus"}, "compare");
    else if (command == "sweep") r = cmd_sweep(ex, st, prov);
    else if (command == "freqmap") r = cmd_freqmap(ex, st, prov, classifier.empty() ? "filter" : classifier);
    else r = cmd_resources(ex, st, prov);
    r.artifacts = st.commit();
    return r;
}

}  // namespace nd::app
