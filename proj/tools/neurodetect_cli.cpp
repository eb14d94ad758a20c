#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "neurodetect.h"

namespace {

int report_failure(const char* what) {
    std::fprintf(stderr, "neurodetect: %s: %s\n", what, nd_last_error());
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seizure-detection experiments: fixed-point filter chain vs tiny quantized networks"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", nd_version());

    std::string config = "full";
    std::uint64_t seed = 0;
    std::string out;
    std::string classifier;

    struct Spec {
        const char* name;
        const char* help;
        bool takes_classifier;
    };
    const Spec specs[] = {
        {"gen", "Generate a synthetic recording", false},
        {"train", "Train a network (--classifier mlp|cnn); writes float and int8 models and the loss history", true},
        {"eval", "Evaluate one classifier on a held-out recording", true},
        {"sweep", "Grid search over window length and hidden width; writes the loss surface", false},
        {"freqmap", "Frequency x amplitude response map for one classifier", true},
        {"resources", "Structural MAC, storage and state counts", false},
        {"compare", "Filter chain vs MLP (standalone and consensus) on a held-out recording", false},
    };
    for (const auto& s : specs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config, "Config file, or a built-in name: demo, full")->capture_default_str();
        sub->add_option("--seed", seed, "Override [experiment] seed");
        sub->add_option("--out", out, "Output directory (default: [experiment] output_dir, then $ND_OUTPUT_DIR, then ./nd_out)");
        if (s.takes_classifier)
            sub->add_option("--classifier", classifier,
                            "filter, mlp, mlp_consensus, mlp_q8, mlp_q8_consensus, cnn, cnn_consensus");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();
    const bool seed_given = app.get_subcommands().front()->count("--seed") > 0;

    nd_experiment* ex = nullptr;
    if (nd_experiment_load(config.c_str(), &ex) != ND_OK) return report_failure("config");
    int rc = 0;
    if (seed_given) nd_experiment_set_seed(ex, seed);
    if (!out.empty()) nd_experiment_set_output_dir(ex, out.c_str());
    if (!classifier.empty()) nd_experiment_set_classifier(ex, classifier.c_str());
    if (nd_experiment_run(ex, command.c_str()) != ND_OK) {
        rc = report_failure(command.c_str());
    } else {
        for (std::size_t i = 0; i < nd_experiment_warning_count(ex); ++i)
            std::fprintf(stderr, "warning: %s\n", nd_experiment_warning(ex, i));
        for (std::size_t i = 0; i < nd_experiment_artifact_count(ex); ++i)
            std::printf("%s\n", nd_experiment_artifact(ex, i));
    }
    nd_experiment_free(ex);
    return rc;
}
