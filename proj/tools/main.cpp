// Command-line front end: detection runs, baseline runs, ROC/AUC evaluation,
// synthetic drift-stream generation and tree snapshots.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "huffdrift/io.hpp"
#include "huffdrift/pipeline.hpp"
#include "huffdrift/synth.hpp"

namespace huffdrift {
std::string run_dump_tree(const RunConfig& config);
}

using namespace huffdrift;

namespace {

// The config file must be applied before CLI11 parses, so explicit flags win
// over file values. The HUFFDRIFT_CONFIG environment variable supplies the
// path when --config is absent; it overrides nothing else.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    const char* env = std::getenv("HUFFDRIFT_CONFIG");
    return env != nullptr ? env : "";
}

void add_model_options(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--mode", config.mode, "proposed, fixed_tree or agmm");
    cmd->add_option("--theta_cos", config.theta_cos, "hit threshold on cosine similarity");
    cmd->add_option("--theta_merge", config.theta_merge, "merge threshold on cosine similarity");
    cmd->add_option("--alpha", config.alpha, "weight learning rate");
    cmd->add_option("--w_o", config.w_o, "initial weight of a new data node");
    cmd->add_option("--gamma_min", config.gamma_min, "mean update factor at the hit threshold");
    cmd->add_option("--gamma_max", config.gamma_max, "mean update factor at similarity 1");
    cmd->add_flag("--merge,!--no-merge", config.merge, "enable node merging (proposed mode)");
    cmd->add_option("--frame_seconds", config.frame_seconds, "frame duration");
    cmd->add_option("--event_seconds", config.event_seconds, "event duration");
    cmd->add_option("--event_overlap", config.event_overlap, "fraction of overlap between events");
    cmd->add_option("--dimension", config.dimension, "feature vector dimension");
    cmd->add_option("--fixed_n", config.fixed_n, "fixed-tree capacity N");
    cmd->add_option("--agmm_k", config.agmm_k, "AGMM component count K");
    cmd->add_option("--agmm_alpha_w", config.agmm_alpha_w, "AGMM weight update rate");
    cmd->add_option("--agmm_alpha_g", config.agmm_alpha_g, "AGMM distribution update rate");
    cmd->add_option("--agmm_w_init", config.agmm_w_init, "AGMM replacement weight");
    cmd->add_option("--agmm_theta", config.agmm_theta, "AGMM Mahalanobis match threshold");
    cmd->add_option("--limit_fraction", config.limit_fraction,
                    "process only the first fraction of frames");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming audio anomaly detection over an adaptive Huffman tree"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_path_display;
    app.add_option("--config", config_path_display,
                   "flat key=value config file (env: HUFFDRIFT_CONFIG)");

    try {
        std::string config_path = find_config_path(argc, argv);
        if (!config_path.empty()) apply_config_file(config, config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    // detect
    auto* detect = app.add_subcommand("detect", "run a model over a WAV or feature CSV");
    detect->add_option("--input", config.input, "input .wav or feature .csv");
    detect->add_option("--out_frames", config.out_frames, "per-frame JSONL output");
    detect->add_option("--out_events", config.out_events, "per-event JSONL output");
    detect->add_option("--nodes_csv", config.nodes_csv, "node-count time series CSV");
    add_model_options(detect, config);

    // eval
    std::string scores_path, labels_path, auc_out = "auc.json";
    double eval_event_seconds = 4.0;
    auto* eval = app.add_subcommand("eval", "ROC/AUC from event scores and interval labels");
    eval->add_option("--scores", scores_path, "event JSONL from a detect run")->required();
    eval->add_option("--labels", labels_path, "CSV start_s,end_s,label")->required();
    eval->add_option("--out", auc_out, "output JSON path");
    eval->add_option("--event_seconds", eval_event_seconds, "event duration for labeling");

    // synth
    SyntheticSpec spec;
    std::string features_out = "features.csv", labels_out = "labels.csv";
    long recur_start = -1, recur_again = -1;
    int recur_frames = 0, recur_again_frames = 0;
    auto* synth = app.add_subcommand("synth", "generate a drifting feature stream with labels");
    synth->add_option("--out_features", features_out, "feature CSV output");
    synth->add_option("--out_labels", labels_out, "labels CSV output");
    synth->add_option("--frames", spec.total_frames, "total frame count");
    synth->add_option("--clusters", spec.clusters, "number of background clusters");
    synth->add_option("--dimension", spec.dimension, "feature dimension");
    synth->add_option("--radius", spec.cluster_radius, "cluster mean distance from origin");
    synth->add_option("--spread", spec.cluster_spread, "per-dimension cluster sigma");
    synth->add_option("--cluster_separation", spec.cluster_separation,
                      "max cosine between cluster directions");
    synth->add_option("--dominant_fraction", spec.dominant_fraction,
                      "background share of the first cluster");
    synth->add_option("--drift_rate", spec.drift_rate, "mean displacement per frame");
    synth->add_flag("--drift_converge", spec.drift_converge,
                    "drift clusters toward the first cluster");
    synth->add_option("--anomaly_fraction", spec.anomaly_fraction, "fraction of outlier frames");
    synth->add_option("--burst_frames", spec.anomaly_burst_frames, "frames per outlier burst");
    synth->add_option("--outlier_sigmas", spec.outlier_distance_sigmas,
                      "minimum outlier distance in sigmas");
    synth->add_option("--frame_seconds", spec.frame_seconds, "frame duration for labels");
    synth->add_option("--seed", spec.seed, "RNG seed");
    synth->add_option("--recur_start", recur_start, "recurring event: first frame index");
    synth->add_option("--recur_frames", recur_frames, "recurring event: first length");
    synth->add_option("--recur_again", recur_again, "recurring event: second frame index");
    synth->add_option("--recur_again_frames", recur_again_frames,
                      "recurring event: second length");

    // dump-tree
    std::string dump_out;
    auto* dump = app.add_subcommand("dump-tree", "run a tree model and print the final snapshot");
    dump->add_option("--input", config.input, "input .wav or feature .csv");
    dump->add_option("--out", dump_out, "write snapshot here instead of stdout");
    add_model_options(dump, config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (detect->parsed()) {
            if (config.input.empty()) throw std::invalid_argument("detect: --input is required");
            run_detect_files(config);
        } else if (eval->parsed()) {
            run_eval_files(scores_path, labels_path, auc_out, eval_event_seconds);
        } else if (synth->parsed()) {
            spec.recurring.first_start = recur_start;
            spec.recurring.frames = recur_frames;
            spec.recurring.second_start = recur_again;
            spec.recurring.second_frames = recur_again_frames;
            SyntheticStream stream = gen_synthetic(spec);
            write_features_csv(features_out, stream.features);
            write_labels_csv(labels_out, stream.anomalies);
        } else if (dump->parsed()) {
            if (config.input.empty())
                throw std::invalid_argument("dump-tree: --input is required");
            std::string snapshot = run_dump_tree(config);
            if (dump_out.empty()) {
                std::cout << snapshot;
            } else {
                std::ofstream out(dump_out);
                if (!out) throw std::runtime_error("cannot write snapshot: " + dump_out);
                out << snapshot;
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
