#pragma once

#include <string>
#include <vector>

#include "huffdrift/baselines.hpp"
#include "huffdrift/detector.hpp"
#include "huffdrift/synth.hpp"
#include "huffdrift/tree.hpp"

namespace huffdrift {

enum class RunMode { proposed, fixed_tree, agmm };

RunMode parse_mode(const std::string& name); // throws on unknown mode

// Everything a detection run needs. Field names double as config-file keys
// and command-line flag names.
struct RunConfig {
    std::string mode = "proposed";
    std::string input;
    std::string out_frames = "frames.jsonl";
    std::string out_events = "events.jsonl";
    std::string nodes_csv = "nodes.csv";

    double theta_cos = 0.93;
    double theta_merge = 0.97;
    double alpha = 1e-4;
    double w_o = 1e-3;
    double gamma_min = 0.0;
    double gamma_max = 0.5;
    bool merge = true;

    double frame_seconds = 0.5;
    double event_seconds = 4.0;
    double event_overlap = 0.5; // fraction of an event shared with the next

    int dimension = 15;
    int fixed_n = 9;

    int agmm_k = 5;
    double agmm_alpha_w = 0.01;
    double agmm_alpha_g = 0.01;
    double agmm_w_init = 0.05;
    double agmm_theta = 4.5;

    double limit_fraction = 1.0; // process only the first fraction of frames
    std::uint64_t seed = 42;

    UpdateParams update_params() const;
    AgmmParams agmm_params() const;
    int event_frames() const;
    int step_frames() const;
    void validate() const;
};

// Flat key=value config file; '#' starts a comment line. Unknown keys are
// errors. Returns the keys that were set.
std::vector<std::string> apply_config_file(RunConfig& config, const std::string& path);

// In-memory result of a detection run.
struct DetectResult {
    std::vector<FrameOutcome> frames;
    std::vector<double> event_start_s;
    std::vector<double> event_omega;
    std::vector<long> replaced_after_frame; // per frame, cumulative; baselines only
    long final_replace_count = 0;
};

DetectResult run_detection(const RunConfig& config, const std::vector<FeatureVec>& features);

// Streams the input (WAV or feature CSV, decided by extension), runs the
// configured model and writes the frame/event JSONL records plus the
// node-count series. Returns the in-memory result as well.
DetectResult run_detect_files(const RunConfig& config);

// Loads per-event scores and interval labels, applies the overlap labeling
// rule, and writes {"auc": ..., "points": [[fpr,tpr]...]} JSON.
double run_eval_files(const std::string& scores_path, const std::string& labels_path,
                      const std::string& out_path, double event_seconds);

// Reads entire event JSONL into (start, omega) pairs.
std::vector<std::pair<double, double>> read_event_scores(const std::string& path);

// Emits the frame/event records for a finished run.
void write_frame_jsonl(const std::string& path, const RunConfig& config, const DetectResult& r);
void write_event_jsonl(const std::string& path, const DetectResult& r);
void write_nodes_csv(const std::string& path, const DetectResult& r);

}  // namespace huffdrift
