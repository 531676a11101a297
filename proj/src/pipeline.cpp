#include "huffdrift/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "huffdrift/features.hpp"
#include "huffdrift/io.hpp"

namespace huffdrift {

RunMode parse_mode(const std::string& name) {
    if (name == "proposed") return RunMode::proposed;
    if (name == "fixed_tree") return RunMode::fixed_tree;
    if (name == "agmm") return RunMode::agmm;
    throw std::invalid_argument("unknown mode '" + name +
                                "' (expected proposed, fixed_tree or agmm)");
}

UpdateParams RunConfig::update_params() const {
    UpdateParams p;
    p.theta_cos = theta_cos;
    p.theta_merge = theta_merge;
    p.alpha = alpha;
    p.w_o = w_o;
    p.gamma_min = gamma_min;
    p.gamma_max = gamma_max;
    return p;
}

AgmmParams RunConfig::agmm_params() const {
    AgmmParams p;
    p.k = agmm_k;
    p.alpha_w = agmm_alpha_w;
    p.alpha_g = agmm_alpha_g;
    p.w_init = agmm_w_init;
    p.theta_mahal = agmm_theta;
    return p;
}

int RunConfig::event_frames() const {
    return static_cast<int>(std::lround(event_seconds / frame_seconds));
}

int RunConfig::step_frames() const {
    int step = static_cast<int>(std::lround(event_frames() * (1.0 - event_overlap)));
    return std::max(step, 1);
}

void RunConfig::validate() const {
    parse_mode(mode);
    update_params().validate();
    if (mode == "agmm") agmm_params().validate();
    if (mode == "fixed_tree" && fixed_n < 2)
        throw std::invalid_argument("fixed_n must be >= 2");
    if (!(frame_seconds > 0.0)) throw std::invalid_argument("frame_seconds must be positive");
    if (event_frames() < 1) throw std::invalid_argument("event_seconds too short for the frame");
    if (event_overlap < 0.0 || event_overlap >= 1.0)
        throw std::invalid_argument("event_overlap must be in [0, 1)");
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (limit_fraction <= 0.0 || limit_fraction > 1.0)
        throw std::invalid_argument("limit_fraction must be in (0, 1]");
}

std::vector<std::string> apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::vector<std::string> seen;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // Trim.
        auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
        while (!line.empty() && is_space(line.front())) line.erase(line.begin());
        while (!line.empty() && is_space(line.back())) line.pop_back();
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(row) +
                                     ": expected key=value");
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        while (!key.empty() && is_space(key.back())) key.pop_back();
        while (!value.empty() && is_space(value.front())) value.erase(value.begin());

        auto as_double = [&](const std::string& v) {
            try {
                return std::stod(v);
            } catch (const std::exception&) {
                throw std::runtime_error("config line " + std::to_string(row) +
                                         ": bad number '" + v + "'");
            }
        };
        auto as_bool = [&](const std::string& v) {
            if (v == "true" || v == "1" || v == "on") return true;
            if (v == "false" || v == "0" || v == "off") return false;
            throw std::runtime_error("config line " + std::to_string(row) + ": bad bool '" + v +
                                     "'");
        };

        if (key == "mode") config.mode = value;
        else if (key == "input") config.input = value;
        else if (key == "out_frames") config.out_frames = value;
        else if (key == "out_events") config.out_events = value;
        else if (key == "nodes_csv") config.nodes_csv = value;
        else if (key == "theta_cos") config.theta_cos = as_double(value);
        else if (key == "theta_merge") config.theta_merge = as_double(value);
        else if (key == "alpha") config.alpha = as_double(value);
        else if (key == "w_o") config.w_o = as_double(value);
        else if (key == "gamma_min") config.gamma_min = as_double(value);
        else if (key == "gamma_max") config.gamma_max = as_double(value);
        else if (key == "merge") config.merge = as_bool(value);
        else if (key == "frame_seconds") config.frame_seconds = as_double(value);
        else if (key == "event_seconds") config.event_seconds = as_double(value);
        else if (key == "event_overlap") config.event_overlap = as_double(value);
        else if (key == "dimension") config.dimension = static_cast<int>(as_double(value));
        else if (key == "fixed_n") config.fixed_n = static_cast<int>(as_double(value));
        else if (key == "agmm_k") config.agmm_k = static_cast<int>(as_double(value));
        else if (key == "agmm_alpha_w") config.agmm_alpha_w = as_double(value);
        else if (key == "agmm_alpha_g") config.agmm_alpha_g = as_double(value);
        else if (key == "agmm_w_init") config.agmm_w_init = as_double(value);
        else if (key == "agmm_theta") config.agmm_theta = as_double(value);
        else if (key == "limit_fraction") config.limit_fraction = as_double(value);
        else if (key == "seed") config.seed = static_cast<std::uint64_t>(std::stoull(value));
        else
            throw std::runtime_error("config line " + std::to_string(row) + ": unknown key '" +
                                     key + "'");
        seen.push_back(key);
    }
    return seen;
}

DetectResult run_detection(const RunConfig& config, const std::vector<FeatureVec>& features) {
    config.validate();
    RunMode mode = parse_mode(config.mode);

    std::size_t limit = features.size();
    if (config.limit_fraction < 1.0)
        limit = static_cast<std::size_t>(std::floor(config.limit_fraction *
                                                    static_cast<double>(features.size())));

    DetectResult result;
    result.frames.reserve(limit);

    if (mode == RunMode::proposed) {
        DetectorModel model(config.dimension, config.update_params(), config.merge);
        for (std::size_t i = 0; i < limit; ++i)
            result.frames.push_back(model.process_frame(features[i]));
    } else if (mode == RunMode::fixed_tree) {
        OnlineNormalizer norm(config.dimension);
        FixedTreeModel model(config.fixed_n, config.update_params());
        for (std::size_t i = 0; i < limit; ++i) {
            result.frames.push_back(model.step(norm.normalize(features[i])));
            result.replaced_after_frame.push_back(model.replace_count());
        }
        result.final_replace_count = model.replace_count();
    } else {
        OnlineNormalizer norm(config.dimension);
        AgmmModel model(config.dimension, config.agmm_params());
        int t = 0;
        for (std::size_t i = 0; i < limit; ++i) {
            AgmmOutcome a = model.step(norm.normalize(features[i]));
            FrameOutcome o;
            o.t = ++t;
            o.matched_id = a.component;
            o.score = a.score;
            o.was_miss = a.replaced;
            o.node_count = model.component_count();
            result.frames.push_back(o);
            result.replaced_after_frame.push_back(model.replace_count());
        }
        result.final_replace_count = model.replace_count();
    }

    for (const EventWindow& w :
         window_events(static_cast<int>(result.frames.size()), config.event_frames(),
                       config.step_frames())) {
        double sum = 0.0;
        for (int i = 0; i < w.frames; ++i)
            sum += result.frames[static_cast<std::size_t>(w.first_frame + i)].score;
        result.event_start_s.push_back(w.first_frame * config.frame_seconds);
        result.event_omega.push_back(sum / w.frames);
    }
    return result;
}

namespace {

std::vector<FeatureVec> load_input_features(const RunConfig& config) {
    const std::string& path = config.input;
    auto ends_with = [&path](const char* suffix) {
        std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".wav") || ends_with(".WAV")) {
        AudioData audio = read_wav_mono16(path);
        FeatureExtractor extractor;
        std::vector<FeatureVec> features;
        for (const AudioFrame& frame : split_frames(audio, config.frame_seconds))
            features.push_back(extractor.extract(frame));
        return features;
    }
    return read_features_csv(path);
}

}  // namespace

void write_frame_jsonl(const std::string& path, const RunConfig& config, const DetectResult& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write frame records: " + path);
    bool baseline = !r.replaced_after_frame.empty();
    for (std::size_t i = 0; i < r.frames.size(); ++i) {
        const FrameOutcome& f = r.frames[i];
        nlohmann::ordered_json j;
        j["t"] = f.t;
        j["time_s"] = (f.t - 1) * config.frame_seconds;
        j["score"] = f.score;
        j["matched_id"] = f.matched_id;
        j["miss"] = f.was_miss;
        j["nodes"] = f.node_count;
        j["merged"] = f.merged_count;
        if (baseline) j["replaced"] = r.replaced_after_frame[i];
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_event_jsonl(const std::string& path, const DetectResult& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write event records: " + path);
    for (std::size_t i = 0; i < r.event_omega.size(); ++i) {
        nlohmann::ordered_json j;
        j["event_start_s"] = r.event_start_s[i];
        j["omega"] = r.event_omega[i];
        out << j.dump() << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void write_nodes_csv(const std::string& path, const DetectResult& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write node counts: " + path);
    out << "t,node_count\n";
    for (const FrameOutcome& f : r.frames) out << f.t << "," << f.node_count << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

DetectResult run_detect_files(const RunConfig& config) {
    DetectResult result = run_detection(config, load_input_features(config));
    write_frame_jsonl(config.out_frames, config, result);
    write_event_jsonl(config.out_events, result);
    write_nodes_csv(config.nodes_csv, result);
    return result;
}

std::vector<std::pair<double, double>> read_event_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open event scores: " + path);
    std::vector<std::pair<double, double>> out;
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const std::exception& e) {
            throw std::runtime_error("event scores line " + std::to_string(row) + ": " +
                                     e.what());
        }
        out.emplace_back(j.at("event_start_s").get<double>(), j.at("omega").get<double>());
    }
    return out;
}

double run_eval_files(const std::string& scores_path, const std::string& labels_path,
                      const std::string& out_path, double event_seconds) {
    auto events = read_event_scores(scores_path);
    auto intervals = read_labels_csv(labels_path);

    std::vector<LabeledScore> labeled;
    labeled.reserve(events.size());
    for (const auto& [start, omega] : events)
        labeled.push_back({omega, event_is_anomalous(start, event_seconds, intervals)});

    RocCurve curve = roc_curve(labeled);
    double area = auc(curve);

    nlohmann::ordered_json j;
    j["auc"] = area;
    nlohmann::json points = nlohmann::json::array();
    for (const RocPoint& p : curve.points) points.push_back({p.fpr, p.tpr});
    j["points"] = points;

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write AUC report: " + out_path);
    out << j.dump() << "\n";
    if (!out) throw std::runtime_error("write failed: " + out_path);
    return area;
}

}  // namespace huffdrift
