#include "huffdrift/detector.hpp"

#include <stdexcept>

namespace huffdrift {

double score_event(const std::vector<double>& frame_scores) {
    if (frame_scores.empty()) throw std::invalid_argument("score_event: empty event window");
    double sum = 0.0;
    for (double s : frame_scores) sum += s;
    return sum / static_cast<double>(frame_scores.size());
}

double score_event(const std::vector<FrameOutcome>& outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("score_event: empty event window");
    double sum = 0.0;
    for (const FrameOutcome& o : outcomes) sum += o.score;
    return sum / static_cast<double>(outcomes.size());
}

DetectorModel::DetectorModel(int dimension, UpdateParams params, bool merging_enabled)
    : normalizer_(dimension), params_(params), merging_enabled_(merging_enabled) {
    params_.validate();
}

FrameOutcome DetectorModel::process_frame(const FeatureVec& raw) {
    FrameOutcome outcome;
    outcome.t = ++frame_counter_;

    FeatureVec f = normalizer_.normalize(raw);

    MatchResult match = tree_.search_best_match(f, params_);
    if (match.match_flag) {
        tree_.update_on_hit(*match.best_id, f, match.similarity, params_);
        outcome.matched_id = *match.best_id;
        outcome.was_miss = false;
    } else {
        outcome.matched_id = tree_.insert_on_miss(f, params_);
        outcome.was_miss = true;
    }

    // Score against the depths valid right after the structural change.
    codebook_ = tree_.codebook();
    outcome.score = frame_score(codebook_, outcome.matched_id);

    MergeReport merge;
    if (merging_enabled_) merge = tree_.merge_pass(params_);
    outcome.merged_count = merge.merged_count;
    if (!merge.rebuilt) tree_.reorganize(outcome.matched_id);

    tree_.normalize_weights();
    codebook_ = tree_.codebook();
    outcome.node_count = tree_.node_count();
    return outcome;
}

}  // namespace huffdrift
