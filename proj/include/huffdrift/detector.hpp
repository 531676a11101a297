#pragma once

#include <vector>

#include "huffdrift/features.hpp"
#include "huffdrift/tree.hpp"
#include "huffdrift/types.hpp"

namespace huffdrift {

// Diagnostics for one processed frame. The score is depth(matched)/depth(NYT)
// at the moment of scoring, i.e. right after the hit/miss structural change
// and before merging or normalization.
struct FrameOutcome {
    int t = 0; // 1-based frame counter
    NodeId matched_id = 0;
    double score = 0.0;
    bool was_miss = false;
    int merged_count = 0;
    int node_count = 0; // total nodes (2n+1) at the end of the step
};

// Event score: arithmetic mean of the member frames' scores. Throws
// std::invalid_argument on empty input.
double score_event(const std::vector<FrameOutcome>& outcomes);
double score_event(const std::vector<double>& frame_scores);

// Full per-frame pipeline: dynamic normalization, best-match search, hit or
// miss update, depth-ratio scoring, merge-or-reorganize, weight
// normalization, codebook refresh.
class DetectorModel {
public:
    DetectorModel(int dimension, UpdateParams params, bool merging_enabled = true);

    FrameOutcome process_frame(const FeatureVec& raw);

    const HuffTree& tree() const { return tree_; }
    const Codebook& codebook() const { return codebook_; }
    const UpdateParams& params() const { return params_; }
    int frame_counter() const { return frame_counter_; }
    bool merging_enabled() const { return merging_enabled_; }

private:
    HuffTree tree_;
    Codebook codebook_;
    OnlineNormalizer normalizer_;
    UpdateParams params_;
    bool merging_enabled_ = true;
    int frame_counter_ = 0;
};

}  // namespace huffdrift
