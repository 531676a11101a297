#pragma once

#include <vector>

#include "huffdrift/detector.hpp"
#include "huffdrift/tree.hpp"
#include "huffdrift/types.hpp"

namespace huffdrift {

// Fixed-capacity Huffman tree baseline: same hit logic as the adaptive
// model, but a miss at capacity replaces the weakest data node in place
// instead of growing the tree, and nodes are never merged.
//
// Steps take an already normalized feature vector.
class FixedTreeModel {
public:
    FixedTreeModel(int capacity, UpdateParams params);

    FrameOutcome step(const FeatureVec& f);

    long replace_count() const { return replace_count_; }
    const HuffTree& tree() const { return tree_; }
    int capacity() const { return capacity_; }

private:
    int capacity_;
    UpdateParams params_;
    HuffTree tree_;
    Codebook codebook_;
    long replace_count_ = 0;
    int frame_counter_ = 0;
};

struct AgmmParams {
    int k = 5;                  // component count, >= 2
    double alpha_w = 0.01;      // weight update rate
    double alpha_g = 0.01;      // mean/variance update rate
    double w_init = 0.05;       // weight given to a replacement component
    double theta_mahal = 4.5;   // match threshold on diagonal Mahalanobis distance
    double var_init = 1.0;      // variance of a fresh component
    double var_floor = 1e-4;

    void validate() const;
};

struct AgmmOutcome {
    double score = 0.0; // rank-based: heaviest component 0, lightest 1
    bool replaced = false;
    int component = -1;
};

// Multivariate adaptive GMM baseline with diagonal covariance. A frame
// matches the nearest component within theta_mahal; a miss replaces the
// lightest component once K components exist (the first K distinct frames
// seed the mixture). The anomaly score is the responsible component's rank
// when components are sorted by descending weight, mapped to [0, 1].
class AgmmModel {
public:
    explicit AgmmModel(int dimension, AgmmParams params);

    AgmmOutcome step(const FeatureVec& f);

    long replace_count() const { return replace_count_; }
    int component_count() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const { return weights_; }

private:
    int rank_of(int component) const;

    int dimension_;
    AgmmParams params_;
    std::vector<double> weights_;
    std::vector<FeatureVec> means_;
    std::vector<FeatureVec> variances_;
    long replace_count_ = 0;
};

}  // namespace huffdrift
