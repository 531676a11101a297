#include "huffdrift/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace huffdrift {

FixedTreeModel::FixedTreeModel(int capacity, UpdateParams params)
    : capacity_(capacity), params_(params) {
    if (capacity_ < 2) throw std::invalid_argument("FixedTreeModel: capacity must be >= 2");
    params_.validate();
}

FrameOutcome FixedTreeModel::step(const FeatureVec& f) {
    FrameOutcome outcome;
    outcome.t = ++frame_counter_;

    MatchResult match = tree_.search_best_match(f, params_);
    bool rebuilt = false;
    if (match.match_flag) {
        tree_.update_on_hit(*match.best_id, f, match.similarity, params_);
        outcome.matched_id = *match.best_id;
    } else if (tree_.data_count() < capacity_) {
        outcome.matched_id = tree_.insert_on_miss(f, params_);
        outcome.was_miss = true;
    } else {
        // At capacity: overwrite the weakest mode. The lightest data node is
        // the one with the largest id (weights are non-increasing in id).
        NodeId weakest = 0;
        double w_min = std::numeric_limits<double>::infinity();
        for (NodeId id : tree_.data_ids()) {
            if (tree_.node(id).weight <= w_min) {
                w_min = tree_.node(id).weight;
                weakest = id;
            }
        }
        double old_weight = tree_.node(weakest).weight;
        tree_.replace_data_node(weakest, f, params_.w_o);
        ++replace_count_;
        outcome.matched_id = weakest;
        outcome.was_miss = true;
        if (params_.w_o < old_weight) {
            // A weight drop can leave heavier nodes ranked below the
            // replaced one's ancestors, which the upward cascade cannot
            // repair; a static redraw restores the sibling property.
            tree_.rebuild_static();
            // The fresh mode keeps the maximal data id after the rebuild.
            outcome.matched_id = 2 * tree_.data_count();
            rebuilt = true;
        }
    }

    codebook_ = tree_.codebook();
    outcome.score = frame_score(codebook_, outcome.matched_id);

    if (!rebuilt) tree_.reorganize(outcome.matched_id);
    tree_.normalize_weights();
    codebook_ = tree_.codebook();
    outcome.node_count = tree_.node_count();
    return outcome;
}

void AgmmParams::validate() const {
    if (k < 2) throw std::invalid_argument("AgmmParams: k must be >= 2");
    if (!(alpha_w > 0.0 && alpha_w < 1.0))
        throw std::invalid_argument("AgmmParams: alpha_w must be in (0, 1)");
    if (!(alpha_g > 0.0 && alpha_g < 1.0))
        throw std::invalid_argument("AgmmParams: alpha_g must be in (0, 1)");
    if (!(w_init > 0.0)) throw std::invalid_argument("AgmmParams: w_init must be positive");
    if (!(theta_mahal > 0.0))
        throw std::invalid_argument("AgmmParams: theta_mahal must be positive");
    if (!(var_init >= var_floor && var_floor > 0.0))
        throw std::invalid_argument("AgmmParams: need var_init >= var_floor > 0");
}

AgmmModel::AgmmModel(int dimension, AgmmParams params) : dimension_(dimension), params_(params) {
    if (dimension_ < 1) throw std::invalid_argument("AgmmModel: dimension must be >= 1");
    params_.validate();
}

int AgmmModel::rank_of(int component) const {
    // Rank among descending weights; ties broken by component index so the
    // ordering is stable and reproducible.
    int rank = 0;
    for (int i = 0; i < component_count(); ++i) {
        if (i == component) continue;
        if (weights_[static_cast<std::size_t>(i)] > weights_[static_cast<std::size_t>(component)] ||
            (weights_[static_cast<std::size_t>(i)] == weights_[static_cast<std::size_t>(component)] &&
             i < component))
            ++rank;
    }
    return rank;
}

AgmmOutcome AgmmModel::step(const FeatureVec& f) {
    if (static_cast<int>(f.size()) != dimension_)
        throw std::invalid_argument("AgmmModel::step: dimension mismatch");

    AgmmOutcome outcome;

    // Nearest component within the Mahalanobis gate.
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < component_count(); ++i) {
        double d2 = 0.0;
        for (int d = 0; d < dimension_; ++d) {
            auto du = static_cast<std::size_t>(d);
            double diff = f[du] - means_[static_cast<std::size_t>(i)][du];
            d2 += diff * diff / variances_[static_cast<std::size_t>(i)][du];
        }
        double dist = std::sqrt(d2);
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }

    if (best >= 0 && best_dist <= params_.theta_mahal) {
        // Matched: bump its weight, decay the rest, pull mean and variance
        // toward the sample.
        for (int i = 0; i < component_count(); ++i)
            weights_[static_cast<std::size_t>(i)] *= 1.0 - params_.alpha_w;
        weights_[static_cast<std::size_t>(best)] += params_.alpha_w;
        auto bu = static_cast<std::size_t>(best);
        for (int d = 0; d < dimension_; ++d) {
            auto du = static_cast<std::size_t>(d);
            means_[bu][du] += params_.alpha_g * (f[du] - means_[bu][du]);
            double diff = f[du] - means_[bu][du];
            variances_[bu][du] =
                (1.0 - params_.alpha_g) * variances_[bu][du] + params_.alpha_g * diff * diff;
            variances_[bu][du] = std::max(variances_[bu][du], params_.var_floor);
        }
        outcome.component = best;
    } else if (component_count() < params_.k) {
        // Seeding phase: the first K distinct frames become components.
        weights_.push_back(1.0 / params_.k);
        means_.push_back(f);
        variances_.emplace_back(static_cast<std::size_t>(dimension_), params_.var_init);
        outcome.component = component_count() - 1;
    } else {
        // Replace the lightest component (largest index on ties).
        int weakest = 0;
        for (int i = 1; i < component_count(); ++i)
            if (weights_[static_cast<std::size_t>(i)] <= weights_[static_cast<std::size_t>(weakest)])
                weakest = i;
        auto wu = static_cast<std::size_t>(weakest);
        weights_[wu] = params_.w_init;
        means_[wu] = f;
        variances_[wu].assign(static_cast<std::size_t>(dimension_), params_.var_init);
        ++replace_count_;
        outcome.replaced = true;
        outcome.component = weakest;
    }

    double total = 0.0;
    for (double w : weights_) total += w;
    for (double& w : weights_) w /= total;

    outcome.score = (params_.k > 1)
                        ? static_cast<double>(rank_of(outcome.component)) / (params_.k - 1)
                        : 0.0;
    return outcome;
}

}  // namespace huffdrift
