#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "huffdrift/eval.hpp"
#include "huffdrift/types.hpp"

namespace huffdrift {

// Optional recurring-event schedule: one cluster injected twice, to probe
// whether a model remembers a mode across a long gap.
struct RecurringEvent {
    long first_start = -1; // frame index, -1 disables
    int frames = 0;
    long second_start = -1;
    int second_frames = 0;
};

// Recipe for a drifting multi-cluster feature stream with planted anomalies.
// Identical seeds produce identical streams.
struct SyntheticSpec {
    int dimension = 15;
    int clusters = 5;
    double cluster_radius = 3.0;  // distance of cluster means from the origin
    double cluster_spread = 0.1;  // per-dimension noise sigma around a mean
    double cluster_separation = 0.55; // max |cosine| between cluster directions
    double dominant_fraction = 0.0;   // background share of cluster 0 (0 = uniform)
    double drift_rate = 0.0;      // mean displacement per frame
    bool drift_converge = false;  // drift clusters toward cluster 0 instead of random directions
    double anomaly_fraction = 0.02;
    int anomaly_burst_frames = 8; // consecutive outlier frames per planted burst
    double outlier_distance_sigmas = 6.0; // min distance of outliers from every mean
    RecurringEvent recurring;
    long total_frames = 10000;
    std::uint64_t seed = 42;
    double frame_seconds = 0.5;

    void validate() const; // throws std::invalid_argument
};

// Per-frame origin tags, for tests and diagnostics.
enum class FrameOrigin : int { outlier = -1, recurring = -2 };

struct SyntheticStream {
    std::vector<FeatureVec> features;
    std::vector<int> origin; // cluster index, or a FrameOrigin value
    std::vector<LabelInterval> anomalies;
    std::vector<FeatureVec> cluster_means; // initial (undrifted) means
};

SyntheticStream gen_synthetic(const SyntheticSpec& spec);

// Deterministic scalar draws on top of the engine, so streams do not depend
// on standard-library distribution internals.
double uniform_unit(std::mt19937_64& rng);           // [0, 1)
double normal_unit(std::mt19937_64& rng);            // Box-Muller, fresh pair each call
FeatureVec random_unit_vector(std::mt19937_64& rng, int dim);

}  // namespace huffdrift
