#include "huffdrift/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "huffdrift/tree.hpp"

namespace huffdrift {

void SyntheticSpec::validate() const {
    if (dimension < 1) throw std::invalid_argument("synthetic spec: dimension must be >= 1");
    if (clusters < 1) throw std::invalid_argument("synthetic spec: need at least one cluster");
    if (total_frames < 1) throw std::invalid_argument("synthetic spec: need at least one frame");
    if (!(cluster_radius > 0.0)) throw std::invalid_argument("synthetic spec: bad cluster radius");
    if (!(cluster_spread >= 0.0)) throw std::invalid_argument("synthetic spec: bad spread");
    if (anomaly_fraction < 0.0 || anomaly_fraction > 0.5)
        throw std::invalid_argument("synthetic spec: anomaly_fraction must be in [0, 0.5]");
    if (anomaly_burst_frames < 1)
        throw std::invalid_argument("synthetic spec: anomaly_burst_frames must be >= 1");
    if (!(cluster_separation > 0.0 && cluster_separation <= 1.0))
        throw std::invalid_argument("synthetic spec: cluster_separation must be in (0, 1]");
    if (dominant_fraction < 0.0 || dominant_fraction >= 1.0)
        throw std::invalid_argument("synthetic spec: dominant_fraction must be in [0, 1)");
    if (!(frame_seconds > 0.0)) throw std::invalid_argument("synthetic spec: bad frame duration");
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal_unit(std::mt19937_64& rng) {
    double u1 = uniform_unit(rng);
    double u2 = uniform_unit(rng);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

FeatureVec random_unit_vector(std::mt19937_64& rng, int dim) {
    FeatureVec v(static_cast<std::size_t>(dim));
    double norm = 0.0;
    do {
        norm = 0.0;
        for (double& x : v) {
            x = normal_unit(rng);
            norm += x * x;
        }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
    return v;
}

namespace {

double euclidean(const FeatureVec& a, const FeatureVec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(d);
}

// Unit vector whose |cosine| against every existing direction stays under
// max_abs_cos. Gives up after a bounded number of rejections and returns the
// best candidate seen, so degenerate requests still terminate.
FeatureVec separated_direction(std::mt19937_64& rng, int dim,
                               const std::vector<FeatureVec>& existing, double max_abs_cos) {
    FeatureVec best;
    double best_worst = 2.0;
    for (int attempt = 0; attempt < 256; ++attempt) {
        FeatureVec cand = random_unit_vector(rng, dim);
        double worst = 0.0;
        for (const FeatureVec& e : existing)
            worst = std::max(worst, std::abs(cosine_similarity(cand, e)));
        if (worst < best_worst) {
            best_worst = worst;
            best = cand;
        }
        if (worst <= max_abs_cos) return cand;
    }
    return best;
}

}  // namespace

SyntheticStream gen_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);

    SyntheticStream out;
    out.features.reserve(static_cast<std::size_t>(spec.total_frames));
    out.origin.reserve(static_cast<std::size_t>(spec.total_frames));

    std::vector<FeatureVec> directions;
    for (int c = 0; c < spec.clusters; ++c)
        directions.push_back(
            separated_direction(rng, spec.dimension, directions, spec.cluster_separation));
    for (const FeatureVec& d : directions) {
        FeatureVec mean(d);
        for (double& x : mean) x *= spec.cluster_radius;
        out.cluster_means.push_back(std::move(mean));
    }
    std::vector<FeatureVec> drift_dirs;
    std::vector<double> drift_caps(static_cast<std::size_t>(spec.clusters),
                                   std::numeric_limits<double>::infinity());
    for (int c = 0; c < spec.clusters; ++c) {
        if (spec.drift_converge) {
            // Modes drift into cluster 0, the scenario node merging exists
            // for: two distributions approaching until they are one.
            FeatureVec d(static_cast<std::size_t>(spec.dimension), 0.0);
            double dist = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) {
                d[i] = out.cluster_means[0][i] - out.cluster_means[static_cast<std::size_t>(c)][i];
                dist += d[i] * d[i];
            }
            dist = std::sqrt(dist);
            if (dist > 1e-12)
                for (double& v : d) v /= dist;
            drift_dirs.push_back(std::move(d));
            drift_caps[static_cast<std::size_t>(c)] = 0.95 * dist; // stop short of overshooting
        } else {
            drift_dirs.push_back(random_unit_vector(rng, spec.dimension));
        }
    }

    FeatureVec recurring_mean;
    if (spec.recurring.first_start >= 0) {
        FeatureVec dir =
            separated_direction(rng, spec.dimension, directions, spec.cluster_separation);
        recurring_mean.resize(dir.size());
        for (std::size_t i = 0; i < dir.size(); ++i)
            recurring_mean[i] = dir[i] * spec.cluster_radius;
    }

    // Burst schedule: evenly spread over the stream past a warm-up zone,
    // skipping frames owned by the recurring schedule.
    auto in_recurring = [&spec](long t) {
        const RecurringEvent& r = spec.recurring;
        if (r.first_start >= 0 && t >= r.first_start && t < r.first_start + r.frames) return true;
        return r.second_start >= 0 && t >= r.second_start &&
               t < r.second_start + r.second_frames;
    };
    std::vector<bool> is_outlier(static_cast<std::size_t>(spec.total_frames), false);
    long burst_frames_wanted = std::lround(spec.anomaly_fraction * spec.total_frames);
    long bursts = burst_frames_wanted / spec.anomaly_burst_frames;
    long planted_bursts = 0;
    if (bursts > 0) {
        long first = std::max<long>(spec.total_frames / 10, 1);
        long span = spec.total_frames - first - spec.anomaly_burst_frames;
        for (long b = 0; b < bursts && span > 0; ++b) {
            long start = first + (span * b) / bursts;
            bool clear = true;
            for (long t = start; t < start + spec.anomaly_burst_frames; ++t)
                if (in_recurring(t)) clear = false;
            if (!clear) continue;
            for (long t = start; t < start + spec.anomaly_burst_frames; ++t)
                is_outlier[static_cast<std::size_t>(t)] = true;
            out.anomalies.push_back({start * spec.frame_seconds,
                                     (start + spec.anomaly_burst_frames) * spec.frame_seconds});
            ++planted_bursts;
        }
    }
    (void)planted_bursts;

    // Outliers sit far from every cluster mean; magnitude is chosen so the
    // distance floor holds by construction and then verified.
    double min_outlier_dist = spec.outlier_distance_sigmas * std::max(spec.cluster_spread, 1e-9);
    double outlier_radius = 2.0 * spec.cluster_radius + min_outlier_dist;

    FeatureVec burst_point;
    std::vector<FeatureVec> used_outlier_dirs;
    long next_cluster = 0; // first frames rotate clusters so scaling stats settle fast
    for (long t = 0; t < spec.total_frames; ++t) {
        FeatureVec mean;
        int origin;
        if (in_recurring(t)) {
            mean = recurring_mean;
            origin = static_cast<int>(FrameOrigin::recurring);
        } else if (is_outlier[static_cast<std::size_t>(t)]) {
            bool burst_start = t == 0 || !is_outlier[static_cast<std::size_t>(t - 1)];
            if (burst_start) {
                std::vector<FeatureVec> avoid = directions;
                avoid.insert(avoid.end(), used_outlier_dirs.begin(), used_outlier_dirs.end());
                FeatureVec dir = separated_direction(rng, spec.dimension, avoid, 0.45);
                used_outlier_dirs.push_back(dir);
                burst_point.assign(dir.size(), 0.0);
                for (std::size_t i = 0; i < dir.size(); ++i)
                    burst_point[i] = dir[i] * outlier_radius;
                for (const FeatureVec& m : out.cluster_means) {
                    if (euclidean(burst_point, m) < min_outlier_dist)
                        throw CorruptedStateError("synthetic outlier violates distance floor");
                }
            }
            mean = burst_point;
            origin = static_cast<int>(FrameOrigin::outlier);
        } else {
            long c;
            if (t < 4L * spec.clusters) {
                c = next_cluster++ % spec.clusters;
            } else if (spec.dominant_fraction > 0.0 && spec.clusters > 1 &&
                       uniform_unit(rng) < spec.dominant_fraction) {
                c = 0;
            } else {
                long rest = spec.dominant_fraction > 0.0 && spec.clusters > 1
                                ? spec.clusters - 1
                                : spec.clusters;
                c = static_cast<long>(uniform_unit(rng) * static_cast<double>(rest)) % rest;
                if (spec.dominant_fraction > 0.0 && spec.clusters > 1) c += 1;
            }
            mean = out.cluster_means[static_cast<std::size_t>(c)];
            if (spec.drift_rate != 0.0) {
                const FeatureVec& d = drift_dirs[static_cast<std::size_t>(c)];
                double travel = std::min(spec.drift_rate * static_cast<double>(t),
                                         drift_caps[static_cast<std::size_t>(c)]);
                for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += travel * d[i];
            }
            origin = static_cast<int>(c);
        }
        FeatureVec sample(mean.size());
        for (std::size_t i = 0; i < mean.size(); ++i)
            sample[i] = mean[i] + spec.cluster_spread * normal_unit(rng);
        out.features.push_back(std::move(sample));
        out.origin.push_back(origin);
    }
    return out;
}

}  // namespace huffdrift
