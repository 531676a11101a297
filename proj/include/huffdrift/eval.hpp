#pragma once

#include <string>
#include <vector>

#include "huffdrift/types.hpp"

namespace huffdrift {

struct LabeledScore {
    double omega = 0.0;
    bool positive = false; // true = anomaly
};

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// Starts at (0,0), ends at (1,1); both coordinates non-decreasing.
struct RocCurve {
    std::vector<RocPoint> points;
};

// Single-pass ROC point generation over descending scores. A point is
// emitted only after an entire group of tied scores has been consumed, which
// turns ties into diagonal segments. Throws std::invalid_argument when one
// class is missing, naming it.
RocCurve roc_curve(std::vector<LabeledScore> scores);

// Trapezoidal area under the curve, in [0, 1].
double auc(const RocCurve& curve);

// Ground-truth anomaly interval [start_s, end_s).
struct LabelInterval {
    double start_s = 0.0;
    double end_s = 0.0;
};

// An event is positive when at least half of its duration overlaps labeled
// anomaly time.
bool event_is_anomalous(double event_start_s, double event_seconds,
                        const std::vector<LabelInterval>& intervals);

}  // namespace huffdrift
