#include "huffdrift/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace huffdrift {

RocCurve roc_curve(std::vector<LabeledScore> scores) {
    long p = 0, n = 0;
    for (const LabeledScore& s : scores) (s.positive ? p : n) += 1;
    if (p == 0) throw std::invalid_argument("roc_curve: no positive (anomaly) examples");
    if (n == 0) throw std::invalid_argument("roc_curve: no negative (normal) examples");

    std::sort(scores.begin(), scores.end(),
              [](const LabeledScore& a, const LabeledScore& b) { return a.omega > b.omega; });

    RocCurve curve;
    curve.points.push_back({0.0, 0.0});
    long tp = 0, fp = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (scores[i].positive ? tp : fp) += 1;
        bool group_end = (i + 1 == scores.size()) || (scores[i + 1].omega != scores[i].omega);
        if (group_end) {
            curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n),
                                    static_cast<double>(tp) / static_cast<double>(p)});
        }
    }
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const RocPoint& a = curve.points[i - 1];
        const RocPoint& b = curve.points[i];
        area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
    }
    return area;
}

bool event_is_anomalous(double event_start_s, double event_seconds,
                        const std::vector<LabelInterval>& intervals) {
    // Overlap against the union of intervals, so overlapping labels do not
    // double-count.
    std::vector<LabelInterval> sorted = intervals;
    std::sort(sorted.begin(), sorted.end(),
              [](const LabelInterval& a, const LabelInterval& b) { return a.start_s < b.start_s; });
    double event_end = event_start_s + event_seconds;
    double overlap = 0.0;
    double cursor = event_start_s;
    for (const LabelInterval& iv : sorted) {
        double lo = std::max(cursor, iv.start_s);
        double hi = std::min(event_end, iv.end_s);
        if (hi > lo) {
            overlap += hi - lo;
            cursor = hi;
        }
    }
    return overlap >= 0.5 * event_seconds;
}

}  // namespace huffdrift
