#pragma once

#include <string>
#include <vector>

#include "huffdrift/eval.hpp"
#include "huffdrift/types.hpp"

namespace huffdrift {

// Feature CSV: header "t,f1..fD", one frame per row, t is the 1-based frame
// index. Lets pre-computed vectors bypass the audio front end.
void write_features_csv(const std::string& path, const std::vector<FeatureVec>& features);
std::vector<FeatureVec> read_features_csv(const std::string& path);

// Labels CSV: header "start_s,end_s,label" with label "anomaly"; any time
// not listed is normal.
void write_labels_csv(const std::string& path, const std::vector<LabelInterval>& intervals);
std::vector<LabelInterval> read_labels_csv(const std::string& path);

// Formats a double the way all text outputs do (shortest round-trip).
std::string format_double(double v);

}  // namespace huffdrift
