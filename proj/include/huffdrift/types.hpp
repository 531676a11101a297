#pragma once

#include <vector>

namespace huffdrift {

// Feature vector for one audio frame, dimensionless after normalization.
using FeatureVec = std::vector<double>;

// Tree node index. The root is always 1 and ids grow top-to-bottom,
// right-to-left, so after any completed update the id set is a contiguous
// 1..2n+1 for n data nodes.
using NodeId = int;

}  // namespace huffdrift
