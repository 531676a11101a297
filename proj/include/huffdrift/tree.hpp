#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "huffdrift/types.hpp"

namespace huffdrift {

// Thrown when a structural invariant of the tree is found broken. These are
// bugs, not recoverable input errors, and are never silently ignored.
struct CorruptedStateError : std::logic_error {
    using std::logic_error::logic_error;
};

// Vectors whose Euclidean norm falls below this compare as similarity 0,
// which forces a miss. Dynamically normalized silence frames can be all
// zero; giving them a dedicated "silence" mode beats dividing by zero.
inline constexpr double kZeroNormEps = 1e-12;

// Absolute tolerance for weight comparisons. Fractional updates make exact
// equality meaningless.
inline constexpr double kWeightEps = 1e-9;

// Cosine of the angle between a and b, in [-1, 1]. Throws
// std::invalid_argument on dimension mismatch.
double cosine_similarity(const FeatureVec& a, const FeatureVec& b);

// All model hyper-parameters for the adaptive tree.
struct UpdateParams {
    double theta_cos = 0.93;   // hit threshold on cosine similarity, in (-1, 1)
    double theta_merge = 0.97; // merge threshold on cosine similarity, in (0, 1)
    double alpha = 1e-4;       // weight learning rate, in (0, 1)
    double w_o = 1e-3;         // initial weight of a freshly inserted data node, > 0
    double gamma_min = 0.0;    // mean update factor at similarity == theta_cos
    double gamma_max = 0.5;    // mean update factor at similarity == 1

    // Throws std::invalid_argument if any range constraint is violated.
    void validate() const;
};

enum class NodeKind { root, internal, data, nyt };

bool is_leaf(NodeKind k);
const char* kind_name(NodeKind k);

struct TreeNode {
    NodeId id = 0;
    NodeKind kind = NodeKind::nyt;
    double weight = 0.0;
    FeatureVec mean;   // data nodes only
    int depth = 0;     // root depth is 0
    NodeId parent = 0; // 0 for the root
    NodeId right = 0;  // 0 for leaves; the right child carries the lower id
    NodeId left = 0;
};

struct MatchResult {
    bool match_flag = false;
    std::optional<NodeId> best_id; // empty when the tree has no data nodes
    double similarity = 0.0;
};

struct MergeReport {
    int merged_count = 0;
    bool rebuilt = false;
};

struct CodebookEntry {
    NodeId id = 0;
    FeatureVec mean;
    int depth = 0;
};

// Per-data-node record of mean vector and depth, plus the NYT depth. The
// depth of a node is the code length assigned to its mode; the NYT depth is
// the current tree height.
struct Codebook {
    std::vector<CodebookEntry> entries; // ascending id
    int nyt_depth = 0;

    const CodebookEntry* find(NodeId id) const;
};

// Anomaly score of a matched frame: depth of the matched node relative to
// the NYT depth, in (0, 1]. Throws std::invalid_argument for unknown ids.
double frame_score(const Codebook& codebook, NodeId matched_id);

// Leaf description for a static rebuild. Exactly one leaf must be the NYT
// marker (weight 0); all others need weight > 0.
struct StaticLeaf {
    double weight = 0.0;
    FeatureVec mean;
    bool is_nyt = false;
};

// Adaptive Huffman tree over drifting feature-space modes.
//
// Nodes live in a slot array indexed by id. A swap exchanges the contents of
// two slots (subtrees follow their roots); ids stay attached to tree
// positions, which is what keeps the sibling property checkable as "weights
// non-increasing in id order". A fresh tree is a single NYT root.
//
// Single-writer: operations mutate the tree and must be externally
// serialized. Independent trees can run on separate threads freely.
class HuffTree {
public:
    HuffTree();

    int node_count() const { return static_cast<int>(nodes_.size()) - 1; }
    int data_count() const { return data_count_; }
    NodeId nyt_id() const { return nyt_id_; }
    const TreeNode& node(NodeId id) const;
    std::vector<NodeId> data_ids() const; // ascending

    // Best cosine match over all data nodes. match_flag is true iff the best
    // similarity clears params.theta_cos; an empty tree reports no candidate
    // with similarity -inf.
    MatchResult search_best_match(const FeatureVec& f, const UpdateParams& params) const;

    // Hit update: weight <- (1-alpha)*w + alpha, mean <- (1-gamma)*mean +
    // gamma*f with gamma interpolated from the similarity, then the parent
    // weight is recomputed. hit_id must be a data node.
    void update_on_hit(NodeId hit_id, const FeatureVec& f, double similarity,
                       const UpdateParams& params);

    // Miss update: splits the NYT into a new data node (right child, weight
    // w_o, mean f) and a fresh NYT (left child, weight 0). Returns the new
    // data node's id.
    NodeId insert_on_miss(const FeatureVec& f, const UpdateParams& params);

    // Restores the sibling property after a hit or miss by cascading weight
    // recomputation and swaps from start_id toward the root. start_id is the
    // hit node, or the right child of the old NYT after a miss. Returns the
    // performed swaps in order.
    std::vector<std::pair<NodeId, NodeId>> reorganize(NodeId start_id);

    // Divides every data-node weight by the data total and recomputes
    // internal weights bottom-up, leaving the root at 1 and the NYT at 0.
    // Throws CorruptedStateError when the data total is not positive.
    void normalize_weights();

    // Greedily merges the most similar pair of data nodes while their cosine
    // similarity clears params.theta_merge (merged node: summed weight,
    // point-wise mean average). Any merge triggers a full static rebuild, so
    // no reorganization is needed afterward.
    MergeReport merge_pass(const UpdateParams& params);

    // Overwrites a data node's mode in place (weakest-node replacement for
    // the fixed-capacity baseline) and recomputes its parent weight. Deeper
    // ancestors stay stale; the caller must reorganize or rebuild.
    void replace_data_node(NodeId id, const FeatureVec& mean, double weight);

    // Rebuilds this tree as a static Huffman tree over its current leaves.
    void rebuild_static();

    Codebook codebook() const;

    // Line-oriented text dump, one node per line: "id kind weight depth
    // parent_id", ids ascending, weights with 12 significant digits.
    std::string snapshot() const;

    // Bottom-up Huffman construction over the given leaves; ids are assigned
    // top-down right-to-left with the heavier sibling on the right.
    static HuffTree build_static(const std::vector<StaticLeaf>& leaves);

private:
    bool is_branch(NodeId id) const;
    bool is_right_child(NodeId id) const;
    void recompute_branch_weight(NodeId id);
    void refresh_subtree_depths(NodeId id);
    void swap_slots(NodeId a, NodeId b);

    std::vector<TreeNode> nodes_; // nodes_[0] unused; slot index == id
    NodeId nyt_id_ = 1;
    int data_count_ = 0;
};

}  // namespace huffdrift
