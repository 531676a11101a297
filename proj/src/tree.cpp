#include "huffdrift/tree.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <set>

namespace huffdrift {

double cosine_similarity(const FeatureVec& a, const FeatureVec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < kZeroNormEps || nb < kZeroNormEps) return 0.0;
    return dot / (na * nb);
}

void UpdateParams::validate() const {
    if (!(theta_cos > -1.0 && theta_cos < 1.0))
        throw std::invalid_argument("theta_cos must be in (-1, 1)");
    if (!(theta_merge > 0.0 && theta_merge < 1.0))
        throw std::invalid_argument("theta_merge must be in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must be in (0, 1)");
    if (!(w_o > 0.0))
        throw std::invalid_argument("w_o must be positive");
    if (!(gamma_min >= 0.0 && gamma_min < gamma_max && gamma_max <= 1.0))
        throw std::invalid_argument("need 0 <= gamma_min < gamma_max <= 1");
}

bool is_leaf(NodeKind k) { return k == NodeKind::data || k == NodeKind::nyt; }

const char* kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::root: return "root";
        case NodeKind::internal: return "internal";
        case NodeKind::data: return "data";
        case NodeKind::nyt: return "nyt";
    }
    return "?";
}

const CodebookEntry* Codebook::find(NodeId id) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), id,
                               [](const CodebookEntry& e, NodeId v) { return e.id < v; });
    if (it == entries.end() || it->id != id) return nullptr;
    return &*it;
}

double frame_score(const Codebook& codebook, NodeId matched_id) {
    const CodebookEntry* entry = codebook.find(matched_id);
    if (entry == nullptr)
        throw std::invalid_argument("frame_score: unknown node id " + std::to_string(matched_id));
    if (codebook.nyt_depth < 1)
        throw CorruptedStateError("frame_score: NYT depth must be at least 1");
    return static_cast<double>(entry->depth) / static_cast<double>(codebook.nyt_depth);
}

HuffTree::HuffTree() {
    nodes_.resize(2);
    TreeNode& root = nodes_[1];
    root.id = 1;
    root.kind = NodeKind::nyt;
    root.weight = 0.0;
    root.depth = 0;
    root.parent = 0;
    nyt_id_ = 1;
    data_count_ = 0;
}

const TreeNode& HuffTree::node(NodeId id) const {
    if (id < 1 || id > node_count())
        throw std::invalid_argument("node id out of range: " + std::to_string(id));
    return nodes_[id];
}

bool HuffTree::is_branch(NodeId id) const {
    NodeKind k = nodes_[id].kind;
    return k == NodeKind::root || k == NodeKind::internal;
}

bool HuffTree::is_right_child(NodeId id) const {
    NodeId p = nodes_[id].parent;
    return p != 0 && nodes_[p].right == id;
}

std::vector<NodeId> HuffTree::data_ids() const {
    std::vector<NodeId> out;
    out.reserve(data_count_);
    for (NodeId id = 1; id <= node_count(); ++id) {
        if (nodes_[id].kind == NodeKind::data) out.push_back(id);
    }
    return out;
}

MatchResult HuffTree::search_best_match(const FeatureVec& f, const UpdateParams& params) const {
    MatchResult result;
    result.similarity = -std::numeric_limits<double>::infinity();
    for (NodeId id = 1; id <= node_count(); ++id) {
        const TreeNode& n = nodes_[id];
        if (n.kind != NodeKind::data) continue;
        double sim = cosine_similarity(n.mean, f);
        if (!result.best_id || sim > result.similarity) {
            result.best_id = id;
            result.similarity = sim;
        }
    }
    result.match_flag = result.best_id.has_value() && result.similarity >= params.theta_cos;
    return result;
}

void HuffTree::update_on_hit(NodeId hit_id, const FeatureVec& f, double similarity,
                             const UpdateParams& params) {
    if (hit_id < 1 || hit_id > node_count() || nodes_[hit_id].kind != NodeKind::data)
        throw std::logic_error("update_on_hit: node " + std::to_string(hit_id) +
                               " is not a data node");
    TreeNode& n = nodes_[hit_id];
    if (n.mean.size() != f.size())
        throw std::invalid_argument("update_on_hit: dimension mismatch");

    n.weight = (1.0 - params.alpha) * n.weight + params.alpha;

    double gamma = (similarity - params.theta_cos) / (1.0 - params.theta_cos) *
                       (params.gamma_max - params.gamma_min) +
                   params.gamma_min;
    for (std::size_t i = 0; i < n.mean.size(); ++i)
        n.mean[i] = (1.0 - gamma) * n.mean[i] + gamma * f[i];

    if (n.parent != 0) recompute_branch_weight(n.parent);
}

NodeId HuffTree::insert_on_miss(const FeatureVec& f, const UpdateParams& params) {
    NodeId old_nyt = nyt_id_;
    TreeNode& split = nodes_[old_nyt];
    if (split.kind != NodeKind::nyt)
        throw CorruptedStateError("insert_on_miss: NYT slot does not hold the NYT node");

    NodeId data_id = old_nyt + 1;
    NodeId new_nyt = old_nyt + 2;
    nodes_.resize(nodes_.size() + 2);

    TreeNode& parent = nodes_[old_nyt];
    parent.kind = (old_nyt == 1) ? NodeKind::root : NodeKind::internal;
    parent.weight = params.w_o;
    parent.mean.clear();
    parent.right = data_id;
    parent.left = new_nyt;

    TreeNode& data = nodes_[data_id];
    data.id = data_id;
    data.kind = NodeKind::data;
    data.weight = params.w_o;
    data.mean = f;
    data.depth = parent.depth + 1;
    data.parent = old_nyt;

    TreeNode& nyt = nodes_[new_nyt];
    nyt.id = new_nyt;
    nyt.kind = NodeKind::nyt;
    nyt.weight = 0.0;
    nyt.depth = parent.depth + 1;
    nyt.parent = old_nyt;

    nyt_id_ = new_nyt;
    ++data_count_;
    return data_id;
}

void HuffTree::recompute_branch_weight(NodeId id) {
    TreeNode& n = nodes_[id];
    if (is_leaf(n.kind))
        throw CorruptedStateError("recompute_branch_weight on a leaf");
    n.weight = nodes_[n.right].weight + nodes_[n.left].weight;
}

void HuffTree::refresh_subtree_depths(NodeId id) {
    // Iterative pre-order; depth = parent depth + 1.
    std::vector<NodeId> stack{id};
    while (!stack.empty()) {
        NodeId cur = stack.back();
        stack.pop_back();
        TreeNode& n = nodes_[cur];
        n.depth = (n.parent == 0) ? 0 : nodes_[n.parent].depth + 1;
        if (n.right != 0) {
            stack.push_back(n.right);
            stack.push_back(n.left);
        }
    }
}

void HuffTree::swap_slots(NodeId a, NodeId b) {
    TreeNode& na = nodes_[a];
    TreeNode& nb = nodes_[b];
    // Contents move between slots; slot ids, parents and child sides stay.
    std::swap(na.kind, nb.kind);
    std::swap(na.weight, nb.weight);
    std::swap(na.mean, nb.mean);
    std::swap(na.right, nb.right);
    std::swap(na.left, nb.left);
    for (NodeId c : {na.right, na.left})
        if (c != 0) nodes_[c].parent = a;
    for (NodeId c : {nb.right, nb.left})
        if (c != 0) nodes_[c].parent = b;
    if (na.kind == NodeKind::nyt) nyt_id_ = a;
    if (nb.kind == NodeKind::nyt) nyt_id_ = b;
    // Moved subtrees may have changed level.
    refresh_subtree_depths(a);
    refresh_subtree_depths(b);
}

std::vector<std::pair<NodeId, NodeId>> HuffTree::reorganize(NodeId start_id) {
    std::vector<std::pair<NodeId, NodeId>> swaps;
    if (start_id < 1 || start_id > node_count())
        throw std::logic_error("reorganize: start id out of range");

    std::set<NodeId> visit{start_id};
    std::vector<char> on_path(nodes_.size());
    NodeId x = start_id;
    while (x >= 3) {
        if (is_branch(x)) recompute_branch_weight(x);

        // y_hat = the lightest node ranked above x (smallest id on ties).
        // Ancestors of x are excluded: their weights still miss the pending
        // bump below, and the cascade recomputes them on its way up, so a
        // transiently light ancestor is not a real rank violation (swapping
        // a node into its own subtree is impossible anyway).
        std::fill(on_path.begin(), on_path.end(), 0);
        for (NodeId p = nodes_[x].parent; p != 0; p = nodes_[p].parent) on_path[p] = 1;
        NodeId y_hat = 0;
        double w_min = std::numeric_limits<double>::infinity();
        for (NodeId y = 2; y < x; ++y) {
            if (on_path[y]) continue;
            if (nodes_[y].weight < w_min) {
                w_min = nodes_[y].weight;
                y_hat = y;
            }
        }
        if (y_hat != 0 && nodes_[x].weight - w_min > 0.0) {
            swap_slots(x, y_hat);
            swaps.emplace_back(x, y_hat);
            NodeId pa = nodes_[x].parent;
            NodeId pb = nodes_[y_hat].parent;
            if (pa == pb) {
                recompute_branch_weight(pa);
            } else {
                recompute_branch_weight(std::max(pa, pb));
                recompute_branch_weight(std::min(pa, pb));
            }
            visit.insert(y_hat);
        }

        // Successor: parent when x is a right child, else the right sibling.
        NodeId p = nodes_[x].parent;
        NodeId z = is_right_child(x) ? p : nodes_[p].right;
        visit.insert(z);
        visit.erase(x);
        x = *visit.rbegin();
    }

    if (node_count() >= 3 && is_branch(2)) recompute_branch_weight(2);
    if (is_branch(1)) recompute_branch_weight(1);
    return swaps;
}

void HuffTree::normalize_weights() {
    if (data_count_ == 0)
        throw CorruptedStateError("normalize_weights: no data nodes");
    double total = 0.0;
    for (NodeId id = 1; id <= node_count(); ++id)
        if (nodes_[id].kind == NodeKind::data) total += nodes_[id].weight;
    if (!(total > 0.0))
        throw CorruptedStateError("normalize_weights: non-positive data weight total");
    for (NodeId id = 1; id <= node_count(); ++id)
        if (nodes_[id].kind == NodeKind::data) nodes_[id].weight /= total;
    // Children carry larger ids than their parent, so a descending id sweep
    // recomputes bottom-up.
    for (NodeId id = node_count(); id >= 1; --id)
        if (is_branch(id)) recompute_branch_weight(id);
}

MergeReport HuffTree::merge_pass(const UpdateParams& params) {
    struct Working {
        double weight;
        FeatureVec mean;
    };
    std::vector<Working> pool;
    pool.reserve(data_count_);
    for (NodeId id : data_ids()) pool.push_back({nodes_[id].weight, nodes_[id].mean});

    MergeReport report;
    while (pool.size() >= 2) {
        double best_sim = -std::numeric_limits<double>::infinity();
        std::size_t bi = 0, bj = 0;
        for (std::size_t i = 0; i + 1 < pool.size(); ++i) {
            for (std::size_t j = i + 1; j < pool.size(); ++j) {
                double sim = cosine_similarity(pool[i].mean, pool[j].mean);
                if (sim > best_sim) {
                    best_sim = sim;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best_sim < params.theta_merge) break;

        Working merged;
        merged.weight = pool[bi].weight + pool[bj].weight;
        merged.mean.resize(pool[bi].mean.size());
        for (std::size_t d = 0; d < merged.mean.size(); ++d)
            merged.mean[d] = 0.5 * (pool[bi].mean[d] + pool[bj].mean[d]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(bj));
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(bi));
        pool.push_back(std::move(merged));
        ++report.merged_count;
    }

    if (report.merged_count > 0) {
        std::vector<StaticLeaf> leaves;
        leaves.reserve(pool.size() + 1);
        for (Working& w : pool) leaves.push_back({w.weight, std::move(w.mean), false});
        leaves.push_back({0.0, {}, true});
        *this = build_static(leaves);
        report.rebuilt = true;
    }
    return report;
}

void HuffTree::replace_data_node(NodeId id, const FeatureVec& mean, double weight) {
    if (id < 1 || id > node_count() || nodes_[id].kind != NodeKind::data)
        throw std::logic_error("replace_data_node: node " + std::to_string(id) +
                               " is not a data node");
    nodes_[id].mean = mean;
    nodes_[id].weight = weight;
    if (nodes_[id].parent != 0) recompute_branch_weight(nodes_[id].parent);
}

void HuffTree::rebuild_static() {
    std::vector<StaticLeaf> leaves;
    leaves.reserve(data_count_ + 1);
    for (NodeId id : data_ids()) leaves.push_back({nodes_[id].weight, nodes_[id].mean, false});
    leaves.push_back({0.0, {}, true});
    *this = build_static(leaves);
}

HuffTree HuffTree::build_static(const std::vector<StaticLeaf>& leaves) {
    int nyt_count = 0;
    for (const StaticLeaf& leaf : leaves) {
        if (leaf.is_nyt) {
            ++nyt_count;
            if (leaf.weight != 0.0)
                throw std::invalid_argument("build_static: NYT marker must have weight 0");
        } else if (!(leaf.weight > 0.0)) {
            throw std::invalid_argument("build_static: data leaf weights must be positive");
        }
    }
    if (nyt_count != 1)
        throw std::invalid_argument("build_static: expected exactly one NYT marker, got " +
                                    std::to_string(nyt_count));

    struct BuildNode {
        double weight = 0.0;
        int height = 0;
        long order = 0;
        int right = -1;
        int left = -1;
        int leaf_index = -1; // into `leaves`, -1 for joins
    };
    std::vector<BuildNode> arena;
    arena.reserve(2 * leaves.size());
    long next_order = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        arena.push_back({leaves[i].weight, 0, next_order++, -1, -1, static_cast<int>(i)});

    // Join the two lightest subtrees; ties resolved by smaller height, then
    // by insertion order, to keep rebuilds shallow and deterministic.
    auto lighter = [&arena](int a, int b) {
        const BuildNode& x = arena[a];
        const BuildNode& y = arena[b];
        if (x.weight != y.weight) return x.weight < y.weight;
        if (x.height != y.height) return x.height < y.height;
        return x.order < y.order;
    };
    auto heap_cmp = [&lighter](int a, int b) { return lighter(b, a); }; // min-heap
    std::priority_queue<int, std::vector<int>, decltype(heap_cmp)> heap(heap_cmp);
    for (std::size_t i = 0; i < arena.size(); ++i) heap.push(static_cast<int>(i));

    while (heap.size() > 1) {
        int a = heap.top();
        heap.pop();
        int b = heap.top();
        heap.pop();
        // Heavier sibling goes right; `a` popped first is the lighter one.
        BuildNode join;
        join.weight = arena[a].weight + arena[b].weight;
        join.height = std::max(arena[a].height, arena[b].height) + 1;
        join.order = next_order++;
        join.right = b;
        join.left = a;
        arena.push_back(join);
        heap.push(static_cast<int>(arena.size() - 1));
    }
    int build_root = heap.top();

    // Assign ids top-down, right-to-left, and materialize the slot array.
    HuffTree tree;
    tree.nodes_.assign(arena.size() + 1, TreeNode{});
    tree.data_count_ = static_cast<int>(leaves.size()) - 1;

    struct Visit {
        int arena_index;
        NodeId parent;
        int depth;
    };
    std::vector<Visit> order;
    order.reserve(arena.size());
    // Breadth-first, right child before left, gives the id sequence.
    std::queue<Visit> bfs;
    bfs.push({build_root, 0, 0});
    std::vector<NodeId> assigned(arena.size(), 0);
    NodeId next_id = 1;
    while (!bfs.empty()) {
        Visit v = bfs.front();
        bfs.pop();
        NodeId id = next_id++;
        assigned[static_cast<std::size_t>(v.arena_index)] = id;
        const BuildNode& bn = arena[static_cast<std::size_t>(v.arena_index)];
        TreeNode& out = tree.nodes_[id];
        out.id = id;
        out.weight = bn.weight;
        out.depth = v.depth;
        out.parent = v.parent;
        if (bn.leaf_index >= 0) {
            const StaticLeaf& leaf = leaves[static_cast<std::size_t>(bn.leaf_index)];
            out.kind = leaf.is_nyt ? NodeKind::nyt : NodeKind::data;
            out.mean = leaf.mean;
            if (leaf.is_nyt) tree.nyt_id_ = id;
        } else {
            out.kind = (id == 1) ? NodeKind::root : NodeKind::internal;
            bfs.push({bn.right, id, v.depth + 1});
            bfs.push({bn.left, id, v.depth + 1});
        }
    }
    // Child links point at ids, resolvable only once all ids are assigned.
    for (std::size_t i = 0; i < arena.size(); ++i) {
        if (arena[i].leaf_index >= 0) continue;
        NodeId id = assigned[i];
        tree.nodes_[id].right = assigned[static_cast<std::size_t>(arena[i].right)];
        tree.nodes_[id].left = assigned[static_cast<std::size_t>(arena[i].left)];
    }
    return tree;
}

Codebook HuffTree::codebook() const {
    Codebook cb;
    cb.entries.reserve(data_count_);
    for (NodeId id = 1; id <= node_count(); ++id) {
        const TreeNode& n = nodes_[id];
        if (n.kind == NodeKind::data) cb.entries.push_back({id, n.mean, n.depth});
    }
    cb.nyt_depth = nodes_[nyt_id_].depth;
    return cb;
}

std::string HuffTree::snapshot() const {
    std::string out;
    char line[160];
    for (NodeId id = 1; id <= node_count(); ++id) {
        const TreeNode& n = nodes_[id];
        std::snprintf(line, sizeof(line), "%d %s %.12g %d %d\n", id, kind_name(n.kind), n.weight,
                      n.depth, n.parent);
        out += line;
    }
    return out;
}

}  // namespace huffdrift
