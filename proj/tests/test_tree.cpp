#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "huffdrift/synth.hpp"
#include "huffdrift/tree.hpp"
#include "support/oracles.hpp"

using namespace huffdrift;
using namespace huffdrift::testing;

namespace {

void require_sound(const HuffTree& tree) {
    for (const std::string& v : check_tree(tree)) FAIL_CHECK(v);
    REQUIRE(check_tree(tree).empty());
}

// Scalar brute-force route for cross-checking cosine values.
double cosine_by_parts(const FeatureVec& a, const FeatureVec& b) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    double na = 0.0, nb = 0.0;
    for (double v : a) na += v * v;
    for (double v : b) nb += v * v;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

HuffTree fig3_tree() {
    // Six data leaves whose static construction lands exactly on the
    // reference reorganization example: data ids {4, 6, 7, 9, 10, 12},
    // internals {2, 3, 5, 8, 11}, NYT 13.
    std::vector<StaticLeaf> leaves = {
        {4.5, {1, 0, 0, 0, 0, 0}, false}, {3.3, {0, 1, 0, 0, 0, 0}, false},
        {2.5, {0, 0, 1, 0, 0, 0}, false}, {2.1, {0, 0, 0, 1, 0, 0}, false},
        {1.2, {0, 0, 0, 0, 1, 0}, false}, {1.0, {0, 0, 0, 0, 0, 1}, false},
        {0.0, {}, true},
    };
    return HuffTree::build_static(leaves);
}

}  // namespace

// =============================================================================
// cosine similarity
// =============================================================================

TEST_CASE("cosine similarity on reference vectors") {
    CHECK(cosine_similarity({1, 0, 0}, {1, 0, 0}) == doctest::Approx(1.0));
    CHECK(cosine_similarity({1, 0, 0}, {0, 1, 0}) == doctest::Approx(0.0));
    CHECK(cosine_similarity({1, 1}, {1, 0}) ==
          doctest::Approx(0.7071067811865475).epsilon(1e-12));
    CHECK(cosine_similarity({1, 1}, {1, 0}) ==
          doctest::Approx(cosine_by_parts({1, 1}, {1, 0})).epsilon(1e-14));
}

TEST_CASE("cosine similarity rejects mismatched dimensions") {
    CHECK_THROWS_AS(cosine_similarity({1, 2}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("near-zero vectors compare as similarity 0") {
    CHECK(cosine_similarity({0, 0, 0}, {1, 2, 3}) == 0.0);
    CHECK(cosine_similarity({1e-13, 0, 0}, {1e-13, 0, 0}) == 0.0);
}

TEST_CASE("update params validate their ranges") {
    UpdateParams p;
    CHECK_NOTHROW(p.validate());
    UpdateParams bad = p;
    bad.theta_cos = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.theta_merge = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.w_o = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.gamma_min = 0.6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

// =============================================================================
// search
// =============================================================================

TEST_CASE("search on an empty tree reports no candidate") {
    HuffTree tree;
    UpdateParams params;
    MatchResult r = tree.search_best_match({1, 0}, params);
    CHECK_FALSE(r.match_flag);
    CHECK_FALSE(r.best_id.has_value());
    CHECK(r.similarity == -std::numeric_limits<double>::infinity());
}

TEST_CASE("search self-match on a singleton tree") {
    HuffTree tree;
    UpdateParams params;
    params.theta_cos = 0.93;
    NodeId id = tree.insert_on_miss({0.5, 0.5}, params);
    MatchResult r = tree.search_best_match({0.5, 0.5}, params);
    CHECK(r.match_flag);
    CHECK(*r.best_id == id);
    CHECK(r.similarity == doctest::Approx(1.0));
}

TEST_CASE("search picks the argmax over all data nodes") {
    HuffTree tree;
    UpdateParams params;
    params.theta_cos = 0.93;
    NodeId first = tree.insert_on_miss({1, 0}, params);
    tree.reorganize(first);
    tree.normalize_weights();
    NodeId second = tree.insert_on_miss({0, 1}, params);
    tree.reorganize(second);
    tree.normalize_weights();

    MatchResult r = tree.search_best_match({0.9, 0.1}, params);
    // Exhaustive check over both candidates.
    double s1 = cosine_by_parts({1, 0}, {0.9, 0.1});
    double s2 = cosine_by_parts({0, 1}, {0.9, 0.1});
    CHECK(s1 > s2);
    CHECK(r.similarity == doctest::Approx(s1).epsilon(1e-12));
    CHECK(r.similarity == doctest::Approx(0.99388).epsilon(1e-4));
    CHECK(r.match_flag);
    const TreeNode& best = tree.node(*r.best_id);
    CHECK(best.mean == FeatureVec{1, 0});
}

// =============================================================================
// hit updates
// =============================================================================

TEST_CASE("hit update applies the weight recurrence") {
    HuffTree tree;
    UpdateParams params;
    params.alpha = 1e-4;
    NodeId id = tree.insert_on_miss({1, 0}, params);
    tree.reorganize(id);
    // Set a known starting weight through replacement, then hit.
    tree.replace_data_node(id, {1, 0}, 0.2);
    tree.update_on_hit(id, {1, 0}, 1.0, params);
    CHECK(tree.node(id).weight == doctest::Approx(0.20008).epsilon(1e-12));
    // Parent weight tracked the change.
    CHECK(tree.node(tree.node(id).parent).weight == doctest::Approx(0.20008).epsilon(1e-12));
}

TEST_CASE("hit at the similarity threshold leaves the mean unchanged") {
    HuffTree tree;
    UpdateParams params;
    params.theta_cos = 0.93;
    params.gamma_min = 0.0;
    params.gamma_max = 0.5;
    NodeId id = tree.insert_on_miss({1, 0}, params);
    tree.update_on_hit(id, {0, 1}, params.theta_cos, params);
    CHECK(tree.node(id).mean == FeatureVec{1, 0});
}

TEST_CASE("hit at similarity 1 moves the mean by gamma_max") {
    HuffTree tree;
    UpdateParams params;
    params.gamma_max = 0.5;
    NodeId id = tree.insert_on_miss({1, 0}, params);
    tree.update_on_hit(id, {0, 1}, 1.0, params);
    CHECK(tree.node(id).mean[0] == doctest::Approx(0.5));
    CHECK(tree.node(id).mean[1] == doctest::Approx(0.5));
}

TEST_CASE("hit on a non-data node is a caller bug") {
    HuffTree tree;
    UpdateParams params;
    NodeId id = tree.insert_on_miss({1, 0}, params);
    tree.reorganize(id);
    CHECK_THROWS_AS(tree.update_on_hit(tree.nyt_id(), {1, 0}, 1.0, params), std::logic_error);
    CHECK_THROWS_AS(tree.update_on_hit(1, {1, 0}, 1.0, params), std::logic_error);
}

// =============================================================================
// miss inserts
// =============================================================================

TEST_CASE("first miss splits the root NYT") {
    HuffTree tree;
    UpdateParams params; // w_o = 1e-3
    NodeId id = tree.insert_on_miss({1, 2}, params);
    CHECK(id == 2);
    CHECK(tree.node_count() == 3);
    CHECK(tree.node(2).kind == NodeKind::data);
    CHECK(tree.node(2).depth == 1);
    CHECK(tree.node(2).weight == 1e-3);
    CHECK(tree.nyt_id() == 3);
    CHECK(tree.node(3).depth == 1);
    CHECK(tree.node(1).weight == doctest::Approx(1e-3));
    require_sound(tree);
}

TEST_CASE("second miss keeps the node-count identity") {
    HuffTree tree;
    UpdateParams params;
    NodeId first = tree.insert_on_miss({1, 0}, params);
    tree.reorganize(first);
    tree.normalize_weights();
    NodeId second = tree.insert_on_miss({0, 1}, params);
    tree.reorganize(second);

    CHECK(tree.node_count() == 5);
    CHECK(tree.data_count() == 2);
    CHECK(tree.data_ids() == std::vector<NodeId>{2, 4});
    CHECK(tree.nyt_id() == 5);
    require_sound(tree);
}

// =============================================================================
// reorganize
// =============================================================================

TEST_CASE("hit on a still-lightest node causes no swaps") {
    HuffTree tree = fig3_tree();
    // Node 12 is the lightest data node; a tiny bump keeps it in rank.
    tree.replace_data_node(12, tree.node(12).mean, 1.1);
    auto swaps = tree.reorganize(12);
    CHECK(swaps.empty());
    require_sound(tree);
    // Cascaded recomputation reached the root.
    CHECK(tree.node(1).weight == doctest::Approx(14.7));
}

TEST_CASE("reference reorganization walk: swap sequence 12-10, 8-7, 5-4") {
    HuffTree tree = fig3_tree();
    // Static construction must reproduce the reference layout exactly.
    REQUIRE(tree.node_count() == 13);
    REQUIRE(tree.data_ids() == std::vector<NodeId>{4, 6, 7, 9, 10, 12});
    REQUIRE(tree.nyt_id() == 13);
    REQUIRE(tree.node(2).weight == doctest::Approx(8.8));
    REQUIRE(tree.node(3).weight == doctest::Approx(5.8));
    REQUIRE(tree.node(5).weight == doctest::Approx(4.3));
    REQUIRE(tree.node(8).weight == doctest::Approx(2.2));
    REQUIRE(tree.node(11).weight == doctest::Approx(1.0));
    require_sound(tree);

    // A matched frame bumps node 12 to weight 2 (parent recomputed by the
    // update), forcing the three-step swap cascade.
    tree.replace_data_node(12, tree.node(12).mean, 2.0);
    auto swaps = tree.reorganize(12);

    REQUIRE(swaps.size() == 3);
    CHECK(swaps[0] == std::pair<NodeId, NodeId>{12, 10});
    CHECK(swaps[1] == std::pair<NodeId, NodeId>{8, 7});
    CHECK(swaps[2] == std::pair<NodeId, NodeId>{5, 4});
    require_sound(tree);

    // The bumped mode now sits at id 10, one level higher.
    CHECK(tree.node(10).weight == doctest::Approx(2.0));
    CHECK(tree.node(10).kind == NodeKind::data);
    CHECK(tree.node(10).depth == 3);
    CHECK(tree.node(1).weight == doctest::Approx(15.6));
    // NYT stayed deepest.
    CHECK(tree.node(tree.nyt_id()).depth == 4);
}

TEST_CASE("fuzz: random hit and miss sequences keep every invariant") {
    // Dimension-4 vectors, 10,000 operations, full structural scan after
    // every reorganize.
    std::mt19937_64 rng(7);
    UpdateParams params;
    params.theta_cos = 0.8;
    params.alpha = 0.05; // aggressive updates provoke deep cascades
    HuffTree tree;
    int hits = 0, misses = 0, merges = 0;
    for (int step = 0; step < 10000; ++step) {
        bool do_hit = tree.data_count() > 0 && uniform_unit(rng) < 0.8;
        NodeId touched;
        if (do_hit) {
            auto ids = tree.data_ids();
            touched = ids[static_cast<std::size_t>(uniform_unit(rng) *
                                                   static_cast<double>(ids.size()))];
            FeatureVec f = tree.node(touched).mean;
            for (double& v : f) v += 0.05 * normal_unit(rng);
            double sim = cosine_similarity(tree.node(touched).mean, f);
            if (sim < params.theta_cos) sim = params.theta_cos; // stay on the hit path
            tree.update_on_hit(touched, f, sim, params);
            ++hits;
        } else {
            touched = tree.insert_on_miss(random_unit_vector(rng, 4), params);
            ++misses;
        }
        // Occasional merge passes exercise the static rebuild route.
        if (uniform_unit(rng) < 0.02 && tree.data_count() >= 2) {
            MergeReport r = tree.merge_pass(params);
            merges += r.merged_count;
            if (!r.rebuilt) tree.reorganize(touched);
        } else {
            tree.reorganize(touched);
        }
        tree.normalize_weights();

        auto violations = check_tree(tree);
        if (!violations.empty()) {
            CAPTURE(step);
            for (const std::string& v : violations) FAIL_CHECK(v);
            REQUIRE(violations.empty());
        }
        auto cb_violations = check_codebook(tree, tree.codebook());
        REQUIRE(cb_violations.empty());
    }
    CHECK(hits > 0);
    CHECK(misses > 0);
}

// =============================================================================
// normalize
// =============================================================================

TEST_CASE("normalizing a singleton sets both weights to 1") {
    HuffTree tree;
    UpdateParams params;
    params.w_o = 0.37;
    NodeId id = tree.insert_on_miss({1, 0}, params);
    tree.reorganize(id);
    tree.normalize_weights();
    CHECK(tree.node(id).weight == doctest::Approx(1.0));
    CHECK(tree.node(1).weight == doctest::Approx(1.0));
    require_sound(tree);
}

TEST_CASE("normalizing symmetric weights splits them evenly") {
    std::vector<StaticLeaf> leaves = {
        {0.2, {1, 0}, false}, {0.2, {0, 1}, false}, {0.0, {}, true}};
    HuffTree tree = HuffTree::build_static(leaves);
    tree.normalize_weights();
    for (NodeId id : tree.data_ids()) CHECK(tree.node(id).weight == doctest::Approx(0.5));
    CHECK(tree.node(1).weight == doctest::Approx(1.0));
}

TEST_CASE("normalization rescales data weights and rebuilds internal sums") {
    std::vector<StaticLeaf> leaves = {{3e-3, {1, 0, 0}, false},
                                      {1e-3, {0, 1, 0}, false},
                                      {1e-3, {0, 0, 1}, false},
                                      {0.0, {}, true}};
    HuffTree tree = HuffTree::build_static(leaves);
    tree.normalize_weights();
    std::vector<double> weights;
    for (NodeId id : tree.data_ids()) weights.push_back(tree.node(id).weight);
    std::sort(weights.begin(), weights.end(), std::greater<>());
    CHECK(weights[0] == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(weights[1] == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(weights[2] == doctest::Approx(0.2).epsilon(1e-9));
    // Every internal weight equals its subtree's data sum.
    require_sound(tree);
    CHECK(tree.node(1).weight == doctest::Approx(1.0).epsilon(1e-9));
}

// =============================================================================
// merging
// =============================================================================

TEST_CASE("identical means always merge") {
    std::vector<StaticLeaf> leaves = {
        {0.4, {1, 1}, false}, {0.1, {1, 1}, false}, {0.0, {}, true}};
    HuffTree tree = HuffTree::build_static(leaves);
    UpdateParams params;
    params.theta_merge = 0.97;
    MergeReport r = tree.merge_pass(params);
    CHECK(r.merged_count == 1);
    CHECK(r.rebuilt);
    CHECK(tree.data_count() == 1);
    NodeId survivor = tree.data_ids()[0];
    CHECK(tree.node(survivor).weight == doctest::Approx(0.5));
    CHECK(tree.node(survivor).mean == FeatureVec{1, 1});
    require_sound(tree);
}

TEST_CASE("orthogonal means never merge") {
    std::vector<StaticLeaf> leaves = {
        {0.4, {1, 0}, false}, {0.1, {0, 1}, false}, {0.0, {}, true}};
    HuffTree tree = HuffTree::build_static(leaves);
    UpdateParams params;
    params.theta_merge = 0.97;
    MergeReport r = tree.merge_pass(params);
    CHECK(r.merged_count == 0);
    CHECK_FALSE(r.rebuilt);
    CHECK(tree.data_count() == 2);
}

TEST_CASE("close modes cascade down to one node over two iterations") {
    // Unit vectors at 0, 7 and 14 degrees: every pairwise similarity clears
    // 0.97, and the first merged mean stays within the threshold of the
    // remaining vector. Running the greedy procedure by hand: merge the
    // closest pair, then merge its average with the leftover.
    auto unit = [](double deg) {
        double rad = deg * 3.14159265358979323846 / 180.0;
        return FeatureVec{std::cos(rad), std::sin(rad)};
    };
    std::vector<StaticLeaf> leaves = {{0.5, unit(0.0), false},
                                      {0.3, unit(7.0), false},
                                      {0.2, unit(14.0), false},
                                      {0.0, {}, true}};
    HuffTree tree = HuffTree::build_static(leaves);
    UpdateParams params;
    params.theta_merge = 0.97;
    MergeReport r = tree.merge_pass(params);
    CHECK(r.merged_count == 2);
    CHECK(tree.data_count() == 1);
    CHECK(tree.node(tree.data_ids()[0]).weight == doctest::Approx(1.0));
    require_sound(tree);
}

TEST_CASE("merge closure: after a pass no pair clears the threshold") {
    std::mt19937_64 rng(11);
    UpdateParams params;
    params.theta_merge = 0.9;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<StaticLeaf> leaves;
        int n = 2 + static_cast<int>(uniform_unit(rng) * 8);
        for (int i = 0; i < n; ++i)
            leaves.push_back({0.1 + uniform_unit(rng), random_unit_vector(rng, 3), false});
        leaves.push_back({0.0, {}, true});
        HuffTree tree = HuffTree::build_static(leaves);
        tree.merge_pass(params);
        auto ids = tree.data_ids();
        for (std::size_t i = 0; i < ids.size(); ++i)
            for (std::size_t j = i + 1; j < ids.size(); ++j)
                CHECK(cosine_similarity(tree.node(ids[i]).mean, tree.node(ids[j]).mean) <
                      params.theta_merge);
    }
}

// =============================================================================
// static construction
// =============================================================================

TEST_CASE("smallest static tree") {
    HuffTree tree = HuffTree::build_static({{1.0, {1, 0}, false}, {0.0, {}, true}});
    CHECK(tree.node_count() == 3);
    CHECK(tree.node(2).kind == NodeKind::data);
    CHECK(tree.node(2).depth == 1);
    CHECK(tree.node(tree.nyt_id()).depth == 1);
    require_sound(tree);
}

TEST_CASE("textbook static construction depths") {
    std::vector<StaticLeaf> leaves = {{0.5, {1, 0, 0}, false},
                                      {0.3, {0, 1, 0}, false},
                                      {0.2, {0, 0, 1}, false},
                                      {0.0, {}, true}};
    HuffTree tree = HuffTree::build_static(leaves);
    require_sound(tree);
    std::vector<std::pair<double, int>> got; // (weight, depth)
    for (NodeId id : tree.data_ids()) got.emplace_back(tree.node(id).weight, tree.node(id).depth);
    std::sort(got.begin(), got.end(), std::greater<>());
    CHECK(got[0] == std::pair<double, int>{0.5, 1});
    CHECK(got[1] == std::pair<double, int>{0.3, 2});
    CHECK(got[2] == std::pair<double, int>{0.2, 3});
    CHECK(tree.node(tree.nyt_id()).depth == 3);
    CHECK(weighted_path_length(tree) == doctest::Approx(1.7));
}

TEST_CASE("static construction validates its leaf set") {
    CHECK_THROWS_AS(HuffTree::build_static({{1.0, {1}, false}}), std::invalid_argument);
    CHECK_THROWS_AS(HuffTree::build_static({{0.0, {}, true}, {0.0, {}, true}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(HuffTree::build_static({{0.5, {}, true}, {1.0, {1}, false}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(HuffTree::build_static({{0.0, {}, true}, {0.0, {1}, false}}),
                    std::invalid_argument);
}

TEST_CASE("static trees reach the exhaustive-enumeration optimum") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(uniform_unit(rng) * 8); // up to 8 data leaves
        std::vector<StaticLeaf> leaves;
        std::vector<double> weights;
        for (int i = 0; i < n; ++i) {
            double w = 0.05 + uniform_unit(rng);
            leaves.push_back({w, {static_cast<double>(i), 1.0}, false});
            weights.push_back(w);
        }
        leaves.push_back({0.0, {}, true});
        HuffTree tree = HuffTree::build_static(leaves);
        require_sound(tree);
        weights.push_back(0.0); // the NYT participates as a zero-weight leaf
        CHECK(weighted_path_length(tree) ==
              doctest::Approx(optimal_path_length(weights)).epsilon(1e-9));
    }
}

// =============================================================================
// scoring and snapshots
// =============================================================================

TEST_CASE("frame score is the relative depth") {
    Codebook cb;
    cb.entries = {{7, {1, 0}, 3}};
    cb.nyt_depth = 5;
    CHECK(frame_score(cb, 7) == doctest::Approx(0.6));
    CHECK_THROWS_AS(frame_score(cb, 9), std::invalid_argument);
}

TEST_CASE("fresh insert scores 1 because new nodes sit beside the NYT") {
    HuffTree tree;
    UpdateParams params;
    NodeId id = tree.insert_on_miss({1, 0}, params);
    Codebook cb = tree.codebook();
    CHECK(frame_score(cb, id) == doctest::Approx(1.0));
}

TEST_CASE("snapshot is line-oriented and stable") {
    HuffTree tree = fig3_tree();
    std::string snap = tree.snapshot();
    CHECK(snap == tree.snapshot());
    // One line per node, id first, root flagged.
    CHECK(snap.find("1 root 14.6 0 0\n") == 0);
    CHECK(snap.find("13 nyt 0 5 11\n") != std::string::npos);
    int lines = 0;
    for (char c : snap)
        if (c == '\n') ++lines;
    CHECK(lines == 13);
}

TEST_CASE("monotone ascent: a repeatedly hit node never gets deeper") {
    // Six separated modes, merging disabled, one mode hit repeatedly.
    std::mt19937_64 rng(5);
    UpdateParams params;
    params.alpha = 0.01;
    HuffTree tree;
    std::vector<FeatureVec> modes;
    for (int i = 0; i < 6; ++i) modes.push_back(random_unit_vector(rng, 6));
    for (const FeatureVec& m : modes) {
        NodeId id = tree.insert_on_miss(m, params);
        tree.reorganize(id);
        tree.normalize_weights();
    }
    const FeatureVec target = modes[3];
    int last_depth = 1000;
    for (int step = 0; step < 300; ++step) {
        MatchResult m = tree.search_best_match(target, params);
        REQUIRE(m.match_flag);
        tree.update_on_hit(*m.best_id, target, m.similarity, params);
        tree.reorganize(*m.best_id);
        tree.normalize_weights();
        MatchResult after = tree.search_best_match(target, params);
        int depth = tree.node(*after.best_id).depth;
        CHECK(depth <= last_depth);
        last_depth = depth;
        require_sound(tree);
    }
    CHECK(last_depth == 1);
}
