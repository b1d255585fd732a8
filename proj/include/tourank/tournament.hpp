#pragma once

#include "tourank/data.hpp"
#include "tourank/learner.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tourank {

enum class Strategy { auc, image_balance, class_balance };

Strategy strategy_from_name(const std::string& name); // "auc" | "image_balance" | "class_balance"
std::string strategy_name(Strategy s);

// Contiguous inclusive grade range.
struct ClassSet {
    int lo = 0;
    int hi = 0;
    bool is_leaf() const { return lo == hi; }
    int span() const { return hi - lo + 1; }
    bool operator==(const ClassSet&) const = default;
};

struct BuildConfig {
    Strategy strategy = Strategy::auc;
    TrainConfig train;
    double auc_eval_fraction = 0.25; // held-out share for AUC-based K selection
    std::uint64_t seed = 0;
    // When set, a node whose AUC selection has no viable candidate falls back
    // to the class-balance split (with a warning) instead of raising. Used by
    // cross-validation, where rare grades can vanish from a training fold.
    bool degenerate_fallback = false;
};

// One evaluated candidate threshold at a node.
struct CandidateEval {
    int k = 0;
    std::optional<double> value;    // held-out AUC or balance product / image total
    bool trainset_fallback = false; // held-out AUC was undefined; scored on node data
    bool skipped = false;           // one side had no samples at all
};

struct KChoice {
    int k = 0;
    std::vector<CandidateEval> candidates;
    bool forced = false; // single possible K, no comparison ran
};

// Split threshold selection, one function per strategy. `counts` hold the
// per-grade sample counts of the node, index 0 = grade cs.lo.
KChoice choose_k_auc(const Dataset& node_ds, ClassSet cs, const BuildConfig& cfg);
int choose_k_image_balance(const std::vector<int>& counts, ClassSet cs);
int choose_k_class_balance(const std::vector<int>& counts, ClassSet cs);

struct SplitNode {
    ClassSet classes;
    int k = 0;         // internal nodes: cs.lo <= k < cs.hi
    BinaryModel model; // answers "grade > k"
    std::unique_ptr<SplitNode> left, right;
    bool is_leaf() const { return left == nullptr; }
};

struct NodeBuildRecord {
    ClassSet classes;
    int k = 0;
    std::vector<CandidateEval> candidates;
    bool forced = false;
    bool fallback_used = false;    // AUC selection failed; class-balance K substituted
    bool degenerate_model = false; // final node model saw a single class
};

struct TournamentTree {
    std::unique_ptr<SplitNode> root;
    Strategy strategy = Strategy::auc;
    int num_classes = 0;
    int feature_dim = 0;
    std::vector<NodeBuildRecord> build_meta; // pre-order
    std::vector<std::string> warnings;

    // Descend right iff score > 0.5 (exact 0.5 goes left); returns leaf grade.
    int predict(const std::vector<double>& x) const;
    std::vector<int> predict_batch(const Dataset& ds) const;
};

TournamentTree build_tree(const Dataset& ds, const BuildConfig& cfg);

} // namespace tourank
