#include "tourank/tournament.hpp"
#include "tourank/errors.hpp"
#include "tourank/metrics.hpp"
#include "tourank/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tourank {

namespace {

// salts for per-node / per-candidate seed derivation
constexpr std::uint64_t SALT_HOLDOUT = 0x686f6c64; // node-level validation split
constexpr std::uint64_t SALT_FINAL = 0x66696e6c;   // final full-data node model

std::string set_str(ClassSet cs) {
    return "[" + std::to_string(cs.lo) + ", " + std::to_string(cs.hi) + "]";
}

void check_class_set(ClassSet cs, int num_classes) {
    if (cs.lo < 1 || cs.hi > num_classes || cs.lo > cs.hi)
        throw DomainError("class set " + set_str(cs) + " invalid for " + std::to_string(num_classes) + " classes");
}

std::vector<int> counts_in_range(const Dataset& ds, ClassSet cs) {
    std::vector<int> counts(static_cast<std::size_t>(cs.span()), 0);
    for (const Sample& s : ds.samples)
        if (s.grade >= cs.lo && s.grade <= cs.hi) counts[static_cast<std::size_t>(s.grade - cs.lo)]++;
    return counts;
}

} // namespace

Strategy strategy_from_name(const std::string& name) {
    if (name == "auc") return Strategy::auc;
    if (name == "image_balance") return Strategy::image_balance;
    if (name == "class_balance") return Strategy::class_balance;
    throw ConfigError("unknown strategy '" + name + "' (want auc|image_balance|class_balance)");
}

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::auc: return "auc";
        case Strategy::image_balance: return "image_balance";
        case Strategy::class_balance: return "class_balance";
    }
    throw DomainError("invalid strategy value");
}

KChoice choose_k_auc(const Dataset& node_ds, ClassSet cs, const BuildConfig& cfg) {
    check_class_set(cs, node_ds.num_classes);
    if (cs.span() < 2) throw DomainError("choose_k_auc: class set " + set_str(cs) + " spans one class");
    if (node_ds.samples.empty()) throw DomainError("choose_k_auc: no samples for " + set_str(cs));
    if (!(cfg.auc_eval_fraction > 0.0 && cfg.auc_eval_fraction < 1.0))
        throw ConfigError("auc_eval_fraction must be in (0,1)");
    for (const Sample& s : node_ds.samples)
        if (s.grade < cs.lo || s.grade > cs.hi)
            throw DomainError("choose_k_auc: sample grade " + std::to_string(s.grade) + " outside " + set_str(cs));

    KChoice choice;
    if (cs.span() == 2) { // a single possible split: nothing to compare
        const std::vector<int> pair_counts = counts_in_range(node_ds, cs);
        if (pair_counts[0] == 0 || pair_counts[1] == 0)
            throw BuildError("class set " + set_str(cs) + ": every candidate split has an empty side");
        choice.k = cs.lo;
        choice.forced = true;
        choice.candidates.push_back({cs.lo, std::nullopt, false, false});
        return choice;
    }

    // One stratified holdout per node, shared by all candidates so they are
    // compared on identical data. Train keeps at least one sample per grade.
    std::vector<std::vector<std::size_t>> by_grade(static_cast<std::size_t>(cs.span()));
    for (std::size_t i = 0; i < node_ds.samples.size(); ++i)
        by_grade[static_cast<std::size_t>(node_ds.samples[i].grade - cs.lo)].push_back(i);
    std::mt19937_64 rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(cs.lo),
                                               static_cast<std::uint64_t>(cs.hi), SALT_HOLDOUT}));
    std::vector<std::size_t> train_idx, hold_idx;
    for (auto& grp : by_grade) {
        std::shuffle(grp.begin(), grp.end(), rng);
        std::size_t h = static_cast<std::size_t>(
            std::floor(cfg.auc_eval_fraction * static_cast<double>(grp.size()) + 0.5));
        if (h >= grp.size() && !grp.empty()) h = grp.size() - 1;
        hold_idx.insert(hold_idx.end(), grp.begin(), grp.begin() + static_cast<std::ptrdiff_t>(h));
        train_idx.insert(train_idx.end(), grp.begin() + static_cast<std::ptrdiff_t>(h), grp.end());
    }
    const Dataset train_ds = subset(node_ds, train_idx);
    const Dataset hold_ds = subset(node_ds, hold_idx);
    const std::vector<int> node_counts = counts_in_range(node_ds, cs);

    int best_k = -1;
    double best_auc = -1.0;
    for (int k = cs.lo; k < cs.hi; ++k) {
        CandidateEval cand;
        cand.k = k;

        int below = 0, above = 0;
        for (int g = cs.lo; g <= cs.hi; ++g)
            (g > k ? above : below) += node_counts[static_cast<std::size_t>(g - cs.lo)];
        if (below == 0 || above == 0) { // nothing on one side: not a real split here
            cand.skipped = true;
            choice.candidates.push_back(cand);
            continue;
        }

        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(cs.lo), static_cast<std::uint64_t>(cs.hi),
                                         static_cast<std::uint64_t>(k)});
        const BinaryModel model = train_binary(train_ds, make_binary_labels(train_ds, k), tc);

        auto auc_on = [&](const Dataset& eval_ds) {
            std::vector<double> scores;
            scores.reserve(eval_ds.samples.size());
            for (const Sample& s : eval_ds.samples) scores.push_back(model.score(s.features));
            return auc(scores, make_binary_labels(eval_ds, k));
        };
        try {
            cand.value = auc_on(hold_ds);
        } catch (const UndefinedAucError&) {
            // holdout lost a class (tiny grades); score on the node's own data
            cand.value = auc_on(node_ds);
            cand.trainset_fallback = true;
        }
        if (*cand.value > best_auc) {
            best_auc = *cand.value;
            best_k = k;
        }
        choice.candidates.push_back(cand);
    }

    if (best_k < 0)
        throw BuildError("class set " + set_str(cs) + ": every candidate split has an empty side");
    choice.k = best_k;
    return choice;
}

int choose_k_image_balance(const std::vector<int>& counts, ClassSet cs) {
    if (cs.span() < 2) throw DomainError("choose_k_image_balance: " + set_str(cs) + " spans one class");
    if (static_cast<int>(counts.size()) != cs.span())
        throw DimensionError("choose_k_image_balance: " + std::to_string(counts.size()) + " counts for " + set_str(cs));

    long long left = 0, total = 0;
    for (int c : counts) total += c;
    int best_k = cs.lo;
    long long best_product = -1;
    for (int k = cs.lo; k < cs.hi; ++k) {
        left += counts[static_cast<std::size_t>(k - cs.lo)];
        const long long product = left * (total - left);
        if (product > best_product) { // strict: ties keep the smaller K
            best_product = product;
            best_k = k;
        }
    }
    return best_k;
}

int choose_k_class_balance(const std::vector<int>& counts, ClassSet cs) {
    if (cs.span() < 2) throw DomainError("choose_k_class_balance: " + set_str(cs) + " spans one class");
    if (static_cast<int>(counts.size()) != cs.span())
        throw DimensionError("choose_k_class_balance: " + std::to_string(counts.size()) + " counts for " + set_str(cs));

    const int m = cs.span();
    if (m % 2 == 0) return cs.lo + m / 2 - 1;

    // Odd: one side gets ceil(m/2) classes. Give the extra class to the side
    // that is lighter in images; ties resolve to the smaller threshold.
    auto images = [&](int from, int to) {
        long long sum = 0;
        for (int g = from; g <= to; ++g) sum += counts[static_cast<std::size_t>(g - cs.lo)];
        return sum;
    };
    const int k_low_heavy = cs.lo + (m + 1) / 2 - 1; // big side = [lo, k]
    const int k_high_heavy = cs.lo + m / 2 - 1;      // big side = [k+1, hi]
    const long long low_big = images(cs.lo, k_low_heavy);
    const long long high_big = images(k_high_heavy + 1, cs.hi);
    if (low_big < high_big) return k_low_heavy;
    if (high_big < low_big) return k_high_heavy;
    return std::min(k_low_heavy, k_high_heavy);
}

namespace {

struct Builder {
    const Dataset& full;
    const BuildConfig& cfg;
    std::vector<NodeBuildRecord>* meta;
    std::vector<std::string>* warnings;

    std::unique_ptr<SplitNode> build(ClassSet cs) {
        auto node = std::make_unique<SplitNode>();
        node->classes = cs;
        if (cs.is_leaf()) return node;

        const Dataset node_ds = filter_grades(full, cs.lo, cs.hi);
        const std::vector<int> counts = counts_in_range(node_ds, cs);

        NodeBuildRecord rec;
        rec.classes = cs;
        switch (cfg.strategy) {
            case Strategy::auc: {
                try {
                    KChoice choice = choose_k_auc(node_ds, cs, cfg);
                    rec.k = choice.k;
                    rec.candidates = std::move(choice.candidates);
                    rec.forced = choice.forced;
                } catch (const BuildError&) {
                    if (!cfg.degenerate_fallback) throw;
                    rec.k = choose_k_class_balance(counts, cs);
                    rec.fallback_used = true;
                    warnings->push_back("node " + set_str(cs) +
                                        ": no viable AUC candidate; fell back to class-balance split");
                }
                break;
            }
            case Strategy::image_balance: {
                rec.k = choose_k_image_balance(counts, cs);
                long long left = 0, total = 0;
                for (int c : counts) total += c;
                for (int k = cs.lo; k < cs.hi; ++k) {
                    left += counts[static_cast<std::size_t>(k - cs.lo)];
                    rec.candidates.push_back(
                        {k, static_cast<double>(left * (total - left)), false, false});
                }
                rec.forced = cs.span() == 2;
                break;
            }
            case Strategy::class_balance: {
                rec.k = choose_k_class_balance(counts, cs);
                rec.forced = cs.span() == 2 || cs.span() % 2 == 0;
                if (cs.span() % 2 == 1) {
                    // diagnostics: total images on the ceil(m/2)-class side per option
                    const int m = cs.span();
                    auto images = [&](int from, int to) {
                        long long sum = 0;
                        for (int g = from; g <= to; ++g) sum += counts[static_cast<std::size_t>(g - cs.lo)];
                        return sum;
                    };
                    const int k_high = cs.lo + m / 2 - 1;
                    const int k_low = cs.lo + (m + 1) / 2 - 1;
                    rec.candidates.push_back({k_high, static_cast<double>(images(k_high + 1, cs.hi)), false, false});
                    rec.candidates.push_back({k_low, static_cast<double>(images(cs.lo, k_low)), false, false});
                } else {
                    rec.candidates.push_back({rec.k, std::nullopt, false, false});
                }
                break;
            }
        }

        node->k = rec.k;
        TrainConfig tc = cfg.train;
        tc.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(cs.lo), static_cast<std::uint64_t>(cs.hi),
                                         static_cast<std::uint64_t>(rec.k), SALT_FINAL});
        if (node_ds.samples.empty()) {
            // No samples reach this range at all; score 0.5 routes everything left.
            node->model.weights.assign(static_cast<std::size_t>(full.feature_dim), 0.0);
            node->model.bias = 0.0;
            node->model.meta.seed = tc.seed;
            node->model.meta.degenerate = true;
            rec.degenerate_model = true;
            warnings->push_back("node " + set_str(cs) + ": no training data; constant model");
        } else {
            node->model = train_binary(node_ds, make_binary_labels(node_ds, rec.k), tc);
            if (node->model.meta.degenerate) {
                rec.degenerate_model = true;
                warnings->push_back("node " + set_str(cs) + ": single-class training data; constant model");
            }
        }

        meta->push_back(std::move(rec));
        node->left = build({cs.lo, rec.k});
        node->right = build({rec.k + 1, cs.hi});
        return node;
    }
};

} // namespace

TournamentTree build_tree(const Dataset& ds, const BuildConfig& cfg) {
    validate_dataset(ds);
    validate_train_config(cfg.train);
    if (!(cfg.auc_eval_fraction > 0.0 && cfg.auc_eval_fraction < 1.0))
        throw ConfigError("auc_eval_fraction must be in (0,1)");

    TournamentTree tree;
    tree.strategy = cfg.strategy;
    tree.num_classes = ds.num_classes;
    tree.feature_dim = ds.feature_dim;
    Builder builder{ds, cfg, &tree.build_meta, &tree.warnings};
    tree.root = builder.build({1, ds.num_classes});
    return tree;
}

int TournamentTree::predict(const std::vector<double>& x) const {
    if (!root) throw DomainError("predict: tree has no root");
    const SplitNode* node = root.get();
    while (!node->is_leaf()) {
        // ties (score exactly 0.5) go to the lower subset
        node = node->model.score(x) > 0.5 ? node->right.get() : node->left.get();
    }
    return node->classes.lo;
}

std::vector<int> TournamentTree::predict_batch(const Dataset& ds) const {
    std::vector<int> out;
    out.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) out.push_back(predict(s.features));
    return out;
}

} // namespace tourank
