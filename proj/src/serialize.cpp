#include "tourank/serialize.hpp"
#include "tourank/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace tourank {

using nlohmann::json;

namespace {

// 64-bit FNV-1a over a byte stream
struct Fnv1a {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    void feed(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    }
    void feed_str(const std::string& s) { feed(s.data(), s.size()); }
};

void require(bool ok, const std::string& what) {
    if (!ok) throw ParseError("model json: " + what);
}

json meta_to_json(const TrainMeta& meta) {
    return json{{"epochs", meta.epochs_run},
                {"final_loss", meta.final_loss},
                {"seed", meta.seed},
                {"degenerate", meta.degenerate}};
}

TrainMeta meta_from_json(const json& j) {
    TrainMeta meta;
    meta.epochs_run = j.at("epochs").get<int>();
    meta.final_loss = j.at("final_loss").get<double>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.degenerate = j.at("degenerate").get<bool>();
    return meta;
}

void check_finite_weights(const std::vector<double>& w, double b) {
    for (double v : w) require(std::isfinite(v), "non-finite weight");
    require(std::isfinite(b), "non-finite bias");
}

json node_to_json(const SplitNode& node) {
    json j;
    j["classes"] = {node.classes.lo, node.classes.hi};
    if (!node.is_leaf()) {
        j["k"] = node.k;
        j["model"] = binary_model_to_json(node.model);
        j["left"] = node_to_json(*node.left);
        j["right"] = node_to_json(*node.right);
    }
    return j;
}

std::unique_ptr<SplitNode> node_from_json(const json& j) {
    auto node = std::make_unique<SplitNode>();
    const auto& cls = j.at("classes");
    require(cls.is_array() && cls.size() == 2, "classes must be [lo, hi]");
    node->classes = {cls[0].get<int>(), cls[1].get<int>()};
    require(node->classes.lo <= node->classes.hi, "classes out of order");
    if (node->classes.is_leaf()) {
        require(!j.contains("left") && !j.contains("right"), "leaf with children");
        return node;
    }
    node->k = j.at("k").get<int>();
    require(node->k >= node->classes.lo && node->k < node->classes.hi, "k outside class range");
    node->model = binary_model_from_json(j.at("model"));
    node->left = node_from_json(j.at("left"));
    node->right = node_from_json(j.at("right"));
    require(node->left->classes.lo == node->classes.lo && node->left->classes.hi == node->k,
            "left child range mismatch");
    require(node->right->classes.lo == node->k + 1 && node->right->classes.hi == node->classes.hi,
            "right child range mismatch");
    return node;
}

} // namespace

std::string dataset_hash(const Dataset& ds) {
    Fnv1a hash;
    const std::int64_t header[2] = {ds.num_classes, ds.feature_dim};
    hash.feed(header, sizeof(header));
    char buf[64];
    for (const Sample& s : ds.samples) {
        hash.feed_str(s.id);
        hash.feed("\x1f", 1);
        const std::int64_t g = s.grade;
        hash.feed(&g, sizeof(g));
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            hash.feed(buf, std::char_traits<char>::length(buf));
        }
        hash.feed("\x1e", 1);
    }
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(hash.h));
    return buf;
}

json binary_model_to_json(const BinaryModel& m) {
    return json{{"weights", m.weights}, {"bias", m.bias}, {"meta", meta_to_json(m.meta)}};
}

BinaryModel binary_model_from_json(const json& j) {
    BinaryModel m;
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.meta = meta_from_json(j.at("meta"));
    check_finite_weights(m.weights, m.bias);
    return m;
}

json tree_to_json(const TournamentTree& tree) {
    json j;
    j["schema_version"] = SCHEMA_VERSION;
    j["kind"] = "tournament";
    j["strategy"] = strategy_name(tree.strategy);
    j["num_classes"] = tree.num_classes;
    j["feature_dim"] = tree.feature_dim;
    j["root"] = node_to_json(*tree.root);
    return j;
}

TournamentTree tree_from_json(const json& j) {
    require(j.at("kind").get<std::string>() == "tournament", "kind is not tournament");
    TournamentTree tree;
    tree.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    tree.num_classes = j.at("num_classes").get<int>();
    tree.feature_dim = j.at("feature_dim").get<int>();
    require(tree.num_classes >= 2, "num_classes must be >= 2");
    tree.root = node_from_json(j.at("root"));
    require(tree.root->classes.lo == 1 && tree.root->classes.hi == tree.num_classes,
            "root range must cover every grade");
    return tree;
}

json node_records_to_json(const std::vector<NodeBuildRecord>& records) {
    json nodes = json::array();
    for (const NodeBuildRecord& rec : records) {
        json cands = json::array();
        for (const CandidateEval& c : rec.candidates) {
            json cj{{"k", c.k},
                    {"trainset_fallback", c.trainset_fallback},
                    {"skipped", c.skipped}};
            cj["value"] = c.value ? json(*c.value) : json(nullptr);
            cands.push_back(std::move(cj));
        }
        nodes.push_back(json{{"classes", {rec.classes.lo, rec.classes.hi}},
                             {"k", rec.k},
                             {"forced", rec.forced},
                             {"fallback_used", rec.fallback_used},
                             {"degenerate_model", rec.degenerate_model},
                             {"candidates", std::move(cands)}});
    }
    return nodes;
}

json build_meta_to_json(const TournamentTree& tree) {
    return json{{"schema_version", SCHEMA_VERSION},
                {"strategy", strategy_name(tree.strategy)},
                {"nodes", node_records_to_json(tree.build_meta)},
                {"warnings", tree.warnings}};
}

json model_to_json(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TournamentTree>) {
                return tree_to_json(m);
            } else if constexpr (std::is_same_v<T, RankEnsemble>) {
                json models = json::array();
                for (const BinaryModel& bm : m.models) models.push_back(binary_model_to_json(bm));
                return json{{"schema_version", SCHEMA_VERSION},
                            {"kind", "rank"},
                            {"num_classes", m.num_classes},
                            {"feature_dim", m.feature_dim},
                            {"models", std::move(models)}};
            } else if constexpr (std::is_same_v<T, RegressionModel>) {
                return json{{"schema_version", SCHEMA_VERSION},
                            {"kind", "linear"},
                            {"num_classes", m.num_classes},
                            {"weights", m.weights},
                            {"bias", m.bias},
                            {"meta", meta_to_json(m.meta)}};
            } else {
                return json{{"schema_version", SCHEMA_VERSION},
                            {"kind", "multiclass"},
                            {"weights", m.weights},
                            {"biases", m.biases},
                            {"meta", meta_to_json(m.meta)}};
            }
        },
        model);
}

AnyModel model_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tournament") return tree_from_json(j);
    if (kind == "rank") {
        RankEnsemble e;
        e.num_classes = j.at("num_classes").get<int>();
        e.feature_dim = j.at("feature_dim").get<int>();
        for (const json& mj : j.at("models")) e.models.push_back(binary_model_from_json(mj));
        require(static_cast<int>(e.models.size()) == e.num_classes - 1,
                "rank ensemble must hold num_classes-1 models");
        return e;
    }
    if (kind == "linear") {
        RegressionModel m;
        m.num_classes = j.at("num_classes").get<int>();
        m.weights = j.at("weights").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
        m.meta = meta_from_json(j.at("meta"));
        check_finite_weights(m.weights, m.bias);
        require(m.num_classes >= 2, "num_classes must be >= 2");
        return m;
    }
    if (kind == "multiclass") {
        MulticlassModel m;
        m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        m.biases = j.at("biases").get<std::vector<double>>();
        m.meta = meta_from_json(j.at("meta"));
        require(!m.weights.empty() && m.weights.size() == m.biases.size(),
                "weights/biases must align, one row per class");
        for (const auto& row : m.weights) {
            require(row.size() == m.weights[0].size(), "ragged weight rows");
            for (double v : row) require(std::isfinite(v), "non-finite weight");
        }
        return m;
    }
    throw ParseError("model json: unknown kind '" + kind + "'");
}

void save_model(const AnyModel& model, const std::string& path) {
    write_text_file(path, json_to_string(model_to_json(model)));
}

AnyModel load_model(const std::string& path) {
    return model_from_json(load_json_file(path));
}

json report_to_json(const EvalReport& r) {
    json per_exact = json::array(), per_near = json::array();
    for (int g = 0; g < r.num_classes; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        per_exact.push_back(r.per_grade_exact[gi] ? json(*r.per_grade_exact[gi]) : json(nullptr));
        per_near.push_back(r.per_grade_within_one[gi] ? json(*r.per_grade_within_one[gi]) : json(nullptr));
    }
    return json{{"schema_version", SCHEMA_VERSION},
                {"num_classes", r.num_classes},
                {"total", r.total},
                {"grade_counts", r.grade_counts},
                {"per_grade_exact", std::move(per_exact)},
                {"per_grade_within_one", std::move(per_near)},
                {"confusion", r.confusion},
                {"average_exact", r.average_exact},
                {"average_within_one", r.average_within_one}};
}

EvalReport report_from_json(const json& j) {
    EvalReport r;
    r.num_classes = j.at("num_classes").get<int>();
    r.total = j.at("total").get<std::size_t>();
    r.grade_counts = j.at("grade_counts").get<std::vector<int>>();
    for (const json& v : j.at("per_grade_exact"))
        r.per_grade_exact.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    for (const json& v : j.at("per_grade_within_one"))
        r.per_grade_within_one.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    r.confusion = j.at("confusion").get<std::vector<std::vector<int>>>();
    r.average_exact = j.at("average_exact").get<double>();
    r.average_within_one = j.at("average_within_one").get<double>();
    return r;
}

std::string json_to_string(const json& j) {
    return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ParseError("write failed for '" + path + "'");
}

json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace tourank
