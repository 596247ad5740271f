#include "logprose/learn.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "logprose/errors.hpp"
#include "logprose/random.hpp"

namespace logprose {

namespace {

constexpr int kModelFormatVersion = 1;

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

// Indices of the k nearest candidates to `from` (excluding itself), nearest
// first, distance ties broken by index.
std::vector<std::size_t> nearest(const Dataset& data, std::size_t from, const std::vector<std::size_t>& candidates,
                                 std::size_t k) {
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (auto c : candidates) {
        if (c == from) continue;
        scored.emplace_back(squared_distance(data.features[from], data.features[c]), c);
    }
    k = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(scored[i].second);
    return out;
}

double gini(std::size_t n0, std::size_t n1) {
    const double n = static_cast<double>(n0 + n1);
    if (n == 0) return 0.0;
    const double p0 = static_cast<double>(n0) / n;
    const double p1 = static_cast<double>(n1) / n;
    return 1.0 - p0 * p0 - p1 * p1;
}

int majority(const std::array<std::size_t, 2>& counts) { return counts[1] > counts[0] ? 1 : 0; }

double sigmoid(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_dimension(std::size_t expected, std::size_t got) {
    if (expected != got) {
        throw DimensionMismatch("model expects " + std::to_string(expected) + " features, got " + std::to_string(got));
    }
}

Prediction predict_tree(const TreeModel& tree, std::span<const double> x) {
    const auto& leaf = tree.leaf_for(x);
    const auto total = leaf.counts[0] + leaf.counts[1];
    const double score = total == 0 ? 0.0 : static_cast<double>(leaf.counts[1]) / static_cast<double>(total);
    return {leaf.label, score};
}

nlohmann::ordered_json nodes_to_json(const TreeModel& tree) {
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : tree.nodes) {
        nlohmann::ordered_json j;
        j["feature"] = n.feature;
        j["threshold"] = n.threshold;
        j["left"] = n.left;
        j["right"] = n.right;
        j["counts"] = {n.counts[0], n.counts[1]};
        j["label"] = n.label;
        nodes.push_back(std::move(j));
    }
    return nodes;
}

std::vector<TreeNode> nodes_from_json(const nlohmann::json& j, std::size_t dimension) {
    std::vector<TreeNode> nodes;
    for (const auto& n : j) {
        TreeNode node;
        node.feature = n.at("feature").get<std::size_t>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<std::int64_t>();
        node.right = n.at("right").get<std::int64_t>();
        node.counts = {n.at("counts").at(0).get<std::size_t>(), n.at("counts").at(1).get<std::size_t>()};
        node.label = n.at("label").get<int>();
        nodes.push_back(node);
    }
    const auto count = static_cast<std::int64_t>(nodes.size());
    if (nodes.empty()) throw ModelFormatError("tree has no nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        if (n.is_leaf()) continue;
        const auto self = static_cast<std::int64_t>(i);
        if (n.left <= self || n.right <= self || n.left >= count || n.right >= count || n.feature >= dimension) {
            throw ModelFormatError("tree node " + std::to_string(i) + " is malformed");
        }
    }
    return nodes;
}

nlohmann::ordered_json tree_params_json(const TreeParams& p) {
    return {{"max_depth", p.max_depth},
            {"min_samples_split", p.min_samples_split},
            {"feature_subsample", p.feature_subsample},
            {"seed", p.seed}};
}

TreeParams tree_params_from(const nlohmann::json& j) {
    TreeParams p;
    p.max_depth = j.at("max_depth").get<std::size_t>();
    p.min_samples_split = j.at("min_samples_split").get<std::size_t>();
    p.feature_subsample = j.at("feature_subsample").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

} // namespace

std::size_t Dataset::count(int label) const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

void Dataset::push_back(std::vector<double> x, int label, Provenance origin) {
    features.push_back(std::move(x));
    labels.push_back(label);
    provenance.push_back(origin);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
    Dataset out;
    out.aspect = aspect;
    out.features.reserve(rows.size());
    out.labels.reserve(rows.size());
    out.provenance.reserve(rows.size());
    for (auto r : rows) {
        out.features.push_back(features.at(r));
        out.labels.push_back(labels.at(r));
        out.provenance.push_back(provenance.empty() ? Provenance{} : provenance.at(r));
    }
    return out;
}

void Dataset::validate() const {
    if (features.size() != labels.size()) throw BadInput("feature and label counts differ");
    if (!provenance.empty() && provenance.size() != labels.size()) throw BadInput("provenance count differs");
    const auto d = dimension();
    for (std::size_t i = 0; i < size(); ++i) {
        if (features[i].size() != d) throw BadInput("row " + std::to_string(i) + " has the wrong dimension");
        if (labels[i] != 0 && labels[i] != 1) throw BadInput("row " + std::to_string(i) + " has a non-binary label");
        for (double x : features[i]) {
            if (!std::isfinite(x)) throw BadInput("row " + std::to_string(i) + " has a non-finite value");
        }
    }
}

AdasynResult adasyn(const Dataset& data, const AdasynParams& params) {
    data.validate();
    if (params.k == 0) throw BadInput("ADASYN k must be at least 1");
    if (!(params.beta >= 0.0 && params.beta <= 1.0)) throw BadInput("ADASYN beta must lie in [0, 1]");

    AdasynResult result;
    result.data = data;
    if (result.data.provenance.empty()) result.data.provenance.assign(data.size(), Provenance{});

    const auto n0 = data.count(0);
    const auto n1 = data.count(1);
    if (n0 == 0 || n1 == 0) throw DegenerateClass("ADASYN needs both classes present");
    const int minority = n1 < n0 ? 1 : 0;
    const auto m_s = std::min(n0, n1);
    const auto m_l = std::max(n0, n1);
    if (m_s < 2) throw DegenerateClass("minority class has fewer than two rows");
    if (m_s == m_l) return result;
    if (static_cast<double>(m_s) / static_cast<double>(m_l) >= params.d_threshold) return result;

    const auto G = static_cast<std::size_t>(std::llround(static_cast<double>(m_l - m_s) * params.beta));
    result.target = G;
    if (G == 0) return result;

    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    std::vector<std::size_t> minority_rows;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.labels[i] == minority) minority_rows.push_back(i);
    }

    const auto k_all = std::min(params.k, data.size() - 1);
    const auto k_min = std::min(params.k, m_s - 1);
    if (k_all < params.k || k_min < params.k) {
        result.warnings.push_back("ADASYN k reduced from " + std::to_string(params.k) + " to " +
                                  std::to_string(k_min) + " minority neighbors (" + std::to_string(k_all) +
                                  " overall)");
    }

    std::vector<double> r(m_s);
    std::vector<std::vector<std::size_t>> minority_neighbors(m_s);
    double r_sum = 0;
    for (std::size_t i = 0; i < m_s; ++i) {
        const auto row = minority_rows[i];
        const auto nn = nearest(data, row, all, k_all);
        const auto majority_count = std::count_if(nn.begin(), nn.end(), [&](auto j) { return data.labels[j] != minority; });
        r[i] = static_cast<double>(majority_count) / static_cast<double>(k_all);
        r_sum += r[i];
        minority_neighbors[i] = nearest(data, row, minority_rows, k_min);
    }

    std::vector<double> share(m_s);
    for (std::size_t i = 0; i < m_s; ++i) {
        share[i] = r_sum > 0 ? r[i] / r_sum * static_cast<double>(G) : static_cast<double>(G) / static_cast<double>(m_s);
    }

    std::vector<std::size_t> g(m_s);
    if (params.exact_total) {
        std::size_t assigned = 0;
        std::vector<std::pair<double, std::size_t>> remainders;
        for (std::size_t i = 0; i < m_s; ++i) {
            g[i] = static_cast<std::size_t>(std::floor(share[i]));
            assigned += g[i];
            remainders.emplace_back(share[i] - std::floor(share[i]), i);
        }
        std::stable_sort(remainders.begin(), remainders.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t j = 0; assigned < G && j < remainders.size(); ++j, ++assigned) ++g[remainders[j].second];
    } else {
        for (std::size_t i = 0; i < m_s; ++i) g[i] = static_cast<std::size_t>(std::llround(share[i]));
    }

    Rng rng(derive_seed(params.seed, "adasyn"));
    const auto d = data.dimension();
    for (std::size_t i = 0; i < m_s; ++i) {
        const auto parent = minority_rows[i];
        const auto& nn = minority_neighbors[i];
        for (std::size_t s = 0; s < g[i]; ++s) {
            const auto neighbor = nn[rng.below(nn.size())];
            const double lambda = rng.uniform();
            std::vector<double> x(d);
            for (std::size_t c = 0; c < d; ++c) {
                const double a = data.features[parent][c];
                x[c] = a + lambda * (data.features[neighbor][c] - a);
            }
            result.data.push_back(std::move(x), minority, Provenance{true, parent, neighbor, lambda});
            ++result.generated;
        }
    }
    return result;
}

std::size_t TreeModel::depth() const {
    if (nodes.empty()) return 0;
    std::vector<std::size_t> level(nodes.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        best = std::max(best, level[i]);
        if (!nodes[i].is_leaf()) {
            level[static_cast<std::size_t>(nodes[i].left)] = level[i] + 1;
            level[static_cast<std::size_t>(nodes[i].right)] = level[i] + 1;
        }
    }
    return best;
}

const TreeNode& TreeModel::leaf_for(std::span<const double> x) const {
    const TreeNode* node = &nodes.at(0);
    while (!node->is_leaf()) {
        node = &nodes[static_cast<std::size_t>(x[node->feature] <= node->threshold ? node->left : node->right)];
    }
    return *node;
}

TreeModel train_tree(const Dataset& data, const TreeParams& params) {
    if (data.size() == 0) throw EmptyDataset("cannot train a tree on an empty dataset");
    data.validate();

    TreeModel model;
    model.params = params;
    model.dimension = data.dimension();
    const auto d = model.dimension;
    const auto subsample = params.feature_subsample == 0 ? d : std::min(params.feature_subsample, d);
    Rng rng(derive_seed(params.seed, "tree.features"));

    struct Pending {
        std::size_t node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    model.nodes.emplace_back();
    std::vector<Pending> stack;
    std::vector<std::size_t> all(data.size());
    std::iota(all.begin(), all.end(), 0);
    stack.push_back({0, std::move(all), 0});

    std::vector<std::size_t> features(d);
    std::vector<std::pair<double, int>> column;

    while (!stack.empty()) {
        auto task = std::move(stack.back());
        stack.pop_back();
        std::array<std::size_t, 2> counts{};
        for (auto r : task.rows) ++counts[static_cast<std::size_t>(data.labels[r])];
        {
            auto& node = model.nodes[task.node];
            node.counts = counts;
            node.label = majority(counts);
        }
        const double parent_gini = gini(counts[0], counts[1]);
        const auto n = task.rows.size();
        if (task.depth >= params.max_depth || n < params.min_samples_split || parent_gini == 0.0) continue;

        std::iota(features.begin(), features.end(), 0);
        std::vector<std::size_t> candidates;
        if (subsample < d) {
            rng.shuffle(features.begin(), features.end());
            candidates.assign(features.begin(), features.begin() + static_cast<std::ptrdiff_t>(subsample));
            std::sort(candidates.begin(), candidates.end());
        } else {
            candidates = features;
        }

        double best_impurity = parent_gini;
        std::size_t best_feature = 0;
        double best_threshold = 0;
        bool found = false;
        for (auto f : candidates) {
            column.clear();
            for (auto r : task.rows) column.emplace_back(data.features[r][f], data.labels[r]);
            std::sort(column.begin(), column.end());
            std::array<std::size_t, 2> left{};
            for (std::size_t i = 0; i + 1 < n; ++i) {
                ++left[static_cast<std::size_t>(column[i].second)];
                const double a = column[i].first;
                const double b = column[i + 1].first;
                if (a == b) continue;
                const auto nl = i + 1;
                const auto nr = n - nl;
                const double impurity = (static_cast<double>(nl) * gini(left[0], left[1]) +
                                         static_cast<double>(nr) * gini(counts[0] - left[0], counts[1] - left[1])) /
                                        static_cast<double>(n);
                if (impurity < best_impurity - 1e-12) {
                    best_impurity = impurity;
                    best_feature = f;
                    double mid = a + (b - a) / 2.0;
                    if (!(mid < b)) mid = a;
                    best_threshold = mid;
                    found = true;
                }
            }
        }
        if (!found) continue;

        std::vector<std::size_t> left_rows, right_rows;
        for (auto r : task.rows) {
            (data.features[r][best_feature] <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        const auto left_id = model.nodes.size();
        model.nodes.emplace_back();
        model.nodes.emplace_back();
        auto& node = model.nodes[task.node];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = static_cast<std::int64_t>(left_id);
        node.right = static_cast<std::int64_t>(left_id + 1);
        // Right is pushed first so the left subtree is grown first.
        stack.push_back({left_id + 1, std::move(right_rows), task.depth + 1});
        stack.push_back({left_id, std::move(left_rows), task.depth + 1});
    }
    return model;
}

ForestModel train_forest(const Dataset& data, const ForestParams& params) {
    if (data.size() == 0) throw EmptyDataset("cannot train a forest on an empty dataset");
    if (params.n_trees == 0) throw BadInput("forest needs at least one tree");
    data.validate();

    ForestModel forest;
    forest.params = params;
    forest.dimension = data.dimension();
    const auto d = forest.dimension;
    forest.feature_subsample = params.feature_subsample == 0
                                   ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))))
                                   : std::min(params.feature_subsample, d);
    forest.feature_subsample = std::max<std::size_t>(forest.feature_subsample, 1);
    forest.trees.resize(params.n_trees);

    auto build = [&](std::size_t i) {
        TreeParams tp;
        tp.max_depth = params.max_depth;
        tp.min_samples_split = params.min_samples_split;
        tp.feature_subsample = forest.feature_subsample;
        tp.seed = params.base_seed + i;
        if (!params.bootstrap) {
            forest.trees[i] = train_tree(data, tp);
            return;
        }
        Rng rng(derive_seed(tp.seed, "forest.bootstrap"));
        std::vector<std::size_t> rows(data.size());
        for (auto& r : rows) r = rng.below(data.size());
        forest.trees[i] = train_tree(data.subset(rows), tp);
    };

    auto threads = params.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : params.threads;
    threads = std::min<std::size_t>(threads, params.n_trees);
    if (threads <= 1) {
        for (std::size_t i = 0; i < params.n_trees; ++i) build(i);
        return forest;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (auto i = next++; i < params.n_trees; i = next++) {
                try {
                    build(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return forest;
}

LossGradient logistic_loss_gradient(std::span<const double> weights, double bias, const Dataset& data, double l2) {
    LossGradient out;
    out.grad_weights.assign(weights.size(), 0.0);
    const auto n = data.size();
    if (n == 0) throw EmptyDataset("cannot evaluate logistic loss on an empty dataset");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& x = data.features[i];
        check_dimension(weights.size(), x.size());
        double z = bias;
        for (std::size_t k = 0; k < x.size(); ++k) z += weights[k] * x[k];
        const double y = data.labels[i];
        out.loss += y * softplus(-z) + (1 - y) * softplus(z);
        const double residual = sigmoid(z) - y;
        for (std::size_t k = 0; k < x.size(); ++k) out.grad_weights[k] += residual * x[k];
        out.grad_bias += residual;
    }
    const double inv = 1.0 / static_cast<double>(n);
    out.loss *= inv;
    out.grad_bias *= inv;
    double norm = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        out.grad_weights[k] = out.grad_weights[k] * inv + 2.0 * l2 * weights[k];
        norm += weights[k] * weights[k];
    }
    out.loss += l2 * norm;
    return out;
}

LogisticModel train_logistic(const Dataset& data, const LogisticParams& params) {
    if (data.size() == 0) throw EmptyDataset("cannot train logistic regression on an empty dataset");
    data.validate();
    const auto d = data.dimension();

    LogisticModel model;
    model.params = params;
    model.mean.assign(d, 0.0);
    model.scale.assign(d, 1.0);
    Dataset scaled = data;
    if (params.standardize) {
        const double n = static_cast<double>(data.size());
        for (const auto& x : data.features) {
            for (std::size_t k = 0; k < d; ++k) model.mean[k] += x[k] / n;
        }
        std::vector<double> var(d, 0.0);
        for (const auto& x : data.features) {
            for (std::size_t k = 0; k < d; ++k) var[k] += (x[k] - model.mean[k]) * (x[k] - model.mean[k]) / n;
        }
        for (std::size_t k = 0; k < d; ++k) model.scale[k] = var[k] > 1e-24 ? std::sqrt(var[k]) : 1.0;
        for (auto& x : scaled.features) {
            for (std::size_t k = 0; k < d; ++k) x[k] = (x[k] - model.mean[k]) / model.scale[k];
        }
    }

    model.weights.assign(d, 0.0);
    auto current = logistic_loss_gradient(model.weights, model.bias, scaled, params.l2);
    std::vector<double> trial(d);
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        // Proximal step for the ridge term, backtracking until the loss does
        // not increase.
        double step = params.learning_rate;
        LossGradient next;
        double trial_bias = 0;
        for (;;) {
            for (std::size_t k = 0; k < d; ++k) {
                const double data_grad = current.grad_weights[k] - 2 * params.l2 * model.weights[k];
                trial[k] = (model.weights[k] - step * data_grad) / (1 + 2 * step * params.l2);
            }
            trial_bias = model.bias - step * current.grad_bias;
            next = logistic_loss_gradient(trial, trial_bias, scaled, params.l2);
            if (next.loss <= current.loss || step < 1e-12) break;
            step /= 2;
        }
        const double improvement = current.loss - next.loss;
        model.weights = trial;
        model.bias = trial_bias;
        current = std::move(next);
        model.epochs_run = epoch + 1;
        if (improvement < params.tolerance) break;
    }
    model.final_loss = current.loss;
    return model;
}

std::string_view to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::dt: return "dt";
    case ModelKind::rf: return "rf";
    case ModelKind::lr: return "lr";
    }
    return "";
}

ModelKind parse_model_kind(std::string_view name) {
    std::string folded(name);
    for (auto& c : folded) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (folded == "dt") return ModelKind::dt;
    if (folded == "rf") return ModelKind::rf;
    if (folded == "lr") return ModelKind::lr;
    throw BadInput("unknown model kind '" + std::string(name) + "' (expected dt, rf or lr)");
}

ModelKind kind_of(const Model& model) {
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel>) return ModelKind::dt;
            else if constexpr (std::is_same_v<T, ForestModel>) return ModelKind::rf;
            else return ModelKind::lr;
        },
        model);
}

std::size_t dimension_of(const Model& model) {
    return std::visit(
        [](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogisticModel>) return m.weights.size();
            else return m.dimension;
        },
        model);
}

Prediction predict(const Model& model, std::span<const double> x) {
    check_dimension(dimension_of(model), x.size());
    return std::visit(
        [&](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                return predict_tree(m, x);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                std::size_t votes = 0;
                double score = 0;
                for (const auto& tree : m.trees) {
                    const auto p = predict_tree(tree, x);
                    votes += static_cast<std::size_t>(p.label);
                    score += p.score;
                }
                const auto n = m.trees.size();
                return {2 * votes > n ? 1 : 0, score / static_cast<double>(n)};
            } else {
                double z = m.bias;
                for (std::size_t k = 0; k < x.size(); ++k) z += m.weights[k] * (x[k] - m.mean[k]) / m.scale[k];
                const double s = sigmoid(z);
                return {s >= 0.5 ? 1 : 0, s};
            }
        },
        model);
}

Model train_model(const Dataset& data, const ModelSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
    case ModelKind::dt: {
        auto p = spec.tree;
        p.seed = seed;
        return train_tree(data, p);
    }
    case ModelKind::rf: {
        auto p = spec.forest;
        p.base_seed = seed;
        return train_forest(data, p);
    }
    case ModelKind::lr:
        return train_logistic(data, spec.logistic);
    }
    throw BadInput("unknown model kind");
}

nlohmann::ordered_json model_to_json(const Model& model, const std::string& aspect, const std::string& embedding_ref) {
    nlohmann::ordered_json j;
    j["version"] = kModelFormatVersion;
    j["kind"] = to_string(kind_of(model));
    j["aspect"] = aspect;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TreeModel>) {
                j["hyperparameters"] = tree_params_json(m.params);
                j["parameters"] = {{"dimension", m.dimension}, {"nodes", nodes_to_json(m)}};
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                j["hyperparameters"] = {{"n_trees", m.params.n_trees},
                                        {"max_depth", m.params.max_depth},
                                        {"min_samples_split", m.params.min_samples_split},
                                        {"feature_subsample", m.params.feature_subsample},
                                        {"bootstrap", m.params.bootstrap},
                                        {"base_seed", m.params.base_seed}};
                nlohmann::ordered_json trees = nlohmann::ordered_json::array();
                for (const auto& t : m.trees) {
                    trees.push_back({{"seed", t.params.seed}, {"nodes", nodes_to_json(t)}});
                }
                j["parameters"] = {{"dimension", m.dimension},
                                   {"feature_subsample", m.feature_subsample},
                                   {"trees", std::move(trees)}};
            } else {
                j["hyperparameters"] = {{"learning_rate", m.params.learning_rate},
                                        {"epochs", m.params.epochs},
                                        {"l2", m.params.l2},
                                        {"tolerance", m.params.tolerance},
                                        {"standardize", m.params.standardize}};
                j["parameters"] = {{"weights", m.weights}, {"bias", m.bias},
                                   {"mean", m.mean},       {"scale", m.scale},
                                   {"epochs_run", m.epochs_run}, {"final_loss", m.final_loss}};
            }
        },
        model);
    j["embedding_ref"] = embedding_ref;
    return j;
}

LoadedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw ModelFormatError("unsupported model version " + j.at("version").dump());
        }
        const auto kind = parse_model_kind(j.at("kind").get<std::string>());
        const auto& hp = j.at("hyperparameters");
        const auto& p = j.at("parameters");
        LoadedModel out{TreeModel{}, j.at("aspect").get<std::string>(), j.at("embedding_ref").get<std::string>()};
        switch (kind) {
        case ModelKind::dt: {
            TreeModel t;
            t.params = tree_params_from(hp);
            t.dimension = p.at("dimension").get<std::size_t>();
            t.nodes = nodes_from_json(p.at("nodes"), t.dimension);
            out.model = std::move(t);
            break;
        }
        case ModelKind::rf: {
            ForestModel f;
            f.params.n_trees = hp.at("n_trees").get<std::size_t>();
            f.params.max_depth = hp.at("max_depth").get<std::size_t>();
            f.params.min_samples_split = hp.at("min_samples_split").get<std::size_t>();
            f.params.feature_subsample = hp.at("feature_subsample").get<std::size_t>();
            f.params.bootstrap = hp.at("bootstrap").get<bool>();
            f.params.base_seed = hp.at("base_seed").get<std::uint64_t>();
            f.dimension = p.at("dimension").get<std::size_t>();
            f.feature_subsample = p.at("feature_subsample").get<std::size_t>();
            for (const auto& tj : p.at("trees")) {
                TreeModel t;
                t.params = {f.params.max_depth, f.params.min_samples_split, f.feature_subsample,
                            tj.at("seed").get<std::uint64_t>()};
                t.dimension = f.dimension;
                t.nodes = nodes_from_json(tj.at("nodes"), f.dimension);
                f.trees.push_back(std::move(t));
            }
            if (f.trees.empty()) throw ModelFormatError("forest has no trees");
            out.model = std::move(f);
            break;
        }
        case ModelKind::lr: {
            LogisticModel m;
            m.params.learning_rate = hp.at("learning_rate").get<double>();
            m.params.epochs = hp.at("epochs").get<std::size_t>();
            m.params.l2 = hp.at("l2").get<double>();
            m.params.tolerance = hp.at("tolerance").get<double>();
            m.params.standardize = hp.at("standardize").get<bool>();
            m.weights = p.at("weights").get<std::vector<double>>();
            m.bias = p.at("bias").get<double>();
            m.mean = p.at("mean").get<std::vector<double>>();
            m.scale = p.at("scale").get<std::vector<double>>();
            m.epochs_run = p.at("epochs_run").get<std::size_t>();
            m.final_loss = p.at("final_loss").get<double>();
            if (m.mean.size() != m.weights.size() || m.scale.size() != m.weights.size()) {
                throw ModelFormatError("logistic standardization vectors do not match weights");
            }
            out.model = std::move(m);
            break;
        }
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("invalid model file: ") + e.what());
    } catch (const BadInput& e) {
        throw ModelFormatError(e.what());
    }
}

} // namespace logprose
