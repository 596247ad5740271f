#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace logprose {

// Where a row came from. Synthetic rows record the two original minority rows
// they interpolate and the mixing weight.
struct Provenance {
    bool synthetic = false;
    std::size_t parent = 0;
    std::size_t neighbor = 0;
    double lambda = 0.0;
};

// Label 1 = adequate, 0 = inadequate.
struct Dataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::vector<Provenance> provenance;
    std::string aspect;

    std::size_t size() const { return labels.size(); }
    std::size_t dimension() const { return features.empty() ? 0 : features.front().size(); }
    std::size_t count(int label) const;

    void push_back(std::vector<double> x, int label, Provenance origin = {});
    Dataset subset(std::span<const std::size_t> rows) const;

    // Throws BadInput on ragged rows, non-binary labels or non-finite values.
    void validate() const;
};

struct AdasynParams {
    std::size_t k = 5;
    double beta = 1.0;
    double d_threshold = 1.0;
    std::uint64_t seed = 1;
    bool exact_total = true;  // largest-remainder redistribution to hit G exactly
};

struct AdasynResult {
    Dataset data;
    std::size_t generated = 0;
    std::size_t target = 0;  // G
    std::vector<std::string> warnings;
};

// Adaptive synthetic oversampling of the minority class. Original rows keep
// their order; synthetic rows are appended. Throws DegenerateClass when the
// minority class has fewer than two rows.
AdasynResult adasyn(const Dataset& data, const AdasynParams& params);

struct Prediction {
    int label = 0;
    double score = 0.0;  // estimated P(label = 1)
};

struct TreeParams {
    std::size_t max_depth = 32;
    std::size_t min_samples_split = 2;
    std::size_t feature_subsample = 0;  // 0 = all features at every split
    std::uint64_t seed = 1;
};

struct TreeNode {
    // Internal nodes have left/right >= 0; leaves have left = right = -1.
    std::size_t feature = 0;
    double threshold = 0.0;
    std::int64_t left = -1;
    std::int64_t right = -1;
    std::array<std::size_t, 2> counts{};
    int label = 0;

    bool is_leaf() const { return left < 0; }
};

struct TreeModel {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    TreeParams params;
    std::size_t dimension = 0;

    std::size_t depth() const;
    const TreeNode& leaf_for(std::span<const double> x) const;
};

// CART with Gini impurity; ties go to the lower feature index, then the lower
// threshold. Throws EmptyDataset.
TreeModel train_tree(const Dataset& data, const TreeParams& params);

struct ForestParams {
    std::size_t n_trees = 100;
    std::size_t max_depth = 32;
    std::size_t min_samples_split = 2;
    std::size_t feature_subsample = 0;  // 0 = ceil(sqrt(d))
    bool bootstrap = true;
    std::uint64_t base_seed = 1;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct ForestModel {
    std::vector<TreeModel> trees;
    ForestParams params;
    std::size_t feature_subsample = 0;  // resolved value
    std::size_t dimension = 0;
};

// Tree i uses seed base_seed + i, so results do not depend on scheduling.
ForestModel train_forest(const Dataset& data, const ForestParams& params);

struct LogisticParams {
    double learning_rate = 0.5;
    std::size_t epochs = 2000;
    double l2 = 1e-4;
    double tolerance = 1e-9;
    bool standardize = true;
};

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> mean;   // standardization, applied before weights
    std::vector<double> scale;
    LogisticParams params;
    std::size_t epochs_run = 0;
    double final_loss = 0.0;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> grad_weights;
    double grad_bias = 0.0;
};

// Mean binary cross-entropy + l2 * ||w||^2 and its analytic gradient, on the
// features exactly as given (no standardization).
LossGradient logistic_loss_gradient(std::span<const double> weights, double bias, const Dataset& data, double l2);

LogisticModel train_logistic(const Dataset& data, const LogisticParams& params);

enum class ModelKind { dt, rf, lr };
std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

using Model = std::variant<TreeModel, ForestModel, LogisticModel>;

ModelKind kind_of(const Model& model);
std::size_t dimension_of(const Model& model);

// Tree: leaf class-1 fraction, label from the leaf majority (tie -> 0).
// Forest: mean tree score, label by majority vote (tie -> 0).
// Logistic: sigmoid, label = score >= 0.5.
// Throws DimensionMismatch.
Prediction predict(const Model& model, std::span<const double> x);

struct ModelSpec {
    ModelKind kind = ModelKind::rf;
    TreeParams tree;
    ForestParams forest;
    LogisticParams logistic;
};

// Trains the requested kind; seed overrides the tree/forest seed.
Model train_model(const Dataset& data, const ModelSpec& spec, std::uint64_t seed);

nlohmann::ordered_json model_to_json(const Model& model, const std::string& aspect,
                                     const std::string& embedding_ref);

struct LoadedModel {
    Model model;
    std::string aspect;
    std::string embedding_ref;
};

LoadedModel model_from_json(const nlohmann::json& j);

} // namespace logprose
