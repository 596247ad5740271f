#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "logprose/learn.hpp"
#include "logprose/rules.hpp"

namespace logprose {

// Class 1 is the positive class.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fn + fp + tn; }
    void add(int actual, int predicted);
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    // The same predictions viewed with class 0 as positive.
    ConfusionMatrix flipped() const { return {tn, fp, fn, tp}; }
};

// (tp/(tp+fn) + tn/(tn+fp)) / 2. Throws UndefinedMetric if a class is absent.
double balanced_accuracy(const ConfusionMatrix& cm);

enum class PositiveClass { adequate = 1, inadequate = 0 };

struct PrecisionRecallF1 {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // Set when the value is 0 only because its denominator was 0.
    bool precision_undefined = false;
    bool recall_undefined = false;
    bool f1_undefined = false;
};

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm, PositiveClass positive = PositiveClass::adequate);

struct FoldPlan {
    std::size_t k = 0;
    std::vector<std::size_t> assignment;  // row -> fold id
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    std::vector<std::size_t> test_rows(std::size_t fold) const;
    std::vector<std::size_t> train_rows(std::size_t fold) const;
};

// Per class: seeded shuffle, then round-robin dealing that continues across
// classes. Throws BadK.
FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// Cohen's kappa over an arbitrary label alphabet. Throws LengthMismatch or
// UndefinedMetric (chance agreement of 1 with imperfect observed agreement).
double cohen_kappa(std::span<const std::string> a, std::span<const std::string> b);
double cohen_kappa(std::span<const int> a, std::span<const int> b);
// Square agreement matrix: rows = rater A, columns = rater B.
double cohen_kappa(const std::vector<std::vector<std::size_t>>& agreement);

struct SampleSizeParams {
    std::uint64_t population = 1;
    double confidence = 0.95;
    double margin = 0.05;
    double proportion = 0.5;
    std::optional<double> z;  // overrides the value derived from confidence
};

// Two-sided critical value; the conventional table value for 90/95/99 %.
double z_for_confidence(double confidence);

// Cochran's n0 = z^2 p (1-p) / e^2 with finite-population correction,
// rounded up. Throws BadInput when the parameters are out of range.
std::uint64_t sample_size(const SampleSizeParams& params);

using Predictor = std::function<Prediction(std::span<const double>)>;
using Trainer = std::function<Predictor(const Dataset& train, std::uint64_t seed)>;
using FoldObserver = std::function<void(std::size_t fold, const Dataset& train, const Dataset& test)>;

Trainer make_trainer(const ModelSpec& spec);
Trainer constant_trainer(int label);

struct FoldResult {
    std::size_t fold = 0;
    ConfusionMatrix confusion;
    std::optional<double> balanced_accuracy;  // empty when a class is absent
    std::size_t train_rows = 0;
    std::size_t synthetic_rows = 0;
};

struct MetricSummary {
    double balanced_accuracy = 0.0;
    PrecisionRecallF1 adequate;
    PrecisionRecallF1 inadequate;
};

struct CrossValidationResult {
    std::string model;
    std::string aspect;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<FoldResult> folds;
    MetricSummary fold_mean;  // averaged over folds where defined
    MetricSummary pooled;     // from the summed confusion matrix
    ConfusionMatrix pooled_confusion;
    std::vector<std::string> warnings;
};

struct CrossValidationOptions {
    std::size_t k = 10;
    std::uint64_t seed = 1;
    std::optional<AdasynParams> oversampling;  // applied to training folds only
    FoldObserver observer;
};

// Stratified k-fold CV. Input rows must not be synthetic. Test folds only
// ever contain input rows.
CrossValidationResult cross_validate(const Dataset& data, const Trainer& trainer,
                                     const CrossValidationOptions& options, const std::string& model_name = "model");

struct EvalReport {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> models;
    std::vector<std::string> aspects;
    std::vector<CrossValidationResult> results;  // one per (model, aspect)

    const CrossValidationResult* find(const std::string& model, const std::string& aspect) const;
};

// Balanced-accuracy table per model and precision/recall/F1 per positive
// class, each with fold-mean and pooled variants.
nlohmann::ordered_json to_json(const EvalReport& report);
std::string render_text(const EvalReport& report);

struct LengthBin {
    std::string label;
    std::size_t min_words = 0;
    std::size_t max_words = 0;  // inclusive; SIZE_MAX for open bins
};

std::vector<LengthBin> default_length_bins();

struct LengthRow {
    std::size_t word_count = 0;
    AspectVerdict verdict;
};

struct LengthStat {
    LengthBin bin;
    std::size_t count = 0;
    double adequate_pct = 0.0;
    double inadequate_structure_pct = 0.0;
    double inadequate_information_pct = 0.0;
    double inadequate_wording_pct = 0.0;
};

// Bins with no rows are omitted.
std::vector<LengthStat> length_stats(std::span<const LengthRow> rows,
                                     const std::vector<LengthBin>& bins = default_length_bins());

nlohmann::ordered_json to_json(const std::vector<LengthStat>& table);
std::string render_text(const std::vector<LengthStat>& table);

} // namespace logprose
