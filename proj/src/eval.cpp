#include "logprose/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "logprose/errors.hpp"
#include "logprose/random.hpp"

namespace logprose {

namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
    undefined = den == 0;
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::ordered_json prf_json(const PrecisionRecallF1& m) {
    nlohmann::ordered_json j;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    if (m.precision_undefined || m.recall_undefined || m.f1_undefined) {
        j["undefined"] = {{"precision", m.precision_undefined},
                          {"recall", m.recall_undefined},
                          {"f1", m.f1_undefined}};
    }
    return j;
}

nlohmann::ordered_json confusion_json(const ConfusionMatrix& cm) {
    return {{"tp", cm.tp}, {"fn", cm.fn}, {"fp", cm.fp}, {"tn", cm.tn}};
}

std::string pct(double x) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(1) << x * 100.0;
    return out.str();
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.insert(0, width - s.size(), ' ');
    return s;
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

} // namespace

void ConfusionMatrix::add(int actual, int predicted) {
    if (actual == 1) {
        ++(predicted == 1 ? tp : fn);
    } else {
        ++(predicted == 1 ? fp : tn);
    }
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    tp += other.tp;
    fn += other.fn;
    fp += other.fp;
    tn += other.tn;
    return *this;
}

double balanced_accuracy(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0 || cm.tn + cm.fp == 0) {
        throw UndefinedMetric("balanced accuracy needs both classes in the test set");
    }
    const double tpr = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    const double tnr = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    return (tpr + tnr) / 2.0;
}

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm, PositiveClass positive) {
    const auto m = positive == PositiveClass::adequate ? cm : cm.flipped();
    PrecisionRecallF1 out;
    out.precision = ratio(m.tp, m.tp + m.fp, out.precision_undefined);
    out.recall = ratio(m.tp, m.tp + m.fn, out.recall_undefined);
    const double sum = out.precision + out.recall;
    out.f1_undefined = sum == 0.0;
    out.f1 = out.f1_undefined ? 0.0 : 2.0 * out.precision * out.recall / sum;
    return out;
}

std::vector<std::size_t> FoldPlan::test_rows(std::size_t fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] == fold) rows.push_back(i);
    }
    return rows;
}

std::vector<std::size_t> FoldPlan::train_rows(std::size_t fold) const {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] != fold) rows.push_back(i);
    }
    return rows;
}

FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw BadK("k must be at least 2, got " + std::to_string(k));
    if (k > labels.size()) {
        throw BadK("k = " + std::to_string(k) + " exceeds the " + std::to_string(labels.size()) + " rows");
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.assignment.assign(labels.size(), 0);

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);

    std::size_t offset = 0;
    for (auto& [label, rows] : by_class) {
        Rng rng(derive_seed(seed, "folds", static_cast<std::uint64_t>(label)));
        rng.shuffle(rows.begin(), rows.end());
        for (std::size_t i = 0; i < rows.size(); ++i) plan.assignment[rows[i]] = (offset + i) % k;
        offset = (offset + rows.size()) % k;
        if (rows.size() < k) {
            plan.warnings.push_back("class " + std::to_string(label) + " has " + std::to_string(rows.size()) +
                                    " rows for " + std::to_string(k) + " folds; some folds lack it");
        }
    }
    if (by_class.size() < 2) plan.warnings.push_back("only one class present");
    return plan;
}

double cohen_kappa(const std::vector<std::vector<std::size_t>>& agreement) {
    const auto n = agreement.size();
    std::size_t total = 0;
    std::vector<double> rows(n, 0.0), cols(n, 0.0);
    double diagonal = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (agreement[i].size() != n) throw BadInput("agreement matrix must be square");
        for (std::size_t j = 0; j < n; ++j) {
            const auto c = agreement[i][j];
            total += c;
            rows[i] += static_cast<double>(c);
            cols[j] += static_cast<double>(c);
            if (i == j) diagonal += static_cast<double>(c);
        }
    }
    if (total == 0) throw BadInput("agreement matrix is empty");
    const double t = static_cast<double>(total);
    const double p_o = diagonal / t;
    double p_e = 0;
    for (std::size_t i = 0; i < n; ++i) p_e += (rows[i] / t) * (cols[i] / t);
    if (std::abs(1.0 - p_e) < 1e-15) {
        if (p_o == 1.0) return 1.0;
        throw UndefinedMetric("chance agreement is 1; kappa is undefined");
    }
    return (p_o - p_e) / (1.0 - p_e);
}

double cohen_kappa(std::span<const std::string> a, std::span<const std::string> b) {
    if (a.size() != b.size()) {
        throw LengthMismatch("label lists differ in length (" + std::to_string(a.size()) + " vs " +
                             std::to_string(b.size()) + ")");
    }
    if (a.empty()) throw BadInput("kappa needs at least one label pair");
    std::map<std::string, std::size_t> alphabet;
    for (const auto& x : a) alphabet.emplace(x, 0);
    for (const auto& x : b) alphabet.emplace(x, 0);
    std::size_t next = 0;
    for (auto& [_, index] : alphabet) index = next++;
    std::vector<std::vector<std::size_t>> m(alphabet.size(), std::vector<std::size_t>(alphabet.size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i) ++m[alphabet[a[i]]][alphabet[b[i]]];
    return cohen_kappa(m);
}

double cohen_kappa(std::span<const int> a, std::span<const int> b) {
    std::vector<std::string> sa, sb;
    for (int x : a) sa.push_back(std::to_string(x));
    for (int x : b) sb.push_back(std::to_string(x));
    return cohen_kappa(std::span<const std::string>(sa), std::span<const std::string>(sb));
}

double z_for_confidence(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw BadInput("confidence must lie in (0, 1)");
    if (std::abs(confidence - 0.90) < 1e-12) return 1.645;
    if (std::abs(confidence - 0.95) < 1e-12) return 1.96;
    if (std::abs(confidence - 0.99) < 1e-12) return 2.576;
    const boost::math::normal_distribution<double> standard;
    return boost::math::quantile(standard, 1.0 - (1.0 - confidence) / 2.0);
}

std::uint64_t sample_size(const SampleSizeParams& params) {
    if (params.population < 1) throw BadInput("population must be at least 1");
    if (!(params.margin > 0.0 && params.margin < 1.0)) throw BadInput("margin must lie in (0, 1)");
    if (!(params.proportion > 0.0 && params.proportion < 1.0)) throw BadInput("proportion must lie in (0, 1)");
    const double z = params.z ? *params.z : z_for_confidence(params.confidence);
    if (!(z > 0.0)) throw BadInput("z must be positive");
    const double n0 = z * z * params.proportion * (1.0 - params.proportion) / (params.margin * params.margin);
    const double n = n0 / (1.0 + (n0 - 1.0) / static_cast<double>(params.population));
    // Guard against n landing a rounding error above an integer.
    return static_cast<std::uint64_t>(std::ceil(n - 1e-9));
}

Trainer make_trainer(const ModelSpec& spec) {
    return [spec](const Dataset& train, std::uint64_t seed) -> Predictor {
        auto model = std::make_shared<Model>(train_model(train, spec, seed));
        return [model](std::span<const double> x) { return predict(*model, x); };
    };
}

Trainer constant_trainer(int label) {
    return [label](const Dataset&, std::uint64_t) -> Predictor {
        return [label](std::span<const double>) { return Prediction{label, static_cast<double>(label)}; };
    };
}

CrossValidationResult cross_validate(const Dataset& data, const Trainer& trainer,
                                     const CrossValidationOptions& options, const std::string& model_name) {
    data.validate();
    for (std::size_t i = 0; i < data.provenance.size(); ++i) {
        if (data.provenance[i].synthetic) {
            throw BadInput("cross-validation input row " + std::to_string(i) + " is synthetic");
        }
    }
    const auto plan = stratified_folds(data.labels, options.k, derive_seed(options.seed, "cv.folds"));

    CrossValidationResult result;
    result.model = model_name;
    result.aspect = data.aspect;
    result.k = options.k;
    result.seed = options.seed;
    result.warnings = plan.warnings;

    for (std::size_t fold = 0; fold < options.k; ++fold) {
        const auto train_rows = plan.train_rows(fold);
        const auto test_rows = plan.test_rows(fold);
        auto train = data.subset(train_rows);
        const auto test = data.subset(test_rows);

        FoldResult fr;
        fr.fold = fold;
        fr.train_rows = train.size();
        if (options.oversampling) {
            auto p = *options.oversampling;
            p.seed = derive_seed(options.seed, "cv.adasyn", fold);
            try {
                auto balanced = adasyn(train, p);
                for (const auto& w : balanced.warnings) result.warnings.push_back("fold " + std::to_string(fold) + ": " + w);
                fr.synthetic_rows = balanced.generated;
                train = std::move(balanced.data);
            } catch (const DegenerateClass& e) {
                result.warnings.push_back("fold " + std::to_string(fold) + ": oversampling skipped: " + e.what());
            }
        }
        if (options.observer) options.observer(fold, train, test);

        const auto predictor = trainer(train, derive_seed(options.seed, "cv.model", fold));
        for (std::size_t i = 0; i < test.size(); ++i) {
            fr.confusion.add(test.labels[i], predictor(test.features[i]).label);
        }
        try {
            fr.balanced_accuracy = balanced_accuracy(fr.confusion);
        } catch (const UndefinedMetric&) {
            result.warnings.push_back("fold " + std::to_string(fold) +
                                      ": a class is absent from the test fold; balanced accuracy skipped");
        }
        result.pooled_confusion += fr.confusion;
        result.folds.push_back(fr);
    }

    double ba_sum = 0;
    std::size_t ba_n = 0;
    auto accumulate = [](PrecisionRecallF1& acc, const PrecisionRecallF1& m) {
        acc.precision += m.precision;
        acc.recall += m.recall;
        acc.f1 += m.f1;
        acc.precision_undefined |= m.precision_undefined;
        acc.recall_undefined |= m.recall_undefined;
        acc.f1_undefined |= m.f1_undefined;
    };
    for (const auto& fr : result.folds) {
        if (fr.balanced_accuracy) {
            ba_sum += *fr.balanced_accuracy;
            ++ba_n;
        }
        accumulate(result.fold_mean.adequate, precision_recall_f1(fr.confusion, PositiveClass::adequate));
        accumulate(result.fold_mean.inadequate, precision_recall_f1(fr.confusion, PositiveClass::inadequate));
    }
    const double folds = static_cast<double>(result.folds.size());
    for (auto* m : {&result.fold_mean.adequate, &result.fold_mean.inadequate}) {
        m->precision /= folds;
        m->recall /= folds;
        m->f1 /= folds;
    }
    result.fold_mean.balanced_accuracy = ba_n == 0 ? 0.0 : ba_sum / static_cast<double>(ba_n);
    if (ba_n == 0) result.warnings.push_back("balanced accuracy undefined on every fold");

    try {
        result.pooled.balanced_accuracy = balanced_accuracy(result.pooled_confusion);
    } catch (const UndefinedMetric&) {
        result.warnings.push_back("pooled balanced accuracy undefined: a class is absent");
    }
    result.pooled.adequate = precision_recall_f1(result.pooled_confusion, PositiveClass::adequate);
    result.pooled.inadequate = precision_recall_f1(result.pooled_confusion, PositiveClass::inadequate);
    return result;
}

const CrossValidationResult* EvalReport::find(const std::string& model, const std::string& aspect) const {
    for (const auto& r : results) {
        if (r.model == model && r.aspect == aspect) return &r;
    }
    return nullptr;
}

nlohmann::ordered_json to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["k"] = report.k;
    j["seed"] = report.seed;
    j["models"] = report.models;
    j["aspects"] = report.aspects;

    nlohmann::ordered_json table3 = nlohmann::ordered_json::array();
    for (const auto& model : report.models) {
        nlohmann::ordered_json row;
        row["model"] = model;
        for (const auto* variant : {"fold_mean", "pooled"}) {
            nlohmann::ordered_json cells;
            double sum = 0;
            std::size_t n = 0;
            for (const auto& aspect : report.aspects) {
                const auto* r = report.find(model, aspect);
                if (!r) continue;
                const double v = std::string(variant) == "fold_mean" ? r->fold_mean.balanced_accuracy
                                                                     : r->pooled.balanced_accuracy;
                cells[aspect] = v;
                sum += v;
                ++n;
            }
            cells["average"] = n == 0 ? 0.0 : sum / static_cast<double>(n);
            row[variant] = std::move(cells);
        }
        table3.push_back(std::move(row));
    }
    j["balanced_accuracy"] = std::move(table3);

    nlohmann::ordered_json table4 = nlohmann::ordered_json::array();
    for (const auto& r : report.results) {
        nlohmann::ordered_json row;
        row["model"] = r.model;
        row["aspect"] = r.aspect;
        row["adequate_positive"] = {{"fold_mean", prf_json(r.fold_mean.adequate)},
                                    {"pooled", prf_json(r.pooled.adequate)}};
        row["inadequate_positive"] = {{"fold_mean", prf_json(r.fold_mean.inadequate)},
                                      {"pooled", prf_json(r.pooled.inadequate)}};
        table4.push_back(std::move(row));
    }
    j["precision_recall_f1"] = std::move(table4);

    nlohmann::ordered_json runs = nlohmann::ordered_json::array();
    for (const auto& r : report.results) {
        nlohmann::ordered_json run;
        run["model"] = r.model;
        run["aspect"] = r.aspect;
        run["pooled_confusion"] = confusion_json(r.pooled_confusion);
        nlohmann::ordered_json folds = nlohmann::ordered_json::array();
        for (const auto& f : r.folds) {
            nlohmann::ordered_json fj;
            fj["fold"] = f.fold;
            fj["confusion"] = confusion_json(f.confusion);
            fj["balanced_accuracy"] = f.balanced_accuracy ? nlohmann::ordered_json(*f.balanced_accuracy) : nullptr;
            fj["train_rows"] = f.train_rows;
            fj["synthetic_rows"] = f.synthetic_rows;
            folds.push_back(std::move(fj));
        }
        run["folds"] = std::move(folds);
        run["warnings"] = r.warnings;
        runs.push_back(std::move(run));
    }
    j["runs"] = std::move(runs);
    return j;
}

std::string render_text(const EvalReport& report) {
    std::ostringstream out;
    out << "Balanced accuracy (%), " << report.k << "-fold stratified CV, seed " << report.seed << "\n";
    for (const auto* variant : {"fold-mean", "pooled"}) {
        out << "\n[" << variant << "]\n" << pad_right("model", 8);
        for (const auto& a : report.aspects) out << pad(a, 13);
        out << pad("average", 13) << "\n";
        for (const auto& model : report.models) {
            out << pad_right(model, 8);
            double sum = 0;
            std::size_t n = 0;
            for (const auto& a : report.aspects) {
                const auto* r = report.find(model, a);
                if (!r) {
                    out << pad("-", 13);
                    continue;
                }
                const double v = std::string(variant) == "pooled" ? r->pooled.balanced_accuracy
                                                                  : r->fold_mean.balanced_accuracy;
                out << pad(pct(v), 13);
                sum += v;
                ++n;
            }
            out << pad(n ? pct(sum / static_cast<double>(n)) : "-", 13) << "\n";
        }
    }

    out << "\nPrecision / recall / F1 (%), fold-mean\n";
    out << pad_right("model", 8) << pad_right("aspect", 13) << pad_right("positive", 12) << pad("P", 8) << pad("R", 8)
        << pad("F1", 8) << "\n";
    for (const auto& r : report.results) {
        for (const auto positive : {PositiveClass::adequate, PositiveClass::inadequate}) {
            const auto& m = positive == PositiveClass::adequate ? r.fold_mean.adequate : r.fold_mean.inadequate;
            out << pad_right(r.model, 8) << pad_right(r.aspect, 13)
                << pad_right(positive == PositiveClass::adequate ? "adequate" : "inadequate", 12) << pad(pct(m.precision), 8)
                << pad(pct(m.recall), 8) << pad(pct(m.f1), 8) << "\n";
        }
    }
    for (const auto& r : report.results) {
        for (const auto& w : r.warnings) out << "warning: " << r.model << "/" << r.aspect << ": " << w << "\n";
    }
    return out.str();
}

std::vector<LengthBin> default_length_bins() {
    constexpr auto open = std::numeric_limits<std::size_t>::max();
    return {{"<=2", 0, 2},     {"3-5", 3, 5},     {"6-10", 6, 10},   {"11-15", 11, 15},
            {"16-24", 16, 24}, {"25-34", 25, 34}, {">=35", 35, open}};
}

std::vector<LengthStat> length_stats(std::span<const LengthRow> rows, const std::vector<LengthBin>& bins) {
    struct Tally {
        std::size_t count = 0, adequate = 0, s = 0, i = 0, w = 0;
    };
    std::vector<Tally> tallies(bins.size());
    for (const auto& row : rows) {
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (row.word_count < bins[b].min_words || row.word_count > bins[b].max_words) continue;
            auto& t = tallies[b];
            ++t.count;
            t.adequate += row.verdict.all_adequate();
            t.s += !row.verdict.structure;
            t.i += !row.verdict.information;
            t.w += !row.verdict.wording;
            break;
        }
    }
    std::vector<LengthStat> out;
    for (std::size_t b = 0; b < bins.size(); ++b) {
        const auto& t = tallies[b];
        if (t.count == 0) continue;
        const double n = static_cast<double>(t.count);
        out.push_back({bins[b], t.count, 100.0 * static_cast<double>(t.adequate) / n,
                       100.0 * static_cast<double>(t.s) / n, 100.0 * static_cast<double>(t.i) / n,
                       100.0 * static_cast<double>(t.w) / n});
    }
    return out;
}

nlohmann::ordered_json to_json(const std::vector<LengthStat>& table) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const auto& s : table) {
        nlohmann::ordered_json j;
        j["bin"] = s.bin.label;
        j["min_words"] = s.bin.min_words;
        j["max_words"] = s.bin.max_words == std::numeric_limits<std::size_t>::max()
                             ? nlohmann::ordered_json(nullptr)
                             : nlohmann::ordered_json(s.bin.max_words);
        j["count"] = s.count;
        j["adequate_pct"] = s.adequate_pct;
        j["inadequate_structure_pct"] = s.inadequate_structure_pct;
        j["inadequate_information_pct"] = s.inadequate_information_pct;
        j["inadequate_wording_pct"] = s.inadequate_wording_pct;
        rows.push_back(std::move(j));
    }
    return {{"length_stats", std::move(rows)}};
}

std::string render_text(const std::vector<LengthStat>& table) {
    std::ostringstream out;
    out << pad_right("length", 8) << pad("count", 8) << pad("Adequate", 10) << pad("Inadeq-S", 10)
        << pad("Inadeq-I", 10) << pad("Inadeq-W", 10) << "\n";
    auto cell = [](double v) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(1) << v;
        return s.str();
    };
    for (const auto& s : table) {
        out << pad_right(s.bin.label, 8) << pad(std::to_string(s.count), 8) << pad(cell(s.adequate_pct), 10)
            << pad(cell(s.inadequate_structure_pct), 10) << pad(cell(s.inadequate_information_pct), 10)
            << pad(cell(s.inadequate_wording_pct), 10) << "\n";
    }
    return out.str();
}

} // namespace logprose
