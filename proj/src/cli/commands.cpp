#include "logprose/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "logprose/errors.hpp"
#include "logprose/learn.hpp"
#include "logprose/random.hpp"

namespace logprose {

namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

ordered_json location_json(const SourceLocation& loc) {
    return {{"file", loc.file_path}, {"line_start", loc.line_start}, {"line_end", loc.line_end}};
}

ordered_json verdict_json(const AspectVerdict& v) {
    return {{"structure", v.structure}, {"information", v.information}, {"wording", v.wording}};
}

ordered_json finding_json(const Finding& f, std::optional<std::size_t> statement) {
    ordered_json j;
    j["rule"] = to_string(f.rule);
    j["aspect"] = to_string(f.aspect);
    j["kind"] = to_string(f.kind);
    j["statement"] = statement ? ordered_json(*statement) : ordered_json(nullptr);
    j["file"] = f.location.file_path;
    j["line_start"] = f.location.line_start;
    j["line_end"] = f.location.line_end;
    j["span"] = f.span ? ordered_json{{"begin", f.span->begin}, {"end", f.span->end}} : ordered_json(nullptr);
    j["explanation"] = f.explanation;
    if (f.rule == RuleId::WP5) {
        j["terms"] = f.terms;
        ordered_json locs = ordered_json::array();
        for (const auto& loc : f.related) locs.push_back(location_json(loc));
        j["locations"] = std::move(locs);
    }
    return j;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadInput("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<LabeledCsvRow> read_dataset(const fs::path& path, const Config& config) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadInput("cannot read dataset " + path.string());
    auto rows = read_labeled_csv(in, config.columns);
    if (rows.empty()) throw EmptyDataset("dataset " + path.string() + " has no rows");
    return rows;
}

fs::path embedding_side_path(const fs::path& model_path) {
    auto p = model_path;
    p.replace_extension();
    return fs::path(p.string() + ".embedding.json");
}

// Emits the main artifact: --out when set, stdout otherwise.
void emit(const std::string& content, const Config& config, std::ostream& out) {
    if (config.out) {
        write_atomic(*config.out, content);
    } else {
        out << content;
    }
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::uint64_t parse_population(const std::string& text) {
    std::size_t used = 0;
    long long value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        throw BadInput("population '" + text + "' is not an integer");
    }
    if (used != text.size()) throw BadInput("population '" + text + "' is not an integer");
    if (value < 1) throw BadInput("population must be at least 1, got " + text);
    return static_cast<std::uint64_t>(value);
}

std::vector<std::string> read_label_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot read label file " + path.string());
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        labels.push_back(b == std::string::npos ? std::string() : line.substr(b));
    }
    while (!labels.empty() && labels.back().empty()) labels.pop_back();
    return labels;
}

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string format;
    std::string out;
    bool raw_tokens = false;
};

Config resolve_config(const Options& o) {
    Config config;
    if (!o.config_path.empty()) {
        config = load_config(o.config_path);
    } else if (const char* env = std::getenv("LOGPROSE_CONFIG"); env && *env) {
        config = load_config(env);
    } else {
        config = default_config();
    }
    if (o.seed) config.seed = *o.seed;
    if (!o.format.empty()) config.format = o.format == "text" ? OutputFormat::text : OutputFormat::json;
    if (!o.out.empty()) config.out = o.out;
    if (o.raw_tokens) config.raw_tokens = true;
    return config;
}

int cmd_scan(const std::vector<std::string>& inputs, const Config& config, std::ostream& out) {
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    const auto scan = scan_paths(paths, config);
    emit(config.format == OutputFormat::json ? dump(scan_report(scan, config)) : render_scan_text(scan), config, out);
    return scan.has_corrective() ? kExitFindings : kExitClean;
}

int cmd_extract(const std::vector<std::string>& inputs, const Config& config, std::ostream& out, std::ostream& err) {
    std::vector<fs::path> paths(inputs.begin(), inputs.end());
    const auto result = extract_files(discover_sources(paths, config.extract), config.extract);
    std::ostringstream text;
    for (const auto& stmt : result.statements) {
        if (config.format == OutputFormat::json) {
            text << statement_record(stmt).dump() << "\n";
        } else {
            text << stmt.location.file_path << ":" << stmt.location.line_start << ": " << to_string(stmt.level) << " "
                 << stmt.message.raw << "\n";
        }
    }
    for (const auto& w : result.warnings) {
        err << "warning: " << w.location.file_path << ":" << w.location.line_start << ": " << to_string(w.kind) << ": "
            << w.message << "\n";
    }
    emit(text.str(), config, out);
    return kExitClean;
}

int cmd_train(const std::string& csv, const std::string& aspect, const std::string& kind_name,
              const std::string& embedding_in, const std::string& embedding_out, const Config& config,
              std::ostream& out) {
    if (!config.out) throw BadInput("train needs --out <model file>");
    if (aspect != "structure" && aspect != "information" && aspect != "wording") {
        throw BadInput("unknown aspect '" + aspect + "' (expected structure, information or wording)");
    }
    auto spec = config.models;
    spec.kind = parse_model_kind(kind_name);
    const auto rows = read_dataset(csv, config);

    EmbeddingTable emb;
    if (!embedding_in.empty()) {
        emb = embedding_from_json(nlohmann::json::parse(read_file(embedding_in)));
    } else {
        emb = train_embedding(rows, config);
    }
    const auto data = build_dataset(rows, aspect, emb, config);
    if (data.count(0) == 0 || data.count(1) == 0) {
        throw DegenerateClass("aspect '" + aspect + "' has a single label in " + csv);
    }
    Dataset train = data;
    std::size_t synthetic = 0;
    std::vector<std::string> warnings;
    if (config.oversample) {
        auto p = config.adasyn;
        p.seed = derive_seed(config.seed, "adasyn");
        auto balanced = adasyn(data, p);
        synthetic = balanced.generated;
        warnings = balanced.warnings;
        train = std::move(balanced.data);
    }
    const auto model = train_model(train, spec, derive_seed(config.seed, "model"));
    const auto ref = content_hash(emb);

    const fs::path model_path = *config.out;
    const fs::path emb_path = embedding_out.empty() ? embedding_side_path(model_path) : fs::path(embedding_out);
    write_atomic(emb_path, to_json(emb).dump() + "\n");
    write_atomic(model_path, model_to_json(model, aspect, ref).dump() + "\n");

    ordered_json summary;
    summary["tool_version"] = kToolVersion;
    summary["config_hash"] = config_hash(config);
    summary["model"] = model_path.string();
    summary["embedding"] = emb_path.string();
    summary["kind"] = to_string(spec.kind);
    summary["aspect"] = aspect;
    summary["embedding_ref"] = ref;
    summary["rows"] = data.size();
    summary["synthetic_rows"] = synthetic;
    summary["warnings"] = warnings;
    if (config.format == OutputFormat::json) {
        out << dump(summary);
    } else {
        out << "trained " << to_string(spec.kind) << " for " << aspect << " on " << data.size() << " rows (+"
            << synthetic << " synthetic)\nmodel: " << model_path.string() << "\nembedding: " << emb_path.string()
            << "\n";
    }
    return kExitClean;
}

int cmd_classify(const std::string& model_file, const std::string& embedding_file,
                 const std::vector<std::string>& inputs, const std::string& message, const std::string& level_name,
                 const Config& config, std::ostream& out) {
    const auto loaded = model_from_json(nlohmann::json::parse(read_file(model_file)));
    const fs::path emb_path = embedding_file.empty() ? embedding_side_path(model_file) : fs::path(embedding_file);
    const auto emb = embedding_from_json(nlohmann::json::parse(read_file(emb_path)));
    if (content_hash(emb) != loaded.embedding_ref) {
        throw ModelFormatError("embedding " + emb_path.string() + " does not match the model's embedding_ref");
    }

    std::vector<LoggingStatement> statements;
    if (!message.empty()) {
        LoggingStatement stmt;
        stmt.location = {"<message>", 1, 1};
        stmt.level = parse_level(level_name);
        stmt.message = parse_template(message, config.extract.placeholder_style);
        statements.push_back(std::move(stmt));
    }
    if (!inputs.empty()) {
        std::vector<fs::path> paths(inputs.begin(), inputs.end());
        auto result = extract_files(discover_sources(paths, config.extract), config.extract);
        std::move(result.statements.begin(), result.statements.end(), std::back_inserter(statements));
    }
    if (statements.empty() && message.empty() && inputs.empty()) throw BadInput("classify needs --message or paths");

    const auto opts = tokenize_options(config);
    ordered_json predictions = ordered_json::array();
    std::ostringstream text;
    for (const auto& stmt : statements) {
        const auto x = vectorize(tokenize(stmt.message.raw, stmt.level, opts), emb);
        const auto p = predict(loaded.model, x);
        ordered_json j = location_json(stmt.location);
        j["level"] = to_string(stmt.level);
        j["template"] = stmt.message.raw;
        j["label"] = p.label;
        j["verdict"] = p.label == 1 ? "adequate" : "inadequate";
        j["score"] = p.score;
        predictions.push_back(std::move(j));
        text << stmt.location.file_path << ":" << stmt.location.line_start << ": " << loaded.aspect << " "
             << (p.label == 1 ? "adequate" : "inadequate") << " (" << std::fixed << std::setprecision(3) << p.score
             << ") " << stmt.message.raw << "\n";
    }
    ordered_json report;
    report["tool_version"] = kToolVersion;
    report["model"] = to_string(kind_of(loaded.model));
    report["aspect"] = loaded.aspect;
    report["embedding_ref"] = loaded.embedding_ref;
    report["predictions"] = std::move(predictions);
    emit(config.format == OutputFormat::json ? dump(report) : text.str(), config, out);
    return kExitClean;
}

int cmd_evaluate(const std::string& csv, const Config& config, std::ostream& out) {
    const auto rows = read_dataset(csv, config);
    const auto report = evaluate_rows(rows, config);
    if (config.format == OutputFormat::json) {
        ordered_json j;
        j["tool_version"] = kToolVersion;
        j["config_hash"] = config_hash(config);
        j["rows"] = rows.size();
        j["oversample"] = config.oversample;
        const auto body = to_json(report);
        for (const auto& [key, value] : body.items()) j[key] = value;
        emit(dump(j), config, out);
    } else {
        emit(render_text(report), config, out);
    }
    return kExitClean;
}

int cmd_sample(const std::vector<std::string>& populations, const std::string& file, double confidence, double margin,
               double proportion, const Config& config, std::ostream& out) {
    std::vector<std::pair<std::string, std::uint64_t>> inputs;
    for (const auto& p : populations) inputs.emplace_back("", parse_population(p));
    if (!file.empty()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw BadInput("cannot read population file " + file);
        for (const auto& rec : parse_csv(in)) {
            if (rec.size() == 1 && rec[0].empty()) continue;
            if (rec.size() == 1) inputs.emplace_back("", parse_population(rec[0]));
            else if (rec.size() == 2) inputs.emplace_back(rec[0], parse_population(rec[1]));
            else throw BadInput("population file lines must be N or name,N");
        }
    }
    if (inputs.empty()) throw BadInput("sample needs at least one population");

    SampleSizeParams params;
    params.confidence = confidence;
    params.margin = margin;
    params.proportion = proportion;
    const double z = z_for_confidence(confidence);
    ordered_json rows = ordered_json::array();
    std::ostringstream text;
    for (const auto& [name, n] : inputs) {
        params.population = n;
        const auto s = sample_size(params);
        ordered_json r;
        if (!name.empty()) r["name"] = name;
        r["population"] = n;
        r["sample"] = s;
        rows.push_back(std::move(r));
        if (!name.empty()) text << name << "\t";
        text << n << "\t" << s << "\n";
    }
    ordered_json j;
    j["confidence"] = confidence;
    j["z"] = z;
    j["margin"] = margin;
    j["proportion"] = proportion;
    j["samples"] = std::move(rows);
    emit(config.format == OutputFormat::json ? dump(j) : text.str(), config, out);
    return kExitClean;
}

int cmd_kappa(const std::string& file_a, const std::string& file_b, const Config& config, std::ostream& out) {
    const auto a = read_label_file(file_a);
    const auto b = read_label_file(file_b);
    const double kappa = cohen_kappa(std::span<const std::string>(a), std::span<const std::string>(b));
    std::ostringstream fixed;
    fixed << std::fixed << std::setprecision(4) << kappa;
    if (config.format == OutputFormat::json) {
        ordered_json j;
        j["n"] = a.size();
        j["kappa"] = kappa;
        j["kappa_4dp"] = fixed.str();
        emit(dump(j), config, out);
    } else {
        emit(fixed.str() + "\n", config, out);
    }
    return kExitClean;
}

int cmd_stats(const std::string& input, const Config& config, std::ostream& out) {
    std::vector<LengthRow> rows;
    if (fs::path(input).extension() == ".json") {
        const auto j = nlohmann::json::parse(read_file(input));
        if (!j.contains("statements")) throw BadInput(input + " is not a scan report");
        for (const auto& s : j.at("statements")) {
            const auto& v = s.at("verdict");
            rows.push_back({s.at("word_count").get<std::size_t>(),
                            {v.at("structure").get<bool>(), v.at("information").get<bool>(),
                             v.at("wording").get<bool>()}});
        }
    } else {
        for (const auto& r : read_dataset(input, config)) {
            rows.push_back({count_words(r.message, config.extract.placeholder_style),
                            {r.structure == 1, r.information == 1, r.wording == 1}});
        }
    }
    const auto table = length_stats(rows);
    if (config.format == OutputFormat::json) {
        auto j = to_json(table);
        ordered_json report;
        report["tool_version"] = kToolVersion;
        report["rows"] = rows.size();
        report["length_stats"] = j["length_stats"];
        emit(dump(report), config, out);
    } else {
        emit(render_text(table), config, out);
    }
    return kExitClean;
}

} // namespace

bool ScanResult::has_corrective() const {
    for (const auto& fs : statement_findings) {
        for (const auto& f : fs) {
            if (f.kind == RuleKind::corrective) return true;
        }
    }
    return std::any_of(corpus_findings.begin(), corpus_findings.end(),
                       [](const Finding& f) { return f.kind == RuleKind::corrective; });
}

ScanResult scan_statements(ExtractResult extraction, const Lexicon& lexicon, const Config& config) {
    ScanResult scan;
    scan.extraction = std::move(extraction);
    for (const auto& stmt : scan.extraction.statements) {
        auto findings = check_statement(stmt, lexicon, config.rules);
        scan.verdicts.push_back(verdict(findings));
        scan.statement_findings.push_back(std::move(findings));
    }
    if (config.rules.is_enabled(RuleId::WP5)) {
        scan.corpus_findings = check_consistency(scan.extraction.statements, lexicon, config.rules.wp5_min_occurrences);
        std::sort(scan.corpus_findings.begin(), scan.corpus_findings.end(),
                  [](const Finding& a, const Finding& b) { return a.terms < b.terms; });
    }
    return scan;
}

ScanResult scan_paths(const std::vector<fs::path>& paths, const Config& config) {
    const auto files = discover_sources(paths, config.extract);
    const auto lexicon = Lexicon::load(config.lexicon);
    auto scan = scan_statements(extract_files(files, config.extract), lexicon, config);
    scan.files = files.size();
    return scan;
}

ordered_json scan_report(const ScanResult& scan, const Config& config) {
    ordered_json statements = ordered_json::array();
    ordered_json findings = ordered_json::array();
    std::map<std::string, std::size_t> by_rule;
    for (auto r : kAllRules) by_rule[std::string(to_string(r))] = 0;
    std::size_t corrective = 0, enhancing = 0;
    std::size_t bad_s = 0, bad_i = 0, bad_w = 0, all_ok = 0;

    const auto& stmts = scan.extraction.statements;
    for (std::size_t i = 0; i < stmts.size(); ++i) {
        const auto& s = stmts[i];
        ordered_json j;
        j["id"] = i;
        j["file"] = s.location.file_path;
        j["line_start"] = s.location.line_start;
        j["line_end"] = s.location.line_end;
        j["level"] = to_string(s.level);
        j["template"] = s.message.raw;
        j["word_count"] = s.message.word_count;
        j["placeholder_count"] = s.message.placeholders.size();
        j["concatenated"] = s.concatenated;
        j["trailing_throwable"] = s.trailing_throwable;
        j["verdict"] = verdict_json(scan.verdicts[i]);
        statements.push_back(std::move(j));
        bad_s += !scan.verdicts[i].structure;
        bad_i += !scan.verdicts[i].information;
        bad_w += !scan.verdicts[i].wording;
        all_ok += scan.verdicts[i].all_adequate();
        for (const auto& f : scan.statement_findings[i]) {
            findings.push_back(finding_json(f, i));
            ++by_rule[std::string(to_string(f.rule))];
            (f.kind == RuleKind::corrective ? corrective : enhancing)++;
        }
    }
    for (const auto& f : scan.corpus_findings) {
        findings.push_back(finding_json(f, std::nullopt));
        ++by_rule[std::string(to_string(f.rule))];
        (f.kind == RuleKind::corrective ? corrective : enhancing)++;
    }

    ordered_json rules;
    for (auto r : kAllRules) rules[std::string(to_string(r))] = by_rule[std::string(to_string(r))];
    ordered_json warnings = ordered_json::array();
    for (const auto& w : scan.extraction.warnings) {
        auto j = location_json(w.location);
        j["kind"] = to_string(w.kind);
        j["message"] = w.message;
        warnings.push_back(std::move(j));
    }

    ordered_json summary;
    summary["files"] = scan.files;
    summary["statements"] = stmts.size();
    summary["findings"] = corrective + enhancing;
    summary["corrective"] = corrective;
    summary["enhancing"] = enhancing;
    summary["by_rule"] = std::move(rules);
    summary["adequate_all"] = all_ok;
    summary["inadequate"] = {{"structure", bad_s}, {"information", bad_i}, {"wording", bad_w}};
    summary["extraction_warnings"] = std::move(warnings);

    ordered_json report;
    report["tool_version"] = kToolVersion;
    report["config_hash"] = config_hash(config);
    report["statements"] = std::move(statements);
    report["findings"] = std::move(findings);
    report["summary"] = std::move(summary);
    return report;
}

std::string render_scan_text(const ScanResult& scan) {
    std::ostringstream out;
    std::size_t corrective = 0, total = 0;
    auto line = [&](const Finding& f) {
        ++total;
        if (f.kind == RuleKind::corrective) ++corrective;
        out << f.location.file_path << ":" << f.location.line_start << ": " << to_string(f.rule) << " ["
            << to_string(f.kind) << "] " << f.explanation << "\n";
    };
    for (const auto& fs : scan.statement_findings) {
        for (const auto& f : fs) line(f);
    }
    for (const auto& f : scan.corpus_findings) line(f);
    for (const auto& w : scan.extraction.warnings) {
        out << w.location.file_path << ":" << w.location.line_start << ": warning: " << to_string(w.kind) << ": "
            << w.message << "\n";
    }
    out << scan.extraction.statements.size() << " statements, " << total << " findings (" << corrective
        << " corrective)\n";
    return out.str();
}

ordered_json statement_record(const LoggingStatement& stmt) {
    ordered_json j;
    j["file"] = stmt.location.file_path;
    j["line_start"] = stmt.location.line_start;
    j["line_end"] = stmt.location.line_end;
    j["level"] = to_string(stmt.level);
    j["template"] = stmt.message.raw;
    j["placeholder_count"] = stmt.message.placeholders.size();
    j["args"] = stmt.arg_expressions;
    j["concatenated"] = stmt.concatenated;
    j["trailing_throwable"] = stmt.trailing_throwable;
    return j;
}

TokenizeOptions tokenize_options(const Config& config) {
    return {!config.raw_tokens, config.extract.placeholder_style};
}

std::vector<TokenSequence> tokenize_rows(const std::vector<LabeledCsvRow>& rows, const Config& config) {
    const auto opts = tokenize_options(config);
    std::vector<TokenSequence> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(tokenize(r.message, r.level, opts));
    return out;
}

EmbeddingTable train_embedding(const std::vector<LabeledCsvRow>& rows, const Config& config) {
    auto hp = config.embedding;
    hp.seed = derive_seed(config.seed, "embedding");
    return train_skipgram(tokenize_rows(rows, config), hp);
}

Dataset build_dataset(const std::vector<LabeledCsvRow>& rows, const std::string& aspect, const EmbeddingTable& emb,
                      const Config& config) {
    const auto opts = tokenize_options(config);
    Dataset data;
    data.aspect = aspect;
    for (const auto& r : rows) data.push_back(vectorize(tokenize(r.message, r.level, opts), emb), r.label(aspect));
    return data;
}

EvalReport evaluate_rows(const std::vector<LabeledCsvRow>& rows, const Config& config) {
    const auto emb = train_embedding(rows, config);
    EvalReport report;
    report.k = config.folds;
    report.seed = config.seed;
    report.aspects = config.eval_aspects;
    for (auto m : config.eval_models) report.models.emplace_back(to_string(m));

    for (const auto& aspect : config.eval_aspects) {
        const auto data = build_dataset(rows, aspect, emb, config);
        if (data.count(0) == 0 || data.count(1) == 0) {
            throw DegenerateClass("aspect '" + aspect + "' has a single label; cannot cross-validate");
        }
        for (auto kind : config.eval_models) {
            auto spec = config.models;
            spec.kind = kind;
            CrossValidationOptions cv;
            cv.k = config.folds;
            cv.seed = derive_seed(config.seed, "evaluate", static_cast<std::uint64_t>(kind));
            if (config.oversample) cv.oversampling = config.adasyn;
            auto result = cross_validate(data, make_trainer(spec), cv, std::string(to_string(kind)));
            result.seed = config.seed;
            report.results.push_back(std::move(result));
        }
    }
    return report;
}

void write_atomic(const fs::path& path, const std::string& content) {
    const auto parent = path.parent_path();
    if (!parent.empty()) fs::create_directories(parent);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw BadInput("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw BadInput("failed writing " + tmp.string());
    }
    fs::rename(tmp, path);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Audit log-message readability and train readability classifiers", "logprose"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kToolVersion));

    Options o;
    app.add_option("--config", o.config_path, "JSON config file (falls back to $LOGPROSE_CONFIG)");
    app.add_option("--seed", o.seed, "global seed for every stochastic component");
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--out", o.out, "write the main output here (atomically) instead of stdout");
    app.add_flag("--raw-tokens", o.raw_tokens, "keep edge punctuation when tokenizing");

    std::vector<std::string> paths;
    auto* scan = app.add_subcommand("scan", "extract statements and check them against the rules");
    scan->add_option("paths", paths, "source files or directories")->required();

    auto* extract = app.add_subcommand("extract", "print extracted statements as NDJSON");
    extract->add_option("paths", paths, "source files or directories")->required();

    std::string csv, aspect, kind = "rf", embedding_in, embedding_out;
    auto* train = app.add_subcommand("train", "train one aspect classifier from a labeled CSV");
    train->add_option("dataset", csv, "labeled CSV")->required();
    train->add_option("--aspect", aspect, "structure, information or wording")->required();
    train->add_option("--model", kind, "dt, rf or lr");
    train->add_option("--embedding", embedding_in, "reuse this embedding file instead of training one");
    train->add_option("--embedding-out", embedding_out, "embedding side file (default <out>.embedding.json)");

    std::string model_file, message, level = "info";
    auto* classify = app.add_subcommand("classify", "predict aspect adequacy with a trained model");
    classify->add_option("--model", model_file, "model file")->required();
    classify->add_option("--embedding", embedding_in, "embedding file (default <model>.embedding.json)");
    classify->add_option("--message", message, "classify one message");
    classify->add_option("--level", level, "level of --message");
    classify->add_option("paths", paths, "source files or directories");

    std::string models, aspects;
    std::optional<std::size_t> folds;
    bool no_oversample = false;
    auto* evaluate = app.add_subcommand("evaluate", "stratified k-fold cross-validation report");
    evaluate->add_option("dataset", csv, "labeled CSV")->required();
    evaluate->add_option("--models", models, "comma-separated subset of dt,rf,lr");
    evaluate->add_option("--aspects", aspects, "comma-separated subset of structure,information,wording");
    evaluate->add_option("--folds", folds, "number of folds");
    evaluate->add_flag("--no-oversample", no_oversample, "skip ADASYN on training folds");

    std::vector<std::string> populations;
    std::string population_file;
    double confidence = 0.95, margin = 0.05, proportion = 0.5;
    auto* sample = app.add_subcommand("sample", "required sample size per population");
    sample->add_option("populations", populations, "population sizes");
    sample->add_option("--file", population_file, "file with one N or name,N per line");
    sample->add_option("--confidence", confidence, "confidence level");
    sample->add_option("--margin", margin, "margin of error");
    sample->add_option("--proportion", proportion, "expected proportion");

    std::string file_a, file_b;
    auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two label files");
    kappa->add_option("labels_a", file_a, "one label per line")->required();
    kappa->add_option("labels_b", file_b, "one label per line")->required();

    std::string stats_input;
    auto* stats = app.add_subcommand("stats", "adequacy by message length");
    stats->add_option("input", stats_input, "labeled CSV or scan report JSON")->required();

    std::vector<std::string> argv;
    argv.reserve(args.size());
    for (auto it = args.rbegin(); it != args.rend(); ++it) argv.push_back(*it);
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitClean;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kExitClean;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    try {
        auto config = resolve_config(o);
        if (*scan) return cmd_scan(paths, config, out);
        if (*extract) return cmd_extract(paths, config, out, err);
        if (*train) return cmd_train(csv, aspect, kind, embedding_in, embedding_out, config, out);
        if (*classify) return cmd_classify(model_file, embedding_in, paths, message, level, config, out);
        if (*evaluate) {
            if (!models.empty()) {
                config.eval_models.clear();
                for (const auto& m : split_list(models)) config.eval_models.push_back(parse_model_kind(m));
            }
            if (!aspects.empty()) {
                config.eval_aspects = split_list(aspects);
                for (const auto& a : config.eval_aspects) {
                    if (a != "structure" && a != "information" && a != "wording") {
                        throw BadInput("unknown aspect '" + a + "'");
                    }
                }
            }
            if (folds) config.folds = *folds;
            if (no_oversample) config.oversample = false;
            return cmd_evaluate(csv, config, out);
        }
        if (*sample) return cmd_sample(populations, population_file, confidence, margin, proportion, config, out);
        if (*kappa) return cmd_kappa(file_a, file_b, config, out);
        if (*stats) return cmd_stats(stats_input, config, out);
    } catch (const MalformedCsv& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: invalid JSON input: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

} // namespace logprose
