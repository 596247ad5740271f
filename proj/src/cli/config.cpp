#include "logprose/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>

#include "logprose/digest.hpp"
#include "logprose/errors.hpp"

#ifndef LOGPROSE_DEFAULT_DATA_DIR
#define LOGPROSE_DEFAULT_DATA_DIR "data"
#endif

namespace logprose {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void expect_object(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
}

void expect_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    expect_object(j, where);
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& where) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

template <typename T>
void read(const json& j, const std::string& key, const std::string& where, T& target) {
    if (j.contains(key)) target = get<T>(j, key, where);
}

std::size_t read_count(const json& j, const std::string& key, const std::string& where, std::size_t current) {
    if (!j.contains(key)) return current;
    const auto& v = j.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw ConfigError(where + "." + key + " must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

void check_regex(const std::string& pattern, const std::string& where) {
    try {
        std::regex re(pattern);
    } catch (const std::regex_error& e) {
        throw ConfigError(where + " is not a valid regex: " + e.what());
    }
}

void parse_extract(const json& j, Config& c) {
    const std::string where = "extract";
    expect_keys(j, {"extensions", "receiver_pattern", "method_pattern", "placeholder_style"}, where);
    read(j, "extensions", where, c.extract.extensions);
    read(j, "receiver_pattern", where, c.extract.receiver_pattern);
    read(j, "method_pattern", where, c.extract.method_pattern);
    if (j.contains("placeholder_style")) {
        const auto style = get<std::string>(j, "placeholder_style", where);
        require(style == "braces" || style == "printf", "extract.placeholder_style must be braces or printf");
        c.extract.placeholder_style = style == "braces" ? PlaceholderStyle::braces : PlaceholderStyle::printf;
    }
    require(!c.extract.extensions.empty(), "extract.extensions must not be empty");
    check_regex(c.extract.receiver_pattern, "extract.receiver_pattern");
    check_regex(c.extract.method_pattern, "extract.method_pattern");
}

void parse_rules(const json& j, Config& c, const std::filesystem::path& base) {
    const std::string where = "rules";
    expect_keys(j,
                {"min_words", "max_words", "dictionary", "confusion_pairs", "acronym_allowlist", "extra_acronyms",
                 "interjections", "anaphora_cues", "continuation_phrases", "grammar_patterns", "enabled",
                 "wp3_exempt_error_levels", "wp5_min_occurrences"},
                where);
    c.rules.thresholds.min_words = read_count(j, "min_words", where, c.rules.thresholds.min_words);
    c.rules.thresholds.max_words = read_count(j, "max_words", where, c.rules.thresholds.max_words);
    require(c.rules.thresholds.min_words <= 100, "rules.min_words must be at most 100");
    require(c.rules.thresholds.max_words > c.rules.thresholds.min_words && c.rules.thresholds.max_words <= 1000,
            "rules.max_words must exceed min_words and be at most 1000");
    if (j.contains("dictionary")) c.lexicon.dictionary_path = resolve(base, get<std::string>(j, "dictionary", where));
    if (j.contains("confusion_pairs")) {
        const auto& v = j.at("confusion_pairs");
        if (v.is_null()) c.lexicon.confusion_pairs_path.reset();
        else c.lexicon.confusion_pairs_path = resolve(base, get<std::string>(j, "confusion_pairs", where));
    }
    read(j, "acronym_allowlist", where, c.lexicon.acronym_allowlist);
    if (j.contains("extra_acronyms")) {
        for (auto& a : get<std::vector<std::string>>(j, "extra_acronyms", where)) {
            c.lexicon.acronym_allowlist.push_back(std::move(a));
        }
    }
    read(j, "interjections", where, c.lexicon.interjections);
    read(j, "anaphora_cues", where, c.lexicon.anaphora_cues);
    read(j, "continuation_phrases", where, c.lexicon.continuation_phrases);
    if (j.contains("grammar_patterns")) {
        const auto& list = j.at("grammar_patterns");
        require(list.is_array(), "rules.grammar_patterns must be an array");
        c.lexicon.grammar_patterns.clear();
        for (std::size_t i = 0; i < list.size(); ++i) {
            const auto w = "rules.grammar_patterns[" + std::to_string(i) + "]";
            expect_keys(list[i], {"name", "regex", "message", "verb_agreement"}, w);
            GrammarPattern p;
            p.name = get<std::string>(list[i], "name", w);
            p.regex = get<std::string>(list[i], "regex", w);
            read(list[i], "message", w, p.message);
            read(list[i], "verb_agreement", w, p.verb_agreement);
            check_regex(p.regex, w + ".regex");
            c.lexicon.grammar_patterns.push_back(std::move(p));
        }
    }
    if (j.contains("enabled")) {
        const auto& enabled = j.at("enabled");
        expect_object(enabled, "rules.enabled");
        for (const auto& [key, value] : enabled.items()) {
            const auto rule = parse_rule_id(key);
            if (!rule) throw ConfigError("unknown rule '" + key + "' in rules.enabled");
            require(value.is_boolean(), "rules.enabled." + key + " must be a boolean");
            c.rules.enabled[*rule] = value.get<bool>();
        }
    }
    read(j, "wp3_exempt_error_levels", where, c.rules.wp3_exempt_error_levels);
    c.rules.wp5_min_occurrences = read_count(j, "wp5_min_occurrences", where, c.rules.wp5_min_occurrences);
    require(c.rules.wp5_min_occurrences >= 1, "rules.wp5_min_occurrences must be at least 1");
}

void parse_tree(const json& j, TreeParams& p, const std::string& where) {
    expect_keys(j, {"max_depth", "min_samples_split", "feature_subsample"}, where);
    p.max_depth = read_count(j, "max_depth", where, p.max_depth);
    p.min_samples_split = read_count(j, "min_samples_split", where, p.min_samples_split);
    p.feature_subsample = read_count(j, "feature_subsample", where, p.feature_subsample);
    require(p.max_depth >= 1, where + ".max_depth must be at least 1");
    require(p.min_samples_split >= 2, where + ".min_samples_split must be at least 2");
}

void parse_learn(const json& j, Config& c) {
    const std::string where = "learn";
    expect_keys(j,
                {"seed", "embedding", "raw_tokens", "oversample", "adasyn", "dt", "rf", "lr", "folds", "models",
                 "aspects", "columns"},
                where);
    if (j.contains("seed")) {
        require(j.at("seed").is_number_unsigned(), "learn.seed must be a non-negative integer");
        c.seed = j.at("seed").get<std::uint64_t>();
    }
    if (j.contains("embedding")) {
        expect_object(j.at("embedding"), "learn.embedding");
        auto merged = to_json(c.embedding);
        for (const auto& [k, v] : j.at("embedding").items()) {
            require(k != "seed", "learn.embedding.seed is derived from learn.seed");
            merged[k] = v;
        }
        try {
            c.embedding = skipgram_params_from_json(json::parse(merged.dump()));
        } catch (const json::exception&) {
            throw ConfigError("learn.embedding has a value of the wrong type");
        }
        require(c.embedding.dimension <= 4096, "learn.embedding.dimension must be at most 4096");
    }
    read(j, "raw_tokens", where, c.raw_tokens);
    read(j, "oversample", where, c.oversample);
    if (j.contains("adasyn")) {
        const auto& a = j.at("adasyn");
        const std::string w = "learn.adasyn";
        expect_keys(a, {"k", "beta", "d_threshold"}, w);
        c.adasyn.k = read_count(a, "k", w, c.adasyn.k);
        read(a, "beta", w, c.adasyn.beta);
        read(a, "d_threshold", w, c.adasyn.d_threshold);
        require(c.adasyn.k >= 1, "learn.adasyn.k must be at least 1");
        require(c.adasyn.beta >= 0 && c.adasyn.beta <= 1, "learn.adasyn.beta must lie in [0, 1]");
        require(c.adasyn.d_threshold > 0 && c.adasyn.d_threshold <= 1, "learn.adasyn.d_threshold must lie in (0, 1]");
    }
    if (j.contains("dt")) parse_tree(j.at("dt"), c.models.tree, "learn.dt");
    if (j.contains("rf")) {
        const auto& r = j.at("rf");
        const std::string w = "learn.rf";
        expect_keys(r, {"n_trees", "max_depth", "min_samples_split", "feature_subsample", "bootstrap", "threads"}, w);
        auto& f = c.models.forest;
        f.n_trees = read_count(r, "n_trees", w, f.n_trees);
        f.max_depth = read_count(r, "max_depth", w, f.max_depth);
        f.min_samples_split = read_count(r, "min_samples_split", w, f.min_samples_split);
        f.feature_subsample = read_count(r, "feature_subsample", w, f.feature_subsample);
        f.threads = read_count(r, "threads", w, f.threads);
        read(r, "bootstrap", w, f.bootstrap);
        require(f.n_trees >= 1 && f.n_trees <= 10000, "learn.rf.n_trees must lie in [1, 10000]");
        require(f.max_depth >= 1, "learn.rf.max_depth must be at least 1");
        require(f.min_samples_split >= 2, "learn.rf.min_samples_split must be at least 2");
    }
    if (j.contains("lr")) {
        const auto& l = j.at("lr");
        const std::string w = "learn.lr";
        expect_keys(l, {"learning_rate", "epochs", "l2", "tolerance", "standardize"}, w);
        auto& p = c.models.logistic;
        read(l, "learning_rate", w, p.learning_rate);
        p.epochs = read_count(l, "epochs", w, p.epochs);
        read(l, "l2", w, p.l2);
        read(l, "tolerance", w, p.tolerance);
        read(l, "standardize", w, p.standardize);
        require(p.learning_rate > 0, "learn.lr.learning_rate must be positive");
        require(p.epochs >= 1, "learn.lr.epochs must be at least 1");
        require(p.l2 >= 0, "learn.lr.l2 must be non-negative");
        require(p.tolerance >= 0, "learn.lr.tolerance must be non-negative");
    }
    c.folds = read_count(j, "folds", where, c.folds);
    require(c.folds >= 2, "learn.folds must be at least 2");
    if (j.contains("models")) {
        c.eval_models.clear();
        for (const auto& m : get<std::vector<std::string>>(j, "models", where)) {
            try {
                c.eval_models.push_back(parse_model_kind(m));
            } catch (const BadInput& e) {
                throw ConfigError(std::string("learn.models: ") + e.what());
            }
        }
        require(!c.eval_models.empty(), "learn.models must not be empty");
    }
    if (j.contains("aspects")) {
        c.eval_aspects = get<std::vector<std::string>>(j, "aspects", where);
        require(!c.eval_aspects.empty(), "learn.aspects must not be empty");
        for (const auto& a : c.eval_aspects) {
            require(a == "structure" || a == "information" || a == "wording", "unknown aspect '" + a + "'");
        }
    }
    if (j.contains("columns")) {
        const auto& m = j.at("columns");
        const std::string w = "learn.columns";
        expect_keys(m, {"message", "level", "structure", "information", "wording"}, w);
        read(m, "message", w, c.columns.message);
        read(m, "level", w, c.columns.level);
        read(m, "structure", w, c.columns.structure);
        read(m, "information", w, c.columns.information);
        read(m, "wording", w, c.columns.wording);
    }
}

void parse_output(const json& j, Config& c, const std::filesystem::path& base) {
    const std::string where = "output";
    expect_keys(j, {"format", "path"}, where);
    if (j.contains("format")) {
        const auto f = get<std::string>(j, "format", where);
        require(f == "json" || f == "text", "output.format must be json or text");
        c.format = f == "json" ? OutputFormat::json : OutputFormat::text;
    }
    if (j.contains("path") && !j.at("path").is_null()) c.out = resolve(base, get<std::string>(j, "path", where));
}

} // namespace

std::filesystem::path default_data_dir() {
    if (const char* env = std::getenv("LOGPROSE_DATA_DIR"); env && *env) return env;
    return LOGPROSE_DEFAULT_DATA_DIR;
}

Config default_config() {
    Config c;
    const auto data = default_data_dir();
    c.lexicon.dictionary_path = data / "dictionary.txt";
    c.lexicon.confusion_pairs_path = data / "confusion_pairs.csv";
    c.lexicon.acronym_allowlist = default_acronym_allowlist();
    c.lexicon.interjections = default_interjections();
    c.lexicon.anaphora_cues = default_anaphora_cues();
    c.lexicon.continuation_phrases = default_continuation_phrases();
    c.lexicon.grammar_patterns = default_grammar_patterns();
    return c;
}

Config config_from_json(const json& j, const std::filesystem::path& base_dir) {
    Config c = default_config();
    expect_keys(j, {"extract", "rules", "learn", "output"}, "config");
    if (j.contains("extract")) parse_extract(j.at("extract"), c);
    if (j.contains("rules")) parse_rules(j.at("rules"), c, base_dir);
    if (j.contains("learn")) parse_learn(j.at("learn"), c);
    if (j.contains("output")) parse_output(j.at("output"), c, base_dir);
    c.lexicon.require_dictionary = c.rules.is_enabled(RuleId::WP1) || c.rules.is_enabled(RuleId::WP2);
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j, path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

ordered_json to_json(const Config& c) {
    ordered_json j;
    j["extract"] = {{"extensions", c.extract.extensions},
                    {"receiver_pattern", c.extract.receiver_pattern},
                    {"method_pattern", c.extract.method_pattern},
                    {"placeholder_style", c.extract.placeholder_style == PlaceholderStyle::braces ? "braces" : "printf"}};

    ordered_json rules;
    rules["min_words"] = c.rules.thresholds.min_words;
    rules["max_words"] = c.rules.thresholds.max_words;
    rules["dictionary"] = c.lexicon.dictionary_path ? ordered_json(c.lexicon.dictionary_path->string()) : nullptr;
    rules["confusion_pairs"] =
        c.lexicon.confusion_pairs_path ? ordered_json(c.lexicon.confusion_pairs_path->string()) : nullptr;
    rules["acronym_allowlist"] = c.lexicon.acronym_allowlist;
    rules["interjections"] = c.lexicon.interjections;
    rules["anaphora_cues"] = c.lexicon.anaphora_cues;
    rules["continuation_phrases"] = c.lexicon.continuation_phrases;
    ordered_json patterns = ordered_json::array();
    for (const auto& p : c.lexicon.grammar_patterns) {
        patterns.push_back(
            {{"name", p.name}, {"regex", p.regex}, {"message", p.message}, {"verb_agreement", p.verb_agreement}});
    }
    rules["grammar_patterns"] = std::move(patterns);
    ordered_json enabled;
    for (auto r : kAllRules) enabled[std::string(to_string(r))] = c.rules.is_enabled(r);
    rules["enabled"] = std::move(enabled);
    rules["wp3_exempt_error_levels"] = c.rules.wp3_exempt_error_levels;
    rules["wp5_min_occurrences"] = c.rules.wp5_min_occurrences;
    j["rules"] = std::move(rules);

    ordered_json learn;
    learn["seed"] = c.seed;
    auto emb = to_json(c.embedding);
    emb.erase("seed");
    learn["embedding"] = std::move(emb);
    learn["raw_tokens"] = c.raw_tokens;
    learn["oversample"] = c.oversample;
    learn["adasyn"] = {{"k", c.adasyn.k}, {"beta", c.adasyn.beta}, {"d_threshold", c.adasyn.d_threshold}};
    learn["dt"] = {{"max_depth", c.models.tree.max_depth},
                   {"min_samples_split", c.models.tree.min_samples_split},
                   {"feature_subsample", c.models.tree.feature_subsample}};
    learn["rf"] = {{"n_trees", c.models.forest.n_trees},
                   {"max_depth", c.models.forest.max_depth},
                   {"min_samples_split", c.models.forest.min_samples_split},
                   {"feature_subsample", c.models.forest.feature_subsample},
                   {"bootstrap", c.models.forest.bootstrap},
                   {"threads", c.models.forest.threads}};
    learn["lr"] = {{"learning_rate", c.models.logistic.learning_rate},
                   {"epochs", c.models.logistic.epochs},
                   {"l2", c.models.logistic.l2},
                   {"tolerance", c.models.logistic.tolerance},
                   {"standardize", c.models.logistic.standardize}};
    learn["folds"] = c.folds;
    std::vector<std::string> models;
    for (auto m : c.eval_models) models.emplace_back(to_string(m));
    learn["models"] = models;
    learn["aspects"] = c.eval_aspects;
    learn["columns"] = {{"message", c.columns.message},
                        {"level", c.columns.level},
                        {"structure", c.columns.structure},
                        {"information", c.columns.information},
                        {"wording", c.columns.wording}};
    j["learn"] = std::move(learn);

    j["output"] = {{"format", c.format == OutputFormat::json ? "json" : "text"},
                   {"path", c.out ? ordered_json(c.out->string()) : nullptr}};
    return j;
}

std::string config_hash(const Config& config) {
    // Output settings do not change results, so they are left out.
    auto j = to_json(config);
    j.erase("output");
    return sha256_hex(j.dump());
}

} // namespace logprose
