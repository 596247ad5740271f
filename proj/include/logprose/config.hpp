#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "logprose/eval.hpp"
#include "logprose/extract.hpp"
#include "logprose/features.hpp"
#include "logprose/learn.hpp"
#include "logprose/rules.hpp"

namespace logprose {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Header names for the labeled dataset columns.
struct ColumnMapping {
    std::string message = "message";
    std::string level = "level";
    std::string structure = "structure";
    std::string information = "information";
    std::string wording = "wording";
};

enum class OutputFormat { json, text };

struct Config {
    ExtractConfig extract;

    LexiconOptions lexicon;
    RuleOptions rules;

    SkipGramParams embedding;
    bool raw_tokens = false;
    bool oversample = true;
    AdasynParams adasyn;
    ModelSpec models;
    std::size_t folds = 10;
    std::vector<ModelKind> eval_models = {ModelKind::dt, ModelKind::rf, ModelKind::lr};
    std::vector<std::string> eval_aspects = {"structure", "information", "wording"};
    ColumnMapping columns;
    std::uint64_t seed = 1;

    OutputFormat format = OutputFormat::json;
    std::optional<std::filesystem::path> out;
};

// Built-in defaults; the dictionary and confusion-pair paths point at the
// bundled data directory (LOGPROSE_DATA_DIR overrides it).
Config default_config();

// Overlays a JSON document on the defaults. Unknown keys and out-of-range
// values throw ConfigError. Relative paths resolve against base_dir.
Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
Config load_config(const std::filesystem::path& path);

// Effective configuration with every default filled in; keys in a fixed order.
nlohmann::ordered_json to_json(const Config& config);

// SHA-256 of the effective configuration.
std::string config_hash(const Config& config);

std::filesystem::path default_data_dir();

} // namespace logprose
