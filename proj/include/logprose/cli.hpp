#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "logprose/config.hpp"
#include "logprose/csv.hpp"
#include "logprose/eval.hpp"
#include "logprose/extract.hpp"
#include "logprose/features.hpp"
#include "logprose/rules.hpp"

namespace logprose {

inline constexpr int kExitClean = 0;
inline constexpr int kExitFindings = 1;
inline constexpr int kExitError = 2;

// Full command line without the program name. Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct ScanResult {
    ExtractResult extraction;
    std::vector<std::vector<Finding>> statement_findings;  // parallel to extraction.statements
    std::vector<Finding> corpus_findings;                  // WP5
    std::vector<AspectVerdict> verdicts;
    std::size_t files = 0;

    bool has_corrective() const;
};

ScanResult scan_statements(ExtractResult extraction, const Lexicon& lexicon, const Config& config);
ScanResult scan_paths(const std::vector<std::filesystem::path>& paths, const Config& config);

// {tool_version, config_hash, statements, findings, summary}
nlohmann::ordered_json scan_report(const ScanResult& scan, const Config& config);
std::string render_scan_text(const ScanResult& scan);

// One NDJSON record of `extract`.
nlohmann::ordered_json statement_record(const LoggingStatement& stmt);

TokenizeOptions tokenize_options(const Config& config);
std::vector<TokenSequence> tokenize_rows(const std::vector<LabeledCsvRow>& rows, const Config& config);
EmbeddingTable train_embedding(const std::vector<LabeledCsvRow>& rows, const Config& config);
Dataset build_dataset(const std::vector<LabeledCsvRow>& rows, const std::string& aspect, const EmbeddingTable& emb,
                      const Config& config);

// Cross-validates every configured (model, aspect) pair. Throws
// DegenerateClass when an aspect has only one label.
EvalReport evaluate_rows(const std::vector<LabeledCsvRow>& rows, const Config& config);

// Writes to a sibling temporary file, then renames it over path.
void write_atomic(const std::filesystem::path& path, const std::string& content);

} // namespace logprose
