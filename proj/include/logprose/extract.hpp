#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace logprose {

struct SourceLocation {
    std::string file_path;
    std::size_t line_start = 1;
    std::size_t line_end = 1;

    friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
    friend auto operator<=>(const SourceLocation&, const SourceLocation&) = default;
};

enum class Level { trace, debug, info, warn, error, fatal };

inline constexpr Level kAllLevels[] = {Level::trace, Level::debug, Level::info,
                                       Level::warn,  Level::error, Level::fatal};

std::string_view to_string(Level level);

// Case-insensitive; throws UnknownLevel for anything outside the six names.
Level parse_level(std::string_view call_name);

enum class PlaceholderStyle { braces, printf };

struct Placeholder {
    std::size_t offset = 0;        // byte offset of the marker in raw
    std::size_t length = 0;        // marker length in bytes
    std::size_t token_index = 0;   // index into MessageTemplate::tokens
    std::size_t token_offset = 0;  // byte offset inside that token

    friend bool operator==(const Placeholder&, const Placeholder&) = default;
};

struct MessageTemplate {
    std::string raw;
    std::vector<std::string> tokens;
    std::vector<Placeholder> placeholders;
    std::vector<std::string> segments;  // placeholders.size() + 1 entries
    std::size_t word_count = 0;

    std::string_view marker(std::size_t i) const {
        return std::string_view(raw).substr(placeholders[i].offset, placeholders[i].length);
    }

    // Interleaves segments with the original markers; equals raw.
    std::string reconstruct() const;
};

MessageTemplate parse_template(std::string_view raw, PlaceholderStyle style = PlaceholderStyle::braces);

// Byte ranges of placeholder markers in text, scanned left to right.
std::vector<std::pair<std::size_t, std::size_t>> find_placeholders(std::string_view text,
                                                                   PlaceholderStyle style);

// Whitespace-split word count; a token counts iff it still has an ASCII letter
// once placeholder markers are removed.
std::size_t count_words(std::string_view text, PlaceholderStyle style = PlaceholderStyle::braces);

struct LoggingStatement {
    SourceLocation location;
    Level level = Level::info;
    MessageTemplate message;
    std::vector<std::string> arg_expressions;
    bool concatenated = false;
    bool trailing_throwable = false;
};

enum class WarningKind { unbalanced_call, unknown_level, placeholder_mismatch };

std::string_view to_string(WarningKind kind);

struct ExtractWarning {
    WarningKind kind;
    SourceLocation location;
    std::string message;
};

struct ExtractConfig {
    // Full-match regexes (ECMAScript) for the receiver identifier and the
    // called method. The method pattern is matched case-insensitively.
    std::string receiver_pattern = "log|logger|LOG|LOGGER";
    std::string method_pattern = "trace|debug|info|warn|error|fatal";
    PlaceholderStyle placeholder_style = PlaceholderStyle::braces;
    std::vector<std::string> extensions = {".java"};
};

struct ExtractResult {
    std::vector<LoggingStatement> statements;
    std::vector<ExtractWarning> warnings;
};

// Decodes backslash escapes of a Java/C-style string literal body.
std::string decode_escapes(std::string_view body);

// True when expr looks like an exception object passed for its stack trace.
bool is_throwable_expression(std::string_view expr);

ExtractResult extract_from_source(std::string_view text, const ExtractConfig& config,
                                  std::string_view file_path = "<memory>");

// Every file under the given paths (files or directories, recursively) whose
// extension is in config.extensions, in lexical path order.
std::vector<std::filesystem::path> discover_sources(const std::vector<std::filesystem::path>& paths,
                                                    const ExtractConfig& config);

// Extracts all files concurrently; output is merged in lexical path order,
// then source order. Throws std::filesystem::filesystem_error on IO failure.
ExtractResult extract_files(const std::vector<std::filesystem::path>& files, const ExtractConfig& config);

} // namespace logprose
