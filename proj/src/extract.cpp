#include "logprose/extract.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <regex>
#include <sstream>
#include <thread>

#include "logprose/errors.hpp"

namespace logprose {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_ident_start(char c) { return is_alpha(c) || c == '_' || c == '$'; }
bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Length of a printf conversion starting at text[pos] == '%', or 0.
std::size_t printf_marker_length(std::string_view text, std::size_t pos) {
    std::size_t i = pos + 1;
    const auto n = text.size();
    // Optional argument index: digits followed by '$'.
    std::size_t j = i;
    while (j < n && is_digit(text[j])) ++j;
    if (j > i && j < n && text[j] == '$') i = j + 1;
    while (i < n && std::string_view("-#+ 0,(<").find(text[i]) != std::string_view::npos) ++i;
    while (i < n && is_digit(text[i])) ++i;
    if (i < n && text[i] == '.') {
        ++i;
        const auto digits = i;
        while (i < n && is_digit(text[i])) ++i;
        if (i == digits) return 0;
    }
    if (i >= n) return 0;
    const char conv = text[i];
    if (conv == 't' || conv == 'T') {
        return i + 1 < n && is_alpha(text[i + 1]) ? i + 2 - pos : 0;
    }
    if (std::string_view("sSdfeEgGxXocCbBhHaA").find(conv) == std::string_view::npos) return 0;
    return i + 1 - pos;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

int hex_value(char c) {
    if (is_digit(c)) return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

// Parses "uXXXX" (possibly "uuXXXX") at body[i] == 'u'; returns chars consumed or 0.
std::size_t parse_unicode_escape(std::string_view body, std::size_t i, std::uint32_t& cp) {
    std::size_t j = i;
    while (j < body.size() && body[j] == 'u') ++j;
    if (j + 4 > body.size()) return 0;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        const int h = hex_value(body[j + k]);
        if (h < 0) return 0;
        v = v * 16 + static_cast<std::uint32_t>(h);
    }
    cp = v;
    return j + 4 - i;
}

// Per-character classification of a source file.
enum class CharClass : unsigned char { code, comment, literal };

struct LiteralSpan {
    std::size_t begin = 0;  // opening quote
    std::size_t end = 0;    // one past the closing quote
    bool text_block = false;
    bool char_literal = false;
};

struct ScannedSource {
    std::string_view text;
    std::vector<CharClass> cls;
    std::vector<LiteralSpan> literals;  // ordered by begin
    std::vector<std::size_t> line_starts;

    std::size_t line_of(std::size_t pos) const {
        auto it = std::upper_bound(line_starts.begin(), line_starts.end(), pos);
        return static_cast<std::size_t>(it - line_starts.begin());
    }
    bool is_code(std::size_t pos) const { return cls[pos] == CharClass::code; }

    const LiteralSpan* literal_at(std::size_t begin) const {
        auto it = std::lower_bound(literals.begin(), literals.end(), begin,
                                   [](const LiteralSpan& l, std::size_t b) { return l.begin < b; });
        return it != literals.end() && it->begin == begin ? &*it : nullptr;
    }
};

ScannedSource scan_source(std::string_view text) {
    ScannedSource s;
    s.text = text;
    s.cls.assign(text.size(), CharClass::code);
    s.line_starts.push_back(0);
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') s.line_starts.push_back(i + 1);
    }

    std::size_t i = 0;
    const auto n = text.size();
    auto mark = [&](std::size_t from, std::size_t to, CharClass c) {
        for (std::size_t k = from; k < to && k < n; ++k) s.cls[k] = c;
    };
    while (i < n) {
        const char c = text[i];
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            auto end = text.find('\n', i);
            if (end == std::string_view::npos) end = n;
            mark(i, end, CharClass::comment);
            i = end;
        } else if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            auto end = text.find("*/", i + 2);
            end = end == std::string_view::npos ? n : end + 2;
            mark(i, end, CharClass::comment);
            i = end;
        } else if (c == '"' && text.substr(i, 3) == "\"\"\"") {
            auto end = text.find("\"\"\"", i + 3);
            end = end == std::string_view::npos ? n : end + 3;
            mark(i, end, CharClass::literal);
            s.literals.push_back({i, end, true, false});
            i = end;
        } else if (c == '"' || c == '\'') {
            std::size_t j = i + 1;
            while (j < n && text[j] != c) {
                if (text[j] == '\\' && j + 1 < n) ++j;
                // An unterminated literal stops at the end of the line.
                if (text[j] == '\n') break;
                ++j;
            }
            const auto end = j < n && text[j] == c ? j + 1 : j;
            mark(i, end, CharClass::literal);
            s.literals.push_back({i, end, false, c == '\''});
            i = end;
        } else {
            ++i;
        }
    }
    return s;
}

std::string decode_text_block(std::string_view body) {
    // Content starts after the line terminator following the opening quotes;
    // common indentation of non-blank lines is removed.
    auto nl = body.find('\n');
    if (nl == std::string_view::npos) return decode_escapes(body);
    body.remove_prefix(nl + 1);
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= body.size()) {
        auto end = body.find('\n', start);
        if (end == std::string_view::npos) end = body.size();
        lines.push_back(body.substr(start, end - start));
        start = end + 1;
    }
    std::size_t indent = std::string_view::npos;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        const auto line = lines[li];
        const auto first = line.find_first_not_of(" \t");
        const bool last = li + 1 == lines.size();
        if (first == std::string_view::npos && !last) continue;
        indent = std::min(indent, first == std::string_view::npos ? line.size() : first);
    }
    if (indent == std::string_view::npos) indent = 0;
    std::string joined;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        auto line = lines[li];
        line.remove_prefix(std::min(indent, line.size()));
        const auto last_char = line.find_last_not_of(" \t");
        line = last_char == std::string_view::npos ? std::string_view{} : line.substr(0, last_char + 1);
        joined += line;
        if (li + 1 < lines.size()) joined += '\n';
    }
    return decode_escapes(joined);
}

std::string decode_literal(std::string_view text, const LiteralSpan& lit) {
    if (lit.text_block) {
        const auto len = lit.end - lit.begin;
        const auto body_len = len >= 6 ? len - 6 : (len > 3 ? len - 3 : 0);
        return decode_text_block(text.substr(lit.begin + 3, body_len));
    }
    const auto len = lit.end - lit.begin;
    const bool closed = len >= 2 && text[lit.end - 1] == text[lit.begin];
    return decode_escapes(text.substr(lit.begin + 1, closed ? len - 2 : len - 1));
}

// [begin, end) trimmed of whitespace and comments.
std::pair<std::size_t, std::size_t> trim_range(const ScannedSource& s, std::size_t begin, std::size_t end) {
    while (begin < end && (is_space(s.text[begin]) || s.cls[begin] == CharClass::comment)) ++begin;
    while (end > begin && (is_space(s.text[end - 1]) || s.cls[end - 1] == CharClass::comment)) --end;
    return {begin, end};
}

// Source text of an expression with comments dropped and whitespace runs
// outside literals collapsed to one space.
std::string expression_text(const ScannedSource& s, std::size_t begin, std::size_t end) {
    std::tie(begin, end) = trim_range(s, begin, end);
    std::string out;
    bool pending_space = false;
    for (std::size_t i = begin; i < end; ++i) {
        if (s.cls[i] == CharClass::comment) {
            pending_space = true;
            continue;
        }
        if (s.cls[i] == CharClass::code && is_space(s.text[i])) {
            pending_space = true;
            continue;
        }
        if (pending_space && !out.empty()) out += ' ';
        pending_space = false;
        out += s.text[i];
    }
    return out;
}

// Splits [begin, end) at top-level occurrences of sep in code.
std::vector<std::pair<std::size_t, std::size_t>> split_top_level(const ScannedSource& s, std::size_t begin,
                                                                 std::size_t end, char sep) {
    std::vector<std::pair<std::size_t, std::size_t>> parts;
    int depth = 0;
    std::size_t start = begin;
    for (std::size_t i = begin; i < end; ++i) {
        if (!s.is_code(i)) continue;
        const char c = s.text[i];
        if (c == '(' || c == '[' || c == '{') {
            ++depth;
        } else if (c == ')' || c == ']' || c == '}') {
            --depth;
        } else if (c == sep && depth == 0) {
            if (sep == '+') {
                // Skip ++ and += and unary plus after an operator.
                const bool doubled = (i + 1 < end && s.text[i + 1] == '+') || (i > begin && s.text[i - 1] == '+');
                const bool assign = i + 1 < end && s.text[i + 1] == '=';
                if (doubled || assign) continue;
                const auto [tb, te] = trim_range(s, start, i);
                if (tb == te) continue;
            }
            parts.emplace_back(start, i);
            start = i + 1;
        }
    }
    parts.emplace_back(start, end);
    return parts;
}

std::string read_identifier(std::string_view text, std::size_t& i) {
    const auto start = i;
    while (i < text.size() && is_ident_char(text[i])) ++i;
    return std::string(text.substr(start, i - start));
}

void skip_trivia(const ScannedSource& s, std::size_t& i) {
    while (i < s.text.size() && (is_space(s.text[i]) || s.cls[i] == CharClass::comment)) ++i;
}

std::string_view placeholder_marker(PlaceholderStyle style) { return style == PlaceholderStyle::braces ? "{}" : "%s"; }

} // namespace

std::string_view to_string(Level level) {
    switch (level) {
    case Level::trace: return "trace";
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    case Level::fatal: return "fatal";
    }
    return "info";
}

Level parse_level(std::string_view call_name) {
    const auto name = to_lower(call_name);
    for (auto level : kAllLevels) {
        if (name == to_string(level)) return level;
    }
    throw UnknownLevel("unknown logging level '" + std::string(call_name) + "'");
}

std::string_view to_string(WarningKind kind) {
    switch (kind) {
    case WarningKind::unbalanced_call: return "UnbalancedCall";
    case WarningKind::unknown_level: return "UnknownLevel";
    case WarningKind::placeholder_mismatch: return "PlaceholderMismatch";
    }
    return "";
}

std::vector<std::pair<std::size_t, std::size_t>> find_placeholders(std::string_view text, PlaceholderStyle style) {
    std::vector<std::pair<std::size_t, std::size_t>> found;
    std::size_t i = 0;
    while (i < text.size()) {
        if (style == PlaceholderStyle::braces) {
            if (text[i] == '{' && i + 1 < text.size() && text[i + 1] == '}') {
                found.emplace_back(i, 2);
                i += 2;
                continue;
            }
        } else if (text[i] == '%') {
            if (i + 1 < text.size() && text[i + 1] == '%') {
                i += 2;
                continue;
            }
            if (const auto len = printf_marker_length(text, i); len > 0) {
                found.emplace_back(i, len);
                i += len;
                continue;
            }
        }
        ++i;
    }
    return found;
}

std::string MessageTemplate::reconstruct() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        out += segments[i];
        if (i < placeholders.size()) out += marker(i);
    }
    return out;
}

MessageTemplate parse_template(std::string_view raw, PlaceholderStyle style) {
    MessageTemplate t;
    t.raw = std::string(raw);

    // Whitespace tokens as [begin, end) ranges.
    std::vector<std::pair<std::size_t, std::size_t>> token_ranges;
    for (std::size_t i = 0; i < raw.size();) {
        while (i < raw.size() && is_space(raw[i])) ++i;
        if (i >= raw.size()) break;
        const auto start = i;
        while (i < raw.size() && !is_space(raw[i])) ++i;
        token_ranges.emplace_back(start, i);
        t.tokens.emplace_back(raw.substr(start, i - start));
    }

    const auto markers = find_placeholders(raw, style);
    std::size_t cursor = 0;
    std::size_t token = 0;
    for (const auto& [offset, length] : markers) {
        while (token < token_ranges.size() && token_ranges[token].second <= offset) ++token;
        Placeholder p;
        p.offset = offset;
        p.length = length;
        p.token_index = token;
        p.token_offset = token < token_ranges.size() ? offset - token_ranges[token].first : 0;
        t.placeholders.push_back(p);
        t.segments.emplace_back(raw.substr(cursor, offset - cursor));
        cursor = offset + length;
    }
    t.segments.emplace_back(raw.substr(cursor));

    std::size_t mi = 0;
    for (const auto& [begin, end] : token_ranges) {
        bool has_letter = false;
        for (std::size_t i = begin; i < end; ++i) {
            while (mi < markers.size() && markers[mi].first + markers[mi].second <= i) ++mi;
            const bool in_marker = mi < markers.size() && markers[mi].first <= i;
            if (!in_marker && is_alpha(raw[i])) {
                has_letter = true;
                break;
            }
        }
        if (has_letter) ++t.word_count;
    }
    return t;
}

std::size_t count_words(std::string_view text, PlaceholderStyle style) { return parse_template(text, style).word_count; }

std::string decode_escapes(std::string_view body) {
    std::string out;
    out.reserve(body.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
        const char c = body[i];
        if (c != '\\' || i + 1 >= body.size()) {
            out += c;
            continue;
        }
        const char e = body[++i];
        switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 's': out += ' '; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case '\n': break;  // line continuation in text blocks
        case 'u': {
            std::uint32_t cp = 0;
            const auto used = parse_unicode_escape(body, i, cp);
            if (used == 0) {
                out += "\\u";
                break;
            }
            i += used - 1;
            if (cp >= 0xD800 && cp <= 0xDBFF && i + 2 < body.size() && body[i + 1] == '\\' && body[i + 2] == 'u') {
                std::uint32_t low = 0;
                const auto used2 = parse_unicode_escape(body, i + 2, low);
                if (used2 > 0 && low >= 0xDC00 && low <= 0xDFFF) {
                    cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
                    i += 1 + used2;
                }
            }
            append_utf8(out, cp);
            break;
        }
        default:
            if (e >= '0' && e <= '7') {
                std::uint32_t v = static_cast<std::uint32_t>(e - '0');
                const std::size_t max_digits = e <= '3' ? 3 : 2;
                std::size_t digits = 1;
                while (digits < max_digits && i + 1 < body.size() && body[i + 1] >= '0' && body[i + 1] <= '7') {
                    v = v * 8 + static_cast<std::uint32_t>(body[++i] - '0');
                    ++digits;
                }
                append_utf8(out, v);
            } else {
                out += '\\';
                out += e;
            }
        }
    }
    return out;
}

bool is_throwable_expression(std::string_view expr) {
    while (!expr.empty() && is_space(expr.front())) expr.remove_prefix(1);
    while (!expr.empty() && is_space(expr.back())) expr.remove_suffix(1);
    // new FooException(...) is a throwable too.
    if (expr.starts_with("new ")) {
        expr.remove_prefix(4);
        while (!expr.empty() && is_space(expr.front())) expr.remove_prefix(1);
        const auto paren = expr.find('(');
        if (paren == std::string_view::npos || expr.back() != ')') return false;
        expr = expr.substr(0, paren);
        while (!expr.empty() && is_space(expr.back())) expr.remove_suffix(1);
    }
    if (expr.empty()) return false;
    for (char c : expr) {
        if (!is_ident_char(c) && c != '.') return false;
    }
    const auto dot = expr.rfind('.');
    const auto name = dot == std::string_view::npos ? expr : expr.substr(dot + 1);
    if (name.empty()) return false;
    static constexpr std::string_view kNames[] = {"e", "ex", "t", "cause", "throwable"};
    for (auto n : kNames) {
        if (name == n) return true;
    }
    return name.ends_with("Exception") || name.ends_with("Error") || name.ends_with("Throwable");
}

ExtractResult extract_from_source(std::string_view text, const ExtractConfig& config, std::string_view file_path) {
    const std::regex receiver_re(config.receiver_pattern, std::regex::ECMAScript);
    const std::regex method_re(config.method_pattern, std::regex::ECMAScript | std::regex::icase);
    const auto src = scan_source(text);
    const std::string file(file_path);
    const auto marker = placeholder_marker(config.placeholder_style);

    ExtractResult result;
    std::size_t i = 0;
    const auto n = text.size();
    while (i < n) {
        if (!src.is_code(i) || !is_ident_start(text[i]) || (i > 0 && is_ident_char(text[i - 1]))) {
            ++i;
            continue;
        }
        const auto call_begin = i;
        const auto receiver = read_identifier(text, i);
        if (!std::regex_match(receiver, receiver_re)) continue;

        std::size_t j = i;
        skip_trivia(src, j);
        if (j >= n || text[j] != '.' || !src.is_code(j)) continue;
        ++j;
        skip_trivia(src, j);
        if (j >= n || !is_ident_start(text[j])) continue;
        const auto method = read_identifier(text, j);
        if (!std::regex_match(method, method_re)) continue;
        skip_trivia(src, j);
        if (j >= n || text[j] != '(' || !src.is_code(j)) continue;

        const auto open = j;
        int depth = 0;
        std::size_t close = n;
        for (std::size_t k = open; k < n; ++k) {
            if (!src.is_code(k)) continue;
            if (text[k] == '(') {
                ++depth;
            } else if (text[k] == ')' && --depth == 0) {
                close = k;
                break;
            }
        }

        const auto line_start = src.line_of(call_begin);
        if (close == n) {
            result.warnings.push_back({WarningKind::unbalanced_call,
                                       {file, line_start, src.line_of(n == 0 ? 0 : n - 1)},
                                       "call to " + receiver + "." + method + " never closes"});
            i = open + 1;
            continue;
        }
        SourceLocation loc{file, line_start, src.line_of(close)};
        i = close + 1;

        Level level;
        try {
            level = parse_level(method);
        } catch (const UnknownLevel& e) {
            result.warnings.push_back({WarningKind::unknown_level, loc, e.what()});
            continue;
        }

        LoggingStatement stmt;
        stmt.location = loc;
        stmt.level = level;

        auto args = split_top_level(src, open + 1, close, ',');
        if (args.size() == 1) {
            const auto [b, e] = trim_range(src, args[0].first, args[0].second);
            if (b == e) args.clear();
        }

        std::string raw;
        if (!args.empty()) {
            for (const auto& [ob, oe] : split_top_level(src, args[0].first, args[0].second, '+')) {
                const auto [b, e] = trim_range(src, ob, oe);
                const auto* lit = src.literal_at(b);
                if (lit != nullptr && lit->end == e && !lit->char_literal) {
                    raw += decode_literal(text, *lit);
                } else {
                    stmt.concatenated = true;
                    raw += marker;
                    stmt.arg_expressions.push_back(expression_text(src, b, e));
                }
            }
        }
        for (std::size_t a = 1; a < args.size(); ++a) {
            stmt.arg_expressions.push_back(expression_text(src, args[a].first, args[a].second));
        }
        stmt.message = parse_template(raw, config.placeholder_style);

        const auto placeholders = stmt.message.placeholders.size();
        const bool has_extra_args = args.size() > 1;
        if (has_extra_args && stmt.arg_expressions.size() > placeholders &&
            is_throwable_expression(stmt.arg_expressions.back())) {
            stmt.trailing_throwable = true;
        }
        const auto bound = stmt.arg_expressions.size() - (stmt.trailing_throwable ? 1 : 0);
        if (bound != placeholders) {
            std::ostringstream msg;
            msg << placeholders << " placeholder(s) but " << bound << " argument(s)";
            result.warnings.push_back({WarningKind::placeholder_mismatch, loc, msg.str()});
        }
        result.statements.push_back(std::move(stmt));
    }
    return result;
}

std::vector<std::filesystem::path> discover_sources(const std::vector<std::filesystem::path>& paths,
                                                    const ExtractConfig& config) {
    namespace fs = std::filesystem;
    auto wanted = [&](const fs::path& p) {
        const auto ext = p.extension().string();
        return std::find(config.extensions.begin(), config.extensions.end(), ext) != config.extensions.end();
    };
    std::vector<fs::path> files;
    for (const auto& root : paths) {
        const auto status = fs::status(root);
        if (!fs::exists(status)) {
            throw fs::filesystem_error("no such file or directory", root,
                                       std::make_error_code(std::errc::no_such_file_or_directory));
        }
        if (fs::is_directory(status)) {
            for (const auto& entry : fs::recursive_directory_iterator(root)) {
                if (entry.is_regular_file() && wanted(entry.path())) files.push_back(entry.path());
            }
        } else {
            files.push_back(root);
        }
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    files.erase(std::unique(files.begin(), files.end()), files.end());
    return files;
}

ExtractResult extract_files(const std::vector<std::filesystem::path>& files, const ExtractConfig& config) {
    auto extract_one = [&config](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw std::filesystem::filesystem_error("cannot open file", path,
                                                    std::make_error_code(std::errc::io_error));
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        return extract_from_source(buf.str(), config, path.generic_string());
    };

    std::vector<ExtractResult> parts(files.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(), 8));
    for (std::size_t begin = 0; begin < files.size(); begin += workers) {
        std::vector<std::future<ExtractResult>> batch;
        const auto end = std::min(files.size(), begin + workers);
        for (std::size_t f = begin; f < end; ++f) {
            batch.push_back(std::async(std::launch::async, extract_one, std::cref(files[f])));
        }
        for (std::size_t f = begin; f < end; ++f) parts[f] = batch[f - begin].get();
    }

    ExtractResult merged;
    for (auto& part : parts) {
        std::move(part.statements.begin(), part.statements.end(), std::back_inserter(merged.statements));
        std::move(part.warnings.begin(), part.warnings.end(), std::back_inserter(merged.warnings));
    }
    return merged;
}

} // namespace logprose
