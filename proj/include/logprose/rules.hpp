#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "logprose/extract.hpp"

namespace logprose {

enum class RuleId { SP1, SP2, SP3, IP1, IP2, IP3, WP1, WP2, WP3, WP4, WP5 };
enum class Aspect { structure, information, wording };
enum class RuleKind { corrective, enhancing };

inline constexpr std::array<RuleId, 11> kAllRules = {RuleId::SP1, RuleId::SP2, RuleId::SP3, RuleId::IP1,
                                                     RuleId::IP2, RuleId::IP3, RuleId::WP1, RuleId::WP2,
                                                     RuleId::WP3, RuleId::WP4, RuleId::WP5};

std::string_view to_string(RuleId rule);
std::string_view to_string(Aspect aspect);
std::string_view to_string(RuleKind kind);
std::optional<RuleId> parse_rule_id(std::string_view name);

constexpr Aspect aspect_of(RuleId rule) {
    switch (rule) {
    case RuleId::SP1: case RuleId::SP2: case RuleId::SP3: return Aspect::structure;
    case RuleId::IP1: case RuleId::IP2: case RuleId::IP3: return Aspect::information;
    default: return Aspect::wording;
    }
}

constexpr RuleKind kind_of(RuleId rule) {
    switch (rule) {
    case RuleId::SP1: case RuleId::IP1: case RuleId::IP2:
    case RuleId::WP1: case RuleId::WP2: case RuleId::WP3:
        return RuleKind::corrective;
    default:
        return RuleKind::enhancing;
    }
}

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    friend bool operator==(const Span&, const Span&) = default;
    friend auto operator<=>(const Span&, const Span&) = default;
};

struct Finding {
    RuleId rule;
    Aspect aspect;
    RuleKind kind;
    SourceLocation location;
    std::optional<Span> span;  // byte range in template raw; absent for whole-message findings
    std::string explanation;
    // WP5 only: the two spellings and every location where either occurs.
    std::vector<std::string> terms;
    std::vector<SourceLocation> related;
};

struct AspectVerdict {
    bool structure = true;
    bool information = true;
    bool wording = true;

    bool all_adequate() const { return structure && information && wording; }
    bool adequate(Aspect aspect) const;
    friend bool operator==(const AspectVerdict&, const AspectVerdict&) = default;
};

// A WP2 pattern. The regex is searched case-insensitively in the message; when
// verb_agreement is set, capture group 1 must also be a word ending in "s"
// whose stem is a dictionary word (a third-person verb form).
struct GrammarPattern {
    std::string name;
    std::string regex;
    std::string message;
    bool verb_agreement = false;
};

struct LexiconOptions {
    std::optional<std::filesystem::path> dictionary_path;
    std::optional<std::filesystem::path> confusion_pairs_path;
    std::vector<std::string> acronym_allowlist;
    std::vector<std::string> interjections;
    std::vector<std::string> anaphora_cues;
    std::vector<std::string> continuation_phrases;
    std::vector<GrammarPattern> grammar_patterns;
    bool require_dictionary = true;  // set when WP1 or WP2 is enabled
};

class Lexicon {
public:
    Lexicon() = default;

    // Throws LexiconMissing when the dictionary cannot be read and
    // options.require_dictionary is set.
    static Lexicon load(const LexiconOptions& options);

    // Defaults with an in-memory dictionary; used by tests and embedders.
    static Lexicon with_words(std::vector<std::string> words);

    // Exact lowercase lookup, then regular English inflections
    // (-s, -es, -ies, -ed, -ing, -er, -est, -ly).
    bool is_word(std::string_view lowercase) const;
    bool has_exact(std::string_view lowercase) const { return dictionary_.contains(std::string(lowercase)); }
    std::optional<std::string> correction(std::string_view lowercase) const;
    bool is_allowlisted_acronym(std::string_view token) const { return acronyms_.contains(std::string(token)); }
    bool is_interjection(std::string_view lowercase) const { return interjections_.contains(std::string(lowercase)); }
    bool is_anaphora_cue(std::string_view lowercase) const { return anaphora_.contains(std::string(lowercase)); }
    bool is_continuation_phrase(std::string_view normalized) const {
        return continuation_.contains(std::string(normalized));
    }

    struct CompiledPattern {
        GrammarPattern spec;
        std::regex re;
    };
    const std::vector<CompiledPattern>& grammar_patterns() const { return grammar_; }

    void add_word(std::string word);
    void add_confusion(std::string wrong, std::string right);
    void set_acronyms(const std::vector<std::string>& list);
    void set_interjections(const std::vector<std::string>& list);
    void set_anaphora_cues(const std::vector<std::string>& list);
    void set_continuation_phrases(const std::vector<std::string>& list);
    void set_grammar_patterns(const std::vector<GrammarPattern>& list);

    std::size_t dictionary_size() const { return dictionary_.size(); }

private:
    std::unordered_set<std::string> dictionary_;
    std::unordered_map<std::string, std::string> confusion_;
    std::unordered_set<std::string> acronyms_;
    std::unordered_set<std::string> interjections_;
    std::unordered_set<std::string> anaphora_;
    std::unordered_set<std::string> continuation_;
    std::vector<CompiledPattern> grammar_;
};

std::vector<std::string> default_acronym_allowlist();
std::vector<std::string> default_interjections();
std::vector<std::string> default_anaphora_cues();
std::vector<std::string> default_continuation_phrases();
std::vector<GrammarPattern> default_grammar_patterns();

struct InfoThresholds {
    std::size_t min_words = 2;   // IP1 fires at or below
    std::size_t max_words = 35;  // IP3 fires above
};

struct RuleOptions {
    InfoThresholds thresholds;
    std::map<RuleId, bool> enabled;  // absent means enabled
    bool wp3_exempt_error_levels = false;
    std::size_t wp5_min_occurrences = 2;

    bool is_enabled(RuleId rule) const {
        auto it = enabled.find(rule);
        return it == enabled.end() || it->second;
    }
};

std::vector<Finding> check_structure(const LoggingStatement& stmt);
std::vector<Finding> check_information(const LoggingStatement& stmt, const Lexicon& lexicon,
                                       const InfoThresholds& thresholds = {});
std::vector<Finding> check_wording(const LoggingStatement& stmt, const Lexicon& lexicon,
                                   bool exempt_error_levels = false);

// Corpus-wide WP5 pass. Order of the input does not affect the result.
std::vector<Finding> check_consistency(const std::vector<LoggingStatement>& corpus, const Lexicon& lexicon,
                                       std::size_t min_occurrences = 2);

// All per-statement checks, filtered by enable flags, sorted by (rule, span).
std::vector<Finding> check_statement(const LoggingStatement& stmt, const Lexicon& lexicon,
                                     const RuleOptions& options = {});

AspectVerdict verdict(const std::vector<Finding>& findings);

// True iff abbrev can be cut left to right into non-empty prefixes of every
// word of phrase, in order, and is strictly shorter than the joined phrase.
bool is_abbreviation(std::string_view abbrev, const std::vector<std::string>& phrase_words);

// Splits a term into words at whitespace, '_' / '-' and lower-to-upper
// camel-case boundaries.
std::vector<std::string> split_term_words(std::string_view term);

// Lowercase alphanumerics only; WP5 treats terms with equal normal forms as
// the same spelling.
std::string normalize_term(std::string_view term);

} // namespace logprose
