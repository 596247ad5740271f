#include "logprose/rules.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace logprose {

namespace {

bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// One whitespace token of a template, with its edge punctuation stripped.
struct WordToken {
    std::string_view raw;       // whole whitespace token
    std::string_view core;      // raw minus leading/trailing non-alphanumerics
    std::size_t core_offset = 0;  // offset of core in template raw
    bool has_placeholder = false;
};

std::vector<WordToken> word_tokens(const MessageTemplate& t) {
    std::vector<WordToken> out;
    const std::string_view raw = t.raw;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && is_space(raw[i])) ++i;
        if (i >= raw.size()) break;
        const auto start = i;
        while (i < raw.size() && !is_space(raw[i])) ++i;
        WordToken tok;
        tok.raw = raw.substr(start, i - start);
        auto b = start;
        auto e = i;
        while (b < e && !is_alnum(raw[b])) ++b;
        while (e > b && !is_alnum(raw[e - 1])) --e;
        tok.core = raw.substr(b, e - b);
        tok.core_offset = b;
        for (const auto& p : t.placeholders) {
            if (p.offset < i && p.offset + p.length > start) tok.has_placeholder = true;
        }
        out.push_back(tok);
    }
    return out;
}

bool all_alpha(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_alpha); }
bool all_upper_alpha(std::string_view s) { return !s.empty() && std::all_of(s.begin(), s.end(), is_upper); }

bool has_internal_capital(std::string_view s) {
    return std::any_of(s.begin() + (s.empty() ? 0 : 1), s.end(), is_upper);
}

Finding make_finding(RuleId rule, const LoggingStatement& stmt, std::optional<Span> span, std::string explanation) {
    return Finding{rule, aspect_of(rule), kind_of(rule), stmt.location, span, std::move(explanation), {}, {}};
}

bool has_two_letter_run(std::string_view s) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (is_alpha(s[i]) && is_alpha(s[i + 1])) return true;
    }
    return false;
}

// True when the text right before a placeholder ends with a "label:" token,
// allowing an opening quote or bracket between the colon and the marker.
bool ends_with_label(std::string_view before) {
    auto trim_back = [&] {
        while (!before.empty() && is_space(before.back())) before.remove_suffix(1);
    };
    trim_back();
    while (!before.empty() && std::string_view("'\"[(<").find(before.back()) != std::string_view::npos) {
        before.remove_suffix(1);
    }
    trim_back();
    if (before.empty() || before.back() != ':') return false;
    before.remove_suffix(1);
    const auto space = before.find_last_of(" \t\r\n");
    const auto label = space == std::string_view::npos ? before : before.substr(space + 1);
    return std::any_of(label.begin(), label.end(), is_alpha);
}

// Message text with placeholders removed, reduced to lowercase words.
std::string normalized_phrase(const MessageTemplate& t) {
    std::string text;
    for (std::size_t i = 0; i < t.segments.size(); ++i) {
        text += t.segments[i];
        if (i < t.placeholders.size()) text += ' ';
    }
    std::string out;
    bool space = false;
    for (char c : text) {
        if (is_alnum(c) || c == '\'' || c == '-') {
            if (space && !out.empty()) out += ' ';
            space = false;
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            space = true;
        }
    }
    return out;
}

std::string quote(std::string_view s) { return "\"" + std::string(s) + "\""; }

bool verb_agreement_violation(const Lexicon& lexicon, std::string_view word) {
    const auto w = lower(word);
    if (w.size() < 3 || !w.ends_with("s") || w.ends_with("ss") || w.ends_with("us") || w.ends_with("is")) return false;
    const auto stem = std::string_view(w).substr(0, w.size() - 1);
    if (lexicon.has_exact(stem)) return true;
    if (w.ends_with("ies") && lexicon.has_exact(std::string(w.substr(0, w.size() - 3)) + "y")) return true;
    if (w.ends_with("es")) {
        const auto es_stem = std::string_view(w).substr(0, w.size() - 2);
        if ((es_stem.ends_with("ch") || es_stem.ends_with("sh") || es_stem.ends_with("x") ||
             es_stem.ends_with("ss") || es_stem.ends_with("z")) &&
            lexicon.has_exact(es_stem)) {
            return true;
        }
    }
    return false;
}

} // namespace

std::string_view to_string(RuleId rule) {
    static constexpr std::string_view names[] = {"SP1", "SP2", "SP3", "IP1", "IP2", "IP3",
                                                 "WP1", "WP2", "WP3", "WP4", "WP5"};
    return names[static_cast<int>(rule)];
}

std::string_view to_string(Aspect aspect) {
    switch (aspect) {
    case Aspect::structure: return "Structure";
    case Aspect::information: return "Information";
    case Aspect::wording: return "Wording";
    }
    return "";
}

std::string_view to_string(RuleKind kind) { return kind == RuleKind::corrective ? "corrective" : "enhancing"; }

std::optional<RuleId> parse_rule_id(std::string_view name) {
    for (auto r : kAllRules) {
        if (lower(to_string(r)) == lower(name)) return r;
    }
    return std::nullopt;
}

bool AspectVerdict::adequate(Aspect aspect) const {
    switch (aspect) {
    case Aspect::structure: return structure;
    case Aspect::information: return information;
    case Aspect::wording: return wording;
    }
    return true;
}

std::vector<Finding> check_structure(const LoggingStatement& stmt) {
    std::vector<Finding> out;
    const auto& t = stmt.message;
    const auto n = t.placeholders.size();

    // SP1: maximal runs of placeholders separated only by weak text.
    std::size_t run_start = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        const bool joined = i < n && !has_two_letter_run(t.segments[i]);
        if (joined) continue;
        const auto run_len = i - run_start;
        if (run_len >= 2) {
            const auto& first = t.placeholders[run_start];
            const auto& last = t.placeholders[i - 1];
            std::ostringstream msg;
            msg << run_len << " variables are printed one after another without descriptive text; "
                << "give each a clear boundary and label (SP1: have clear boundaries and distinctions among items)";
            out.push_back(make_finding(RuleId::SP1, stmt, Span{first.offset, last.offset + last.length}, msg.str()));
        }
        run_start = i;
    }

    if (n >= 2) {
        std::size_t labeled = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ends_with_label(t.segments[i])) ++labeled;
        }
        if (labeled < n) {
            std::ostringstream msg;
            msg << labeled << " of " << n << " variables carry a \"label:\" prefix; a key: value layout is "
                << "easier to parse (SP2: use an easy-to-parse structure if needed and possible)";
            out.push_back(make_finding(RuleId::SP2, stmt, std::nullopt, msg.str()));
        }
    }

    if (stmt.concatenated) {
        out.push_back(make_finding(RuleId::SP3, stmt, std::nullopt,
                                   "message is built by string concatenation; use placeholders instead "
                                   "(SP3: use parameterized logging to present the variables)"));
    }
    return out;
}

std::vector<Finding> check_information(const LoggingStatement& stmt, const Lexicon& lexicon,
                                       const InfoThresholds& thresholds) {
    std::vector<Finding> out;
    const auto& t = stmt.message;
    const auto words = t.word_count;

    if (words <= thresholds.min_words || (!t.placeholders.empty() && words == 0)) {
        std::ostringstream msg;
        msg << "message has only " << words << " word(s); say what happened, to what, and why "
            << "(IP1: provide proper context for the run-time behaviors)";
        out.push_back(make_finding(RuleId::IP1, stmt, std::nullopt, msg.str()));
    }

    const auto tokens = word_tokens(t);
    std::optional<Span> cue_span;
    for (const auto& tok : tokens) {
        if (tok.has_placeholder || !std::any_of(tok.core.begin(), tok.core.end(), is_alpha)) continue;
        if (lexicon.is_anaphora_cue(lower(tok.core))) cue_span = Span{tok.core_offset, tok.core_offset + tok.core.size()};
        break;
    }
    const auto phrase = normalized_phrase(t);
    if (cue_span) {
        out.push_back(make_finding(RuleId::IP2, stmt, cue_span,
                                   "message opens with a reference to something said elsewhere; make it "
                                   "self-explanatory (IP2: write a self-explanatory log message that is "
                                   "independent of other log messages; heuristic, low confidence)"));
    } else if (!phrase.empty() && lexicon.is_continuation_phrase(phrase)) {
        out.push_back(make_finding(RuleId::IP2, stmt, std::nullopt,
                                   "message " + quote(phrase) + " only makes sense next to a preceding log line "
                                   "(IP2: write a self-explanatory log message that is independent of other "
                                   "log messages; heuristic, low confidence)"));
    }

    if (words > thresholds.max_words) {
        bool tail_only = !t.placeholders.empty() && !t.tokens.empty();
        for (const auto& p : t.placeholders) {
            if (static_cast<double>(p.token_index) < 0.75 * static_cast<double>(t.tokens.size())) tail_only = false;
        }
        std::ostringstream msg;
        msg << "message has " << words << " words";
        if (tail_only) msg << " and every variable sits in its final quarter";
        msg << "; lead with the key information and move instructions elsewhere "
            << "(IP3: minimize noise, emphasize the key information)";
        out.push_back(make_finding(RuleId::IP3, stmt, std::nullopt, msg.str()));
    }
    return out;
}

std::vector<Finding> check_wording(const LoggingStatement& stmt, const Lexicon& lexicon, bool exempt_error_levels) {
    std::vector<Finding> out;
    const auto& t = stmt.message;
    const auto tokens = word_tokens(t);
    auto span_of = [](const WordToken& tok) { return Span{tok.core_offset, tok.core_offset + tok.core.size()}; };

    // WP1
    for (const auto& tok : tokens) {
        if (tok.has_placeholder || tok.core.empty()) continue;
        const auto folded = lower(tok.core);
        if (auto fix = lexicon.correction(folded)) {
            out.push_back(make_finding(RuleId::WP1, stmt, span_of(tok),
                                       quote(tok.core) + " looks like a typo for " + quote(*fix) +
                                           " (WP1: use standard English words)"));
            continue;
        }
        if (!all_alpha(tok.core) || tok.core.size() < 3 || has_internal_capital(tok.core)) continue;
        if (!lexicon.is_word(folded)) {
            out.push_back(make_finding(RuleId::WP1, stmt, span_of(tok),
                                       quote(tok.core) + " is not a dictionary word; check for a typo or an "
                                       "incomplete word (WP1: use standard English words)"));
        }
    }

    // WP2
    for (const auto& pattern : lexicon.grammar_patterns()) {
        const std::string& raw = t.raw;
        for (auto it = std::sregex_iterator(raw.begin(), raw.end(), pattern.re); it != std::sregex_iterator(); ++it) {
            const auto& m = *it;
            if (pattern.spec.verb_agreement) {
                if (m.size() < 2 || !m[1].matched || !verb_agreement_violation(lexicon, m[1].str())) continue;
            }
            const auto begin = static_cast<std::size_t>(m.position(0));
            out.push_back(make_finding(RuleId::WP2, stmt, Span{begin, begin + static_cast<std::size_t>(m.length(0))},
                                       quote(m.str(0)) + ": " + pattern.spec.message +
                                           " (WP2: follow the convention of written language)"));
        }
    }

    // WP3
    const bool wp3_applies = !(exempt_error_levels && (stmt.level == Level::error || stmt.level == Level::fatal));
    if (wp3_applies) {
        const auto bangs = std::count(t.raw.begin(), t.raw.end(), '!');
        if (bangs >= 2) {
            const auto first = t.raw.find('!');
            const auto last = t.raw.rfind('!');
            std::ostringstream msg;
            msg << bangs << " exclamation marks make the message emotional "
                << "(WP3: use impartial and neutral wording)";
            out.push_back(make_finding(RuleId::WP3, stmt, Span{first, last + 1}, msg.str()));
        }
        for (const auto& tok : tokens) {
            if (tok.has_placeholder) continue;
            if (all_upper_alpha(tok.core) && tok.core.size() >= 4 && !lexicon.is_allowlisted_acronym(tok.core)) {
                out.push_back(make_finding(RuleId::WP3, stmt, span_of(tok),
                                           quote(tok.core) + " is shouted in capitals "
                                           "(WP3: use impartial and neutral wording)"));
            } else if (lexicon.is_interjection(lower(tok.core))) {
                out.push_back(make_finding(RuleId::WP3, stmt, span_of(tok),
                                           quote(tok.core) + " is an informal interjection "
                                           "(WP3: use impartial and neutral wording)"));
            }
        }
    }

    // WP4
    for (const auto& tok : tokens) {
        if (tok.has_placeholder) continue;
        if (all_upper_alpha(tok.core) && tok.core.size() >= 2 && tok.core.size() <= 5 &&
            !lexicon.is_allowlisted_acronym(tok.core) && !lexicon.is_word(lower(tok.core))) {
            out.push_back(make_finding(RuleId::WP4, stmt, span_of(tok),
                                       quote(tok.core) + " is an acronym readers may not know; spell it out or "
                                       "add it to the allowlist (WP4: be careful on using abbreviations and acronyms)"));
        }
    }
    return out;
}

std::vector<std::string> split_term_words(std::string_view term) {
    std::vector<std::string> words;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) words.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < term.size(); ++i) {
        const char c = term[i];
        if (!is_alnum(c)) {
            flush();
            continue;
        }
        if (!cur.empty() && is_upper(c)) {
            const char prev = term[i - 1];
            const bool next_lower = i + 1 < term.size() && is_lower(term[i + 1]);
            if (is_lower(prev) || is_digit(prev) || (is_upper(prev) && next_lower)) flush();
        }
        cur += c;
    }
    flush();
    return words;
}

std::string normalize_term(std::string_view term) {
    std::string out;
    for (char c : term) {
        if (is_alnum(c)) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool is_abbreviation(std::string_view abbrev, const std::vector<std::string>& phrase_words) {
    const auto a = normalize_term(abbrev);
    std::vector<std::string> words;
    std::size_t total = 0;
    for (const auto& w : phrase_words) {
        auto nw = normalize_term(w);
        if (nw.empty()) continue;
        total += nw.size();
        words.push_back(std::move(nw));
    }
    if (a.empty() || words.empty() || a.size() >= total || a.size() < words.size()) return false;

    // reachable[w][p]: the first w words consumed exactly a[0, p).
    std::vector<std::vector<char>> reachable(words.size() + 1, std::vector<char>(a.size() + 1, 0));
    reachable[0][0] = 1;
    for (std::size_t w = 0; w < words.size(); ++w) {
        for (std::size_t p = 0; p < a.size(); ++p) {
            if (!reachable[w][p]) continue;
            for (std::size_t len = 1; len <= words[w].size() && p + len <= a.size(); ++len) {
                if (a[p + len - 1] != words[w][len - 1]) break;
                reachable[w + 1][p + len] = 1;
            }
        }
    }
    return reachable[words.size()][a.size()] != 0;
}

std::vector<Finding> check_consistency(const std::vector<LoggingStatement>& corpus, const Lexicon& lexicon,
                                       std::size_t min_occurrences) {
    struct Term {
        std::set<std::string> spellings;
        std::vector<SourceLocation> locations;
        std::size_t occurrences = 0;
    };
    std::map<std::string, Term> terms;  // by normalized form

    auto capitalized = [](std::string_view s) { return !s.empty() && is_upper(s.front()); };
    auto identifier_like = [](std::string_view s) {
        const bool letters = std::any_of(s.begin(), s.end(), is_alpha);
        const bool digits = std::any_of(s.begin(), s.end(), is_digit);
        return letters && (has_internal_capital(s) || s.find('_') != std::string_view::npos || digits);
    };
    auto add = [&](const std::string& surface, const SourceLocation& loc) {
        auto key = normalize_term(surface);
        if (key.size() < 2) return;
        auto& term = terms[key];
        term.spellings.insert(surface);
        term.locations.push_back(loc);
        ++term.occurrences;
    };

    for (const auto& stmt : corpus) {
        const auto tokens = word_tokens(stmt.message);
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            const auto& tok = tokens[i];
            if (tok.has_placeholder || tok.core.empty()) continue;
            if (!std::any_of(tok.core.begin(), tok.core.end(), is_alpha)) continue;
            if (capitalized(tok.core) || identifier_like(tok.core)) add(std::string(tok.core), stmt.location);

            if (i + 1 < tokens.size()) {
                const auto& next = tokens[i + 1];
                const bool clean_join = tok.raw.end() == tok.core.end() && next.raw.begin() == next.core.begin();
                if (clean_join && !next.has_placeholder && capitalized(tok.core) && capitalized(next.core) &&
                    all_alpha(tok.core) && all_alpha(next.core)) {
                    add(std::string(tok.core) + " " + std::string(next.core), stmt.location);
                }
            }
        }
    }

    struct Match {
        const std::string* abbrev_key;
        const std::string* phrase_key;
        std::size_t words;
    };
    std::vector<Finding> out;
    for (const auto& [akey, aterm] : terms) {
        if (lexicon.is_word(akey)) continue;
        const auto& abbrev = *aterm.spellings.begin();
        std::vector<Match> matches;
        for (const auto& [bkey, bterm] : terms) {
            if (bkey == akey) continue;
            if (aterm.occurrences + bterm.occurrences < min_occurrences) continue;
            const auto words = split_term_words(*bterm.spellings.begin());
            if (words.size() < 1 || !is_abbreviation(abbrev, words)) continue;
            matches.push_back({&akey, &bkey, words.size()});
        }
        if (matches.empty()) continue;
        std::size_t best = 0;
        for (const auto& m : matches) best = std::max(best, m.words);
        for (const auto& m : matches) {
            if (m.words != best) continue;
            const auto& bterm = terms.at(*m.phrase_key);
            const auto& phrase = *bterm.spellings.begin();
            Finding f{RuleId::WP5, aspect_of(RuleId::WP5), kind_of(RuleId::WP5), {}, std::nullopt, {}, {}, {}};
            f.terms = {abbrev, phrase};
            f.related = aterm.locations;
            f.related.insert(f.related.end(), bterm.locations.begin(), bterm.locations.end());
            std::sort(f.related.begin(), f.related.end());
            f.related.erase(std::unique(f.related.begin(), f.related.end()), f.related.end());
            auto first_a = std::min_element(aterm.locations.begin(), aterm.locations.end());
            f.location = *first_a;
            f.explanation = quote(abbrev) + " and " + quote(phrase) +
                            " appear to name the same thing; pick one spelling (WP5: be consistent on the "
                            "wording of domain-specific terms)";
            out.push_back(std::move(f));
        }
    }
    return out;
}

std::vector<Finding> check_statement(const LoggingStatement& stmt, const Lexicon& lexicon, const RuleOptions& options) {
    std::vector<Finding> all = check_structure(stmt);
    auto info = check_information(stmt, lexicon, options.thresholds);
    auto wording = check_wording(stmt, lexicon, options.wp3_exempt_error_levels);
    std::move(info.begin(), info.end(), std::back_inserter(all));
    std::move(wording.begin(), wording.end(), std::back_inserter(all));
    std::erase_if(all, [&](const Finding& f) { return !options.is_enabled(f.rule); });
    std::stable_sort(all.begin(), all.end(), [](const Finding& a, const Finding& b) {
        if (a.rule != b.rule) return a.rule < b.rule;
        // Whole-message findings sort before spanned ones.
        if (a.span.has_value() != b.span.has_value()) return !a.span.has_value();
        return a.span.has_value() && *a.span < *b.span;
    });
    return all;
}

AspectVerdict verdict(const std::vector<Finding>& findings) {
    AspectVerdict v;
    for (const auto& f : findings) {
        if (f.kind != RuleKind::corrective) continue;
        switch (f.aspect) {
        case Aspect::structure: v.structure = false; break;
        case Aspect::information: v.information = false; break;
        case Aspect::wording: v.wording = false; break;
        }
    }
    return v;
}

} // namespace logprose
