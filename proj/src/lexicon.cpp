#include <algorithm>
#include <cctype>
#include <fstream>

#include "logprose/errors.hpp"
#include "logprose/rules.hpp"

namespace logprose {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool is_vowel(char c) { return std::string_view("aeiou").find(c) != std::string_view::npos; }

} // namespace

std::vector<std::string> default_acronym_allowlist() {
    return {"ACK",  "ACL",  "AES",   "AM",   "API",  "ASCII", "AWS",  "CLI",  "CPU",  "CRC",  "CSS",  "CSV",
            "DB",   "DC",   "DNS",   "EOF",  "FTP",  "GB",    "GC",   "GMT",  "GPU",  "GUI",  "HA",   "HDFS",
            "HTML", "HTTP", "HTTPS", "ID",   "IDE",  "IO",    "IP",   "JAR",  "JDBC", "JDK",  "JMS",  "JMX",
            "JNDI", "JRE",  "JSON",  "JVM",  "JWT",  "KB",    "LDAP", "MB",   "MS",   "NFS",  "NIO",  "NTP",
            "OK",   "OS",   "PDF",   "PID",  "QPS",  "RAM",   "REST", "RPC",  "RSA",  "SASL", "SDK",  "SHA",
            "SLA",  "SMTP", "SQL",   "SSH",  "SSL",  "TB",    "TCP",  "TLS",  "TTL",  "UDP",  "UI",   "URI",
            "URL",  "UTC",  "UTF",   "UUID", "VM",   "WAL",   "XML",  "YAML", "YARN", "ZK"};
}

std::vector<std::string> default_interjections() {
    return {"uh-oh", "oops", "whoops", "yay",  "hooray", "wow",   "ouch", "argh",  "ugh",   "yikes", "damn",
            "geez",  "jeez", "omg",    "wtf",  "lol",    "haha",  "hahaha", "hmm", "hmmm",  "meh",   "duh",
            "phew",  "aha",  "woohoo", "yippee", "crap", "bah",   "eek",  "gosh",  "oh-no", "uh",    "boom"};
}

std::vector<std::string> default_anaphora_cues() { return {"it", "this", "that", "these", "those", "they"}; }

std::vector<std::string> default_continuation_phrases() {
    return {"full exception",   "details",       "stack trace", "stacktrace",  "full stack trace", "more details",
            "exception details", "error details", "see above",   "as above",    "same as above",    "continued",
            "cause",            "full error",    "full trace",  "trace"};
}

std::vector<GrammarPattern> default_grammar_patterns() {
    return {
        {"negated-third-person",
         R"(\b(?:do|does|did)(?:\s+not|n't|nt)\s+([a-z]+s)\b)",
         "verb after \"do not\" should be in base form",
         true},
        {"repeated-word", R"(\b([a-z]{2,})\s+\1\b)", "word is repeated", false},
    };
}

Lexicon Lexicon::load(const LexiconOptions& options) {
    Lexicon lex;
    if (options.dictionary_path) {
        std::ifstream in(*options.dictionary_path);
        if (!in && options.require_dictionary) {
            throw LexiconMissing("cannot read dictionary file " + options.dictionary_path->string());
        }
        std::string line;
        while (std::getline(in, line)) {
            auto w = trim(line);
            if (!w.empty()) lex.add_word(std::move(w));
        }
    } else if (options.require_dictionary) {
        throw LexiconMissing("no dictionary configured");
    }

    if (options.confusion_pairs_path) {
        std::ifstream in(*options.confusion_pairs_path);
        if (!in) throw LexiconMissing("cannot read confusion pairs " + options.confusion_pairs_path->string());
        std::string line;
        while (std::getline(in, line)) {
            const auto comma = line.find(',');
            if (comma == std::string::npos) continue;
            auto wrong = trim(std::string_view(line).substr(0, comma));
            auto right = trim(std::string_view(line).substr(comma + 1));
            if (!wrong.empty() && !right.empty()) lex.add_confusion(std::move(wrong), std::move(right));
        }
    }

    lex.set_acronyms(options.acronym_allowlist.empty() ? default_acronym_allowlist() : options.acronym_allowlist);
    lex.set_interjections(options.interjections.empty() ? default_interjections() : options.interjections);
    lex.set_anaphora_cues(options.anaphora_cues.empty() ? default_anaphora_cues() : options.anaphora_cues);
    lex.set_continuation_phrases(options.continuation_phrases.empty() ? default_continuation_phrases()
                                                                      : options.continuation_phrases);
    lex.set_grammar_patterns(options.grammar_patterns.empty() ? default_grammar_patterns() : options.grammar_patterns);
    return lex;
}

Lexicon Lexicon::with_words(std::vector<std::string> words) {
    Lexicon lex;
    for (auto& w : words) lex.add_word(std::move(w));
    lex.set_acronyms(default_acronym_allowlist());
    lex.set_interjections(default_interjections());
    lex.set_anaphora_cues(default_anaphora_cues());
    lex.set_continuation_phrases(default_continuation_phrases());
    lex.set_grammar_patterns(default_grammar_patterns());
    return lex;
}

void Lexicon::add_word(std::string word) { dictionary_.insert(lower(word)); }

void Lexicon::add_confusion(std::string wrong, std::string right) { confusion_[lower(wrong)] = std::move(right); }

void Lexicon::set_acronyms(const std::vector<std::string>& list) {
    acronyms_.clear();
    for (const auto& a : list) {
        std::string up(a);
        for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        acronyms_.insert(std::move(up));
    }
}

void Lexicon::set_interjections(const std::vector<std::string>& list) {
    interjections_.clear();
    for (const auto& w : list) interjections_.insert(lower(w));
}

void Lexicon::set_anaphora_cues(const std::vector<std::string>& list) {
    anaphora_.clear();
    for (const auto& w : list) anaphora_.insert(lower(w));
}

void Lexicon::set_continuation_phrases(const std::vector<std::string>& list) {
    continuation_.clear();
    for (const auto& w : list) continuation_.insert(lower(w));
}

void Lexicon::set_grammar_patterns(const std::vector<GrammarPattern>& list) {
    grammar_.clear();
    for (const auto& p : list) {
        try {
            grammar_.push_back({p, std::regex(p.regex, std::regex::ECMAScript | std::regex::icase)});
        } catch (const std::regex_error& e) {
            throw ConfigError("grammar pattern '" + p.name + "': " + e.what());
        }
    }
}

std::optional<std::string> Lexicon::correction(std::string_view lowercase) const {
    auto it = confusion_.find(std::string(lowercase));
    if (it == confusion_.end()) return std::nullopt;
    return it->second;
}

bool Lexicon::is_word(std::string_view w) const {
    if (has_exact(w)) return true;
    if (w.size() < 4) return false;

    auto has = [this](std::string_view stem) { return stem.size() >= 2 && has_exact(stem); };
    auto cat = [](std::string_view a, std::string_view b) { return std::string(a) + std::string(b); };
    // Stem with a restored silent 'e' or an undoubled final consonant.
    auto has_verb_stem = [&](std::string_view stem) {
        if (stem.size() < 2) return false;
        if (has(stem) || has(cat(stem, "e"))) return true;
        const auto n = stem.size();
        if (n >= 3 && stem[n - 1] == stem[n - 2] && !is_vowel(stem[n - 1]) && has(stem.substr(0, n - 1))) return true;
        if (stem.back() == 'i' && has(cat(stem.substr(0, n - 1), "y"))) return true;
        return false;
    };

    if (w.ends_with("ies") && has(cat(w.substr(0, w.size() - 3), "y"))) return true;
    if (w.ends_with("es") && has(w.substr(0, w.size() - 2))) return true;
    if (w.ends_with("s") && !w.ends_with("ss") && has(w.substr(0, w.size() - 1))) return true;
    if (w.ends_with("ed") && has_verb_stem(w.substr(0, w.size() - 2))) return true;
    if (w.ends_with("ing") && has_verb_stem(w.substr(0, w.size() - 3))) return true;
    if (w.ends_with("er") && has_verb_stem(w.substr(0, w.size() - 2))) return true;
    if (w.ends_with("est") && has_verb_stem(w.substr(0, w.size() - 3))) return true;
    if (w.ends_with("ily") && has(cat(w.substr(0, w.size() - 3), "y"))) return true;
    if (w.ends_with("ly") && has(w.substr(0, w.size() - 2))) return true;
    if (w.ends_with("ally") && has(w.substr(0, w.size() - 4))) return true;
    // Plural of an inflected form, e.g. "settings", "handlers".
    if (w.ends_with("s") && !w.ends_with("ss")) {
        const auto stem = w.substr(0, w.size() - 1);
        if ((stem.ends_with("ing") && has_verb_stem(stem.substr(0, stem.size() - 3))) ||
            (stem.ends_with("er") && has_verb_stem(stem.substr(0, stem.size() - 2)))) {
            return true;
        }
    }
    return false;
}

} // namespace logprose
