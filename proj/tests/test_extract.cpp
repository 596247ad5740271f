#include <doctest.h>

#include <cctype>
#include <random>
#include <sstream>

#include "logprose/errors.hpp"
#include "logprose/extract.hpp"

using namespace logprose;

namespace {

const std::string kFixtures = LOGPROSE_FIXTURES;

// Independent word counter: split on ASCII whitespace, drop "{}" markers, keep
// tokens that still contain a letter.
std::size_t oracle_word_count(const std::string& text) {
    std::size_t count = 0;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) {
        std::string stripped;
        for (std::size_t i = 0; i < tok.size(); ++i) {
            if (tok[i] == '{' && i + 1 < tok.size() && tok[i + 1] == '}') {
                ++i;
                continue;
            }
            stripped += tok[i];
        }
        bool letter = false;
        for (char c : stripped) letter = letter || std::isalpha(static_cast<unsigned char>(c));
        count += letter ? 1 : 0;
    }
    return count;
}

ExtractResult extract(const std::string& src) { return extract_from_source(src, ExtractConfig{}, "T.java"); }

} // namespace

TEST_CASE("parse_template splits the repair template") {
    const auto t = parse_template("[repair #{}] Repair completed between {} and {} on {}");
    CHECK(t.placeholders.size() == 4);
    REQUIRE(t.segments.size() == 5);
    CHECK(t.segments[0] == "[repair #");
    CHECK(t.segments[1] == "] Repair completed between ");
    CHECK(t.segments[4] == "");
    CHECK(t.word_count == 6);
    CHECK(t.reconstruct() == t.raw);
}

TEST_CASE("parse_template on short and empty messages") {
    const auto started = parse_template("Started.");
    CHECK(started.placeholders.empty());
    CHECK(started.segments == std::vector<std::string>{"Started."});
    CHECK(started.word_count == 1);

    const auto empty = parse_template("");
    CHECK(empty.placeholders.empty());
    CHECK(empty.segments == std::vector<std::string>{""});
    CHECK(empty.word_count == 0);
}

TEST_CASE("printf style markers") {
    const auto t = parse_template("took %d ms for %s", PlaceholderStyle::printf);
    CHECK(t.placeholders.size() == 2);
    CHECK(t.word_count == 3);
    CHECK(t.reconstruct() == t.raw);
    CHECK(parse_template("100%% done", PlaceholderStyle::printf).placeholders.empty());
}

TEST_CASE("placeholder token bookkeeping") {
    const auto t = parse_template("id={} and {}{}");
    REQUIRE(t.placeholders.size() == 3);
    CHECK(t.tokens[t.placeholders[0].token_index] == "id={}");
    CHECK(t.placeholders[0].token_offset == 3);
    CHECK(t.placeholders[1].token_index == t.placeholders[2].token_index);
    CHECK(t.marker(2) == "{}");
}

TEST_CASE("round trip and word count agree with an independent oracle") {
    std::mt19937 gen(7);
    const std::string alphabet = "{}{} ab.:\t#1";
    for (int trial = 0; trial < 2000; ++trial) {
        std::string s;
        const int len = static_cast<int>(gen() % 24);
        for (int i = 0; i < len; ++i) s += alphabet[gen() % alphabet.size()];
        const auto t = parse_template(s);
        CHECK(t.reconstruct() == s);
        CHECK(t.segments.size() == t.placeholders.size() + 1);
        for (const auto& seg : t.segments) CHECK(find_placeholders(seg, PlaceholderStyle::braces).empty());
        for (std::size_t i = 1; i < t.placeholders.size(); ++i)
            CHECK(t.placeholders[i].offset >= t.placeholders[i - 1].offset + t.placeholders[i - 1].length);
        CHECK(t.word_count == oracle_word_count(s));
    }
}

TEST_CASE("parse_level") {
    CHECK(parse_level("info") == Level::info);
    CHECK(parse_level("WARN") == Level::warn);
    CHECK(parse_level("Fatal") == Level::fatal);
    CHECK_THROWS_AS(parse_level("log"), UnknownLevel);
    for (auto level : kAllLevels) CHECK(parse_level(to_string(level)) == level);
}

TEST_CASE("decode_escapes") {
    CHECK(decode_escapes(R"(a\tb)") == "a\tb");
    CHECK(decode_escapes(R"(q\"q)") == "q\"q");
    CHECK(decode_escapes(R"(\u00e9)") == "\xC3\xA9");
    CHECK(decode_escapes(R"(back\\slash)") == "back\\slash");
}

TEST_CASE("throwable expressions") {
    CHECK(is_throwable_expression("e"));
    CHECK(is_throwable_expression("ex"));
    CHECK(is_throwable_expression("ioException"));
    CHECK_FALSE(is_throwable_expression("count"));
}

TEST_CASE("multi-line placeholder statement") {
    const auto r = extract_files({kFixtures + "/violate/Bootstrap.java"}, ExtractConfig{});
    REQUIRE(r.statements.size() == 1);
    const auto& s = r.statements[0];
    CHECK(s.level == Level::debug);
    CHECK(s.message.raw == "Bootstrap variables: {} {} {} {})");
    CHECK(s.message.placeholders.size() == 4);
    CHECK(s.arg_expressions.size() == 4);
    CHECK_FALSE(s.concatenated);
    CHECK_FALSE(s.trailing_throwable);
    CHECK(s.location.line_start == 3);
    CHECK(s.location.line_end == 7);
    CHECK(r.warnings.empty());
}

TEST_CASE("concatenated statement with trailing exception") {
    const auto r = extract_files({kFixtures + "/snippets/Formatting.java"}, ExtractConfig{});
    REQUIRE(r.statements.size() == 1);
    const auto& s = r.statements[0];
    CHECK(s.level == Level::error);
    CHECK(s.concatenated);
    CHECK(s.trailing_throwable);
    CHECK(s.message.raw == "Exception when formatting: '{}' from: '{}' to: '{}'");
    CHECK(s.message.placeholders.size() == 3);
    CHECK(s.arg_expressions == std::vector<std::string>{"dateStr", "fromFormat", "toFormat", "e"});
}

TEST_CASE("adjacent literal concatenation is merged") {
    const auto r = extract_files({kFixtures + "/comply/Repair.java"}, ExtractConfig{});
    REQUIRE(r.statements.size() == 1);
    const auto& s = r.statements[0];
    CHECK(s.message.raw == "[repair #{}] Repair completed between {} and {} on {}");
    CHECK_FALSE(s.concatenated);
    CHECK(s.arg_expressions.size() == 4);
}

TEST_CASE("comments, strings and non-logging calls are ignored") {
    const auto r = extract(
        "class A {\n"
        "  // LOG.info(\"commented\");\n"
        "  /* logger.warn(\"block\"); */\n"
        "  String s = \"LOG.info(\\\"inside\\\")\";\n"
        "  void f() { if (LOG.isDebugEnabled()) other.info(\"x\"); }\n"
        "  void g() { log.trace(\"kept {}\", a); }\n"
        "}\n");
    REQUIRE(r.statements.size() == 1);
    CHECK(r.statements[0].message.raw == "kept {}");
    CHECK(r.statements[0].level == Level::trace);
    CHECK(r.statements[0].location.line_start == 6);
}

TEST_CASE("nested arguments stay whole") {
    const auto r = extract("LOG.warn(\"a {} b {}\", f(x, y), new int[]{1, 2});\n");
    REQUIRE(r.statements.size() == 1);
    CHECK(r.statements[0].arg_expressions == std::vector<std::string>{"f(x, y)", "new int[]{1, 2}"});
    CHECK(r.warnings.empty());
}

TEST_CASE("warnings") {
    SUBCASE("unbalanced call") {
        const auto r = extract("LOG.info(\"x {}\", foo(\n");
        CHECK(r.statements.empty());
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].kind == WarningKind::unbalanced_call);
    }
    SUBCASE("placeholder mismatch") {
        const auto r = extract("LOG.info(\"x {} {}\", a);\n");
        REQUIRE(r.statements.size() == 1);
        REQUIRE(r.warnings.size() == 1);
        CHECK(r.warnings[0].kind == WarningKind::placeholder_mismatch);
    }
    SUBCASE("exception does not count as an argument") {
        const auto r = extract("LOG.error(\"failed {}\", id, e);\n");
        REQUIRE(r.statements.size() == 1);
        CHECK(r.statements[0].trailing_throwable);
        CHECK(r.warnings.empty());
    }
}

TEST_CASE("file without logging calls") {
    const auto r = extract("class Empty { int x = 1; }\n");
    CHECK(r.statements.empty());
    CHECK(r.warnings.empty());
}

TEST_CASE("directory extraction is deterministic and ordered") {
    ExtractConfig cfg;
    const auto files = discover_sources({kFixtures}, cfg);
    REQUIRE(files.size() >= 10);
    CHECK(std::is_sorted(files.begin(), files.end()));

    const auto a = extract_files(files, cfg);
    const auto b = extract_files(files, cfg);
    REQUIRE(a.statements.size() == b.statements.size());
    std::size_t seq = 0;
    for (const auto& f : files) {
        const auto one = extract_files({f}, cfg);
        for (const auto& s : one.statements) {
            REQUIRE(seq < a.statements.size());
            CHECK(a.statements[seq].location == s.location);
            CHECK(a.statements[seq].message.raw == s.message.raw);
            ++seq;
        }
    }
    CHECK(seq == a.statements.size());
    for (std::size_t i = 0; i < a.statements.size(); ++i) {
        CHECK(a.statements[i].location == b.statements[i].location);
        CHECK(a.statements[i].message.raw == b.statements[i].message.raw);
    }
}

TEST_CASE("extensions filter") {
    ExtractConfig cfg;
    cfg.extensions = {".kt"};
    CHECK(discover_sources({kFixtures}, cfg).empty());
}
