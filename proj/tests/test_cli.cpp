#include <doctest.h>

#include <set>
#include <sstream>

#include "logprose/cli.hpp"
#include "logprose/errors.hpp"
#include "support.hpp"

using namespace logprose;
using namespace logprose::testing;
using nlohmann::json;

namespace {

const std::string kFixtures = LOGPROSE_FIXTURES;

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

// Small settings so the learning commands finish quickly.
const char* kFastConfig = R"({
  "learn": {
    "embedding": {"dimension": 8, "epochs": 2},
    "rf": {"n_trees": 5},
    "folds": 3
  }
})";

} // namespace

TEST_CASE("csv round trip") {
    std::vector<LabeledCsvRow> rows = {
        {"plain message", Level::info, 1, 1, 1},
        {"has, comma and \"quotes\"", Level::warn, 0, 1, 0},
        {"multi\nline\r\nmessage", Level::error, 1, 0, 1},
        {"  padded  ", Level::trace, 0, 0, 0},
    };
    std::stringstream s(labeled_csv_text(rows));
    CHECK(read_labeled_csv(s) == rows);

    std::mt19937 gen(3);
    const std::string alphabet = "ab ,\"\r\n{}";
    for (int t = 0; t < 300; ++t) {
        std::vector<std::vector<std::string>> records;
        const std::size_t width = 1 + gen() % 4;
        for (std::size_t r = 0; r < 1 + gen() % 5; ++r) {
            std::vector<std::string> rec;
            for (std::size_t c = 0; c < width; ++c) {
                std::string f;
                for (std::size_t i = 0; i < gen() % 6; ++i) f += alphabet[gen() % alphabet.size()];
                rec.push_back(f);
            }
            records.push_back(rec);
        }
        std::stringstream buf;
        for (const auto& rec : records) write_csv_record(buf, rec);
        CHECK(parse_csv(buf) == records);
    }
}

TEST_CASE("csv errors carry the row number") {
    auto read = [](const std::string& text) {
        std::stringstream s(text);
        return read_labeled_csv(s);
    };
    const std::string header = "message,level,structure,information,wording\n";
    CHECK(read(header + "ok,info,1,1,1\n\nfine,warn,0,0,1\n").size() == 2);
    CHECK(read("\xEF\xBB\xBF" + header + "ok,info,1,1,1\n").size() == 1);

    auto row_of = [&](const std::string& text) -> std::size_t {
        try {
            read(text);
        } catch (const MalformedCsv& e) {
            return e.row();
        }
        return 0;
    };
    CHECK(row_of(header + "ok,info,1,1,1\nbad,info,2,1,1\n") == 3);
    CHECK(row_of(header + "ok,loud,1,1,1\n") == 2);
    CHECK(row_of(header + ",info,1,1,1\n") == 2);
    CHECK(row_of(header + "short,info,1\n") == 2);
    CHECK(row_of(header + "\"open,info,1,1,1\n") == 2);
    CHECK(row_of("message,level\n") == 1);

    ColumnMapping mapping;
    mapping.message = "text";
    mapping.structure = "S";
    std::stringstream mapped("text,level,S,information,wording,extra\nhello there,debug,0,1,1,x\n");
    const auto rows = read_labeled_csv(mapped, mapping);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].message == "hello there");
    CHECK(rows[0].structure == 0);
}

TEST_CASE("config parsing") {
    const auto base = default_config();
    CHECK(base.folds == 10);
    CHECK(base.rules.thresholds.max_words == 35);

    const auto c = config_from_json(json::parse(kFastConfig));
    CHECK(c.embedding.dimension == 8);
    CHECK(c.models.forest.n_trees == 5);
    CHECK(c.folds == 3);

    CHECK_THROWS_AS(config_from_json(json{{"lint", json::object()}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"rules", {{"min_word", 3}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"learn", {{"folds", 1}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"learn", {{"adasyn", {{"beta", 1.5}}}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"rules", {{"enabled", {{"XP9", false}}}}}}), ConfigError);

    const auto disabled = config_from_json(json{{"rules", {{"enabled", {{"WP1", false}, {"WP2", false}}}}}});
    CHECK_FALSE(disabled.rules.is_enabled(RuleId::WP1));
    CHECK_FALSE(disabled.lexicon.require_dictionary);

    // The hash covers behavior, not where output goes.
    auto a = default_config();
    auto b = default_config();
    b.format = OutputFormat::text;
    b.out = "/tmp/x.json";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 2;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(config_from_json(to_json(a))) == config_hash(a));
}

TEST_CASE("scan exit codes") {
    const auto violate = cli({"scan", kFixtures + "/violate"});
    CHECK(violate.code == kExitFindings);
    const auto report = json::parse(violate.out);
    std::size_t sp1 = 0;
    for (const auto& f : report["findings"]) sp1 += f["rule"] == "SP1";
    CHECK(sp1 == 1);
    CHECK(report["summary"]["statements"] == 1);
    CHECK(report["statements"][0]["verdict"]["structure"] == false);
    CHECK(report["tool_version"] == std::string(kToolVersion));

    const auto comply = cli({"scan", kFixtures + "/comply"});
    CHECK(comply.code == kExitClean);
    CHECK(json::parse(comply.out)["summary"]["corrective"] == 0);

    const auto missing = cli({"scan", kFixtures + "/does-not-exist"});
    CHECK(missing.code == kExitError);
    CHECK(missing.err.find("error:") != std::string::npos);

    CHECK(cli({"bogus"}).code == kExitError);
    CHECK(cli({"--version"}).code == kExitClean);
}

TEST_CASE("scan text output and rule toggles") {
    const auto text = cli({"--format", "text", "scan", kFixtures + "/violate"});
    CHECK(text.code == kExitFindings);
    CHECK(text.out.find("SP1") != std::string::npos);

    TempDir dir;
    write_file(dir / "cfg.json", R"({"rules": {"enabled": {"SP1": false, "IP1": false}}})");
    const auto quiet = cli({"--config", (dir / "cfg.json").string(), "scan", kFixtures + "/violate"});
    CHECK(quiet.code == kExitClean);
}

TEST_CASE("extract emits exact NDJSON records") {
    const auto r = cli({"extract", kFixtures + "/snippets/Formatting.java", kFixtures + "/violate"});
    CHECK(r.code == kExitClean);
    std::istringstream lines(r.out);
    std::string line;
    std::vector<json> records;
    while (std::getline(lines, line)) records.push_back(json::parse(line));
    REQUIRE(records.size() == 2);
    const std::set<std::string> expected = {"file",   "line_start", "line_end",     "level",
                                            "template", "placeholder_count", "args", "concatenated",
                                            "trailing_throwable"};
    for (const auto& rec : records) {
        std::set<std::string> keys;
        for (const auto& [k, v] : rec.items()) keys.insert(k);
        CHECK(keys == expected);
    }
    CHECK(records[0]["concatenated"] == true);
    CHECK(records[1]["placeholder_count"] == 4);
    CHECK(records[1]["line_start"] == 3);
    CHECK(records[1]["line_end"] == 7);
}

TEST_CASE("sample and kappa") {
    const auto s = cli({"sample", "1316", "5524"});
    CHECK(s.code == kExitClean);
    const auto j = json::parse(s.out);
    CHECK(j["samples"][0]["sample"] == 298);
    CHECK(j["samples"][1]["sample"] == 360);
    CHECK(j["z"] == 1.96);

    TempDir dir;
    write_file(dir / "pops.csv", "Cassandra,1316\nHBase,5524\n");
    const auto f = cli({"--format", "text", "sample", "--file", (dir / "pops.csv").string()});
    CHECK(f.out == "Cassandra\t1316\t298\nHBase\t5524\t360\n");
    CHECK(cli({"sample", "0"}).code == kExitError);
    CHECK(cli({"sample", "--margin", "2", "100"}).code == kExitError);

    std::string a, b;
    for (int i = 0; i < 20; ++i) a += "adequate\n", b += "adequate\n";
    for (int i = 0; i < 5; ++i) a += "adequate\n", b += "inadequate\n";
    for (int i = 0; i < 10; ++i) a += "inadequate\n", b += "adequate\n";
    for (int i = 0; i < 15; ++i) a += "inadequate\n", b += "inadequate\n";
    write_file(dir / "a.txt", a);
    write_file(dir / "b.txt", b);
    const auto k = cli({"kappa", (dir / "a.txt").string(), (dir / "b.txt").string()});
    CHECK(k.code == kExitClean);
    CHECK(json::parse(k.out)["kappa_4dp"] == "0.4000");
    CHECK(json::parse(k.out)["n"] == 50);
    const auto kt = cli({"--format", "text", "kappa", (dir / "a.txt").string(), (dir / "b.txt").string()});
    CHECK(kt.out == "0.4000\n");

    write_file(dir / "c.txt", "adequate\n");
    CHECK(cli({"kappa", (dir / "a.txt").string(), (dir / "c.txt").string()}).code == kExitError);
}

TEST_CASE("train, classify and evaluate") {
    TempDir dir;
    write_file(dir / "cfg.json", kFastConfig);
    write_file(dir / "data.csv", labeled_csv_text(synthetic_labeled_rows(90, 4)));
    const auto cfg = (dir / "cfg.json").string();
    const auto model = (dir / "wording.model.json").string();

    const auto t = cli({"--config", cfg, "--out", model, "train", (dir / "data.csv").string(), "--aspect", "wording",
                        "--model", "dt"});
    REQUIRE_MESSAGE(t.code == kExitClean, t.err);
    const auto summary = json::parse(t.out);
    CHECK(summary["rows"] == 90);
    CHECK(summary["kind"] == "dt");
    CHECK(std::filesystem::exists(model));
    CHECK(std::filesystem::exists(dir / "wording.model.embedding.json"));

    const auto c = cli({"--config", cfg, "classify", "--model", model, "--message", "segment moved NOW!!!", "--level",
                        "info", kFixtures + "/comply"});
    REQUIRE_MESSAGE(c.code == kExitClean, c.err);
    const auto pred = json::parse(c.out);
    CHECK(pred["aspect"] == "wording");
    CHECK(pred["predictions"].size() == 6);
    for (const auto& p : pred["predictions"]) {
        CHECK(p["score"].get<double>() >= 0.0);
        CHECK(p["score"].get<double>() <= 1.0);
    }

    // A model paired with a different embedding is rejected.
    auto emb = json::parse(read_file(dir / "wording.model.embedding.json"));
    emb["input"][0][0] = emb["input"][0][0].get<double>() + 1.0;
    write_file(dir / "other.json", emb.dump());
    CHECK(cli({"classify", "--model", model, "--embedding", (dir / "other.json").string(), "--message", "x",
               "--level", "info"})
              .code == kExitError);

    const auto e = cli({"--config", cfg, "evaluate", (dir / "data.csv").string(), "--models", "dt,lr"});
    REQUIRE_MESSAGE(e.code == kExitClean, e.err);
    const auto report = json::parse(e.out);
    CHECK(report["k"] == 3);
    CHECK(report["balanced_accuracy"].size() == 2);
    CHECK(report["runs"].size() == 6);
    CHECK(report["rows"] == 90);
    const auto again = cli({"--config", cfg, "evaluate", (dir / "data.csv").string(), "--models", "dt,lr"});
    CHECK(again.out == e.out);

    const auto txt = cli({"--config", cfg, "--format", "text", "evaluate", (dir / "data.csv").string(), "--models",
                          "dt", "--aspects", "structure", "--no-oversample"});
    CHECK(txt.code == kExitClean);
    CHECK(txt.out.find("structure") != std::string::npos);

    CHECK(cli({"train", (dir / "data.csv").string(), "--aspect", "wording"}).code == kExitError);  // no --out
    write_file(dir / "flat.csv", labeled_csv_text({{"a b c", Level::info, 1, 1, 1}, {"d e f", Level::info, 1, 1, 1}}));
    CHECK(cli({"--out", (dir / "m.json").string(), "train", (dir / "flat.csv").string(), "--aspect", "wording"}).code ==
          kExitError);
}

TEST_CASE("stats from a scan report and from a CSV") {
    TempDir dir;
    const auto report = (dir / "scan.json").string();
    CHECK(cli({"--out", report, "scan", kFixtures}).code == kExitFindings);
    const auto s = cli({"stats", report});
    REQUIRE(s.code == kExitClean);
    const auto j = json::parse(s.out);
    CHECK(j["rows"] == 19);
    std::size_t total = 0;
    for (const auto& b : j["length_stats"]) total += b["count"].get<std::size_t>();
    CHECK(total == 19);

    write_file(dir / "data.csv", labeled_csv_text(synthetic_labeled_rows(30, 2)));
    const auto c = cli({"--format", "text", "stats", (dir / "data.csv").string()});
    CHECK(c.code == kExitClean);
    CHECK(c.out.find("Inadeq-S") != std::string::npos);
}

TEST_CASE("atomic writes replace whole files") {
    TempDir dir;
    const auto p = dir / "out.json";
    write_atomic(p, "first");
    write_atomic(p, "second");
    CHECK(read_file(p) == "second");
    std::size_t entries = 0;
    for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
    CHECK(entries == 1);
    write_atomic(dir / "nested" / "deeper" / "x.json", "data");
    CHECK(read_file(dir / "nested" / "deeper" / "x.json") == "data");
    CHECK_THROWS(write_atomic(p / "x.json", "data"));
}
