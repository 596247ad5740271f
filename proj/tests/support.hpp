#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "logprose/csv.hpp"
#include "logprose/learn.hpp"

namespace logprose::testing {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("logprose-test-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Two isotropic Gaussian classes at +shift / -shift on every axis. The first
// round(n * positive_share) rows are label 1.
inline constexpr double kSeparableShift = 2.0;

inline Dataset gaussian_benchmark(std::size_t n, std::size_t d, double positive_share, double shift,
                                  std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise;
    Dataset data;
    const auto pos = static_cast<std::size_t>(std::llround(static_cast<double>(n) * positive_share));
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i < pos ? 1 : 0;
        std::vector<double> x(d);
        for (auto& v : x) v = noise(gen) + (y ? shift : -shift);
        data.push_back(std::move(x), y);
    }
    return data;
}

// Log-message-like rows whose labels follow simple surface cues: a bare
// placeholder run breaks structure, very short messages lack information and
// shouting breaks wording.
inline std::vector<LabeledCsvRow> synthetic_labeled_rows(std::size_t n, std::uint64_t seed) {
    static const std::vector<std::string> subjects = {"region", "table", "snapshot", "replica", "segment",
                                                      "client", "session", "quota", "index", "tablet"};
    static const std::vector<std::string> verbs = {"flushed", "opened", "closed", "assigned", "recovered",
                                                   "compacted", "rejected", "scheduled", "expired", "moved"};
    static const Level levels[] = {Level::debug, Level::info, Level::warn, Level::error};
    std::mt19937_64 gen(seed);
    std::vector<LabeledCsvRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        LabeledCsvRow r;
        r.level = levels[gen() % 4];
        const auto& s = subjects[gen() % subjects.size()];
        const auto& v = verbs[gen() % verbs.size()];
        const int shape = static_cast<int>(gen() % 6);
        switch (shape) {
        case 0: r.message = s + " " + v; r.information = 0; break;
        case 1: r.message = s + " " + v + " {} {} {}"; r.structure = 0; break;
        case 2: r.message = s + " " + v + " NOW!!!"; r.wording = 0; break;
        default: r.message = s + " " + v + " after retry, " + s + ": {}, took: {} ms"; break;
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::string labeled_csv_text(const std::vector<LabeledCsvRow>& rows) {
    std::ostringstream out;
    write_labeled_csv(out, rows);
    return out.str();
}

} // namespace logprose::testing
