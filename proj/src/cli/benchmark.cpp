#include "cjtrans/cli/benchmark.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <algorithm>
#include <filesystem>

namespace cjtrans::cli {

namespace fs = std::filesystem;

std::vector<BenchmarkUnit> load_benchmark(const std::string& dir) {
    if (!fs::is_directory(dir)) throw PreconditionError("benchmark directory not found: " + dir);
    std::vector<fs::path> unit_dirs;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_directory()) unit_dirs.push_back(e.path());
    std::sort(unit_dirs.begin(), unit_dirs.end());
    if (unit_dirs.empty()) throw PreconditionError("benchmark directory has no units: " + dir);

    std::vector<BenchmarkUnit> out;
    for (const auto& d : unit_dirs) {
        BenchmarkUnit u;
        u.id = d.filename().string();
        std::vector<fs::path> java;
        for (const auto& e : fs::directory_iterator(d))
            if (e.is_regular_file() && e.path().extension() == ".java") java.push_back(e.path());
        if (java.size() != 1)
            throw FormatError("unit " + u.id + ": expected one .java file, found " + std::to_string(java.size()));
        u.java_source = text::read_file(java.front().string());
        const auto tests = d / "tests.jsonl";
        if (!fs::exists(tests)) throw FormatError("unit " + u.id + ": missing tests.jsonl");
        u.tests = engine::load_tests(tests.string());
        if (u.tests.empty()) throw FormatError("unit " + u.id + ": tests.jsonl is empty");
        if (fs::exists(d / "reference.cj")) u.reference = text::read_file((d / "reference.cj").string());
        out.push_back(std::move(u));
    }
    return out;
}

} // namespace cjtrans::cli
