#pragma once

#include "cjtrans/engine/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cjtrans::cli {

/// One benchmark unit: a directory holding exactly one `.java` file, a
/// `tests.jsonl` suite and optionally `reference.cj`.
struct BenchmarkUnit {
    std::string id;
    std::string java_source;
    std::vector<engine::TestCase> tests;
    std::optional<std::string> reference;
};

/// Units in directory-name order. Throws PreconditionError when the
/// directory is missing or empty and FormatError naming the unit when a
/// unit directory is malformed.
std::vector<BenchmarkUnit> load_benchmark(const std::string& dir);

} // namespace cjtrans::cli
