#pragma once

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::repo {

/// A verified error-fix exemplar.
struct RepairCase {
    std::string id;
    std::vector<std::string> error_tags;
    std::string error_info;
    std::string repair_suggestion;
    std::string faulty_fragment;
    std::string corrected_code;

    /// Throws PreconditionError naming the violated invariant.
    void validate() const;

    friend bool operator==(const RepairCase&, const RepairCase&) = default;
};

/// The compiler error being matched against stored cases.
struct ErrorQuery {
    std::string error_info;
    std::string faulty_fragment;
    std::vector<std::string> error_tags;

    void validate() const;
    static ErrorQuery from_case(const RepairCase& c);
};

nlohmann::ordered_json to_json(const RepairCase& c);
/// Throws FormatError on missing or mistyped fields.
RepairCase case_from_json(const nlohmann::ordered_json& j);

/// Error-type tags recognised in a diagnostic: explicit error codes (such as
/// E0308) plus categories from a fixed phrase table. Sorted, unique.
std::vector<std::string> extract_error_tags(std::string_view diagnostics);

/// Line numbers (1-based) referenced by `file:line:col` or `line N` in diagnostics.
std::vector<std::size_t> referenced_lines(std::string_view diagnostics);

/// Lines of `code` within `context` lines of any referenced line; the whole
/// code when the diagnostics reference none in range.
std::string error_region(std::string_view code, std::string_view diagnostics, std::size_t context = 2);

/// Query built from a failing compile: tags extracted from the diagnostics and
/// the region of the candidate the diagnostics point at.
ErrorQuery query_from_diagnostics(std::string_view diagnostics, std::string_view candidate);

} // namespace cjtrans::repo
