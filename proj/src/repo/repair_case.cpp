#include "cjtrans/repo/repair_case.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace cjtrans::repo {

void RepairCase::validate() const {
    if (text::trim(id).empty()) throw PreconditionError("repair case: id must not be empty");
    if (text::trim(error_info).empty()) throw PreconditionError("repair case " + id + ": error_info is empty");
    if (text::trim(corrected_code).empty()) throw PreconditionError("repair case " + id + ": corrected_code is empty");
    if (faulty_fragment == corrected_code) {
        throw PreconditionError("repair case " + id + ": faulty_fragment equals corrected_code");
    }
}

void ErrorQuery::validate() const {
    if (text::trim(error_info).empty()) throw PreconditionError("error query: error_info is empty");
}

ErrorQuery ErrorQuery::from_case(const RepairCase& c) {
    return ErrorQuery{c.error_info, c.faulty_fragment, c.error_tags};
}

nlohmann::ordered_json to_json(const RepairCase& c) {
    return {
        {"id", c.id},
        {"error_tags", c.error_tags},
        {"error_info", c.error_info},
        {"repair_suggestion", c.repair_suggestion},
        {"faulty_fragment", c.faulty_fragment},
        {"corrected_code", c.corrected_code},
    };
}

RepairCase case_from_json(const nlohmann::ordered_json& j) {
    try {
        RepairCase c;
        c.id = j.at("id").get<std::string>();
        c.error_tags = j.at("error_tags").get<std::vector<std::string>>();
        c.error_info = j.at("error_info").get<std::string>();
        c.repair_suggestion = j.at("repair_suggestion").get<std::string>();
        c.faulty_fragment = j.at("faulty_fragment").get<std::string>();
        c.corrected_code = j.at("corrected_code").get<std::string>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("repair case record: ") + e.what());
    }
}

namespace {

struct TagRule {
    std::regex pattern;
    std::string tag;
};

const std::vector<TagRule>& tag_rules() {
    constexpr auto flags = std::regex::icase | std::regex::ECMAScript;
    static const std::vector<TagRule> rules = {
        {std::regex(R"(mismatched types|type mismatch|incompatible types?|cannot convert|expected type)", flags), "type-mismatch"},
        {std::regex(R"(undeclared|unresolved|cannot find|not found|undefined|not declared)", flags), "unresolved-symbol"},
        {std::regex(R"(expected .*(found|but got)|unexpected token|expected '|syntax error|unexpected)", flags), "syntax"},
        {std::regex(R"(immutable|cannot assign|assign to 'let'|reassign)", flags), "immutability"},
        {std::regex(R"(return type|missing return|return value)", flags), "return-type"},
        {std::regex(R"(argument|parameter|arity)", flags), "call-arguments"},
        {std::regex(R"(no matching|overload|ambiguous)", flags), "overload"},
        {std::regex(R"(\bimport\b|\bpackage\b|\bmodule\b)", flags), "import"},
        {std::regex(R"(private|protected|not accessible|visibility)", flags), "visibility"},
        {std::regex(R"(generic|type argument|constraint)", flags), "generics"},
        {std::regex(R"(overflow|out of range|out of bounds)", flags), "range"},
        {std::regex(R"(uninitiali[sz]ed|not initiali[sz]ed|before initiali[sz]ation)", flags), "initialization"},
    };
    return rules;
}

} // namespace

std::vector<std::string> extract_error_tags(std::string_view diagnostics) {
    std::set<std::string> tags;
    const std::string diag(diagnostics);
    static const std::regex code_re(R"(\b([A-Z]{1,3}\d{3,5})\b)");
    for (auto it = std::sregex_iterator(diag.begin(), diag.end(), code_re); it != std::sregex_iterator(); ++it) {
        tags.insert(text::to_lower((*it)[1].str()));
    }
    for (const auto& rule : tag_rules()) {
        if (std::regex_search(diag, rule.pattern)) tags.insert(rule.tag);
    }
    return {tags.begin(), tags.end()};
}

std::vector<std::size_t> referenced_lines(std::string_view diagnostics) {
    std::set<std::size_t> lines;
    const std::string diag(diagnostics);
    static const std::regex loc_re(R"([A-Za-z0-9_.\-]+:(\d+):\d+)");
    static const std::regex line_re(R"(\bline (\d+))", std::regex::icase | std::regex::ECMAScript);
    for (const auto* re : {&loc_re, &line_re}) {
        for (auto it = std::sregex_iterator(diag.begin(), diag.end(), *re); it != std::sregex_iterator(); ++it) {
            const auto n = std::stoull((*it)[1].str());
            if (n > 0) lines.insert(n);
        }
    }
    return {lines.begin(), lines.end()};
}

std::string error_region(std::string_view code, std::string_view diagnostics, std::size_t context) {
    const auto lines = text::split_lines(code);
    std::vector<bool> keep(lines.size(), false);
    bool any = false;
    for (const auto ref : referenced_lines(diagnostics)) {
        if (ref > lines.size()) continue;
        const auto idx = ref - 1;
        const auto lo = idx >= context ? idx - context : 0;
        const auto hi = std::min(lines.size() - 1, idx + context);
        for (auto i = lo; i <= hi; ++i) keep[i] = true;
        any = true;
    }
    if (!any) return std::string(code);
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!keep[i]) continue;
        if (!out.empty()) out += '\n';
        out.append(lines[i]);
    }
    return out;
}

ErrorQuery query_from_diagnostics(std::string_view diagnostics, std::string_view candidate) {
    ErrorQuery q;
    q.error_info = std::string(diagnostics);
    q.faulty_fragment = error_region(candidate, diagnostics);
    q.error_tags = extract_error_tags(diagnostics);
    return q;
}

} // namespace cjtrans::repo
