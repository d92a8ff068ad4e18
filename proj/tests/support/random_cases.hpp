#pragma once

#include "cjtrans/repo/repair_case.hpp"

#include <random>
#include <string>
#include <vector>

namespace cjtrans::testing {

/// Random repair cases built from small vocabularies, so that partial
/// overlaps between cases are common.
class RandomCases {
public:
    explicit RandomCases(std::uint64_t seed) : rng_(seed) {}

    repo::RepairCase make(const std::string& id) {
        repo::RepairCase c;
        c.id = id;
        const int ntags = pick(0, 2);
        for (int i = 0; i < ntags; ++i) c.error_tags.push_back(one_of(tags_));
        c.error_info = message();
        c.repair_suggestion = "Use " + one_of(words_) + " instead of " + one_of(words_) + ".";
        c.faulty_fragment = fragment();
        c.corrected_code = c.faulty_fragment + "\n// fixed " + id;
        return c;
    }

    repo::ErrorQuery query() {
        repo::ErrorQuery q;
        q.error_info = message();
        q.faulty_fragment = pick(0, 5) == 0 ? std::string() : fragment();
        const int ntags = pick(0, 2);
        for (int i = 0; i < ntags; ++i) q.error_tags.push_back(one_of(tags_));
        return q;
    }

    std::string message() {
        std::string out = "error: ";
        const int n = pick(2, 8);
        for (int i = 0; i < n; ++i) out += one_of(words_) + (i + 1 < n ? " " : "");
        out += "\n ==> main.cj:" + std::to_string(pick(1, 40)) + ":" + std::to_string(pick(1, 20)) + ":";
        return out;
    }

    std::string fragment() {
        std::string out;
        const int n = pick(1, 4);
        for (int i = 0; i < n; ++i) out += one_of(lines_) + "\n";
        return out;
    }

private:
    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    const std::string& one_of(const std::vector<std::string>& v) {
        return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))];
    }

    std::mt19937_64 rng_;
    const std::vector<std::string> tags_ = {"type-mismatch", "unresolved-symbol", "syntax", "immutability", "import"};
    const std::vector<std::string> words_ = {"mismatched", "types", "Int64", "String", "undeclared", "identifier",
                                             "expected", "token", "immutable", "variable", "cannot", "assign",
                                             "package", "import", "return", "value", "Array", "ArrayList"};
    const std::vector<std::string> lines_ = {
        "let x: Int64 = \"a\"",       "var total = 0",           "for (i in 0..n) { total += i }",
        "if (a > b) { return a }",    "func f(a: Int64): Int64 {", "while (k < 10) { k++ }",
        "println(total)",             "import std.collection.*", "let xs = ArrayList<Int64>()",
        "match (v) { case 1 => 2 }", "return x.size",           "}",
    };
};

} // namespace cjtrans::testing
