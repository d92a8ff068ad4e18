#include "doctest.h"
#include "support/random_cases.hpp"
#include "support/test_support.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/repo/repository.hpp"
#include "cjtrans/repo/similarity.hpp"
#include "cjtrans/text.hpp"

#include <chrono>
#include <functional>
#include <map>

using namespace cjtrans;
using namespace cjtrans::repo;
using cjtrans::testing::RandomCases;

namespace {

// Reference implementations that share no code with the library.
std::size_t levenshtein_oracle(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i)
        for (std::size_t j = 1; j <= b.size(); ++j)
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    return d[a.size()][b.size()];
}

std::size_t common_substring_oracle(const std::u32string& a, const std::u32string& b) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t len = 1; i + len <= a.size(); ++len)
            if (b.find(a.substr(i, len)) != std::u32string::npos) best = std::max(best, len);
    return best;
}

std::size_t lcs_oracle(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size() || j == b.size()) return 0;
        if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
        const auto r = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
        return memo[{i, j}] = r;
    };
    return go(0, 0);
}

RepairCase sample_case(const std::string& id, const std::string& info, const std::string& fragment) {
    return RepairCase{id, {"type-mismatch"}, info, "Convert the value explicitly.", fragment, fragment + " // fixed"};
}

} // namespace

TEST_CASE("similarity: self query scores one on every dimension") {
    RandomCases gen(1);
    const auto w = SimilarityWeights::uniform();
    for (int i = 0; i < 100; ++i) {
        const auto c = gen.make("c" + std::to_string(i));
        const auto b = similarity(ErrorQuery::from_case(c), c, w);
        for (const double s : b.scores) CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(b.total - 1.0) <= 1e-12);
    }
}

TEST_CASE("similarity: unrelated query, hand-computed dimensions") {
    // Messages share no token; tags differ; fragment structures differ.
    // Fragments "if (a) { b }" (12 chars) and "return 7;" (9 chars) share only
    // a space: longest common substring 1, Levenshtein 11.
    const RepairCase c{"c", {"t1"}, "alpha beta gamma delta epsilon zeta eta theta iota kappa", "s",
                       "if (a) { b }", "if (a) { c }"};
    const ErrorQuery q{"lambda mu nu xi omicron pi rho sigma tau upsilon", "return 7;", {"t2"}};
    const auto b = similarity(q, c, SimilarityWeights::uniform());
    CHECK(b[Dimension::ErrorType] == 0.0);
    CHECK(b[Dimension::KeywordOverlap] == 0.0);
    CHECK(b[Dimension::Semantic] == 0.0);
    CHECK(b[Dimension::CodeStructure] == 0.0);
    CHECK(b[Dimension::CharSequence] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(b[Dimension::EditDistance] == doctest::Approx(1.0 / 12.0).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(1.0 / 36.0).epsilon(1e-12));
    CHECK(b.total < 0.15);
}

TEST_CASE("similarity: only the error tag is shared") {
    const RepairCase c{"c", {"type-mismatch"}, "alpha beta gamma", "s", "if (a) { b }", "if (a) { c }"};
    const ErrorQuery q{"delta epsilon zeta", "", {"type-mismatch"}};
    const auto b = similarity(q, c, SimilarityWeights::uniform());
    CHECK(b[Dimension::ErrorType] == 1.0);
    for (std::size_t j = 1; j < kDimensions; ++j) CHECK(b.scores[j] == 0.0);
    CHECK(b.total == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("similarity properties on random inputs") {
    RandomCases gen(2);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const auto c = gen.make("c");
        const auto q = gen.query();
        std::array<double, kDimensions> raw{};
        for (auto& r : raw) r = unit(rng);
        const SimilarityWeights w(raw);
        const auto b = similarity(q, c, w);

        double raw_sum = 0.0, weighted = 0.0;
        for (std::size_t j = 0; j < kDimensions; ++j) {
            CHECK(b.scores[j] >= 0.0);
            CHECK(b.scores[j] <= 1.0);
            raw_sum += raw[j];
            weighted += raw[j] * b.scores[j];
        }
        CHECK(b.total >= 0.0);
        CHECK(b.total <= 1.0);
        // Linear in the (normalized) weights.
        CHECK(b.total == doctest::Approx(weighted / raw_sum).epsilon(1e-12));
        for (std::size_t j = 0; j < kDimensions; ++j) {
            const auto one = similarity(q, c, SimilarityWeights::one_hot(static_cast<Dimension>(j)));
            CHECK(one.total == doctest::Approx(b.scores[j]).epsilon(1e-12));
        }
        // Code-text dimensions are symmetric in the two fragments.
        const RepairCase swapped{"s", c.error_tags, c.error_info, "", q.faulty_fragment, "x"};
        const ErrorQuery back{q.error_info, c.faulty_fragment, q.error_tags};
        const auto b2 = similarity(back, swapped, w);
        for (std::size_t j = 3; j < kDimensions; ++j) CHECK(b2.scores[j] == doctest::Approx(b.scores[j]).epsilon(1e-12));
    }
}

TEST_CASE("string measures agree with brute-force oracles") {
    std::mt19937_64 rng(11);
    const std::u32string alphabet = U"abc{}仓颉";
    for (int i = 0; i < 400; ++i) {
        std::u32string a, b;
        for (auto len = rng() % 9; len > 0; --len) a += alphabet[rng() % alphabet.size()];
        for (auto len = rng() % 9; len > 0; --len) b += alphabet[rng() % alphabet.size()];
        CHECK(measures::levenshtein(a, b) == levenshtein_oracle(a, b));
        CHECK(measures::longest_common_substring(a, b) == common_substring_oracle(a, b));

        std::vector<std::string> sa, sb;
        for (const auto ch : a) sa.push_back(std::to_string(static_cast<int>(ch) % 3));
        for (const auto ch : b) sb.push_back(std::to_string(static_cast<int>(ch) % 3));
        CHECK(measures::lcs_length(sa, sb) == lcs_oracle(sa, sb));
    }
    CHECK(measures::edit_similarity(U"", U"") == 1.0);
    CHECK(measures::edit_similarity(U"", U"x") == 0.0);
    CHECK(measures::edit_similarity(U"kitten", U"sitting") == doctest::Approx(1.0 - 3.0 / 7.0));
    CHECK(measures::common_substring_ratio(U"", U"") == 1.0);
    CHECK(measures::lcs_ratio({}, {"block"}) == 0.0);
    CHECK(measures::jaccard({}, {}) == 1.0);
    CHECK(measures::jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
    CHECK(measures::cosine({{"a", 1}}, {}) == 0.0);
}

TEST_CASE("message tokens drop paths, numbers and stop words") {
    const auto toks = measures::message_tokens(
        "error: mismatched types at /home/u/proj/src/main.cj:12:5 expected 'Int64' found 'String' 0x7ffd line 3");
    CHECK(toks == std::vector<std::string>{"mismatched", "types", "expected", "int64", "string"});
    CHECK(measures::message_tokens("main.cj:3:1: error: undeclared identifier 'x'") ==
          std::vector<std::string>{"undeclared", "identifier", "x"});
}

TEST_CASE("error tags and error regions") {
    CHECK(extract_error_tags("error: mismatched types E0308") == std::vector<std::string>{"e0308", "type-mismatch"});
    CHECK(extract_error_tags("error: undeclared identifier 'foo'") == std::vector<std::string>{"unresolved-symbol"});
    CHECK(extract_error_tags("").empty());

    CHECK(referenced_lines(" ==> main.cj:4:7:\nother.cj:10:1 and line 2") == std::vector<std::size_t>{2, 4, 10});
    const std::string code = "l1\nl2\nl3\nl4\nl5\nl6\nl7\nl8";
    CHECK(error_region(code, "main.cj:4:1", 1) == "l3\nl4\nl5");
    CHECK(error_region(code, "main.cj:1:1", 2) == "l1\nl2\nl3");
    CHECK(error_region(code, "no location", 2) == code);
    CHECK(error_region(code, "main.cj:99:1", 2) == code);

    const auto q = query_from_diagnostics("error: mismatched types\n ==> main.cj:2:3:", "a\nb\nc\nd\ne\nf");
    CHECK(q.faulty_fragment == "a\nb\nc\nd");
    CHECK(q.error_tags == std::vector<std::string>{"type-mismatch"});
}

TEST_CASE("weights are normalized and validated") {
    const SimilarityWeights w({2, 2, 0, 0, 0, 0});
    CHECK(w[Dimension::ErrorType] == 0.5);
    CHECK(w[Dimension::KeywordOverlap] == 0.5);
    CHECK_THROWS_AS(SimilarityWeights({0, 0, 0, 0, 0, 0}), PreconditionError);
    CHECK_THROWS_AS(SimilarityWeights({-1, 1, 1, 1, 1, 1}), PreconditionError);
    CHECK_THROWS_AS(SimilarityWeights({std::nan(""), 1, 1, 1, 1, 1}), PreconditionError);
}

TEST_CASE("retrieve ranks cases") {
    RepairRepository repo;
    repo.add_case(sample_case("A", "error: undeclared identifier 'total'", "println(total)"));
    const auto b = sample_case("B", "error: mismatched types expected Int64 found String", "let x: Int64 = \"a\"");
    repo.add_case(b);
    repo.add_case(sample_case("C", "error: cannot assign to immutable value", "x = 3"));

    const auto top = repo.retrieve(ErrorQuery::from_case(b), 2, SimilarityWeights::uniform());
    REQUIRE(top.size() == 2);
    CHECK(top[0].repair_case.id == "B");
    CHECK(top[0].score.total == doctest::Approx(1.0));
    CHECK(top[0].score.total >= top[1].score.total);

    const auto all = repo.retrieve(ErrorQuery::from_case(b), 10, SimilarityWeights::uniform());
    CHECK(all.size() == 3);
    for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1].score.total >= all[i].score.total);

    CHECK_THROWS_AS(repo.retrieve(ErrorQuery::from_case(b), 0, SimilarityWeights::uniform()), PreconditionError);
    CHECK_THROWS_AS(RepairRepository().retrieve(ErrorQuery::from_case(b), 1, SimilarityWeights::uniform()),
                    PreconditionError);
    CHECK_THROWS_AS(repo.retrieve(ErrorQuery{}, 1, SimilarityWeights::uniform()), PreconditionError);
}

TEST_CASE("retrieve ties break by id") {
    RepairRepository repo;
    for (const auto* id : {"z", "m", "a"}) repo.add_case(sample_case(id, "error: same message", "same()"));
    const auto top = repo.retrieve({"error: same message", "same()", {"type-mismatch"}}, 3, SimilarityWeights::uniform());
    CHECK(top[0].repair_case.id == "a");
    CHECK(top[1].repair_case.id == "m");
    CHECK(top[2].repair_case.id == "z");
}

TEST_CASE("retrieve head equals brute-force argmax") {
    RandomCases gen(5);
    const auto w = SimilarityWeights::uniform();
    for (int round = 0; round < 20; ++round) {
        RepairRepository repo;
        std::vector<RepairCase> cases;
        for (int i = 0; i < 50; ++i) {
            cases.push_back(gen.make("case-" + std::to_string(round) + "-" + std::to_string(i)));
            repo.add_case(cases.back());
        }
        const auto q = gen.query();
        double best = -1.0;
        for (const auto& c : cases) best = std::max(best, similarity(q, c, w).total);
        const auto top = repo.retrieve(q, 3, w);
        CHECK(top.front().score.total == best);
    }
}

TEST_CASE("repository validation and persistence") {
    cjtrans::testing::TempDir dir;
    RandomCases gen(8);
    RepairRepository repo;
    for (int i = 0; i < 5; ++i) repo.add_case(gen.make("id" + std::to_string(i)));
    repo.save(dir.str("repo.jsonl"));
    const auto loaded = RepairRepository::load(dir.str("repo.jsonl"));
    CHECK(loaded == repo);
    CHECK(loaded.serialize() == repo.serialize());

    CHECK_THROWS_AS(repo.add_case(gen.make("id0")), PreconditionError);
    CHECK_THROWS_AS(repo.add_case(RepairCase{"x", {}, "", "", "a", "b"}), PreconditionError);
    CHECK_THROWS_AS(repo.add_case(RepairCase{"x", {}, "err", "", "same", "same"}), PreconditionError);
    CHECK_THROWS_AS(repo.add_case(RepairCase{"x", {}, "err", "", "a", " "}), PreconditionError);

    CHECK_THROWS_AS(RepairRepository::parse("{not json}\n"), FormatError);
    CHECK_THROWS_AS(RepairRepository::parse(R"({"id":"a"})"), FormatError);
    CHECK_THROWS_AS(RepairRepository::parse(std::string(text::split_lines(repo.serialize())[0]) + "\n" +
                                            std::string(text::split_lines(repo.serialize())[0]) + "\n"),
                    FormatError);
    CHECK_THROWS_AS(RepairRepository::load(dir.str("missing.jsonl")), Error);
}

TEST_CASE("repository of 217 cases answers top-3 queries quickly") {
    cjtrans::testing::TempDir dir;
    RandomCases gen(217);
    RepairRepository repo;
    for (int i = 0; i < 217; ++i) repo.add_case(gen.make("case-" + std::to_string(i)));
    repo.save(dir.str("repo.jsonl"));

    const auto start = std::chrono::steady_clock::now();
    const auto loaded = RepairRepository::load(dir.str("repo.jsonl"));
    const auto top = loaded.retrieve(gen.query(), 3, SimilarityWeights::uniform());
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(loaded.size() == 217);
    CHECK(top.size() == 3);
    CHECK(elapsed < std::chrono::seconds(1));
}
