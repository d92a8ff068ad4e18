#include "doctest.h"

#include "cjtrans/error.hpp"
#include "cjtrans/eval/bleu.hpp"
#include "cjtrans/eval/metrics.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/text.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace cjtrans;
using namespace cjtrans::eval;

namespace {

// Sentence BLEU written directly from the textbook formula for
// whitespace-separated tokens and a single reference.
double bleu_oracle(const std::string& cand, const std::string& ref) {
    const auto words = [](const std::string& s) {
        std::istringstream in(s);
        std::vector<std::string> out;
        for (std::string w; in >> w;) out.push_back(w);
        return out;
    };
    const auto c = words(cand), r = words(ref);
    double log_p = 0.0;
    int orders = 0;
    for (std::size_t n = 1; n <= 4 && n <= c.size(); ++n) {
        std::size_t match = 0, total = 0;
        std::vector<bool> used(r.size() >= n ? r.size() - n + 1 : 0, false);
        for (std::size_t i = 0; i + n <= c.size(); ++i) {
            ++total;
            for (std::size_t j = 0; j < used.size(); ++j) {
                if (used[j]) continue;
                if (std::equal(c.begin() + static_cast<long>(i), c.begin() + static_cast<long>(i + n),
                               r.begin() + static_cast<long>(j))) {
                    used[j] = true;
                    ++match;
                    break;
                }
            }
        }
        if (n == 1 && match == 0) return 0.0;
        log_p += std::log(match == 0 ? 1e-9 : double(match) / double(total));
        ++orders;
    }
    const double bp = c.size() >= r.size() ? 1.0 : std::exp(1.0 - double(r.size()) / double(c.size()));
    return bp * std::exp(log_p / orders);
}

} // namespace

TEST_CASE("csr and cfe examples") {
    CHECK(csr(100, 100).value() == 1.0);
    CHECK(csr(0, 100).value() == 0.0);
    CHECK(csr(118, 165).percent() == "71.52");
    CHECK(cfe(105, 118).percent() == "88.98");
    CHECK(cfe(0, 50).value() == 0.0);
    CHECK(cfe(50, 50).value() == 1.0);
    CHECK(cfe(0, 0).value() == 0.0);
    CHECK_THROWS_AS(csr(1, 0), PreconditionError);
    CHECK_THROWS_AS(csr(3, 2), PreconditionError);
    CHECK_THROWS_AS(cfe(3, 2), PreconditionError);
}

TEST_CASE("fe over outcomes") {
    std::vector<UnitOutcome> all(4, UnitOutcome{"u", true, true, "", ""});
    CHECK(fe(all).value() == 1.0);
    std::vector<UnitOutcome> none(3, UnitOutcome{"u", false, false, "", ""});
    CHECK(fe(none).value() == 0.0);

    std::vector<UnitOutcome> table;
    for (int i = 0; i < 165; ++i) table.push_back({"u" + std::to_string(i), i < 118, i < 105, "", ""});
    CHECK(fe(table).percent() == "63.64");
    CHECK_THROWS_AS(fe({}), PreconditionError);
    CHECK_THROWS_AS(fe({UnitOutcome{"x", false, true, "", ""}}), PreconditionError);
}

TEST_CASE("fe equals csr times cfe as exact rationals") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t total = 1 + rng() % 10000;
        const std::uint64_t compiled = rng() % (total + 1);
        const std::uint64_t cf = rng() % (compiled + 1);
        const Ratio f(cf, total);
        const Ratio c = csr(compiled, total);
        const Ratio e = cfe(cf, compiled);
        // Independent check by cross multiplication.
        CHECK(static_cast<unsigned __int128>(f.num()) * total == static_cast<unsigned __int128>(cf) * f.den());
        if (compiled > 0) CHECK(f == c * e);
        CHECK(f.value() <= c.value());
        CHECK(e.value() <= 1.0);
    }
}

TEST_CASE("ratio normalizes and formats") {
    CHECK(Ratio(6, 8) == Ratio(3, 4));
    CHECK(Ratio(0, 7) == Ratio(0, 1));
    CHECK(Ratio(2, 3).percent() == "66.67");
    CHECK(Ratio(2, 3).str() == "2/3");
    CHECK_THROWS_AS(Ratio(1, 0), PreconditionError);
}

TEST_CASE("code tokenizer") {
    CHECK(tokenize_code("let x: Int64 = a.size + 1") ==
          std::vector<std::string>{"let", "x", ":", "Int64", "=", "a", ".", "size", "+", "1"});
    CHECK(tokenize_code("for (i in 0..=n) { x += i }") ==
          std::vector<std::string>{"for", "(", "i", "in", "0", "..=", "n", ")", "{", "x", "+=", "i", "}"});
    CHECK(tokenize_code("a->b=>c::d") == std::vector<std::string>{"a", "->", "b", "=>", "c", "::", "d"});
    CHECK(tokenize_code(" \n\t ").empty());
}

TEST_CASE("bleu examples") {
    CHECK(bleu("func f() { return 1 }", {"func f() { return 1 }"}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bleu("x", {"x"}) == 1.0);
    CHECK(bleu("a b c d", {"e f g h"}) == 0.0);
    const double five = bleu("a b c d e", {"a b c d f"});
    CHECK(std::abs(five - std::pow(4.0 / 5 * 3.0 / 4 * 2.0 / 3 * 1.0 / 2, 0.25)) < 1e-6);
    CHECK(std::abs(five - 0.668740) < 1e-6);
    CHECK_THROWS_AS(bleu("", {"a"}), PreconditionError);
    CHECK_THROWS_AS(bleu("a", {" "}), PreconditionError);
}

TEST_CASE("bleu brevity penalty and multiple references") {
    // 3 of 3 unigrams, 2 of 2 bigrams, 1 of 1 trigram; reference length 6.
    CHECK(bleu("a b c", {"a b c d e f"}) == doctest::Approx(std::exp(1.0 - 2.0)).epsilon(1e-12));
    // The closest reference (length 3) drives the penalty.
    CHECK(bleu("a b c", {"a b c d e f", "a b c"}) == doctest::Approx(1.0));
}

TEST_CASE("bleu agrees with the textbook oracle on random token strings") {
    std::mt19937_64 rng(9);
    const std::vector<std::string> vocab = {"a", "b", "c", "d", "e"};
    for (int i = 0; i < 500; ++i) {
        std::string c, r;
        for (auto n = 1 + rng() % 8; n > 0; --n) c += vocab[rng() % vocab.size()] + " ";
        for (auto n = 1 + rng() % 8; n > 0; --n) r += vocab[rng() % vocab.size()] + " ";
        const double got = bleu(c, {r});
        CHECK(got == doctest::Approx(bleu_oracle(c, r)).epsilon(1e-9));
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
        // Whitespace normalization on both sides changes nothing.
        CHECK(bleu(text::collapse_whitespace(c), {text::collapse_whitespace(r)}) == got);
    }
}

TEST_CASE("evaluate builds a consistent report") {
    std::vector<UnitOutcome> outs;
    for (int i = 0; i < 165; ++i)
        outs.push_back({"u" + std::to_string(i), i < 118, i < 105, "let x = " + std::to_string(i % 3), "let x = 1"});
    const auto rep = evaluate(outs);
    CHECK(rep.n_total == 165);
    CHECK(rep.n_compiled == 118);
    CHECK(rep.n_cf == 105);
    CHECK(rep.fe.percent() == "63.64");
    CHECK(rep.csr.percent() == "71.52");
    CHECK(rep.cfe.percent() == "88.98");
    CHECK(rep.fe == rep.csr * rep.cfe);
    REQUIRE(rep.bleu.has_value());
    CHECK(*rep.bleu > 0.0);
    CHECK(*rep.bleu < 1.0);

    const auto table = report_table(rep);
    CHECK(table.find("FE        63.64  105/165") != std::string::npos);
    CHECK(table.find("CSR       71.52  118/165") != std::string::npos);
    CHECK(table.find("CFE       88.98  105/118") != std::string::npos);

    const auto records = jsonl::parse(report_jsonl(rep), "report");
    REQUIRE(records.size() == 166);
    CHECK(records.back()["summary"] == true);
    CHECK(records.back()["fe"]["num"] == 7);
    CHECK(records.back()["fe"]["den"] == 11);
    CHECK(records.front()["id"] == "u0");

    outs.push_back(outs.front());
    CHECK_THROWS_AS(evaluate(outs), PreconditionError);
}

TEST_CASE("evaluate flags an undefined cfe") {
    const auto rep = evaluate({{"a", false, false, "", "x"}, {"b", false, false, "y", ""}});
    CHECK(rep.cfe_undefined);
    CHECK(rep.cfe.value() == 0.0);
    CHECK(!rep.bleu.has_value());
    CHECK(report_table(rep).find("nothing compiled") != std::string::npos);
}
