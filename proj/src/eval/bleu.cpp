#include "cjtrans/eval/bleu.hpp"

#include "cjtrans/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>

namespace cjtrans::eval {

namespace {

// Longest first so that maximal munch picks e.g. "..=" over "..".
constexpr std::array<std::string_view, 31> kOperators = {
    "<<=", ">>=", "..=", "**=", "...", "===", "!==", "&&=", "||=", "==", "!=", "<=", ">=", "&&", "||", "->",
    "=>",  "::",  "..",  "++",  "--",  "+=",  "-=",  "*=",  "/=",  "%=", "<<", ">>", "**", "|>", "?.",
};

bool is_word_byte(unsigned char c) {
    return c == '_' || (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts ngrams(const std::vector<std::string>& toks, std::size_t n) {
    NgramCounts out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
        ++out[std::vector<std::string>(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                       toks.begin() + static_cast<std::ptrdiff_t>(i + n))];
    return out;
}

} // namespace

std::vector<std::string> tokenize_code(std::string_view code) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < code.size()) {
        const auto c = static_cast<unsigned char>(code[i]);
        if (is_space(c)) {
            ++i;
        } else if (is_word_byte(c)) {
            std::size_t j = i;
            while (j < code.size() && is_word_byte(static_cast<unsigned char>(code[j]))) ++j;
            out.emplace_back(code.substr(i, j - i));
            i = j;
        } else {
            std::size_t len = 1;
            for (const auto op : kOperators) {
                if (code.substr(i, op.size()) == op) {
                    len = op.size();
                    break;
                }
            }
            out.emplace_back(code.substr(i, len));
            i += len;
        }
    }
    return out;
}

double corpus_bleu(const std::vector<BleuSegment>& segments) {
    if (segments.empty()) throw PreconditionError("bleu: no segments");
    std::array<std::size_t, kBleuMaxOrder + 1> matched{};
    std::array<std::size_t, kBleuMaxOrder + 1> total{};
    std::size_t cand_len = 0;
    std::size_t ref_len = 0;

    for (const auto& seg : segments) {
        const auto cand = tokenize_code(seg.candidate);
        if (cand.empty()) throw PreconditionError("bleu: candidate has no tokens");
        std::vector<std::vector<std::string>> refs;
        for (const auto& r : seg.references) {
            auto toks = tokenize_code(r);
            if (!toks.empty()) refs.push_back(std::move(toks));
        }
        if (refs.empty()) throw PreconditionError("bleu: no reference has tokens");

        cand_len += cand.size();
        // Closest reference length, shorter on ties.
        std::size_t best = refs.front().size();
        for (const auto& r : refs) {
            const auto d = [&](std::size_t len) { return len > cand.size() ? len - cand.size() : cand.size() - len; };
            if (d(r.size()) < d(best) || (d(r.size()) == d(best) && r.size() < best)) best = r.size();
        }
        ref_len += best;

        for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
            const auto cand_counts = ngrams(cand, n);
            NgramCounts max_ref;
            for (const auto& r : refs)
                for (const auto& [g, cnt] : ngrams(r, n)) max_ref[g] = std::max(max_ref[g], cnt);
            for (const auto& [g, cnt] : cand_counts) {
                total[n] += cnt;
                const auto it = max_ref.find(g);
                if (it != max_ref.end()) matched[n] += std::min(cnt, it->second);
            }
        }
    }

    if (matched[1] == 0) return 0.0;
    double log_sum = 0.0;
    int orders = 0;
    for (std::size_t n = 1; n <= kBleuMaxOrder; ++n) {
        if (total[n] == 0) continue;
        const double p = matched[n] == 0 ? kBleuEpsilon
                                         : static_cast<double>(matched[n]) / static_cast<double>(total[n]);
        log_sum += std::log(p);
        ++orders;
    }
    const double bp = cand_len >= ref_len
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand_len));
    return std::clamp(bp * std::exp(log_sum / orders), 0.0, 1.0);
}

double bleu(std::string_view candidate, const std::vector<std::string>& references) {
    return corpus_bleu({BleuSegment{std::string(candidate), references}});
}

} // namespace cjtrans::eval
