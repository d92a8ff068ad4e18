#include "cjtrans/repo/similarity.hpp"

#include "cjtrans/ast/summary.hpp"
#include "cjtrans/error.hpp"
#include "cjtrans/text.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_set>

namespace cjtrans::repo {

SimilarityWeights::SimilarityWeights(const std::array<double, kDimensions>& raw) {
    double sum = 0.0;
    for (const double v : raw) {
        if (!std::isfinite(v) || v < 0.0) throw PreconditionError("similarity weights must be finite and non-negative");
        sum += v;
    }
    if (sum <= 0.0) throw PreconditionError("similarity weights must not all be zero");
    for (std::size_t j = 0; j < kDimensions; ++j) w_[j] = raw[j] / sum;
}

SimilarityWeights SimilarityWeights::uniform() {
    return SimilarityWeights({1, 1, 1, 1, 1, 1});
}

SimilarityWeights SimilarityWeights::one_hot(Dimension d) {
    std::array<double, kDimensions> raw{};
    raw[static_cast<std::size_t>(d)] = 1.0;
    return SimilarityWeights(raw);
}

namespace measures {

namespace {

// Words that occur in nearly every diagnostic and carry no signal.
const std::unordered_set<std::string>& stop_words() {
    static const std::unordered_set<std::string> words = {
        "a",    "an",   "the",  "of",    "to",   "in",   "is",   "are",  "was",   "be",  "been",
        "for",  "on",   "at",   "by",    "with", "and",  "or",   "but",  "this",  "that", "it",
        "its",  "as",   "from", "here",  "there", "has", "have", "can",  "could", "may", "error",
        "errors", "warning", "note", "help", "line", "column", "col", "found", "file",
    };
    return words;
}

bool is_path_like(std::string_view word) {
    if (word.find('/') != std::string_view::npos || word.find('\\') != std::string_view::npos) return true;
    // file.ext:12 or file.ext:12:5
    const auto colon = word.find(':');
    if (colon != std::string_view::npos && colon + 1 < word.size() &&
        std::isdigit(static_cast<unsigned char>(word[colon + 1])) && word.substr(0, colon).find('.') != std::string_view::npos) {
        return true;
    }
    return false;
}

} // namespace

std::vector<std::string> message_tokens(std::string_view message) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < message.size()) {
        while (i < message.size() && std::isspace(static_cast<unsigned char>(message[i]))) ++i;
        const auto start = i;
        while (i < message.size() && !std::isspace(static_cast<unsigned char>(message[i]))) ++i;
        const auto word = message.substr(start, i - start);
        if (word.empty() || is_path_like(word)) continue;
        std::size_t j = 0;
        while (j < word.size()) {
            if (!(std::isalnum(static_cast<unsigned char>(word[j])) || word[j] == '_')) {
                ++j;
                continue;
            }
            const auto s = j;
            while (j < word.size() && (std::isalnum(static_cast<unsigned char>(word[j])) || word[j] == '_')) ++j;
            auto tok = text::to_lower(word.substr(s, j - s));
            const bool numeric = std::all_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isdigit(c); });
            const bool hex = tok.size() > 2 && tok.starts_with("0x") &&
                             std::all_of(tok.begin() + 2, tok.end(), [](unsigned char c) { return std::isxdigit(c); });
            if (numeric || hex || stop_words().contains(tok)) continue;
            out.push_back(std::move(tok));
        }
    }
    return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& x : a) inter += b.count(x);
    return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (const auto& [k, v] : a) {
        na += v * v;
        if (const auto it = b.find(k); it != b.end()) dot += v * it->second;
    }
    for (const auto& [k, v] : b) nb += v * v;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double lcs_ratio(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    return static_cast<double>(lcs_length(a, b)) / static_cast<double>(std::max(a.size(), b.size()));
}

std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, cur[j]);
        }
        std::swap(prev, cur);
    }
    return best;
}

double common_substring_ratio(std::u32string_view a, std::u32string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    return static_cast<double>(longest_common_substring(a, b)) / static_cast<double>(std::max(a.size(), b.size()));
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const auto up = row[j];
            row[j] = std::min({up + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

double edit_similarity(std::u32string_view a, std::u32string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(std::max(a.size(), b.size()));
}

} // namespace measures

namespace {

MatchFeatures features(std::string_view error_info, std::string_view fragment, const std::vector<std::string>& tags) {
    MatchFeatures f;
    if (tags.empty()) {
        for (auto& t : extract_error_tags(error_info)) f.tags.insert(std::move(t));
    } else {
        for (const auto& t : tags) {
            auto norm = text::to_lower(text::trim(t));
            if (!norm.empty()) f.tags.insert(std::move(norm));
        }
    }
    for (auto& tok : measures::message_tokens(error_info)) {
        f.term_freq[tok] += 1.0;
        f.keywords.insert(std::move(tok));
    }
    f.structure = ast::heuristic_structure(fragment);
    f.fragment = text::decode_utf8(fragment);
    return f;
}

} // namespace

MatchFeatures MatchFeatures::of(const ErrorQuery& q) {
    return features(q.error_info, q.faulty_fragment, q.error_tags);
}

MatchFeatures MatchFeatures::of(const RepairCase& c) {
    return features(c.error_info, c.faulty_fragment, c.error_tags);
}

SimilarityBreakdown similarity(const MatchFeatures& q, const MatchFeatures& c, const SimilarityWeights& w) {
    SimilarityBreakdown b;
    b.scores[0] = measures::jaccard(q.tags, c.tags);
    b.scores[1] = measures::jaccard(q.keywords, c.keywords);
    b.scores[2] = measures::cosine(q.term_freq, c.term_freq);
    b.scores[3] = measures::lcs_ratio(q.structure, c.structure);
    b.scores[4] = measures::common_substring_ratio(q.fragment, c.fragment);
    b.scores[5] = measures::edit_similarity(q.fragment, c.fragment);
    double total = 0.0;
    for (std::size_t j = 0; j < kDimensions; ++j) total += w.values()[j] * b.scores[j];
    b.total = std::clamp(total, 0.0, 1.0);
    return b;
}

SimilarityBreakdown similarity(const ErrorQuery& q, const RepairCase& c, const SimilarityWeights& w) {
    return similarity(MatchFeatures::of(q), MatchFeatures::of(c), w);
}

} // namespace cjtrans::repo
