#pragma once

#include "cjtrans/repo/repair_case.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace cjtrans::repo {

inline constexpr std::size_t kDimensions = 6;

enum class Dimension : std::size_t {
    ErrorType = 0,       // tag-set Jaccard
    KeywordOverlap = 1,  // message-token Jaccard
    Semantic = 2,        // message term-frequency cosine
    CodeStructure = 3,   // structural-summary LCS ratio
    CharSequence = 4,    // longest common substring ratio
    EditDistance = 5,    // normalized Levenshtein similarity
};

/// Non-negative weights normalized to sum to one.
class SimilarityWeights {
public:
    /// Throws PreconditionError on negative or non-finite entries or a zero sum.
    explicit SimilarityWeights(const std::array<double, kDimensions>& raw);

    static SimilarityWeights uniform();
    static SimilarityWeights one_hot(Dimension d);

    const std::array<double, kDimensions>& values() const { return w_; }
    double operator[](Dimension d) const { return w_[static_cast<std::size_t>(d)]; }

private:
    std::array<double, kDimensions> w_{};
};

struct SimilarityBreakdown {
    std::array<double, kDimensions> scores{};
    double total = 0.0;

    double operator[](Dimension d) const { return scores[static_cast<std::size_t>(d)]; }
};

/// Precomputed per-text features, so a stored case is analysed once rather
/// than on every query.
struct MatchFeatures {
    std::set<std::string> tags;
    std::set<std::string> keywords;
    std::map<std::string, double> term_freq;
    std::vector<std::string> structure;
    std::u32string fragment;

    static MatchFeatures of(const ErrorQuery& q);
    static MatchFeatures of(const RepairCase& c);
};

SimilarityBreakdown similarity(const MatchFeatures& q, const MatchFeatures& c, const SimilarityWeights& w);
SimilarityBreakdown similarity(const ErrorQuery& q, const RepairCase& c, const SimilarityWeights& w);

// Building blocks, exposed for testing. Every score lies in [0, 1], two empty
// inputs score 1 and an empty input against a non-empty one scores 0.
namespace measures {

/// Lower-cased alphanumeric tokens of a diagnostic with paths, numbers, hex
/// addresses and stop words removed.
std::vector<std::string> message_tokens(std::string_view message);

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);
double cosine(const std::map<std::string, double>& a, const std::map<std::string, double>& b);
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);
double lcs_ratio(const std::vector<std::string>& a, const std::vector<std::string>& b);
std::size_t longest_common_substring(std::u32string_view a, std::u32string_view b);
double common_substring_ratio(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
double edit_similarity(std::u32string_view a, std::u32string_view b);

} // namespace measures

} // namespace cjtrans::repo
