#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cjtrans::eval {

/// Code tokens: identifiers and numbers, string and character literals,
/// multi-character operators, and single punctuation characters.
/// Whitespace and comments separate tokens and are dropped.
std::vector<std::string> tokenize_code(std::string_view code);

struct BleuSegment {
    std::string candidate;
    std::vector<std::string> references;
};

/// Corpus BLEU with up to 4-gram clipped precisions, brevity penalty against
/// the closest reference length, and add-epsilon smoothing of zero
/// precisions above unigrams. Orders for which the candidates contain no
/// n-grams are left out of the geometric mean. Zero unigram matches give 0.
/// Throws PreconditionError when a candidate or all references of a segment
/// tokenize to nothing.
double corpus_bleu(const std::vector<BleuSegment>& segments);

/// Single-segment BLEU.
double bleu(std::string_view candidate, const std::vector<std::string>& references);

inline constexpr double kBleuEpsilon = 1e-9;
inline constexpr int kBleuMaxOrder = 4;

} // namespace cjtrans::eval
