#pragma once

#include "cjtrans/repo/repair_case.hpp"
#include "cjtrans/repo/similarity.hpp"

#include <shared_mutex>
#include <string>
#include <vector>

namespace cjtrans::repo {

struct RetrievedCase {
    RepairCase repair_case;
    SimilarityBreakdown score;
};

/// In-memory error-repair repository persisted as JSONL. Queries may run
/// concurrently; add_case takes an exclusive lock.
class RepairRepository {
public:
    RepairRepository() = default;
    RepairRepository(const RepairRepository& other);
    RepairRepository& operator=(const RepairRepository& other);

    /// Throws PreconditionError for an invalid case or a duplicate id.
    void add_case(RepairCase c);

    /// Throws FormatError for malformed records and duplicate ids.
    static RepairRepository load(const std::string& path);
    static RepairRepository parse(std::string_view content);
    std::string serialize() const;
    /// Whole-file atomic replace.
    void save(const std::string& path) const;

    /// Top-k by descending total, ties broken by ascending id.
    /// Throws PreconditionError on an empty repository or k == 0.
    std::vector<RetrievedCase> retrieve(const ErrorQuery& q, std::size_t k, const SimilarityWeights& w) const;

    std::size_t size() const;
    bool empty() const { return size() == 0; }
    bool contains(std::string_view id) const;
    std::vector<RepairCase> cases() const;

    friend bool operator==(const RepairRepository& a, const RepairRepository& b) { return a.cases() == b.cases(); }

private:
    struct Entry {
        RepairCase repair_case;
        MatchFeatures features;
    };
    mutable std::shared_mutex mutex_;
    std::vector<Entry> entries_;
};

} // namespace cjtrans::repo
