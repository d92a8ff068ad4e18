#include "cjtrans/repo/repository.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/jsonl.hpp"
#include "cjtrans/text.hpp"

#include <algorithm>
#include <mutex>

namespace cjtrans::repo {

RepairRepository::RepairRepository(const RepairRepository& other) {
    std::shared_lock lock(other.mutex_);
    entries_ = other.entries_;
}

RepairRepository& RepairRepository::operator=(const RepairRepository& other) {
    if (this == &other) return *this;
    std::vector<Entry> copy;
    {
        std::shared_lock lock(other.mutex_);
        copy = other.entries_;
    }
    std::unique_lock lock(mutex_);
    entries_ = std::move(copy);
    return *this;
}

void RepairRepository::add_case(RepairCase c) {
    c.validate();
    auto features = MatchFeatures::of(c);
    std::unique_lock lock(mutex_);
    for (const auto& e : entries_) {
        if (e.repair_case.id == c.id) throw PreconditionError("duplicate repair case id: " + c.id);
    }
    entries_.push_back(Entry{std::move(c), std::move(features)});
}

RepairRepository RepairRepository::parse(std::string_view content) {
    RepairRepository repo;
    for (const auto& rec : jsonl::parse(content, "repository")) {
        auto c = case_from_json(rec);
        try {
            repo.add_case(std::move(c));
        } catch (const PreconditionError& e) {
            throw FormatError(std::string("repository: ") + e.what());
        }
    }
    return repo;
}

RepairRepository RepairRepository::load(const std::string& path) {
    return parse(text::read_file(path));
}

std::string RepairRepository::serialize() const {
    std::shared_lock lock(mutex_);
    std::vector<jsonl::Json> records;
    records.reserve(entries_.size());
    for (const auto& e : entries_) records.push_back(to_json(e.repair_case));
    return jsonl::dump(records);
}

void RepairRepository::save(const std::string& path) const {
    text::write_file_atomic(path, serialize());
}

std::vector<RetrievedCase> RepairRepository::retrieve(const ErrorQuery& q, std::size_t k,
                                                      const SimilarityWeights& w) const {
    q.validate();
    if (k == 0) throw PreconditionError("retrieve: k must be positive");
    const auto qf = MatchFeatures::of(q);
    std::shared_lock lock(mutex_);
    if (entries_.empty()) throw PreconditionError("retrieve: repository is empty");

    struct Scored {
        const Entry* entry;
        SimilarityBreakdown score;
    };
    std::vector<Scored> scored;
    scored.reserve(entries_.size());
    for (const auto& e : entries_) scored.push_back({&e, similarity(qf, e.features, w)});

    const auto n = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                      [](const Scored& a, const Scored& b) {
                          if (a.score.total != b.score.total) return a.score.total > b.score.total;
                          return a.entry->repair_case.id < b.entry->repair_case.id;
                      });
    std::vector<RetrievedCase> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back({scored[i].entry->repair_case, scored[i].score});
    return out;
}

std::size_t RepairRepository::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

bool RepairRepository::contains(std::string_view id) const {
    std::shared_lock lock(mutex_);
    return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.repair_case.id == id; });
}

std::vector<RepairCase> RepairRepository::cases() const {
    std::shared_lock lock(mutex_);
    std::vector<RepairCase> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.repair_case);
    return out;
}

} // namespace cjtrans::repo
