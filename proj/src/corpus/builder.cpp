#include "cjtrans/corpus/builder.hpp"

#include "cjtrans/llm/templates.hpp"
#include "cjtrans/parallel.hpp"
#include "cjtrans/text.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

namespace cjtrans::corpus {

namespace fs = std::filesystem;
using jsonl::Json;

std::vector<std::string> list_files(const std::string& dir, std::string_view extension) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == extension) out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

Json CorpusStats::to_json() const {
    Json j;
    j["chapters"] = chapters;
    j["entries"] = entries;
    j["dropped_entries"] = dropped_entries;
    j["snippets"] = snippets;
    j["retained_snippets"] = retained_snippets;
    j["rejected_by_reason"] = Json::object();
    for (const auto& [k, v] : rejected_by_reason) j["rejected_by_reason"][k] = v;
    j["monolingual"] = monolingual;
    j["parallel"] = parallel;
    j["errors"] = Json::array();
    for (const auto& e : errors) j["errors"].push_back(Json{{"file", e.file}, {"stage", e.stage}, {"message", e.message}});
    return j;
}

namespace {

std::string chapter_title(const std::string& path, std::string_view content) {
    for (const auto line : text::split_lines(content)) {
        const auto t = text::trim(line);
        if (t.starts_with("# ")) return std::string(text::trim(t.substr(2)));
    }
    return fs::path(path).stem().string();
}

std::string base_name(const std::string& path) { return fs::path(path).filename().string(); }

void require_dir(const std::string& dir, const char* what) {
    if (!fs::is_directory(dir)) throw PreconditionError(std::string(what) + " directory not found: " + dir);
}

struct ChapterOutcome {
    ReconstructionResult result;
    std::optional<FileError> error;
};

} // namespace

CorpusStats build_corpus(const CorpusInputs& in, const std::string& output_dir, llm::CompletionClient& client) {
    require_dir(in.chapters_dir, "chapter");
    const auto chapters = list_files(in.chapters_dir, ".md");
    if (chapters.empty()) throw PreconditionError("no .md chapters in " + in.chapters_dir);
    if (!in.snippets_dir.empty()) require_dir(in.snippets_dir, "snippet");
    if (!in.parallel_dir.empty()) require_dir(in.parallel_dir, "parallel");

    CorpusStats stats;
    stats.chapters = chapters.size();

    // Syntax entries.
    std::vector<ChapterOutcome> outcomes(chapters.size());
    parallel_for(chapters.size(), in.jobs, [&](std::size_t i) {
        const auto& path = chapters[i];
        try {
            const auto content = text::read_file(path);
            outcomes[i].result = reconstruct_chapter(chapter_title(path, content), content, client, in.decoding);
        } catch (const Error& e) {
            outcomes[i].error = FileError{base_name(path), "reconstruct", e.what()};
        }
    });
    std::vector<SyntaxEntry> entries;
    std::set<std::string> ids;
    for (auto& o : outcomes) {
        if (o.error) {
            stats.errors.push_back(*o.error);
            continue;
        }
        stats.dropped_entries += o.result.dropped;
        for (auto& e : o.result.entries) {
            if (!ids.insert(e.id).second) {
                ++stats.dropped_entries;
                continue;
            }
            entries.push_back(std::move(e));
        }
    }
    stats.entries = entries.size();

    // Monolingual samples.
    std::vector<Json> monolingual, rejected;
    if (!in.snippets_dir.empty()) {
        const auto files = list_files(in.snippets_dir, ".cj");
        std::vector<std::string> snippets;
        for (const auto& f : files) snippets.push_back(text::read_file(f));
        stats.snippets = snippets.size();
        const auto filtered = filter_snippets(snippets, in.allowlist);
        stats.retained_snippets = filtered.retained.size();
        for (const auto& r : filtered.rejected) {
            const auto reason = std::string(reason_name(r.reason));
            ++stats.rejected_by_reason[reason];
            rejected.push_back(Json{{"file", base_name(files[r.index])}, {"reason", reason}, {"detail", r.detail}});
        }

        std::vector<std::optional<MonolingualSample>> samples(filtered.retained.size());
        std::vector<std::optional<FileError>> errors(filtered.retained.size());
        parallel_for(filtered.retained.size(), in.jobs, [&](std::size_t i) {
            const auto idx = filtered.retained[i];
            try {
                MonolingualSample s{std::string(llm::templates::monolingual_instruction()),
                                    annotate_snippet(snippets[idx], client, in.decoding, in.allowlist), snippets[idx]};
                s.validate();
                samples[i] = std::move(s);
            } catch (const Error& e) {
                errors[i] = FileError{base_name(files[idx]), "annotate", e.what()};
            }
        });
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (samples[i]) monolingual.push_back(to_json(*samples[i]));
            if (errors[i]) stats.errors.push_back(*errors[i]);
        }
    }
    stats.monolingual = monolingual.size();

    // Parallel samples.
    std::vector<Json> parallel;
    if (!in.parallel_dir.empty()) {
        for (const auto& java_path : list_files(in.parallel_dir, ".java")) {
            const auto cj_path = fs::path(java_path).replace_extension(".cj").string();
            try {
                if (!fs::exists(cj_path)) throw PreconditionError("no matching .cj target");
                parallel.push_back(to_json(build_parallel_sample(text::read_file(java_path), text::read_file(cj_path),
                                                                 in.vocab, in.retained)));
            } catch (const Error& e) {
                stats.errors.push_back(FileError{base_name(java_path), "parallel", e.what()});
            }
        }
    }
    stats.parallel = parallel.size();

    std::vector<Json> entry_records;
    for (const auto& e : entries) entry_records.push_back(to_json(e));
    const fs::path out(output_dir);
    jsonl::write((out / kCptFile).string(), serialize_cpt(entries));
    jsonl::write((out / kEntriesFile).string(), entry_records);
    jsonl::write((out / kMonolingualFile).string(), monolingual);
    jsonl::write((out / kParallelFile).string(), parallel);
    jsonl::write((out / kRejectedFile).string(), rejected);
    text::write_file_atomic((out / kStatsFile).string(), stats.to_json().dump(2) + "\n");
    return stats;
}

} // namespace cjtrans::corpus
