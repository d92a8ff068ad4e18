#include "cjtrans/cli/commands.hpp"

#include "cjtrans/cli/benchmark.hpp"
#include "cjtrans/corpus/builder.hpp"
#include "cjtrans/engine/repair_loop.hpp"
#include "cjtrans/error.hpp"
#include "cjtrans/eval/metrics.hpp"
#include "cjtrans/llm/templates.hpp"
#include "cjtrans/parallel.hpp"
#include "cjtrans/repo/repository.hpp"
#include "cjtrans/text.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <map>
#include <ostream>

namespace cjtrans::cli {

namespace fs = std::filesystem;
using jsonl::Json;

namespace {

struct Options {
    std::string config;
    // build-corpus
    std::string chapters, snippets, parallel, out;
    // summarize-ast
    std::string java_file;
    bool tokens = false, prompt = false;
    // translate / repair
    std::string benchmark, repository;
    bool no_repair = false, no_harvest = false;
    std::optional<std::size_t> jobs, max_iterations;
    std::optional<double> threshold;
    // repo
    std::string cases_file, diagnostics_file, code_file;
    std::size_t top_k = 3;
    // evaluate / report
    std::string outcomes, refs, reports;
};

ast::StructuralTokenVocab load_vocab(const PipelineConfig& cfg) {
    return cfg.paths.vocab.empty() ? ast::StructuralTokenVocab::default_vocab()
                                   : ast::StructuralTokenVocab::load(cfg.paths.vocab);
}

void apply_overrides(PipelineConfig& cfg, const Options& o) {
    if (o.jobs) cfg.jobs = std::max<std::size_t>(1, *o.jobs);
    if (o.threshold) cfg.repair.threshold = *o.threshold;
    if (o.max_iterations) cfg.repair.max_iterations = *o.max_iterations;
    if (!o.repository.empty()) cfg.paths.repository = o.repository;
    if (!o.benchmark.empty()) cfg.paths.benchmark = o.benchmark;
    cfg.repair.validate();
}

std::string require_path(const std::string& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string("no ") + what + " configured");
    return p;
}

// build-corpus -------------------------------------------------------------

int cmd_build_corpus(PipelineConfig cfg, const Options& o, std::ostream& out, std::ostream& err) {
    if (!o.chapters.empty()) cfg.paths.chapters = o.chapters;
    if (!o.snippets.empty()) cfg.paths.snippets = o.snippets;
    if (!o.parallel.empty()) cfg.paths.parallel = o.parallel;
    if (!o.out.empty()) cfg.paths.datasets = o.out;
    corpus::CorpusInputs in;
    in.chapters_dir = require_path(cfg.paths.chapters, "chapter directory");
    in.snippets_dir = cfg.paths.snippets;
    in.parallel_dir = cfg.paths.parallel;
    if (!cfg.paths.allowlist.empty()) in.allowlist = corpus::ImportAllowlist::load(cfg.paths.allowlist);
    in.vocab = load_vocab(cfg);
    in.retained = cfg.retained;
    in.decoding = cfg.llm.decoding;
    in.jobs = cfg.jobs;
    const auto client = make_client(cfg);

    const auto stats = corpus::build_corpus(in, cfg.paths.datasets, *client);
    out << "chapters " << stats.chapters << "\nentries " << stats.entries << "\ndropped_entries "
        << stats.dropped_entries << "\nsnippets " << stats.snippets << "\nretained_snippets "
        << stats.retained_snippets << "\nmonolingual " << stats.monolingual << "\nparallel " << stats.parallel
        << "\nerrors " << stats.errors.size() << "\n";
    for (const auto& [reason, n] : stats.rejected_by_reason) out << "rejected." << reason << " " << n << "\n";
    for (const auto& e : stats.errors) err << e.file << ": " << e.stage << ": " << e.message << "\n";
    return stats.errors.empty() ? kExitOk : kExitPartial;
}

// summarize-ast ------------------------------------------------------------

int cmd_summarize(const PipelineConfig& cfg, const Options& o, std::ostream& out) {
    const auto source = text::read_file(o.java_file);
    const auto summary = ast::summarize_source(source, cfg.retained);
    if (o.prompt) {
        const auto tokens = ast::tokenize_structure(summary, load_vocab(cfg));
        out << ast::render_structured_prompt(tokens, source, llm::templates::translation_instruction());
    } else if (o.tokens) {
        const auto tokens = ast::tokenize_structure(summary, load_vocab(cfg));
        for (std::size_t i = 0; i < tokens.size(); ++i) out << (i ? " " : "") << tokens[i];
        out << "\n";
    } else {
        for (const auto& c : summary.categories) out << c << "\n";
    }
    return kExitOk;
}

// translate ----------------------------------------------------------------

int cmd_translate(PipelineConfig cfg, const Options& o, std::ostream& out, std::ostream& err) {
    apply_overrides(cfg, o);
    const auto out_dir = o.out.empty() ? cfg.paths.reports : o.out;
    const auto units = load_benchmark(require_path(cfg.paths.benchmark, "benchmark directory"));
    const auto client = make_client(cfg);
    const auto vocab = load_vocab(cfg);

    std::vector<std::optional<Json>> records(units.size());
    std::vector<std::string> errors(units.size());
    parallel_for(units.size(), cfg.jobs, [&](std::size_t i) {
        try {
            const auto rec = engine::translate(units[i].java_source, *client, vocab, cfg.llm.decoding, cfg.retained);
            records[i] = Json{{"id", units[i].id},
                              {"candidate", rec.candidate},
                              {"prompt_digest", llm::prompt_digest(rec.exchanges.front().prompt)}};
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    std::vector<Json> ok;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (records[i]) ok.push_back(*records[i]);
        else {
            ++failed;
            err << units[i].id << ": " << errors[i] << "\n";
        }
    }
    jsonl::write((fs::path(out_dir) / "translations.jsonl").string(), ok);
    out << "translated " << ok.size() << "\nerrored " << failed << "\n";
    return failed ? kExitPartial : kExitOk;
}

// repair -------------------------------------------------------------------

struct Toolchain {
    std::unique_ptr<engine::Compiler> compiler;
    std::unique_ptr<engine::Runner> runner;
};

Toolchain make_toolchain(const PipelineConfig& cfg) {
    Toolchain t;
    const auto& tc = cfg.toolchain;
    try {
        if (!tc.mock_compiler.empty())
            t.compiler = std::make_unique<engine::MockCompiler>(engine::MockCompiler::load(tc.mock_compiler));
        else if (!tc.compiler.empty())
            t.compiler = std::make_unique<engine::CommandCompiler>(tc.compiler);
        else
            throw ConfigError("no compiler configured: set toolchain.compiler or toolchain.mock_compiler");
        if (!tc.mock_runner.empty())
            t.runner = std::make_unique<engine::MockRunner>(engine::MockRunner::load(tc.mock_runner));
        else
            t.runner = std::make_unique<engine::CommandRunner>(tc.runner);
    } catch (const FormatError& e) {
        throw ConfigError(e.what());
    }
    return t;
}

struct UnitRun {
    engine::TranslationUnit unit;
    std::string error;
};

int cmd_repair(PipelineConfig cfg, const Options& o, std::ostream& out, std::ostream& err) {
    apply_overrides(cfg, o);
    if (o.no_repair) cfg.repair.max_iterations = 1;
    const auto out_dir = fs::path(o.out.empty() ? cfg.paths.reports : o.out);

    // Configuration problems surface before any unit runs.
    auto toolchain = make_toolchain(cfg);
    const auto client = make_client(cfg);
    const auto vocab = load_vocab(cfg);
    repo::RepairRepository repository;
    const bool has_repo_file = !cfg.paths.repository.empty() && fs::exists(cfg.paths.repository);
    if (has_repo_file) repository = repo::RepairRepository::load(cfg.paths.repository);
    const auto units = load_benchmark(require_path(cfg.paths.benchmark, "benchmark directory"));

    std::vector<UnitRun> runs(units.size());
    const engine::RepairDeps deps{*client, &repository, *toolchain.compiler, *toolchain.runner};
    parallel_for(units.size(), cfg.jobs, [&](std::size_t i) {
        auto& run = runs[i];
        run.unit.id = units[i].id;
        run.unit.java_source = units[i].java_source;
        run.unit.tests = units[i].tests;
        try {
            run.unit.candidates.push_back(
                engine::translate(units[i].java_source, *client, vocab, cfg.llm.decoding, cfg.retained));
            engine::run_repair_loop(run.unit, cfg.repair, deps);
        } catch (const Error& e) {
            run.error = e.what();
        }
        text::write_file_atomic((out_dir / "traces" / (units[i].id + ".jsonl")).string(),
                                engine::trace_jsonl(run.unit, cfg.redact_traces));
    });

    std::map<std::string, std::size_t> counts;
    std::vector<Json> outcomes;
    std::size_t harvested = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& u = runs[i].unit;
        const bool errored = !runs[i].error.empty();
        ++counts[errored ? "errored" : std::string(engine::name(u.status))];
        if (errored) err << u.id << ": " << runs[i].error << "\n";

        Json rec;
        rec["id"] = u.id;
        rec["status"] = errored ? "error" : std::string(engine::name(u.status));
        rec["iterations"] = u.candidates.size();
        const auto* last = u.candidates.empty() ? nullptr : &u.candidates.back();
        const bool compiled = !errored && last && last->evaluated && last->compile_status == engine::CompileStatus::Success;
        rec["compiled"] = compiled;
        rec["all_tests_passed"] = !errored && u.status == engine::UnitStatus::Accepted;
        rec["candidate"] = last ? last->candidate : "";
        rec["reference"] = units[i].reference ? Json(*units[i].reference) : Json(nullptr);
        if (errored) rec["error"] = runs[i].error;
        outcomes.push_back(std::move(rec));

        if (!errored && u.status == engine::UnitStatus::Accepted && !o.no_harvest) {
            for (auto& c : engine::harvest_cases(u)) {
                if (repository.contains(c.id)) continue;
                repository.add_case(std::move(c));
                ++harvested;
            }
        }
    }
    jsonl::write((out_dir / "outcomes.jsonl").string(), outcomes);
    if (harvested > 0 && !cfg.paths.repository.empty()) repository.save(cfg.paths.repository);

    for (const auto* key : {"accepted", "stagnated", "budget_exhausted", "errored"})
        out << key << " " << (counts.contains(key) ? counts.at(key) : 0) << "\n";
    out << "harvested " << harvested << "\n";
    return counts.contains("errored") ? kExitPartial : kExitOk;
}

// repo ---------------------------------------------------------------------

int cmd_repo_add(PipelineConfig cfg, const Options& o, std::ostream& out) {
    apply_overrides(cfg, o);
    const auto path = require_path(cfg.paths.repository, "repository file");
    repo::RepairRepository repository;
    if (fs::exists(path)) repository = repo::RepairRepository::load(path);
    std::size_t added = 0;
    for (const auto& j : jsonl::read(o.cases_file)) {
        auto c = repo::case_from_json(j);
        if (repository.contains(c.id)) throw PreconditionError("case " + c.id + " is already in the repository");
        repository.add_case(std::move(c));
        ++added;
    }
    repository.save(path);
    out << "added " << added << "\nsize " << repository.size() << "\n";
    return kExitOk;
}

int cmd_repo_search(PipelineConfig cfg, const Options& o, std::ostream& out) {
    apply_overrides(cfg, o);
    const auto repository = repo::RepairRepository::load(require_path(cfg.paths.repository, "repository file"));
    const auto diagnostics = text::read_file(o.diagnostics_file);
    const auto code = o.code_file.empty() ? std::string() : text::read_file(o.code_file);
    const auto results = repository.retrieve(repo::query_from_diagnostics(diagnostics, code), o.top_k, cfg.repair.weights);
    std::vector<Json> records;
    for (const auto& r : results)
        records.push_back(Json{{"id", r.repair_case.id}, {"total", r.score.total}, {"scores", r.score.scores}});
    out << jsonl::dump(records);
    return kExitOk;
}

// evaluate / report --------------------------------------------------------

std::string optional_string(const Json& j, const char* key) {
    return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string();
}

int cmd_evaluate(PipelineConfig cfg, const Options& o, std::ostream& out) {
    const auto refs = o.refs.empty() ? cfg.paths.references : o.refs;
    if (!refs.empty() && !fs::is_directory(refs)) throw PreconditionError("reference directory not found: " + refs);
    std::vector<eval::UnitOutcome> outcomes;
    for (const auto& j : jsonl::read(o.outcomes)) {
        if (!j.is_object() || !j.contains("id") || !j["id"].is_string())
            throw FormatError(o.outcomes + ": outcome without id");
        eval::UnitOutcome u;
        u.id = j["id"].get<std::string>();
        u.compiled = j.value("compiled", false);
        u.all_tests_passed = j.value("all_tests_passed", false);
        u.candidate = optional_string(j, "candidate");
        if (!refs.empty()) {
            const auto flat = fs::path(refs) / (u.id + ".cj");
            const auto nested = fs::path(refs) / u.id / "reference.cj";
            if (fs::exists(flat)) u.reference = text::read_file(flat.string());
            else if (fs::exists(nested)) u.reference = text::read_file(nested.string());
            else throw PreconditionError("no reference for unit " + u.id);
        } else {
            u.reference = optional_string(j, "reference");
        }
        outcomes.push_back(std::move(u));
    }
    const auto report = eval::evaluate(outcomes);
    const auto out_dir = fs::path(o.out.empty() ? cfg.paths.reports : o.out);
    text::write_file_atomic((out_dir / "report.jsonl").string(), eval::report_jsonl(report));
    const auto table = eval::report_table(report);
    text::write_file_atomic((out_dir / "report.txt").string(), table);
    out << table;
    return kExitOk;
}

int cmd_report(PipelineConfig cfg, const Options& o, std::ostream& out) {
    const auto dir = fs::path(o.reports.empty() ? cfg.paths.reports : o.reports);
    std::map<std::string, std::size_t> statuses;
    std::size_t units = 0;
    for (const auto& j : jsonl::read((dir / "outcomes.jsonl").string())) {
        ++units;
        ++statuses[j.value("status", "unknown")];
    }
    std::map<std::string, std::size_t> branches{{"rag_repair", 0}, {"self_analysis", 0}, {"test_repair", 0}};
    std::size_t iterations = 0;
    if (fs::is_directory(dir / "traces")) {
        for (const auto& f : corpus::list_files((dir / "traces").string(), ".jsonl")) {
            const auto records = jsonl::read(f);
            for (std::size_t i = 1; i < records.size(); ++i) {
                ++iterations;
                const auto b = records[i].value("branch", "");
                if (branches.contains(b)) ++branches[b];
            }
        }
    }
    char line[96];
    const auto row = [&](const std::string& k, std::size_t v) {
        std::snprintf(line, sizeof line, "%-22s %zu\n", k.c_str(), v);
        out << line;
    };
    row("units", units);
    for (const auto* s : {"accepted", "stagnated", "budget_exhausted", "error"}) row(s, statuses[s]);
    row("iterations", iterations);
    for (const auto& [b, n] : branches) row("branch." + b, n);
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
    CLI::App app{"Java to Cangjie translation toolkit", "cjtrans"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "JSON configuration file");

    auto* build = app.add_subcommand("build-corpus", "Build the syntax, monolingual and parallel datasets");
    build->add_option("--chapters", o.chapters, "Directory of .md documentation chapters");
    build->add_option("--snippets", o.snippets, "Directory of .cj snippets");
    build->add_option("--parallel", o.parallel, "Directory of .java/.cj pairs");
    build->add_option("--out", o.out, "Output directory");
    build->add_option("--jobs", o.jobs, "Parallel model calls");

    auto* summarize = app.add_subcommand("summarize-ast", "Print the structural summary of a Java file");
    summarize->add_option("file", o.java_file, "Java source")->required();
    summarize->add_flag("--tokens", o.tokens, "Print structural tokens");
    summarize->add_flag("--prompt", o.prompt, "Print the full translation prompt");

    auto* translate = app.add_subcommand("translate", "Translate every benchmark unit once");
    translate->add_option("--benchmark", o.benchmark, "Benchmark directory");
    translate->add_option("--out", o.out, "Output directory");
    translate->add_option("--jobs", o.jobs, "Units processed in parallel");

    auto* repair = app.add_subcommand("repair", "Translate and repair every benchmark unit");
    repair->add_option("--benchmark", o.benchmark, "Benchmark directory");
    repair->add_option("--out", o.out, "Output directory for traces and outcomes");
    repair->add_option("--repository", o.repository, "Repair repository file");
    repair->add_option("--jobs", o.jobs, "Units processed in parallel");
    repair->add_option("--threshold", o.threshold, "Similarity threshold for retrieval-augmented repair");
    repair->add_option("--max-iterations", o.max_iterations, "Candidates evaluated per unit");
    repair->add_flag("--no-repair", o.no_repair, "Evaluate the initial translation only");
    repair->add_flag("--no-harvest", o.no_harvest, "Do not add learned cases to the repository");

    auto* repo_cmd = app.add_subcommand("repo", "Manage the repair repository");
    repo_cmd->require_subcommand(1);
    auto* repo_add = repo_cmd->add_subcommand("add", "Add cases from a JSONL file");
    repo_add->add_option("--cases", o.cases_file, "JSONL file of repair cases")->required();
    repo_add->add_option("--repository", o.repository, "Repair repository file");
    auto* repo_search = repo_cmd->add_subcommand("search", "Retrieve cases similar to a compiler error");
    repo_search->add_option("--diagnostics", o.diagnostics_file, "File with compiler output")->required();
    repo_search->add_option("--code", o.code_file, "Failing Cangjie code");
    repo_search->add_option("--top-k", o.top_k, "Number of cases")->check(CLI::PositiveNumber);
    repo_search->add_option("--repository", o.repository, "Repair repository file");

    auto* evaluate = app.add_subcommand("evaluate", "Compute FE, CSR, CFE and BLEU");
    evaluate->add_option("--outcomes", o.outcomes, "outcomes.jsonl from a repair run")->required();
    evaluate->add_option("--refs", o.refs, "Directory of reference .cj files");
    evaluate->add_option("--out", o.out, "Output directory for the report");

    auto* report = app.add_subcommand("report", "Summarize statuses and repair branches of a run");
    report->add_option("--reports", o.reports, "Directory of a repair run");

    std::vector<const char*> argv{"cjtrans"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitConfig;
    }

    try {
        auto cfg = load_config(o.config, env);
        if (build->parsed()) return cmd_build_corpus(cfg, o, out, err);
        if (summarize->parsed()) return cmd_summarize(cfg, o, out);
        if (translate->parsed()) return cmd_translate(cfg, o, out, err);
        if (repair->parsed()) return cmd_repair(cfg, o, out, err);
        if (repo_add->parsed()) return cmd_repo_add(cfg, o, out);
        if (repo_search->parsed()) return cmd_repo_search(cfg, o, out);
        if (evaluate->parsed()) return cmd_evaluate(cfg, o, out);
        if (report->parsed()) return cmd_report(cfg, o, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitPartial;
    }
    return kExitConfig;
}

} // namespace cjtrans::cli
