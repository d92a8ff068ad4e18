#include "cjtrans/corpus/datasets.hpp"

#include "cjtrans/ast/java_parser.hpp"
#include "cjtrans/llm/templates.hpp"
#include "cjtrans/text.hpp"
#include "scan.hpp"

#include <regex>
#include <set>

namespace cjtrans::corpus {

using jsonl::Json;

namespace {

std::string string_field(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw FormatError(std::string("field '") + key + "' is not a string");
    return it->get<std::string>();
}

std::vector<std::string> list_field(const Json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw FormatError(std::string("missing field '") + key + "'");
    if (!it->is_array()) throw FormatError(std::string("field '") + key + "' is not a list");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw FormatError(std::string("field '") + key + "' holds a non-string");
        out.push_back(v.get<std::string>());
    }
    return out;
}

void require_object(const Json& j) {
    if (!j.is_object()) throw FormatError("record is not an object");
}

std::size_t non_blank_lines(std::string_view code) {
    std::size_t n = 0;
    for (const auto line : text::split_lines(code)) n += text::trim(line).empty() ? 0 : 1;
    return n;
}

const std::set<std::string, std::less<>>& builtin_types() {
    static const std::set<std::string, std::less<>> s = {
        "Int8",    "Int16",    "Int32",   "Int64",     "IntNative", "UInt8",   "UInt16", "UInt32",
        "UInt64",  "UIntNative", "Float16", "Float32", "Float64",   "Bool",    "Rune",   "Unit",
        "Nothing", "String",   "Array",   "VArray",    "Option",    "Range",   "ArrayList", "HashMap",
        "HashSet", "Object",
    };
    return s;
}

bool balanced(std::string_view code) {
    std::string stack;
    for (const char c : code) {
        if (c == '{' || c == '(' || c == '[') {
            stack.push_back(c);
        } else if (c == '}' || c == ')' || c == ']') {
            const char open = c == '}' ? '{' : c == ')' ? '(' : '[';
            if (stack.empty() || stack.back() != open) return false;
            stack.pop_back();
        }
    }
    return stack.empty();
}

} // namespace

void SyntaxEntry::validate() const {
    if (text::trim(id).empty()) throw FormatError("entry id is empty");
    if (text::trim(description).empty()) throw FormatError("entry " + id + " has an empty description");
    if (typical_questions.empty() && code_examples.empty())
        throw FormatError("entry " + id + " has neither questions nor code examples");
}

Json to_json(const SyntaxEntry& e) {
    Json j;
    j["id"] = e.id;
    j["title"] = e.title;
    j["tags"] = e.tags;
    j["typical_questions"] = e.typical_questions;
    j["description"] = e.description;
    j["code_examples"] = e.code_examples;
    return j;
}

SyntaxEntry entry_from_json(const Json& j) {
    require_object(j);
    SyntaxEntry e{string_field(j, "id"),       string_field(j, "title"),       list_field(j, "tags"),
                  list_field(j, "typical_questions"), string_field(j, "description"), list_field(j, "code_examples")};
    e.validate();
    return e;
}

ReconstructionResult reconstruct_chapter(std::string_view title, std::string_view chapter,
                                         llm::CompletionClient& client, const llm::DecodingConfig& cfg) {
    if (text::trim(chapter).empty()) throw PreconditionError("chapter text is empty");
    const auto prompt = llm::templates::doc_reconstruction().render(
        {{"title", std::string(title)}, {"chapter", std::string(chapter)}});
    const auto reply = client.complete(prompt, cfg);

    Json parsed;
    try {
        parsed = Json::parse(llm::extract_code_block(reply));
    } catch (const Json::parse_error& e) {
        throw ReconstructionError(std::string("reply is not JSON: ") + e.what(), reply);
    }
    if (parsed.is_object() && parsed.contains("entries")) parsed = parsed["entries"];
    if (!parsed.is_array()) throw ReconstructionError("reply is not a JSON array", reply);

    ReconstructionResult out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        try {
            auto e = entry_from_json(parsed[i]);
            e.description = text::collapse_whitespace(e.description);
            if (!ids.insert(e.id).second) throw FormatError("duplicate id " + e.id);
            out.entries.push_back(std::move(e));
        } catch (const FormatError& err) {
            ++out.dropped;
            out.drop_reasons.push_back("element " + std::to_string(i) + ": " + err.what());
        }
    }
    if (out.entries.empty())
        throw ReconstructionError("reply yields no valid entries (" + std::to_string(out.dropped) + " dropped)",
                                  reply);
    return out;
}

std::vector<Json> serialize_cpt(const std::vector<SyntaxEntry>& entries) {
    std::vector<Json> out;
    out.reserve(entries.size());
    for (const auto& e : entries) {
        std::string t;
        const auto section = [&](std::string_view marker, std::string_view body) {
            t.append(marker).append("\n").append(body);
            if (!body.empty() && body.back() != '\n') t += '\n';
        };
        t.append(kEntryBegin).append("\n");
        section(kIdMarker, e.id);
        section(kTitleMarker, e.title);
        std::string tags;
        for (std::size_t i = 0; i < e.tags.size(); ++i) tags += (i ? ", " : "") + e.tags[i];
        section(kTagsMarker, tags);
        std::string questions;
        for (const auto& q : e.typical_questions) questions += "- " + q + "\n";
        section(kQuestionsMarker, questions);
        section(kDescriptionMarker, e.description);
        std::string examples;
        for (const auto& c : e.code_examples) examples += "```cangjie\n" + c + (c.ends_with('\n') ? "" : "\n") + "```\n";
        section(kExamplesMarker, examples);
        t.append(kEntryEnd).append("\n");
        out.push_back(Json{{"text", t}});
    }
    return out;
}

std::string_view reason_name(RejectReason r) {
    switch (r) {
    case RejectReason::TooShort: return "too_short";
    case RejectReason::Incomplete: return "incomplete";
    case RejectReason::ExternalDependency: return "external_dependency";
    }
    return "unknown";
}

ImportAllowlist ImportAllowlist::parse(std::string_view content) {
    ImportAllowlist a;
    a.prefixes.clear();
    for (const auto line : text::split_lines(content)) {
        const auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        a.prefixes.emplace_back(t);
    }
    return a;
}

ImportAllowlist ImportAllowlist::load(const std::string& path) { return parse(text::read_file(path)); }

bool ImportAllowlist::allows(std::string_view import_path) const {
    for (const auto& p : prefixes) {
        if (import_path == p) return true;
        if (import_path.size() > p.size() && import_path.starts_with(p) && import_path[p.size()] == '.') return true;
    }
    return false;
}

std::optional<Rejection> check_snippet(std::string_view code, const ImportAllowlist& allow) {
    const auto lines = non_blank_lines(code);
    if (lines < kMinSnippetLines)
        return Rejection{0, RejectReason::TooShort, std::to_string(lines) + " non-blank lines"};

    const auto bare = detail::blank_comments_and_literals(code);
    if (!balanced(bare)) return Rejection{0, RejectReason::Incomplete, "unbalanced delimiters"};
    if (bare.find("...") != std::string::npos) return Rejection{0, RejectReason::Incomplete, "elided code"};

    static const std::regex decl(R"(\b(func|class|struct|interface|enum|main)\b)");
    if (!std::regex_search(bare, decl)) return Rejection{0, RejectReason::Incomplete, "no declaration"};

    static const std::regex import_re(R"((?:^|\n)[ \t]*(?:public[ \t]+)?import[ \t]+([A-Za-z_][\w.]*))");
    static const std::regex from_re(R"((?:^|\n)[ \t]*from[ \t]+([A-Za-z_][\w.]*)[ \t]+import\b)");
    bool wildcard = false;
    std::set<std::string, std::less<>> imported;
    for (const auto* re : {&import_re, &from_re}) {
        for (std::sregex_iterator it(bare.begin(), bare.end(), *re), end; it != end; ++it) {
            auto path = (*it)[1].str();
            while (path.ends_with('.')) path.pop_back();
            if (!allow.allows(path))
                return Rejection{0, RejectReason::ExternalDependency, "import of " + path};
            const auto after = bare.substr(static_cast<std::size_t>(it->position(1) + it->length(1)), 2);
            if (after.starts_with(".*") || after.starts_with("*") || after.starts_with("{") || re == &from_re)
                wildcard = true;
            imported.insert(path.substr(path.rfind('.') == std::string::npos ? 0 : path.rfind('.') + 1));
        }
    }

    static const std::regex declared_re(R"(\b(?:class|struct|interface|enum|type)\s+([A-Za-z_]\w*))");
    std::set<std::string, std::less<>> declared;
    for (std::sregex_iterator it(bare.begin(), bare.end(), declared_re), end; it != end; ++it)
        declared.insert((*it)[1].str());
    static const std::regex extend_re(R"(\bextend\s*(?:<[^>]*>\s*)?([A-Za-z_]\w*))");
    for (std::sregex_iterator it(bare.begin(), bare.end(), extend_re), end; it != end; ++it) {
        const auto name = (*it)[1].str();
        if (!declared.contains(name) && !builtin_types().contains(name) && !imported.contains(name) && !wildcard)
            return Rejection{0, RejectReason::Incomplete, "extend of undeclared type " + name};
    }
    return std::nullopt;
}

FilterResult filter_snippets(const std::vector<std::string>& snippets, const ImportAllowlist& allow) {
    FilterResult out;
    for (std::size_t i = 0; i < snippets.size(); ++i) {
        if (auto r = check_snippet(snippets[i], allow)) {
            r->index = i;
            out.rejected.push_back(std::move(*r));
        } else {
            out.retained.push_back(i);
        }
    }
    return out;
}

std::string first_sentence(std::string_view input) {
    const auto t = text::collapse_whitespace(input);
    bool in_double = false, in_tick = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const char c = t[i];
        if (c == '"' && !in_tick) in_double = !in_double;
        else if (c == '`' && !in_double) in_tick = !in_tick;
        if (in_double || in_tick) continue;
        if (c == '.' || c == '!' || c == '?') {
            if (i + 1 == t.size() || t[i + 1] == ' ') return t.substr(0, i + 1);
        }
        // Full-width terminators end a sentence regardless of what follows.
        for (const std::string_view cjk : {"。", "！", "？"}) {
            if (std::string_view(t).substr(i, cjk.size()) == cjk) return t.substr(0, i + cjk.size());
        }
    }
    return t;
}

std::string annotate_snippet(std::string_view code, llm::CompletionClient& client, const llm::DecodingConfig& cfg,
                             const ImportAllowlist& allow) {
    if (const auto r = check_snippet(code, allow))
        throw PreconditionError("snippet is not annotatable: " + std::string(reason_name(r->reason)) + " (" +
                                r->detail + ")");
    const auto prompt = llm::templates::semantic_annotation().render({{"code", std::string(code)}});
    const auto sentence = first_sentence(client.complete(prompt, cfg));
    if (sentence.empty()) throw FormatError("annotation reply is empty");
    return sentence;
}

void MonolingualSample::validate() const {
    if (text::trim(instruction).empty()) throw FormatError("sample instruction is empty");
    if (text::trim(input).empty()) throw FormatError("sample description is empty");
    if (first_sentence(input) != input) throw FormatError("sample description is not a single sentence");
    if (non_blank_lines(output) < kMinSnippetLines) throw FormatError("sample code has fewer than 5 lines");
}

Json to_json(const MonolingualSample& s) {
    return Json{{"instruction", s.instruction}, {"input", s.input}, {"output", s.output}};
}

MonolingualSample monolingual_from_json(const Json& j) {
    require_object(j);
    MonolingualSample s{string_field(j, "instruction"), string_field(j, "input"), string_field(j, "output")};
    s.validate();
    return s;
}

std::string ParallelSample::prompt() const {
    return ast::render_structured_prompt(structure_block, java_source, instruction);
}

Json to_json(const ParallelSample& s) {
    return Json{{"instruction", s.instruction},
                {"structure_block", s.structure_block},
                {"java_source", s.java_source},
                {"cangjie_target", s.cangjie_target}};
}

ParallelSample parallel_from_json(const Json& j) {
    require_object(j);
    ParallelSample s{string_field(j, "instruction"), list_field(j, "structure_block"), string_field(j, "java_source"),
                     string_field(j, "cangjie_target")};
    for (const auto& t : s.structure_block)
        if (!ast::is_structural_token(t)) throw FormatError("malformed structural token '" + t + "'");
    return s;
}

std::vector<std::string> java_structure_tokens(std::string_view java, const ast::StructuralTokenVocab& vocab,
                                               const ast::RetainedSet& retained) {
    const auto tree = ast::parse_java(java);
    if (!ast::contains_declaration(tree)) throw PreconditionError("java source has no declaration");
    auto summary = ast::summarize(tree, retained);
    return ast::tokenize_structure(summary, vocab);
}

ParallelSample build_parallel_sample(std::string_view java, std::string_view cangjie,
                                     const ast::StructuralTokenVocab& vocab, const ast::RetainedSet& retained) {
    if (text::trim(java).empty()) throw PreconditionError("java source is empty");
    if (text::trim(cangjie).empty()) throw PreconditionError("cangjie target is empty");
    if (ast::contains_boundary_marker(cangjie)) throw PreconditionError("cangjie target contains a boundary marker");
    ParallelSample s{std::string(llm::templates::translation_instruction()), java_structure_tokens(java, vocab, retained),
                     std::string(java), std::string(cangjie)};
    // Rendering validates markers in the source.
    (void)s.prompt();
    return s;
}

} // namespace cjtrans::corpus
