#include "cjtrans/llm/templates.hpp"

namespace cjtrans::llm::templates {

const PromptTemplate& doc_reconstruction() {
    static const PromptTemplate t("doc_reconstruction", R"(### You are a technical writer building a structured knowledge base for the Cangjie programming language.
### Rewrite the documentation chapter below into self-contained knowledge entries. Each entry covers one concept or usage pattern.
### Return a JSON array. Every element must have exactly these fields:
###   "id": unique identifier such as "cj-<chapter>-<n>",
###   "title": short title,
###   "tags": list of keywords,
###   "typical_questions": list of questions a developer would ask about the concept,
###   "description": normalized explanation in plain prose,
###   "code_examples": list of complete, executable Cangjie code examples.
### Output only the JSON array.
Chapter: {title}
{chapter})");
    return t;
}

const PromptTemplate& semantic_annotation() {
    static const PromptTemplate t("semantic_annotation", R"(### You are an assistant for code semantic interpretation.
### Summarize the functional semantics of the following Cangjie code in one concise, imperative-style natural language sentence. Output only the description.
{code})");
    return t;
}

std::string_view translation_instruction() {
    return "Translate the following Java code into equivalent Cangjie code. The structural token sequence "
           "lists the declarations and control-flow constructs of the Java program in depth-first order; the "
           "Cangjie code must preserve that structure. Output only the Cangjie code in one fenced code block.";
}

std::string_view monolingual_instruction() {
    return "Write Cangjie code that implements the following functional description.";
}

const PromptTemplate& compile_repair_analysis() {
    static const PromptTemplate t("compile_repair_analysis", R"(### The Cangjie code below was translated from the Java program and fails to compile.
### Analyze the compiler errors. Explain the root cause of each error and describe the code changes that fix it. Do not write the full program yet.
[Compiler errors]
{error_message}
[Java source]
{java_source}
[Cangjie code]
{cangjie_code})");
    return t;
}

const PromptTemplate& compile_repair_code() {
    static const PromptTemplate t("compile_repair_code", R"(### Fix the Cangjie code so that it compiles and behaves like the Java program.
### Follow the repair analysis. Output only the complete corrected Cangjie program in one fenced code block.
[Compiler errors]
{error_message}
[Repair analysis]
{guidance}
[Java source]
{java_source}
[Cangjie code]
{cangjie_code})");
    return t;
}

const PromptTemplate& test_repair_analysis() {
    static const PromptTemplate t("test_repair_analysis", R"(### The Cangjie code below compiles but its output differs from the Java program on some test inputs.
### For each failed test, compare the expected Java output with the actual Cangjie output, explain the root cause, and describe the code changes that fix it. Do not write the full program yet.
[Failed tests]
{test_failures}
[Java source]
{java_source}
[Cangjie code]
{cangjie_code})");
    return t;
}

const PromptTemplate& test_repair_code() {
    static const PromptTemplate t("test_repair_code", R"(### Fix the Cangjie code so that its output matches the Java program on every test input.
### Follow the repair analysis. Output only the complete corrected Cangjie program in one fenced code block.
[Failed tests]
{test_failures}
[Repair analysis]
{guidance}
[Java source]
{java_source}
[Cangjie code]
{cangjie_code})");
    return t;
}

const PromptTemplate& rag_repair() {
    static const PromptTemplate t("rag_repair", R"(### The Cangjie code below fails to compile. Similar errors from a repository of verified repairs are listed with their fixes.
### Use the similar cases to repair the code. Output only the complete corrected Cangjie program in one fenced code block.
[Compiler errors]
{error_message}
[Similar repair cases]
{similar_cases}
[Cangjie code]
{cangjie_code})");
    return t;
}

} // namespace cjtrans::llm::templates
