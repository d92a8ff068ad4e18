#pragma once

#include "cjtrans/llm/prompt_template.hpp"

#include <string_view>

// Prompt templates shipped with the toolkit.
namespace cjtrans::llm::templates {

/// Documentation chapter -> JSON array of syntax entries. Slots: title, chapter.
const PromptTemplate& doc_reconstruction();

/// Cangjie snippet -> one-sentence functional description. Slots: code.
const PromptTemplate& semantic_annotation();

/// Instruction line placed before the structural and code blocks.
std::string_view translation_instruction();

/// Instruction stored in monolingual (description -> code) samples.
std::string_view monolingual_instruction();

/// Compile-failure analysis. Slots: error_message, java_source, cangjie_code.
const PromptTemplate& compile_repair_analysis();
/// Slots: error_message, guidance, java_source, cangjie_code.
const PromptTemplate& compile_repair_code();

/// Test-failure analysis. Slots: test_failures, java_source, cangjie_code.
const PromptTemplate& test_repair_analysis();
/// Slots: test_failures, guidance, java_source, cangjie_code.
const PromptTemplate& test_repair_code();

/// Retrieval-augmented repair. Slots: error_message, similar_cases, cangjie_code.
const PromptTemplate& rag_repair();

} // namespace cjtrans::llm::templates
