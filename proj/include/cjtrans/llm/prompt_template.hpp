#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace cjtrans::llm {

using Slots = std::map<std::string, std::string, std::less<>>;

/// Text with `{name}` placeholders. Each placeholder appears exactly once.
class PromptTemplate {
public:
    /// Throws FormatError if a placeholder is repeated or the body has none.
    PromptTemplate(std::string name, std::string body);

    const std::string& name() const { return name_; }
    const std::string& body() const { return body_; }
    const std::set<std::string, std::less<>>& required_slots() const { return required_; }

    /// Single-pass substitution: slot values are inserted literally and never
    /// re-expanded. Missing and unknown slots raise PreconditionError.
    std::string render(const Slots& slots) const;

private:
    std::string name_;
    std::string body_;
    std::set<std::string, std::less<>> required_;
};

} // namespace cjtrans::llm
