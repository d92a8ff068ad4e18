#include "cjtrans/llm/prompt_template.hpp"

#include "cjtrans/error.hpp"

#include <cctype>
#include <optional>

namespace cjtrans::llm {

namespace {

// If a placeholder `{ident}` starts at `pos`, returns the identifier.
std::optional<std::string_view> placeholder_at(std::string_view body, std::size_t pos) {
    if (body[pos] != '{') return std::nullopt;
    std::size_t i = pos + 1;
    if (i >= body.size()) return std::nullopt;
    const auto first = static_cast<unsigned char>(body[i]);
    if (!(std::isalpha(first) || first == '_')) return std::nullopt;
    while (i < body.size() && (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_')) ++i;
    if (i >= body.size() || body[i] != '}') return std::nullopt;
    return body.substr(pos + 1, i - pos - 1);
}

} // namespace

PromptTemplate::PromptTemplate(std::string name, std::string body) : name_(std::move(name)), body_(std::move(body)) {
    for (std::size_t i = 0; i < body_.size(); ++i) {
        if (const auto slot = placeholder_at(body_, i)) {
            if (!required_.emplace(*slot).second) {
                throw FormatError("template " + name_ + ": placeholder {" + std::string(*slot) + "} appears twice");
            }
            i += slot->size() + 1;
        }
    }
    if (required_.empty()) throw FormatError("template " + name_ + " has no placeholders");
}

std::string PromptTemplate::render(const Slots& slots) const {
    for (const auto& slot : required_) {
        if (!slots.contains(slot)) throw PreconditionError("template " + name_ + ": missing slot '" + slot + "'");
    }
    for (const auto& [key, value] : slots) {
        if (!required_.contains(key)) throw PreconditionError("template " + name_ + ": unknown slot '" + key + "'");
    }
    std::string out;
    out.reserve(body_.size());
    for (std::size_t i = 0; i < body_.size(); ++i) {
        if (const auto slot = placeholder_at(body_, i)) {
            out += slots.find(*slot)->second;
            i += slot->size() + 1;
        } else {
            out += body_[i];
        }
    }
    return out;
}

} // namespace cjtrans::llm
