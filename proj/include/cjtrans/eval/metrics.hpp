#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cjtrans::eval {

/// Non-negative exact fraction kept in lowest terms. The denominator is
/// always positive.
class Ratio {
public:
    Ratio() = default;
    /// Throws PreconditionError when den == 0.
    Ratio(std::uint64_t num, std::uint64_t den);

    std::uint64_t num() const { return num_; }
    std::uint64_t den() const { return den_; }
    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    /// Value on a 0-100 scale with two decimals, e.g. "63.64".
    std::string percent() const;
    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    friend Ratio operator*(const Ratio& a, const Ratio& b);
    friend bool operator==(const Ratio& a, const Ratio& b) = default;

private:
    std::uint64_t num_ = 0;
    std::uint64_t den_ = 1;
};

/// Compilation success rate. Throws PreconditionError when n_total == 0 or
/// n_compiled > n_total.
Ratio csr(std::uint64_t n_compiled, std::uint64_t n_total);

/// Functional correctness among compiled units. Zero when nothing compiled.
/// Throws PreconditionError when n_cf > n_compiled.
Ratio cfe(std::uint64_t n_cf, std::uint64_t n_compiled);

struct UnitOutcome {
    std::string id;
    bool compiled = false;
    bool all_tests_passed = false;
    std::string candidate;
    std::string reference;

    /// Throws PreconditionError when id is empty or a unit passed without compiling.
    void validate() const;
};

/// Fraction of units that passed every test. Throws on empty input.
Ratio fe(const std::vector<UnitOutcome>& outcomes);

struct UnitScore {
    std::string id;
    bool compiled = false;
    bool all_tests_passed = false;
    /// Absent when candidate or reference has no tokens.
    std::optional<double> bleu;
};

struct EvalReport {
    std::uint64_t n_total = 0;
    std::uint64_t n_compiled = 0;
    std::uint64_t n_cf = 0;
    Ratio fe;
    Ratio csr;
    Ratio cfe;
    /// Set when n_compiled == 0 and cfe is reported as zero by convention.
    bool cfe_undefined = false;
    /// Corpus BLEU over units with a non-empty candidate and reference.
    std::optional<double> bleu;
    std::vector<UnitScore> units;
};

/// Throws PreconditionError on empty input, duplicate ids, or invalid outcomes.
EvalReport evaluate(const std::vector<UnitOutcome>& outcomes);

/// Line-delimited records: one per unit, then a summary record.
std::string report_jsonl(const EvalReport& report);
/// Aligned text table with percentages and exact counts.
std::string report_table(const EvalReport& report);

} // namespace cjtrans::eval
