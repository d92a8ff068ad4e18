#include "cjtrans/eval/metrics.hpp"

#include "cjtrans/error.hpp"
#include "cjtrans/eval/bleu.hpp"
#include "cjtrans/jsonl.hpp"

#include <cstdio>
#include <numeric>
#include <set>
#include <sstream>

namespace cjtrans::eval {

using jsonl::Json;

Ratio::Ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw PreconditionError("ratio with zero denominator");
    const auto g = std::gcd(num, den);
    num_ = num / g;
    den_ = den / g;
}

std::string Ratio::percent() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", value() * 100.0);
    return buf;
}

Ratio operator*(const Ratio& a, const Ratio& b) {
    // Cross-reduce first to keep intermediates small.
    const auto g1 = std::gcd(a.num_, b.den_);
    const auto g2 = std::gcd(b.num_, a.den_);
    return Ratio((a.num_ / g1) * (b.num_ / g2), (a.den_ / g2) * (b.den_ / g1));
}

Ratio csr(std::uint64_t n_compiled, std::uint64_t n_total) {
    if (n_total == 0) throw PreconditionError("csr: n_total is zero");
    if (n_compiled > n_total) throw PreconditionError("csr: n_compiled exceeds n_total");
    return Ratio(n_compiled, n_total);
}

Ratio cfe(std::uint64_t n_cf, std::uint64_t n_compiled) {
    if (n_cf > n_compiled) throw PreconditionError("cfe: n_cf exceeds n_compiled");
    return n_compiled == 0 ? Ratio(0, 1) : Ratio(n_cf, n_compiled);
}

void UnitOutcome::validate() const {
    if (id.empty()) throw PreconditionError("outcome without unit id");
    if (all_tests_passed && !compiled) throw PreconditionError("unit " + id + " passed tests without compiling");
}

Ratio fe(const std::vector<UnitOutcome>& outcomes) {
    if (outcomes.empty()) throw PreconditionError("fe: no outcomes");
    std::uint64_t passed = 0;
    for (const auto& o : outcomes) {
        o.validate();
        passed += o.all_tests_passed ? 1 : 0;
    }
    return Ratio(passed, outcomes.size());
}

EvalReport evaluate(const std::vector<UnitOutcome>& outcomes) {
    if (outcomes.empty()) throw PreconditionError("evaluate: no outcomes");
    EvalReport r;
    std::set<std::string> seen;
    std::vector<BleuSegment> segments;
    for (const auto& o : outcomes) {
        o.validate();
        if (!seen.insert(o.id).second) throw PreconditionError("duplicate unit id " + o.id);
        ++r.n_total;
        r.n_compiled += o.compiled ? 1 : 0;
        r.n_cf += o.all_tests_passed ? 1 : 0;

        UnitScore s{o.id, o.compiled, o.all_tests_passed, std::nullopt};
        if (!tokenize_code(o.candidate).empty() && !tokenize_code(o.reference).empty()) {
            s.bleu = bleu(o.candidate, {o.reference});
            segments.push_back({o.candidate, {o.reference}});
        }
        r.units.push_back(std::move(s));
    }
    r.fe = fe(outcomes);
    r.csr = csr(r.n_compiled, r.n_total);
    r.cfe = cfe(r.n_cf, r.n_compiled);
    r.cfe_undefined = r.n_compiled == 0;
    if (!segments.empty()) r.bleu = corpus_bleu(segments);
    return r;
}

namespace {

Json ratio_json(const Ratio& r) {
    Json j;
    j["num"] = r.num();
    j["den"] = r.den();
    j["value"] = r.value();
    j["percent"] = r.percent();
    return j;
}

std::string bleu_percent(std::optional<double> b) {
    if (!b) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *b * 100.0);
    return buf;
}

} // namespace

std::string report_jsonl(const EvalReport& report) {
    std::vector<Json> records;
    for (const auto& u : report.units) {
        Json j;
        j["id"] = u.id;
        j["compiled"] = u.compiled;
        j["all_tests_passed"] = u.all_tests_passed;
        j["bleu"] = u.bleu ? Json(*u.bleu) : Json(nullptr);
        records.push_back(std::move(j));
    }
    Json s;
    s["summary"] = true;
    s["n_total"] = report.n_total;
    s["n_compiled"] = report.n_compiled;
    s["n_cf"] = report.n_cf;
    s["fe"] = ratio_json(report.fe);
    s["csr"] = ratio_json(report.csr);
    s["cfe"] = ratio_json(report.cfe);
    s["cfe_undefined"] = report.cfe_undefined;
    s["bleu"] = report.bleu ? Json(*report.bleu) : Json(nullptr);
    records.push_back(std::move(s));
    return jsonl::dump(records);
}

std::string report_table(const EvalReport& report) {
    std::ostringstream out;
    char line[128];
    std::snprintf(line, sizeof line, "%-6s %8s  %s\n", "metric", "percent", "exact");
    out << line;
    const auto row = [&](const char* name, const std::string& pct, const std::string& exact) {
        std::snprintf(line, sizeof line, "%-6s %8s  %s\n", name, pct.c_str(), exact.c_str());
        out << line;
    };
    row("FE", report.fe.percent(), std::to_string(report.n_cf) + "/" + std::to_string(report.n_total));
    row("CSR", report.csr.percent(), std::to_string(report.n_compiled) + "/" + std::to_string(report.n_total));
    row("CFE", report.cfe.percent(),
        std::to_string(report.n_cf) + "/" + std::to_string(report.n_compiled) +
            (report.cfe_undefined ? " (nothing compiled)" : ""));
    row("BLEU", bleu_percent(report.bleu), "-");
    return out.str();
}

} // namespace cjtrans::eval
