#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace escset {

struct Violation {
    /// Sample or cell index; kAggregate for suite-level checks.
    std::size_t index = 0;
    std::string input;
    std::string expected;
    std::string observed;

    static constexpr std::size_t kAggregate = std::numeric_limits<std::size_t>::max();
};

struct VerificationReport {
    std::string suite_name;
    std::string subject;  ///< map(s) under test, canonical text
    std::size_t total = 0;
    std::size_t skipped_undetermined = 0;
    std::vector<Violation> violations;  ///< sorted by index
    std::map<std::string, double> metrics;

    bool passed() const { return violations.empty(); }
    const char* verdict() const { return passed() ? "pass" : "fail"; }
};

inline VerificationReport make_report(std::string suite_name, std::string subject) {
    VerificationReport r;
    r.suite_name = std::move(suite_name);
    r.subject = std::move(subject);
    return r;
}

inline nlohmann::ordered_json to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["suite_name"] = r.suite_name;
    j["subject"] = r.subject;
    j["total"] = r.total;
    j["skipped"] = r.skipped_undetermined;
    auto& v = j["violations"] = nlohmann::ordered_json::array();
    for (const Violation& x : r.violations) {
        nlohmann::ordered_json e;
        if (x.index == Violation::kAggregate)
            e["index"] = nullptr;
        else
            e["index"] = x.index;
        e["input"] = x.input;
        e["expected"] = x.expected;
        e["observed"] = x.observed;
        v.push_back(std::move(e));
    }
    j["verdict"] = r.verdict();
    auto& m = j["metrics"] = nlohmann::ordered_json::object();
    for (const auto& [key, value] : r.metrics) m[key] = value;
    return j;
}

/// One JSON object on a single line.
inline std::string to_json_line(const VerificationReport& r) { return to_json(r).dump(); }

}  // namespace escset
