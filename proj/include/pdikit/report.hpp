#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pdikit {

// Machine-readable run records. JSON output is a single object with
// snake_case field names; numbers carry 17 significant digits. The
// elapsed_ms field is excluded from the determinism contract.

struct ReportValue {
    enum class Type { Number, Integer, String, Boolean };
    Type type = Type::Number;
    double number = 0.0;
    long long integer = 0;
    std::string text;
    bool boolean = false;

    static ReportValue num(double v);
    static ReportValue integer_v(long long v);
    static ReportValue str(std::string v);
    static ReportValue boolean_v(bool v);

    bool operator==(const ReportValue& other) const;
};

struct ReportRecord {
    std::string command;
    std::string config_hash = "none";
    std::string input_digest = "none";
    std::uint64_t seed = 0;
    std::string tool_version;
    std::vector<std::pair<std::string, ReportValue>> result;
    double elapsed_ms = 0.0;

    void set(const std::string& key, ReportValue value);
    bool operator==(const ReportRecord& other) const;  // elapsed_ms excluded
};

enum class ReportFormat { Json, Text };

std::string emit_report(const ReportRecord& record, ReportFormat format);

// Inverse of the JSON emitter, for round-trip checks.
ReportRecord parse_report_json(const std::string& text);

// JSON string with elapsed_ms removed, for byte-level determinism checks.
std::string strip_elapsed(const std::string& json_text);

}  // namespace pdikit
