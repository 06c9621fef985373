#include "pdikit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "pdikit/errors.hpp"

namespace pdikit {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

void emit_value(std::ostringstream& out, const ReportValue& v) {
    switch (v.type) {
        case ReportValue::Type::Number: out << format_number(v.number); break;
        case ReportValue::Type::Integer: out << v.integer; break;
        case ReportValue::Type::String: out << '"' << json_escape(v.text) << '"'; break;
        case ReportValue::Type::Boolean: out << (v.boolean ? "true" : "false"); break;
    }
}

}  // namespace

ReportValue ReportValue::num(double v) {
    ReportValue r;
    r.type = Type::Number;
    r.number = v;
    return r;
}

ReportValue ReportValue::integer_v(long long v) {
    ReportValue r;
    r.type = Type::Integer;
    r.integer = v;
    return r;
}

ReportValue ReportValue::str(std::string v) {
    ReportValue r;
    r.type = Type::String;
    r.text = std::move(v);
    return r;
}

ReportValue ReportValue::boolean_v(bool v) {
    ReportValue r;
    r.type = Type::Boolean;
    r.boolean = v;
    return r;
}

bool ReportValue::operator==(const ReportValue& other) const {
    if (type != other.type) return false;
    switch (type) {
        case Type::Number: return number == other.number;
        case Type::Integer: return integer == other.integer;
        case Type::String: return text == other.text;
        case Type::Boolean: return boolean == other.boolean;
    }
    return false;
}

void ReportRecord::set(const std::string& key, ReportValue value) {
    result.emplace_back(key, std::move(value));
}

bool ReportRecord::operator==(const ReportRecord& other) const {
    // Result entries compare as key-sorted sets; JSON parsers may reorder keys.
    auto sorted = [](std::vector<std::pair<std::string, ReportValue>> v) {
        std::sort(v.begin(), v.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return v;
    };
    return command == other.command && config_hash == other.config_hash &&
           input_digest == other.input_digest && seed == other.seed &&
           tool_version == other.tool_version && sorted(result) == sorted(other.result);
}

std::string emit_report(const ReportRecord& record, ReportFormat format) {
    if (format == ReportFormat::Json) {
        std::ostringstream out;
        out << "{";
        out << "\"command\":\"" << json_escape(record.command) << "\",";
        out << "\"config_hash\":\"" << json_escape(record.config_hash) << "\",";
        out << "\"input_digest\":\"" << json_escape(record.input_digest) << "\",";
        out << "\"seed\":" << record.seed << ",";
        out << "\"versions\":{\"pdikit\":\"" << json_escape(record.tool_version) << "\"},";
        out << "\"result\":{";
        for (size_t i = 0; i < record.result.size(); ++i) {
            if (i) out << ",";
            out << '"' << json_escape(record.result[i].first) << "\":";
            emit_value(out, record.result[i].second);
        }
        out << "},";
        out << "\"elapsed_ms\":" << format_number(record.elapsed_ms);
        out << "}";
        return out.str();
    }

    std::ostringstream out;
    out << "command: " << record.command << "\n";
    out << "config_hash: " << record.config_hash << "\n";
    out << "input_digest: " << record.input_digest << "\n";
    out << "seed: " << record.seed << "\n";
    out << "version: " << record.tool_version << "\n";
    for (const auto& [key, value] : record.result) {
        out << key << ": ";
        switch (value.type) {
            case ReportValue::Type::Number: out << format_number(value.number); break;
            case ReportValue::Type::Integer: out << value.integer; break;
            case ReportValue::Type::String: out << value.text; break;
            case ReportValue::Type::Boolean: out << (value.boolean ? "true" : "false"); break;
        }
        out << "\n";
    }
    out << "elapsed_ms: " << format_number(record.elapsed_ms) << "\n";
    return out.str();
}

ReportRecord parse_report_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ReportRecord record;
    record.command = j.at("command").get<std::string>();
    record.config_hash = j.at("config_hash").get<std::string>();
    record.input_digest = j.at("input_digest").get<std::string>();
    record.seed = j.at("seed").get<std::uint64_t>();
    record.tool_version = j.at("versions").at("pdikit").get<std::string>();
    record.elapsed_ms = j.at("elapsed_ms").get<double>();
    for (const auto& [key, value] : j.at("result").items()) {
        if (value.is_boolean()) {
            record.set(key, ReportValue::boolean_v(value.get<bool>()));
        } else if (value.is_number_integer()) {
            record.set(key, ReportValue::integer_v(value.get<long long>()));
        } else if (value.is_number()) {
            record.set(key, ReportValue::num(value.get<double>()));
        } else if (value.is_string()) {
            record.set(key, ReportValue::str(value.get<std::string>()));
        } else {
            fail(ErrorCode::ParseError, "unsupported value type in report for key '" + key + "'");
        }
    }
    return record;
}

std::string strip_elapsed(const std::string& json_text) {
    size_t pos = json_text.rfind(",\"elapsed_ms\":");
    require(pos != std::string::npos, ErrorCode::ParseError, "report has no elapsed_ms field");
    size_t end = json_text.find('}', pos);
    require(end != std::string::npos, ErrorCode::ParseError, "malformed report");
    return json_text.substr(0, pos) + json_text.substr(end);
}

}  // namespace pdikit
