#include "bvlab/report.hpp"

#include <cstdint>
#include <sstream>

namespace bvlab {

bool Report::all_pass() const {
    for (auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string Report::human() const {
    std::ostringstream os;
    os << "== " << command << " " << input << " (digest " << digest << ")\n";
    for (auto& c : checks) {
        os << (c.pass ? "PASS" : "FAIL") << "  " << c.id;
        if (!c.detail.empty()) os << "  [" << c.detail << "]";
        os << "  (" << c.ms << " ms)\n";
    }
    os << (all_pass() ? "all checks passed" : "CHECKS FAILED") << "\n";
    return os.str();
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

} // namespace

std::string Report::json(bool with_timing) const {
    std::ostringstream os;
    os << "{\n";
    os << "  \"schema\": \"bvlab-report-v1\",\n";
    os << "  \"command\": \"" << json_escape(command) << "\",\n";
    os << "  \"input\": \"" << json_escape(input) << "\",\n";
    os << "  \"digest\": \"" << digest << "\",\n";
    os << "  \"pass\": " << (all_pass() ? "true" : "false") << ",\n";
    os << "  \"checks\": [\n";
    for (std::size_t k = 0; k < checks.size(); ++k) {
        const CheckResult& c = checks[k];
        os << "    {\"id\": \"" << json_escape(c.id) << "\", \"status\": \""
           << (c.pass ? "pass" : "fail") << "\", \"residual\": \"" << json_escape(c.detail)
           << "\", \"time_ms\": ";
        if (with_timing) os << c.ms;
        else os << "null";
        os << "}" << (k + 1 < checks.size() ? "," : "") << "\n";
    }
    os << "  ]\n}\n";
    return os.str();
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

} // namespace bvlab
