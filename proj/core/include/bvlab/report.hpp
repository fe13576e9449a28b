#pragma once

#include <string>
#include <vector>

namespace bvlab {

struct CheckResult {
    std::string id;
    bool pass = false;
    std::string detail; // residual pretty-print or note, empty when clean
    double ms = 0;
};

struct Report {
    std::string command;
    std::string input;
    std::string digest;
    std::vector<CheckResult> checks;

    bool all_pass() const;
    std::string human() const;
    /// Deterministic for fixed inputs and flags: timings are emitted as null
    /// unless explicitly requested.
    std::string json(bool with_timing = false) const;
};

std::string fnv1a_hex(const std::string& data);

} // namespace bvlab
