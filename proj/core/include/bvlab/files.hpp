#pragma once

#include "bvlab/modes.hpp"
#include "bvlab/parser.hpp"
#include "bvlab/theory.hpp"

#include <optional>

namespace bvlab {

struct SplitData {
    std::vector<std::pair<Polynomial, Polynomial>> pairs; // (u, v) expressions
    std::vector<Polynomial> closed;                        // w expressions
};

struct TheoryFile {
    std::string name;
    TheorySpec spec;
    ParseEnv env;
    std::optional<SplitData> split;
    std::map<std::string, Polynomial> observables;
    std::optional<Polynomial> gauge_fermion;
};

/// Parses the theory DSL (';'-terminated statements) against the context.
TheoryFile load_theory(Context& ctx, const std::string& text);

struct ModeFile {
    std::string name;
    ModeSystem system;
};

/// Parses a mode-system table file and finalizes/validates the kernels.
ModeFile load_modes(Context& ctx, const std::string& text);

std::string read_file(const std::string& path);

} // namespace bvlab
