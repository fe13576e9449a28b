#pragma once

#include "bvlab/scalar.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvlab {

/// Interned graded variable. The parity lives in the low bit so that Koszul
/// signs never need a registry lookup; everything else (ghost number,
/// antifield number, jet structure) is stored in the Context.
struct VarId {
    std::uint32_t raw = 0;
    bool odd() const { return raw & 1u; }
    int parity() const { return raw & 1u; }
    friend bool operator==(VarId a, VarId b) { return a.raw == b.raw; }
    friend bool operator!=(VarId a, VarId b) { return a.raw != b.raw; }
    friend bool operator<(VarId a, VarId b) { return a.raw < b.raw; }
};

enum class Role {
    Field,
    Ghost,
    Antighost,
    Auxiliary,
    ConstantGhost,
    Mode,
    Coupling,   // formal constant (coupling, mass symbol)
    Parameter,  // polarisation parameter, even or odd
};

struct Grading {
    int parity = 0;     // Grassmann parity, 0 or 1
    int ghost = 0;      // ghost number
    int antifield = 0;  // antifield number
    friend bool operator==(const Grading&, const Grading&) = default;
    Grading operator+(const Grading& o) const {
        return {(parity + o.parity) & 1, ghost + o.ghost, antifield + o.antifield};
    }
};

using SymId = std::uint32_t;

struct SymbolInfo {
    std::string name;
    Role role = Role::Field;
    Grading grading;               // grading of the plain (non-antifield) symbol
    std::vector<int> index_ranges; // component index ranges, fully expanded
    bool spacetime = true;         // carries jet structure
    bool has_antifield = false;    // a partner symbol af(name) exists
    bool dynamical = true;         // fock: mode participates in contractions
};

struct VarInfo {
    SymId sym = 0;
    bool antifield = false;          // marked partner variable
    std::vector<int> indices;        // concrete component indices
    std::vector<int> derivs;         // sorted spacetime derivative multiindex
    Grading grading;                 // full grading including antifield shift
};

class JetOverflow : public std::runtime_error {
public:
    explicit JetOverflow(const std::string& m) : std::runtime_error(m) {}
};

/// Append-only registry of symbols and variables plus the ambient
/// configuration (dimension, metric, truncations) threaded through all
/// modules. Values built against one context must not be mixed with another.
class Context {
public:
    Context();

    // ambient configuration
    int dim = 4;
    int jet_order = 3;          // user-facing jet truncation J
    int jet_hard_limit = 12;    // internal cap for prolonged computations
    int hbar_order = 6;         // default hbar truncation N
    std::vector<Rat> metric;    // diagonal entries of eta^{mu mu}, size dim

    void set_dim(int d);

    SymId declare(const SymbolInfo& s);
    std::optional<SymId> find_symbol(const std::string& name) const;
    const SymbolInfo& symbol(SymId s) const { return symbols_.at(s); }
    std::size_t symbol_count() const { return symbols_.size(); }

    /// Interns the variable (symbol component, antifield flag, jet
    /// multiindex). The multiindex is sorted; gradings follow the antifield
    /// grading table when af=true.
    VarId var(SymId s, bool antifield = false, std::vector<int> indices = {},
              std::vector<int> derivs = {});

    VarId var(const std::string& name, bool antifield = false,
              std::vector<int> indices = {}, std::vector<int> derivs = {});

    /// Reference is invalidated by any interning call; copy before mutating.
    const VarInfo& info(VarId v) const { return vars_.at(v.raw >> 1); }
    std::size_t var_count() const { return vars_.size(); }
    VarId nth_var(std::size_t n) const;

    Grading grading_of(VarId v) const { return info(v).grading; }
    bool is_antifield_var(VarId v) const { return info(v).antifield; }
    bool spacetime_dependent(VarId v) const { return symbol(info(v).sym).spacetime; }
    bool dynamical(VarId v) const {
        const VarInfo& in = info(v);
        return symbol(in.sym).dynamical && !in.antifield;
    }

    /// v with one more derivative in direction mu; errors beyond the hard cap.
    VarId shift_deriv(VarId v, int mu);

    std::string var_str(VarId v) const;

    /// Fresh polarisation parameter (role Parameter), never reused.
    VarId fresh_parameter(int parity, const std::string& hint = "t");

    /// Fresh coordinate with a full grading (for linear coordinate changes).
    VarId fresh_coordinate(const Grading& g, const std::string& hint = "x");

private:
    std::vector<SymbolInfo> symbols_;
    std::map<std::string, SymId> by_name_;
    std::vector<VarInfo> vars_;
    std::map<std::tuple<SymId, bool, std::vector<int>, std::vector<int>>, std::uint32_t> interned_;
    int param_counter_ = 0;
};

} // namespace bvlab
