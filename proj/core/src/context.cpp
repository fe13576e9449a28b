#include "bvlab/context.hpp"

#include <algorithm>
#include <sstream>

namespace bvlab {

Context::Context() { set_dim(4); }

void Context::set_dim(int d) {
    if (d < 1 || d > 8) throw std::invalid_argument("Context: dimension out of range");
    dim = d;
    metric.assign(d, Rat(-1));
    metric[0] = 1; // mostly-minus diagonal metric
}

SymId Context::declare(const SymbolInfo& s) {
    auto it = by_name_.find(s.name);
    if (it != by_name_.end()) {
        const SymbolInfo& old = symbols_[it->second];
        if (old.role != s.role || !(old.grading == s.grading) ||
            old.index_ranges != s.index_ranges)
            throw std::invalid_argument("Context: conflicting redeclaration of " + s.name);
        return it->second;
    }
    SymId id = static_cast<SymId>(symbols_.size());
    symbols_.push_back(s);
    by_name_.emplace(s.name, id);
    return id;
}

std::optional<SymId> Context::find_symbol(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

VarId Context::var(SymId s, bool antifield, std::vector<int> indices,
                   std::vector<int> derivs) {
    const SymbolInfo& sym = symbols_.at(s);
    if (indices.size() != sym.index_ranges.size())
        throw std::invalid_argument("Context: index arity mismatch for " + sym.name);
    for (std::size_t k = 0; k < indices.size(); ++k)
        if (indices[k] < 0 || indices[k] >= sym.index_ranges[k])
            throw std::invalid_argument("Context: index out of range for " + sym.name);
    if (antifield && !sym.has_antifield)
        throw std::invalid_argument("Context: " + sym.name + " has no antifield partner");
    if (!derivs.empty() && !sym.spacetime)
        throw std::invalid_argument("Context: " + sym.name + " carries no jet structure");
    std::sort(derivs.begin(), derivs.end());
    for (int mu : derivs)
        if (mu < 0 || mu >= dim) throw std::invalid_argument("Context: bad derivative direction");
    if (static_cast<int>(derivs.size()) > jet_hard_limit)
        throw JetOverflow("jet order beyond hard limit for " + sym.name);

    auto key = std::make_tuple(s, antifield, indices, derivs);
    auto it = interned_.find(key);
    if (it != interned_.end()) {
        VarId v;
        v.raw = (it->second << 1) | static_cast<std::uint32_t>(vars_[it->second].grading.parity);
        return v;
    }
    VarInfo in;
    in.sym = s;
    in.antifield = antifield;
    in.indices = std::move(indices);
    in.derivs = std::move(derivs);
    in.grading = sym.grading;
    if (antifield) {
        in.grading.parity = (sym.grading.parity + 1) & 1;
        in.grading.ghost = -1 - sym.grading.ghost;
        in.grading.antifield = 1;
    }
    std::uint32_t serial = static_cast<std::uint32_t>(vars_.size());
    vars_.push_back(in);
    interned_.emplace(std::move(key), serial);
    VarId v;
    v.raw = (serial << 1) | static_cast<std::uint32_t>(in.grading.parity);
    return v;
}

VarId Context::var(const std::string& name, bool antifield, std::vector<int> indices,
                   std::vector<int> derivs) {
    auto s = find_symbol(name);
    if (!s) throw std::invalid_argument("Context: unknown symbol " + name);
    return var(*s, antifield, std::move(indices), std::move(derivs));
}

VarId Context::nth_var(std::size_t n) const {
    VarId v;
    v.raw = (static_cast<std::uint32_t>(n) << 1) |
            static_cast<std::uint32_t>(vars_.at(n).grading.parity);
    return v;
}

VarId Context::shift_deriv(VarId v, int mu) {
    const VarInfo in = info(v);
    if (!symbol(in.sym).spacetime)
        throw std::invalid_argument("Context: cannot differentiate constant symbol");
    std::vector<int> d = in.derivs;
    d.push_back(mu);
    return var(in.sym, in.antifield, in.indices, std::move(d));
}

std::string Context::var_str(VarId v) const {
    const VarInfo& in = info(v);
    const SymbolInfo& sym = symbol(in.sym);
    std::ostringstream os;
    std::string base = sym.name;
    if (in.antifield) base = "af(" + base + ")";
    if (!in.indices.empty()) {
        base += "[";
        for (std::size_t k = 0; k < in.indices.size(); ++k) {
            if (k) base += ",";
            base += std::to_string(in.indices[k]);
        }
        base += "]";
    }
    if (in.derivs.empty()) {
        os << base;
    } else {
        os << "d(" << base;
        for (int mu : in.derivs) os << "," << mu;
        os << ")";
    }
    return os.str();
}

VarId Context::fresh_parameter(int parity, const std::string& hint) {
    return fresh_coordinate({parity & 1, 0, 0}, hint);
}

VarId Context::fresh_coordinate(const Grading& g, const std::string& hint) {
    SymbolInfo s;
    s.name = "__" + hint + std::to_string(param_counter_++);
    s.role = Role::Parameter;
    s.grading = g;
    s.spacetime = false;
    s.has_antifield = false;
    s.dynamical = false;
    return var(declare(s));
}

} // namespace bvlab
