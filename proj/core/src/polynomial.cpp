#include "bvlab/polynomial.hpp"

#include <algorithm>
#include <sstream>

namespace bvlab {

bool Monomial::contains(VarId v) const {
    for (auto& [w, e] : factors)
        if (w == v) return true;
    return false;
}

int Monomial::exponent(VarId v) const {
    for (auto& [w, e] : factors)
        if (w == v) return e;
    return 0;
}

int merge_monomials(const Monomial& a, const Monomial& b, Monomial& out) {
    out.factors.clear();
    out.factors.reserve(a.factors.size() + b.factors.size());
    // suffix count of odd factors of a from position i onward
    std::size_t i = 0, j = 0;
    int sign = 0; // parity of transpositions
    int odd_remaining = 0;
    for (auto& [v, e] : a.factors)
        if (v.odd()) ++odd_remaining;
    while (i < a.factors.size() || j < b.factors.size()) {
        bool take_b;
        if (i == a.factors.size()) take_b = true;
        else if (j == b.factors.size()) take_b = false;
        else if (a.factors[i].first == b.factors[j].first) {
            VarId v = a.factors[i].first;
            if (v.odd()) return 0; // odd square
            out.factors.emplace_back(v, a.factors[i].second + b.factors[j].second);
            ++i; ++j;
            continue;
        } else take_b = b.factors[j].first < a.factors[i].first;
        if (take_b) {
            if (b.factors[j].first.odd()) sign ^= (odd_remaining & 1);
            out.factors.push_back(b.factors[j]);
            ++j;
        } else {
            if (a.factors[i].first.odd()) --odd_remaining;
            out.factors.push_back(a.factors[i]);
            ++i;
        }
    }
    return sign ? -1 : 1;
}

void Polynomial::add_term(const Monomial& m, const Scalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

Polynomial operator*(const Polynomial& a, const Scalar& c) {
    Polynomial r;
    if (c.is_zero()) return r;
    for (auto& [m, k] : a.terms_) r.terms_.emplace(m, k * c);
    return r;
}

Polynomial mul(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    Monomial prod;
    for (auto& [ma, ca] : a.terms_) {
        for (auto& [mb, cb] : b.terms_) {
            int sign = merge_monomials(ma, mb, prod);
            if (sign == 0) continue;
            Scalar c = ca * cb;
            if (sign < 0) c = -c;
            r.add_term(prod, c);
        }
    }
    return r;
}

Polynomial Polynomial::pow(int n) const {
    Polynomial r{Scalar(1)};
    for (int k = 0; k < n; ++k) r = mul(r, *this);
    return r;
}

std::optional<int> Polynomial::parity() const {
    std::optional<int> p;
    for (auto& [m, c] : terms_) {
        int mp = m.parity();
        if (!p) p = mp;
        else if (*p != mp) return std::nullopt;
    }
    return p ? p : std::optional<int>(0);
}

int Polynomial::parity_or_throw() const {
    auto p = parity();
    if (!p) throw MixedGrading("polynomial has mixed Grassmann parity");
    return *p;
}

std::optional<Grading> Polynomial::grading(const Context& ctx) const {
    std::optional<Grading> g;
    for (auto& [m, c] : terms_) {
        Grading mg;
        for (auto& [v, e] : m.factors) {
            const Grading vg = ctx.grading_of(v);
            mg.parity = (mg.parity + vg.parity * e) & 1;
            mg.ghost += vg.ghost * e;
            mg.antifield += vg.antifield * e;
        }
        if (!g) g = mg;
        else if (!(*g == mg)) return std::nullopt;
    }
    return g ? g : std::optional<Grading>(Grading{});
}

std::pair<Polynomial, Polynomial> Polynomial::split_parity() const {
    Polynomial even, odd;
    for (auto& [m, c] : terms_)
        (m.parity() ? odd : even).add_term(m, c);
    return {even, odd};
}

int Polynomial::max_degree() const {
    int d = 0;
    for (auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
}

std::set<VarId> Polynomial::variables() const {
    std::set<VarId> vs;
    for (auto& [m, c] : terms_)
        for (auto& [v, e] : m.factors) vs.insert(v);
    return vs;
}

bool Polynomial::depends_on(VarId v) const {
    for (auto& [m, c] : terms_)
        if (m.contains(v)) return true;
    return false;
}

Polynomial Polynomial::deriv_left(VarId v) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        int prefix_odd = 0;
        for (std::size_t i = 0; i < m.factors.size(); ++i) {
            auto [w, e] = m.factors[i];
            if (w == v) {
                Monomial red = m;
                if (e == 1) red.factors.erase(red.factors.begin() + i);
                else red.factors[i].second = e - 1;
                Scalar k = c * Scalar(Rat(e));
                if (v.odd() && (prefix_odd & 1)) k = -k;
                r.add_term(red, k);
                break;
            }
            if (w.odd()) prefix_odd ^= (e & 1);
        }
    }
    return r;
}

Polynomial Polynomial::deriv_right(VarId v) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        for (std::size_t i = 0; i < m.factors.size(); ++i) {
            auto [w, e] = m.factors[i];
            if (w == v) {
                int suffix_odd = 0;
                for (std::size_t j = i + 1; j < m.factors.size(); ++j)
                    if (m.factors[j].first.odd()) suffix_odd ^= (m.factors[j].second & 1);
                Monomial red = m;
                if (e == 1) red.factors.erase(red.factors.begin() + i);
                else red.factors[i].second = e - 1;
                Scalar k = c * Scalar(Rat(e));
                if (v.odd() && (suffix_odd & 1)) k = -k;
                r.add_term(red, k);
                break;
            }
        }
    }
    return r;
}

Polynomial Polynomial::substitute(const std::map<VarId, Polynomial>& images) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        Polynomial t{c};
        for (auto& [v, e] : m.factors) {
            auto it = images.find(v);
            if (it == images.end()) {
                t = mul(t, Polynomial::variable(v).pow(e));
            } else {
                if (it->second.parity().value_or(v.parity()) != v.parity() &&
                    !it->second.is_zero())
                    throw MixedGrading("substitute: image parity differs from variable");
                t = mul(t, it->second.pow(e));
            }
            if (t.is_zero()) break;
        }
        r += t;
    }
    return r;
}

Polynomial Polynomial::left_coefficient(const Monomial& pattern) const {
    std::set<VarId> pvars;
    for (auto& [v, e] : pattern.factors) pvars.insert(v);
    Polynomial r;
    for (auto& [m, c] : terms_) {
        Monomial ppart, rest;
        int sign = 0;      // parity of moving pattern factors to the front
        int rest_odd = 0;  // odd factors of `rest` seen so far
        for (auto& [v, e] : m.factors) {
            if (pvars.count(v)) {
                if (v.odd() && (e & 1)) sign ^= rest_odd;
                ppart.factors.emplace_back(v, e);
            } else {
                rest.factors.emplace_back(v, e);
                if (v.odd()) rest_odd ^= (e & 1);
            }
        }
        if (!(ppart == pattern)) continue;
        Scalar k = c;
        if (sign & 1) k = -k;
        r.add_term(rest, k);
    }
    return r;
}

Polynomial Polynomial::without(const std::set<VarId>& vars) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        bool hit = false;
        for (auto& [v, e] : m.factors)
            if (vars.count(v)) { hit = true; break; }
        if (!hit) r.add_term(m, c);
    }
    return r;
}

Polynomial Polynomial::degree_part_in(const std::set<VarId>& vars, int deg) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        int d = 0;
        for (auto& [v, e] : m.factors)
            if (vars.count(v)) d += e;
        if (d == deg) r.add_term(m, c);
    }
    return r;
}

Polynomial Polynomial::antifield_part(const Context& ctx, int level) const {
    Polynomial r;
    for (auto& [m, c] : terms_) {
        int a = 0;
        for (auto& [v, e] : m.factors) a += ctx.grading_of(v).antifield * e;
        if (a == level) r.add_term(m, c);
    }
    return r;
}

int Polynomial::max_antifield_number(const Context& ctx) const {
    int amax = 0;
    for (auto& [m, c] : terms_) {
        int a = 0;
        for (auto& [v, e] : m.factors) a += ctx.grading_of(v).antifield * e;
        amax = std::max(amax, a);
    }
    return amax;
}

std::string Polynomial::str(const Context& ctx) const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [m, c] : terms_) {
        std::string cs = c.str();
        bool neg = false;
        if (cs.size() > 1 && cs[0] == '-' && cs.find('(') == std::string::npos) {
            neg = true;
            cs = cs.substr(1);
        } else if (c == Scalar(-1)) {
            neg = true;
            cs = "1";
        }
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        bool unit_coeff = (cs == "1") && !m.is_unit();
        if (!unit_coeff) os << cs;
        bool lead = unit_coeff;
        for (auto& [v, e] : m.factors) {
            if (!lead || !unit_coeff) os << "*";
            lead = false;
            os << ctx.var_str(v);
            if (e > 1) os << "^" << e;
        }
    }
    return os.str();
}

} // namespace bvlab
