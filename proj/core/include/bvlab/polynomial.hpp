#pragma once

#include "bvlab/context.hpp"
#include "bvlab/scalar.hpp"

#include <map>
#include <optional>
#include <set>
#include <vector>

namespace bvlab {

class MixedGrading : public std::runtime_error {
public:
    explicit MixedGrading(const std::string& m) : std::runtime_error(m) {}
};

/// Sorted factor list (variable, exponent). Odd variables appear with
/// exponent one; squares of odd variables vanish at construction.
struct Monomial {
    std::vector<std::pair<VarId, int>> factors;

    int degree() const {
        int d = 0;
        for (auto& [v, e] : factors) d += e;
        return d;
    }
    int parity() const {
        int p = 0;
        for (auto& [v, e] : factors)
            if (v.odd()) p ^= (e & 1);
        return p;
    }
    bool is_unit() const { return factors.empty(); }
    bool contains(VarId v) const;
    int exponent(VarId v) const;

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.factors == b.factors;
    }
    // degree-lexicographic order
    friend bool operator<(const Monomial& a, const Monomial& b) {
        int da = a.degree(), db = b.degree();
        if (da != db) return da < db;
        return a.factors < b.factors;
    }
};

/// Multiplies two canonical monomials; returns the sign (+1/-1) or 0 when an
/// odd variable squares. The Koszul sign counts transpositions of odd
/// factors during the merge.
int merge_monomials(const Monomial& a, const Monomial& b, Monomial& out);

/// Element of the Grassmann-graded commutative algebra with exact Gaussian
/// rational coefficients. Terms are kept in a canonically ordered map; zero
/// coefficients are never stored.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(const Scalar& c) {
        if (!c.is_zero()) terms_[Monomial{}] = c;
    }
    static Polynomial variable(VarId v) {
        Polynomial p;
        p.terms_[Monomial{{{v, 1}}}] = Scalar(1);
        return p;
    }
    static Polynomial term(const Scalar& c, const Monomial& m) {
        Polynomial p;
        if (!c.is_zero()) p.terms_[m] = c;
        return p;
    }

    bool is_zero() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }
    const std::map<Monomial, Scalar>& terms() const { return terms_; }

    Scalar coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? Scalar(0) : it->second;
    }
    Scalar constant_term() const { return coefficient(Monomial{}); }

    void add_term(const Monomial& m, const Scalar& c);

    Polynomial& operator+=(const Polynomial& o);
    Polynomial& operator-=(const Polynomial& o);
    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(const Polynomial& a) { return a * Scalar(-1); }
    friend Polynomial operator*(const Polynomial& a, const Scalar& c);
    friend Polynomial operator*(const Scalar& c, const Polynomial& a) { return a * c; }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) { return mul(a, b); }
    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.terms_ == b.terms_;
    }

    friend Polynomial mul(const Polynomial& a, const Polynomial& b);
    Polynomial pow(int n) const;

    /// Homogeneous Grassmann parity, or nullopt when mixed.
    std::optional<int> parity() const;
    int parity_or_throw() const;
    /// Common (parity, ghost, antifield) grading, or nullopt when mixed.
    std::optional<Grading> grading(const Context& ctx) const;

    std::pair<Polynomial, Polynomial> split_parity() const; // (even, odd)

    int max_degree() const;
    std::set<VarId> variables() const;
    bool depends_on(VarId v) const;

    /// Graded partial derivatives acting from the left / right.
    Polynomial deriv_left(VarId v) const;
    Polynomial deriv_right(VarId v) const;

    /// Graded algebra morphism: replaces each mapped variable by its image
    /// (which must have the same parity); unmapped variables are kept.
    Polynomial substitute(const std::map<VarId, Polynomial>& images) const;

    /// Keeps the terms whose total degree in `params` equals the pattern
    /// monomial, with the pattern factors moved to the left; returns the
    /// signed cofactor sum. Used for polarisation in generating identities.
    Polynomial left_coefficient(const Monomial& pattern) const;

    /// Drops every term containing one of the given variables.
    Polynomial without(const std::set<VarId>& vars) const;

    /// Part of the polynomial with the given total degree in the given set.
    Polynomial degree_part_in(const std::set<VarId>& vars, int deg) const;

    /// Antifield-number-homogeneous part (sum over factors of af-number).
    Polynomial antifield_part(const Context& ctx, int level) const;
    int max_antifield_number(const Context& ctx) const;

    std::string str(const Context& ctx) const;

private:
    std::map<Monomial, Scalar> terms_;
};

} // namespace bvlab
