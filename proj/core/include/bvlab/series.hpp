#pragma once

#include "bvlab/polynomial.hpp"

namespace bvlab {

class NegativeHbarDetected : public std::runtime_error {
public:
    explicit NegativeHbarDetected(const std::string& m) : std::runtime_error(m) {}
};

/// Formal series in hbar with Polynomial coefficients, truncated above at
/// `trunc`. Intermediate generating-functional computations may carry
/// negative powers (the factors (i/hbar)^n of the expansions); every
/// spec-facing result is required to be a genuine power series via
/// require_power_series().
class HbarSeries {
public:
    static constexpr int kExact = 1 << 20;

    HbarSeries() : lo_(0), trunc_(kExact) {}
    explicit HbarSeries(Polynomial p, int trunc = kExact) : lo_(0), trunc_(trunc) {
        if (!p.is_zero()) coeffs_.push_back(std::move(p));
    }
    static HbarSeries hbar_power(Polynomial p, int k, int trunc = kExact) {
        HbarSeries s;
        s.trunc_ = trunc;
        if (!p.is_zero() && k <= trunc) {
            s.lo_ = k;
            s.coeffs_.push_back(std::move(p));
        }
        return s;
    }

    int truncation() const { return trunc_; }
    bool is_zero() const { return coeffs_.empty(); }

    /// Lowest power with a nonzero coefficient (0 for the zero series).
    int lowest_power() const { return coeffs_.empty() ? 0 : lo_; }
    int highest_power() const {
        return coeffs_.empty() ? 0 : lo_ + static_cast<int>(coeffs_.size()) - 1;
    }

    Polynomial at(int k) const {
        if (k < lo_ || k >= lo_ + static_cast<int>(coeffs_.size())) return {};
        return coeffs_[k - lo_];
    }
    Polynomial classical() const { return at(0); }
    bool is_classical() const { return coeffs_.empty() || (lo_ == 0 && coeffs_.size() == 1); }

    void require_power_series(const std::string& what) const {
        if (!coeffs_.empty() && lo_ < 0)
            throw NegativeHbarDetected(what + ": negative hbar power " +
                                       std::to_string(lo_));
    }

    HbarSeries truncated(int n) const;
    HbarSeries shifted(int k) const; // multiply by hbar^k
    HbarSeries& operator+=(const HbarSeries& o);
    HbarSeries& operator-=(const HbarSeries& o);
    friend HbarSeries operator+(HbarSeries a, const HbarSeries& b) { return a += b; }
    friend HbarSeries operator-(HbarSeries a, const HbarSeries& b) { return a -= b; }
    friend HbarSeries operator-(const HbarSeries& a) { return a * Scalar(-1); }
    friend HbarSeries operator*(const HbarSeries& a, const Scalar& c);
    friend HbarSeries operator*(const Scalar& c, const HbarSeries& a) { return a * c; }
    friend HbarSeries operator*(const HbarSeries& a, const HbarSeries& b);
    friend bool operator==(const HbarSeries& a, const HbarSeries& b) {
        if (a.coeffs_.empty() && b.coeffs_.empty()) return true;
        return a.lo_ == b.lo_ && a.coeffs_ == b.coeffs_;
    }

    /// Applies a Polynomial -> Polynomial map coefficient-wise.
    template <typename F>
    HbarSeries map(F&& f) const {
        HbarSeries r;
        r.trunc_ = trunc_;
        for (int k = 0; k < static_cast<int>(coeffs_.size()); ++k) {
            Polynomial p = f(coeffs_[k]);
            if (!p.is_zero()) r.set(lo_ + k, std::move(p));
        }
        return r;
    }

    void set(int k, Polynomial p);

    std::string str(const Context& ctx) const;

private:
    void normalize();
    int lo_;
    std::vector<Polynomial> coeffs_;
    int trunc_;
};

/// i*hbar and its inverse as series factors.
HbarSeries ihbar_times(const HbarSeries& s);
HbarSeries over_ihbar(const HbarSeries& s);

} // namespace bvlab
