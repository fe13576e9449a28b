#pragma once

#include <gmpxx.h>
#include <string>

namespace bvlab {

using Rat = mpq_class;

/// Exact coefficient field: Gaussian rationals a + b*i with arbitrary
/// precision rational parts. All identities in the engine are checked with
/// exact arithmetic, so there is no floating point anywhere below this.
class Scalar {
public:
    Scalar() : re_(0), im_(0) {}
    Scalar(long n) : re_(n), im_(0) {}
    Scalar(const Rat& re) : re_(re), im_(0) {}
    Scalar(Rat re, Rat im) : re_(std::move(re)), im_(std::move(im)) {}

    static Scalar i() { return Scalar(Rat(0), Rat(1)); }
    static Scalar ratio(long num, long den) { return Scalar(Rat(num, den)); }

    const Rat& re() const { return re_; }
    const Rat& im() const { return im_; }

    bool is_zero() const { return re_ == 0 && im_ == 0; }
    bool is_real() const { return im_ == 0; }

    Scalar& operator+=(const Scalar& o) { re_ += o.re_; im_ += o.im_; return *this; }
    Scalar& operator-=(const Scalar& o) { re_ -= o.re_; im_ -= o.im_; return *this; }
    Scalar& operator*=(const Scalar& o) {
        Rat re = re_ * o.re_ - im_ * o.im_;
        im_ = re_ * o.im_ + im_ * o.re_;
        re_ = re;
        return *this;
    }
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend Scalar operator-(const Scalar& a) { return Scalar(-a.re_, -a.im_); }
    friend bool operator==(const Scalar& a, const Scalar& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// Canonical text form, parseable by the expression grammar.
    std::string str() const;

private:
    Rat re_, im_;
};

Scalar factorial(unsigned n);
Scalar binomial(unsigned n, unsigned k);

std::string rat_str(const Rat& r);

} // namespace bvlab
