#include "bvlab/scalar.hpp"

#include <stdexcept>

namespace bvlab {

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.is_zero()) throw std::domain_error("Scalar: division by zero");
    Rat norm = o.re_ * o.re_ + o.im_ * o.im_;
    Rat re = (re_ * o.re_ + im_ * o.im_) / norm;
    im_ = (im_ * o.re_ - re_ * o.im_) / norm;
    re_ = re;
    return *this;
}

std::string rat_str(const Rat& r) {
    return r.get_str();
}

std::string Scalar::str() const {
    if (im_ == 0) return rat_str(re_);
    std::string im_part;
    if (im_ == 1) im_part = "i";
    else if (im_ == -1) im_part = "-i";
    else im_part = rat_str(im_) + "*i";
    if (re_ == 0) return im_part;
    std::string s = "(" + rat_str(re_);
    if (im_part[0] != '-') s += "+";
    return s + im_part + ")";
}

Scalar factorial(unsigned n) {
    Rat r(1);
    for (unsigned k = 2; k <= n; ++k) r *= k;
    return Scalar(r);
}

Scalar binomial(unsigned n, unsigned k) {
    if (k > n) return Scalar(0);
    Rat r(1);
    for (unsigned j = 0; j < k; ++j) {
        r *= (n - j);
        r /= (j + 1);
    }
    return Scalar(r);
}

} // namespace bvlab
