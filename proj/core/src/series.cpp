#include "bvlab/series.hpp"

#include <algorithm>
#include <sstream>

namespace bvlab {

void HbarSeries::normalize() {
    while (!coeffs_.empty() && coeffs_.front().is_zero()) {
        coeffs_.erase(coeffs_.begin());
        ++lo_;
    }
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    if (coeffs_.empty()) lo_ = 0;
}

void HbarSeries::set(int k, Polynomial p) {
    if (k > trunc_) return;
    if (coeffs_.empty()) {
        if (p.is_zero()) return;
        lo_ = k;
        coeffs_.push_back(std::move(p));
        return;
    }
    if (k < lo_) {
        coeffs_.insert(coeffs_.begin(), lo_ - k, Polynomial{});
        lo_ = k;
    } else if (k >= lo_ + static_cast<int>(coeffs_.size())) {
        coeffs_.resize(k - lo_ + 1);
    }
    coeffs_[k - lo_] = std::move(p);
    normalize();
}

HbarSeries HbarSeries::truncated(int n) const {
    HbarSeries r;
    r.trunc_ = std::min(trunc_, n);
    for (int k = 0; k < static_cast<int>(coeffs_.size()); ++k) {
        if (lo_ + k > n) break;
        if (!coeffs_[k].is_zero()) r.set(lo_ + k, coeffs_[k]);
    }
    return r;
}

HbarSeries HbarSeries::shifted(int k) const {
    HbarSeries r;
    r.trunc_ = trunc_;
    for (int j = 0; j < static_cast<int>(coeffs_.size()); ++j)
        if (lo_ + j + k <= r.trunc_ && !coeffs_[j].is_zero())
            r.set(lo_ + j + k, coeffs_[j]);
    return r;
}

HbarSeries& HbarSeries::operator+=(const HbarSeries& o) {
    trunc_ = std::min(trunc_, o.trunc_);
    for (int j = 0; j < static_cast<int>(o.coeffs_.size()); ++j) {
        int k = o.lo_ + j;
        if (k > trunc_) break;
        if (o.coeffs_[j].is_zero()) continue;
        Polynomial sum = at(k) + o.coeffs_[j];
        set(k, std::move(sum));
    }
    // re-truncate in case our own tail exceeds the new truncation
    while (!coeffs_.empty() && lo_ + static_cast<int>(coeffs_.size()) - 1 > trunc_)
        coeffs_.pop_back();
    normalize();
    return *this;
}

HbarSeries& HbarSeries::operator-=(const HbarSeries& o) { return *this += o * Scalar(-1); }

HbarSeries operator*(const HbarSeries& a, const Scalar& c) {
    HbarSeries r;
    r.trunc_ = a.trunc_;
    if (c.is_zero()) return r;
    r.lo_ = a.lo_;
    for (auto& p : a.coeffs_) r.coeffs_.push_back(p * c);
    r.normalize();
    return r;
}

HbarSeries operator*(const HbarSeries& a, const HbarSeries& b) {
    HbarSeries r;
    r.trunc_ = std::min(a.trunc_, b.trunc_);
    for (int i = 0; i < static_cast<int>(a.coeffs_.size()); ++i) {
        if (a.coeffs_[i].is_zero()) continue;
        for (int j = 0; j < static_cast<int>(b.coeffs_.size()); ++j) {
            int k = a.lo_ + i + b.lo_ + j;
            if (k > r.trunc_) continue;
            if (b.coeffs_[j].is_zero()) continue;
            Polynomial prod = mul(a.coeffs_[i], b.coeffs_[j]);
            if (prod.is_zero()) continue;
            r.set(k, r.at(k) + prod);
        }
    }
    return r;
}

HbarSeries ihbar_times(const HbarSeries& s) { return (s * Scalar::i()).shifted(1); }
HbarSeries over_ihbar(const HbarSeries& s) { return (s * (Scalar(1) / Scalar::i())).shifted(-1); }

std::string HbarSeries::str(const Context& ctx) const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int j = 0; j < static_cast<int>(coeffs_.size()); ++j) {
        if (coeffs_[j].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        int k = lo_ + j;
        if (k != 0) os << "hbar^" << k << "*";
        os << "(" << coeffs_[j].str(ctx) << ")";
    }
    return os.str();
}

} // namespace bvlab
