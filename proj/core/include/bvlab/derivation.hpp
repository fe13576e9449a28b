#pragma once

#include "bvlab/polynomial.hpp"
#include "bvlab/series.hpp"

#include <functional>

namespace bvlab {

/// Graded derivation X of definite parity given by left-multiplied images
/// X(v), extended to monomials by the graded Leibniz rule:
/// X(x1...xn) = sum_i (-1)^{eps_X * (eps_{x1}+...+eps_{x_{i-1}})}
///              x1...x_{i-1} X(x_i) x_{i+1}...xn.
class GradedDerivation {
public:
    explicit GradedDerivation(int parity) : parity_(parity & 1) {}

    int parity() const { return parity_; }
    void set_image(VarId v, Polynomial img) {
        if (img.is_zero()) images_.erase(v);
        else images_[v] = std::move(img);
    }
    const std::map<VarId, Polynomial>& images() const { return images_; }
    Polynomial image(VarId v) const {
        auto it = images_.find(v);
        return it == images_.end() ? Polynomial{} : it->second;
    }

    Polynomial apply(const Polynomial& p) const;
    HbarSeries apply(const HbarSeries& s) const {
        return s.map([this](const Polynomial& p) { return apply(p); });
    }

private:
    int parity_;
    std::map<VarId, Polynomial> images_;
};

/// Linear operator on polynomials with a Grassmann parity tag; the lingua
/// franca of the homotopy recursions.
struct LinOp {
    int parity = 0;
    std::function<Polynomial(const Polynomial&)> f;

    Polynomial operator()(const Polynomial& p) const { return f(p); }
    static LinOp zero() {
        return {0, [](const Polynomial&) { return Polynomial{}; }};
    }
    static LinOp from(const GradedDerivation& d) {
        return {d.parity(), [d](const Polynomial& p) { return d.apply(p); }};
    }
};

LinOp compose(const LinOp& a, const LinOp& b);      // a after b
LinOp anticommutator(const LinOp& a, const LinOp& b); // a b + b a
LinOp add(const LinOp& a, const LinOp& b);
LinOp scale(const Scalar& c, const LinOp& a);

} // namespace bvlab
