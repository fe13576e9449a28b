#include "bvlab/derivation.hpp"

namespace bvlab {

Polynomial GradedDerivation::apply(const Polynomial& p) const {
    Polynomial r;
    for (auto& [m, c] : p.terms()) {
        int prefix_odd = 0;
        for (std::size_t i = 0; i < m.factors.size(); ++i) {
            auto [v, e] = m.factors[i];
            auto it = images_.find(v);
            if (it != images_.end()) {
                // prefix * e * v^{e-1} * X(v) * suffix
                Monomial prefix;
                prefix.factors.assign(m.factors.begin(), m.factors.begin() + i);
                if (e > 1) prefix.factors.emplace_back(v, e - 1);
                Monomial suffix;
                suffix.factors.assign(m.factors.begin() + i + 1, m.factors.end());
                Scalar k = c * Scalar(Rat(e));
                if (parity_ && (prefix_odd & 1)) k = -k;
                Polynomial t = Polynomial::term(k, prefix);
                t = mul(t, it->second);
                t = mul(t, Polynomial::term(Scalar(1), suffix));
                r += t;
            }
            if (v.odd()) prefix_odd ^= (e & 1);
        }
    }
    return r;
}

LinOp compose(const LinOp& a, const LinOp& b) {
    auto fa = a.f, fb = b.f;
    return {(a.parity + b.parity) & 1,
            [fa, fb](const Polynomial& p) { return fa(fb(p)); }};
}

LinOp anticommutator(const LinOp& a, const LinOp& b) {
    auto fa = a.f, fb = b.f;
    return {(a.parity + b.parity) & 1,
            [fa, fb](const Polynomial& p) { return fa(fb(p)) + fb(fa(p)); }};
}

LinOp add(const LinOp& a, const LinOp& b) {
    auto fa = a.f, fb = b.f;
    return {a.parity == b.parity ? a.parity : 0,
            [fa, fb](const Polynomial& p) { return fa(p) + fb(p); }};
}

LinOp scale(const Scalar& c, const LinOp& a) {
    auto fa = a.f;
    return {a.parity, [c, fa](const Polynomial& p) { return fa(p) * c; }};
}

} // namespace bvlab
