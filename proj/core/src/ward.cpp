#include "bvlab/ward.hpp"

namespace bvlab {

namespace {

int series_parity(const HbarSeries& s) {
    for (int k = s.lowest_power(); k <= s.highest_power(); ++k) {
        if (s.at(k).is_zero()) continue;
        return s.at(k).parity_or_throw();
    }
    return 0;
}

int dynamical_degree(const ModeSystem& ms, const Polynomial& p) {
    int deg = 0;
    for (auto& [m, c] : p.terms()) {
        int d = 0;
        for (auto& [v, e] : m.factors)
            if (ms.index_of(v) >= 0) d += e;
        deg = std::max(deg, d);
    }
    return deg;
}

} // namespace

InnerDerivation::InnerDerivation(const ModeSystem& ms, HbarSeries Q, int trunc)
    : ms_(&ms), q_(std::move(Q)), trunc_(trunc) {
    parity_ = series_parity(q_);
    for (int k = q_.lowest_power(); k <= q_.highest_power(); ++k)
        if (dynamical_degree(ms, q_.at(k)) > 2)
            throw NonQuadraticQ("inner derivation charge is not quadratic in dynamical modes");
}

HbarSeries InnerDerivation::apply(const HbarSeries& s) const {
    return over_ihbar(star_commutator(*ms_, q_, s, trunc_ == HbarSeries::kExact
                                                       ? HbarSeries::kExact
                                                       : trunc_ + 1));
}

LinearModeDerivation::LinearModeDerivation(const ModeSystem& ms,
                                           std::map<VarId, Polynomial> images, int parity,
                                           int trunc)
    : ms_(&ms), images_(std::move(images)), parity_(parity & 1), trunc_(trunc) {
    std::vector<VarId> all = ms.modes;
    all.insert(all.end(), ms.antifields.begin(), ms.antifields.end());
    for (VarId a : all)
        for (VarId b : all)
            if (!delta_invariance_defect(ms, images_, parity_, a, b).is_zero())
                throw CompatibilityViolation(
                    "generator map does not preserve the commutator kernel");
}

LinearModeDerivation LinearModeDerivation::from_bv_generator(const ModeSystem& ms,
                                                             const Polynomial& q, int trunc) {
    if (!ms.has_antifields())
        throw CompatibilityViolation("bv generator needs antifield partners");
    std::map<VarId, Polynomial> images;
    for (std::size_t k = 0; k < ms.modes.size(); ++k) {
        Polynomial dphi = q.deriv_right(ms.antifields[k]) * Scalar(-1);
        Polynomial daf = q.deriv_right(ms.modes[k]);
        if (!dphi.is_zero()) images[ms.modes[k]] = std::move(dphi);
        if (!daf.is_zero()) images[ms.antifields[k]] = std::move(daf);
    }
    int parity = (q.parity_or_throw() + 1) & 1;
    return LinearModeDerivation(ms, std::move(images), parity, trunc);
}

Polynomial delta_invariance_defect(const ModeSystem& ms,
                                   const std::map<VarId, Polynomial>& images, int parity,
                                   VarId a, VarId b) {
    auto image = [&](VarId v) -> Polynomial {
        auto it = images.find(v);
        return it == images.end() ? Polynomial{} : it->second;
    };
    Polynomial lhs = kernel_pair(ms, image(a), ms.Delta, Polynomial::variable(b));
    Polynomial rhs = kernel_pair(ms, Polynomial::variable(a), ms.Delta, image(b));
    if (parity && a.odd()) rhs = rhs * Scalar(-1);
    return lhs + rhs;
}

HbarSeries LinearModeDerivation::apply_mono(const Monomial& m) const {
    if (m.factors.empty()) return {};
    auto it = cache_.find(m);
    if (it != cache_.end()) return it->second;

    auto [v, e] = m.factors.front();
    Monomial rest = m;
    if (e == 1) rest.factors.erase(rest.factors.begin());
    else rest.factors.front().second = e - 1;

    HbarSeries out;
    // (D v) * :rest:
    auto iv = images_.find(v);
    if (iv != images_.end() && !iv->second.is_zero())
        out += star(*ms_, HbarSeries{iv->second}, HbarSeries{Polynomial::term(Scalar(1), rest)},
                    trunc_);
    // +- v * D(:rest:)
    HbarSeries drest = apply_mono(rest);
    if (!drest.is_zero()) {
        HbarSeries t = star(*ms_, HbarSeries{Polynomial::variable(v)}, drest, trunc_);
        if (parity_ && v.odd()) t = t * Scalar(-1);
        out += t;
    }
    // - i hbar sum_N G+_{vN} D(:dL rest/dPhi_N:)
    int vi = ms_->index_of(v);
    if (vi >= 0) {
        for (std::size_t n = 0; n < ms_->modes.size(); ++n) {
            if (ms_->Gplus[vi][n] == 0) continue;
            Polynomial d = Polynomial::term(Scalar(1), rest).deriv_left(ms_->modes[n]);
            if (d.is_zero()) continue;
            HbarSeries inner;
            for (auto& [mm, cc] : d.terms())
                inner += apply_mono(mm) * cc;
            out -= ihbar_times(inner) * Scalar(ms_->Gplus[vi][n]);
        }
    }
    cache_.emplace(m, out);
    return out;
}

HbarSeries LinearModeDerivation::apply(const HbarSeries& s) const {
    HbarSeries r;
    for (int k = s.lowest_power(); k <= s.highest_power(); ++k) {
        const Polynomial p = s.at(k);
        for (auto& [m, c] : p.terms()) {
            HbarSeries t = apply_mono(m) * c;
            r += t.shifted(k);
        }
    }
    return r;
}

std::vector<HbarSeries> ward_extract(const TimeOrderedFamily& fam, const ModeDerivation& D,
                                     const HbarSeries& F, int max_n) {
    std::vector<HbarSeries> dhat(max_n + 1);
    for (int n = 1; n <= max_n; ++n) {
        std::vector<HbarSeries> args(n, F);
        HbarSeries Nn = D.apply(fam.T(args));
        for (int k = 1; k <= n - 1; ++k) {
            std::vector<HbarSeries> rest(n - k, F);
            rest.insert(rest.begin(), dhat[k]);
            HbarSeries t = fam.T(rest) * binomial(n, k);
            // (hbar/i)^{k-1}
            Scalar pre(1);
            for (int j = 0; j < k - 1; ++j) pre = pre / Scalar::i();
            Nn -= (t * pre).shifted(k - 1);
        }
        // Dhat_n = (i/hbar)^{n-1} T1^{-1}(N_n)
        Scalar pre(1);
        for (int j = 0; j < n - 1; ++j) pre *= Scalar::i();
        HbarSeries dn = fam.T1_inverse((Nn * pre).shifted(-(n - 1)));
        dn.require_power_series("ward_extract Dhat_" + std::to_string(n));
        dhat[n] = std::move(dn);
    }
    return dhat;
}

HbarSeries ward_reassemble(const TimeOrderedFamily& fam,
                           const std::vector<HbarSeries>& dhat, const HbarSeries& F, int n) {
    HbarSeries rhs;
    for (int k = 1; k <= n; ++k) {
        std::vector<HbarSeries> rest(n - k, F);
        rest.insert(rest.begin(), dhat[k]);
        HbarSeries t = fam.T(rest) * binomial(n, k);
        Scalar pre(1);
        for (int j = 0; j < k - 1; ++j) pre = pre / Scalar::i();
        rhs += (t * pre).shifted(k - 1);
    }
    return rhs;
}

HbarSeries dhat_multi(Context& ctx, const TimeOrderedFamily& fam, const ModeDerivation& D,
                      const std::vector<HbarSeries>& args, const Polynomial& F, int k,
                      const Polynomial& L, int m) {
    int n = static_cast<int>(args.size()) + k + m;
    if (n == 0) return {};
    HbarSeries G{F};
    Monomial pattern;
    std::vector<VarId> thetas;
    for (auto& a : args) {
        VarId th = ctx.fresh_parameter(series_parity(a), "pol");
        thetas.push_back(th);
        G += HbarSeries{Polynomial::variable(th)} * Scalar(1) * a;
    }
    VarId beta{};
    if (m > 0) {
        beta = ctx.fresh_parameter(0, "polL");
        G += HbarSeries{mul(Polynomial::variable(beta), L)};
    }
    for (VarId th : thetas) pattern.factors.emplace_back(th, 1);
    if (m > 0) pattern.factors.emplace_back(beta, m);
    std::sort(pattern.factors.begin(), pattern.factors.end(),
              [](auto& x, auto& y) { return x.first < y.first; });

    std::vector<HbarSeries> dh = ward_extract(fam, D, G, n);
    HbarSeries coeff = dh[n].map([&](const Polynomial& p) { return p.left_coefficient(pattern); });

    // divide by the multinomial n!/(1!...1!*m!*k!)
    Scalar norm = factorial(n) / (factorial(m) * factorial(k));
    return coeff * (Scalar(1) / norm);
}

HbarSeries anomaly_part(const HbarSeries& X,
                        const std::function<HbarSeries(const Polynomial&)>& eval) {
    HbarSeries r;
    for (int j = X.lowest_power(); j <= X.highest_power(); ++j) {
        Polynomial xj = X.at(j);
        if (xj.is_zero()) continue;
        HbarSeries e = eval(xj);
        e -= HbarSeries{e.classical()};
        r += e.shifted(j);
    }
    return r;
}

PaReport pa_check(const TimeOrderedFamily& fam, const HbarSeries& F, int max_n) {
    const ModeSystem& ms = fam.modes();
    PaReport rep;
    for (int n = 1; n <= max_n && rep.pass; ++n) {
        std::vector<HbarSeries> fs(n, F);
        HbarSeries Tn = fam.T(fs);
        for (std::size_t kk = 0; kk < ms.modes.size() && rep.pass; ++kk) {
            HbarSeries phi{Polynomial::variable(ms.modes[kk])};
            // advanced version: T(F^{n} (x) Phi_K)
            std::vector<HbarSeries> argsA(n, F);
            argsA.push_back(phi);
            HbarSeries lhsA = fam.T(argsA);
            HbarSeries rhsA = star(ms, Tn, phi, fam.truncation());
            // retarded version: T(Phi_K (x) F^{n})
            std::vector<HbarSeries> argsR(1, phi);
            argsR.insert(argsR.end(), n, F);
            HbarSeries lhsR = fam.T(argsR);
            HbarSeries rhsR = star(ms, phi, Tn, fam.truncation());
            for (std::size_t l = 0; l < ms.modes.size(); ++l) {
                HbarSeries dF = F.map(
                    [&](const Polynomial& p) { return p.deriv_right(ms.modes[l]); });
                if (dF.is_zero()) continue;
                std::vector<HbarSeries> rest(n - 1, F);
                rest.push_back(dF);
                HbarSeries t = fam.T(rest) * Scalar(Rat(n));
                if (ms.Gadv[l][kk] != 0)
                    rhsA += ihbar_times(t) * Scalar(ms.Gadv[l][kk]);
                if (ms.Gret[l][kk] != 0)
                    rhsR += ihbar_times(t) * Scalar(ms.Gret[l][kk]);
            }
            if (!(lhsA == rhsA)) {
                rep.pass = false;
                rep.detail = "advanced identity fails at n=" + std::to_string(n);
            }
            if (rep.pass && !(lhsR == rhsR)) {
                rep.pass = false;
                rep.detail = "retarded identity fails at n=" + std::to_string(n);
            }
        }
    }
    return rep;
}

FreeBrstReport free_brst_ward(Context& ctx, const ModeSystem& ms,
                              const TimeOrderedFamily& fam, const Polynomial& F,
                              const Polynomial& S02) {
    (void)ctx;
    FreeBrstReport rep;
    if (!ms.P || !ms.has_antifields())
        throw CompatibilityViolation("free_brst_ward needs P and antifield partners");

    Polynomial S00 = ms.S0_quadratic(ctx);
    try {
        auto kt = LinearModeDerivation::from_bv_generator(ms, S00, fam.truncation());
        auto dh = ward_extract(fam, kt, HbarSeries{F}, 2);
        Polynomial d2 = dh[2].classical();
        rep.kt_d2_is_antibracket = (d2 == mode_antibracket(ctx, ms, F, F));
        if (!rep.kt_d2_is_antibracket) rep.detail += "KT layer D2 mismatch; ";

        if (ms.Q) {
            Polynomial S01 = ms.S0_antifield_linear(ctx);
            auto s00 = LinearModeDerivation::from_bv_generator(ms, S01, fam.truncation());
            auto dh0 = ward_extract(fam, s00, HbarSeries{F}, 2);
            rep.s00_d2_vanishes = dh0[2].classical().is_zero();
            if (!rep.s00_d2_vanishes) rep.detail += "s0^(0) layer D2 nonzero; ";
        } else {
            rep.s00_d2_vanishes = true;
        }
        if (!S02.is_zero()) {
            auto s01 = LinearModeDerivation::from_bv_generator(ms, S02, fam.truncation());
            auto dh1 = ward_extract(fam, s01, HbarSeries{F}, 2);
            rep.s01_d2_vanishes = dh1[2].classical().is_zero();
            if (!rep.s01_d2_vanishes) rep.detail += "s0^(1) layer D2 nonzero; ";
        }
        rep.compatible = true;
    } catch (const CompatibilityViolation& e) {
        rep.compatible = false;
        rep.detail += e.what();
        throw;
    }
    return rep;
}

} // namespace bvlab
