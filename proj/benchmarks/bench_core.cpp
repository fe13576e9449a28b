#include <benchmark/benchmark.h>

#include "bvlab/files.hpp"
#include "bvlab/theory.hpp"
#include "bvlab/wick.hpp"

#include <random>

using namespace bvlab;

namespace {

Context make_ctx(int n_even, int n_odd, std::vector<VarId>& vars) {
    static Context ctx; // benchmark fixture scope
    Context fresh;
    std::swap(ctx, fresh);
    for (int k = 0; k < n_even; ++k) {
        SymbolInfo s;
        s.name = "x" + std::to_string(k);
        s.role = Role::Mode;
        s.spacetime = false;
        vars.push_back(ctx.var(ctx.declare(s)));
    }
    for (int k = 0; k < n_odd; ++k) {
        SymbolInfo s;
        s.name = "t" + std::to_string(k);
        s.role = Role::Mode;
        s.grading = {1, 0, 0};
        s.spacetime = false;
        vars.push_back(ctx.var(ctx.declare(s)));
    }
    return std::move(ctx);
}

Polynomial random_poly(std::mt19937_64& rng, const std::vector<VarId>& vars, int terms,
                       int deg) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(vars.size()) - 1);
    std::uniform_int_distribution<long> coef(-9, 9);
    Polynomial p;
    for (int t = 0; t < terms; ++t) {
        Polynomial term{Scalar(Rat(coef(rng)))};
        for (int j = 0; j < deg; ++j) term = mul(term, Polynomial::variable(vars[pick(rng)]));
        p += term;
    }
    return p;
}

void BM_PolyMul(benchmark::State& state) {
    std::vector<VarId> vars;
    Context ctx = make_ctx(6, 4, vars);
    std::mt19937_64 rng(1);
    Polynomial a = random_poly(rng, vars, static_cast<int>(state.range(0)), 4);
    Polynomial b = random_poly(rng, vars, static_cast<int>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(mul(a, b));
}
BENCHMARK(BM_PolyMul)->Arg(8)->Arg(32)->Arg(128);

void BM_StarProduct(benchmark::State& state) {
    std::vector<VarId> vars;
    Context ctx = make_ctx(3, 1, vars);
    ModeSystem ms;
    ms.modes = vars;
    std::size_t n = vars.size();
    ms.Gret.assign(n, std::vector<Rat>(n, Rat(0)));
    ms.W.assign(n, std::vector<Rat>(n, Rat(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (vars[i].parity() != vars[j].parity()) continue;
            if (vars[i].odd()) ms.Gret[i][j] = Rat(1, 1 + static_cast<long>(i + j));
            else if (i == j) ms.Gret[i][j] = Rat(1, 2 + static_cast<long>(i));
            if (i == j && !vars[i].odd()) ms.W[i][j] = Rat(1, 3);
        }
    ms.finalize(ctx);
    std::mt19937_64 rng(2);
    Polynomial a = random_poly(rng, vars, 6, static_cast<int>(state.range(0)));
    Polynomial b = random_poly(rng, vars, 6, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(star(ms, HbarSeries{a}, HbarSeries{b}, 8));
}
BENCHMARK(BM_StarProduct)->Arg(2)->Arg(4)->Arg(6);

void BM_MasterEquationScalar(benchmark::State& state) {
    const char* thy =
        "theory scalar;"
        "dim 2;"
        "index mu: dim;"
        "param m2 = 1;"
        "coupling lam;"
        "field phi: boson;"
        "action S = 1/2*d(phi,mu)*d(phi,mu) - 1/2*m2*phi^2 - lam/24*phi^4;";
    for (auto _ : state) {
        Context ctx;
        ctx.set_dim(2);
        TheoryFile tf = load_theory(ctx, thy);
        benchmark::DoNotOptimize(check_master_equation(ctx, tf.spec));
    }
}
BENCHMARK(BM_MasterEquationScalar);

} // namespace

BENCHMARK_MAIN();
