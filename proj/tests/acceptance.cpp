// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "harmlat/asymptotics.hpp"
#include "harmlat/correlations.hpp"
#include "harmlat/errors.hpp"
#include "harmlat/gmps.hpp"
#include "harmlat/lattice.hpp"
#include "harmlat/trotter.hpp"
#include "oracles.hpp"

using namespace harmlat;
using oracle::max_abs;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<double> positions(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
    return x;
}

Outcome critical_closed_form() {
    double err = 0;
    for (double k : {1.0, -1.0}) {
        auto st = ground_state_tinv(klein_gordon(k), offsets_on_axis(1, 1, 50), Limit::thermodynamic());
        for (int n = 1; n <= 50; ++n) err = std::max(err, std::abs(st.gammaP[n - 1] - oracle::kg_critical_gammaP(k, n)));
    }
    return {err <= 1e-8, fmt("max |gammaP - closed form| = %.2e (tol 1e-8)", err)};
}

Outcome correlation_length_pipelines() {
    bool ok = true;
    std::string d;
    for (double k : {0.3, 0.5, 0.9}) {
        double exact = oracle::kg_xi(k);
        auto zeros = correlation_length_from_zeros(klein_gordon(k));
        auto seq = correlation_sequence(klein_gordon(k), CorrelationBlock::Einv, offsets_on_axis(1, 0, 60), Limit::thermodynamic());
        FitOptions o;
        o.power = false;
        o.nMin = 3;
        auto fit = fit_decay(positions(seq.values.size()), seq.values, o);
        double rel = std::abs(fit.best.xi / exact - 1);
        bool good = rel <= 0.02 && zeros.classification == "exp_over_sqrt_n";
        ok = ok && good;
        d += fmt("k=%.1f fit xi %.5f vs %.5f (rel %.1e) %s; ", k, fit.best.xi, exact, rel, zeros.classification.c_str());
    }
    return {ok, d + "tol 2%"};
}

Outcome gap_law() {
    double k = 0.995;
    auto pred = gap_law_prediction(klein_gordon(k));
    auto zeros = correlation_length_from_zeros(klein_gordon(k));
    double delta = std::sqrt(1 - k), mstar = 2 * std::sqrt(1 - k) / k;
    double closed = 1 / std::sqrt(delta * mstar);
    double rel = std::abs(pred.xi / zeros.xi - 1);
    double prod = zeros.xi * pred.gap * std::sqrt(2.0);
    bool ok = rel <= 0.05 && std::abs(prod - 1) <= 0.10 && std::abs(pred.xi / closed - 1) <= 1e-6;
    return {ok, fmt("xi_pred %.4f (closed form %.4f) vs zeros %.4f, rel %.2e (tol 5%%); xi*gap*sqrt2 = %.4f (tol 10%%)", pred.xi,
                    closed, zeros.xi, rel, prod)};
}

Outcome log_correction() {
    bool ok = true;
    std::string d;
    for (double c : {-0.5, 0.5}) {
        auto seq = correlation_sequence(power_law(3, c), CorrelationBlock::gammaP, offsets_on_axis(1, 0, 200), Limit::thermodynamic());
        FitOptions o;
        o.exponential = false;
        o.freeBeta = false;
        o.fixedBetas = {2};
        o.nMax = 200;
        o.envelope = c > 0;
        auto fit = fit_decay(positions(seq.values.size()), seq.values, o);
        const FitCandidate* s0 = nullptr;
        const FitCandidate* sh = nullptr;
        for (const auto& cand : fit.candidates) {
            if (cand.s == 0) s0 = &cand;
            if (cand.s == 0.5) sh = &cand;
        }
        double want = c < 0 ? 0.5 : 0.0;
        const FitCandidate* loser = c < 0 ? s0 : sh;
        bool good = fit.best.s == want && fit.best.beta == 2 && !fit.ambiguous && fit.best.residual <= 0.9 * loser->residual &&
                    seq.grid <= (1 << 20);
        ok = ok && good;
        d += fmt("c=%+.1f best %s res %.4f vs %.4f (grid %d); ", c, fit.best.label().c_str(), fit.best.residual, loser->residual, seq.grid);
    }
    return {ok, d + "margin 10%"};
}

Outcome gapped_power_law() {
    bool ok = true;
    std::string d;
    auto s = power_law(3, 0.5, 1, 3.0);
    for (auto b : {CorrelationBlock::gammaQ, CorrelationBlock::gammaP}) {
        auto seq = correlation_sequence(s, b, offsets_on_axis(1, 0, 100), Limit::thermodynamic());
        FitOptions o;
        o.exponential = false;
        o.logExponents = {0};
        o.envelope = true;
        o.nMax = 100;
        auto fit = fit_decay(positions(seq.values.size()), seq.values, o);
        ok = ok && std::abs(fit.best.beta - 3) <= 0.2;
        d += fmt("%s beta %.3f; ", block_function_name(b).c_str(), fit.best.beta);
    }
    return {ok, d + "tol 3.0 +- 0.2"};
}

Outcome critical_2d() {
    CouplingStencil s;
    s.dimension = 2;
    s.Q.entries[{0, 0}] = 4;
    for (auto o : std::vector<Offset>{{1, 0}, {-1, 0}, {0, 1}, {0, -1}}) s.Q.entries[o] = -1;
    s.P.entries[{0, 0}] = 1;
    auto c = correlation_matrix_2d(s, CorrelationBlock::gammaP, 40, 2048);
    std::vector<double> v;
    for (int n = 0; n <= 40; ++n) v.push_back(c.at(n, 0));
    FitOptions o;
    o.exponential = false;
    o.fixedBetas = {2};
    o.nMax = 40;
    auto fit = fit_decay(positions(v.size()), v, o);
    double bestFixed = 1e300;
    for (const auto& cand : fit.candidates)
        if (cand.betaFixed) bestFixed = std::min(bestFixed, cand.residual);
    bool ok = !fit.best.betaFixed && (fit.best.s == 0 || fit.best.s == 1) && fit.best.beta >= 2.7 && fit.best.beta <= 3.3 &&
              fit.best.residual <= 0.9 * bestFixed && c.anisotropy <= 0.15;
    return {ok, fmt("best %s res %.4f, best beta=2 alternative res %.4f; anisotropy %.3f (tol 0.15)", fit.best.label().c_str(),
                    fit.best.residual, bestFixed, c.anisotropy)};
}

double fft_vs_dense(const CouplingStencil& s, int N) {
    auto dense = ground_state(dense_hamiltonian(s, N));
    auto offs = offsets_in_box(s.dimension, N / 2);
    auto st = ground_state_tinv(s, offs, Limit::ring(N));
    Eigen::Index M = dense.cm.gamma.rows() / 2;
    double err = 0;
    for (std::size_t i = 0; i < offs.size(); ++i) {
        auto k = oracle::site(offs[i], N);
        err = std::max({err, std::abs(dense.cm.gamma(k, 0) - st.gammaQ[i]), std::abs(dense.cm.gamma(M + k, M) - st.gammaP[i]),
                        std::abs(dense.cm.gamma(k, M) - st.gammaQP[i])});
    }
    return err;
}

Outcome oracle_equivalence() {
    std::mt19937_64 rng(2024);
    double e1 = 0, e2 = 0;
    for (int i = 0; i < 100; ++i) e1 = std::max(e1, fft_vs_dense(oracle::random_gapped_stencil(1, rng, i % 2 == 0), 16));
    for (int i = 0; i < 20; ++i) e2 = std::max(e2, fft_vs_dense(oracle::random_gapped_stencil(2, rng, i % 2 == 0), 8));
    return {std::max(e1, e2) <= 1e-10, fmt("1D N=16 x100 max %.2e, 2D N=8 x20 max %.2e (tol 1e-10)", e1, e2)};
}

Outcome symplectic_suite() {
    std::mt19937_64 rng(99);
    double symp = 0, nf = 0, en = 0, pur = 0;
    for (int i = 0; i < 200; ++i) {
        int n = 1 + i % 8;
        auto h = oracle::random_psd(n, rng);
        auto w = williamson(h);
        auto sigma = symplectic_form<double>(n);
        symp = std::max(symp, max_abs(w.S * sigma * w.S.transpose() - sigma));
        Eigen::MatrixXd sinv = w.S.inverse();
        nf = std::max(nf, max_abs(sinv * w.normal_form() * sinv.transpose() - h.matrix()));
        auto gs = ground_state(h);
        en = std::max(en, std::abs(energy(gs.cm.gamma, h) - w.eps.sum() / 2));
        pur = std::max(pur, validate_cm(gs.cm.gamma).purityResidual);
    }
    bool ok = symp <= 1e-10 && en <= 1e-9 && pur <= 1e-8;
    return {ok, fmt("S sigma S^T %.2e (1e-10), tr[gamma H]/4 - E0 %.2e (1e-9), purity %.2e (1e-8); normal form reconstruction %.2e", symp,
                    en, pur, nf)};
}

Outcome gmps_suite() {
    auto ch = random_channel(1, 1, 7);
    int N = 6;
    Eigen::MatrixXd ring = build_gmps_ring(ch, N);
    double four = 0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            int n = ((a - b) % N + N) % N;
            Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
            for (int r = 0; r < N; ++r) acc += gmps_fourier(ch, 2 * pi * r / N) * std::polar(1.0, 2 * pi * r * n / N);
            acc /= N;
            Eigen::Matrix2d blk;
            blk << ring(a, b), ring(a, N + b), ring(N + a, b), ring(N + a, N + b);
            four = std::max(four, (acc - blk.cast<Complex>()).cwiseAbs().maxCoeff());
        }
    double purity = validate_cm<double>(ring).purityResidual;
    auto rep = gmps_to_rational_report(ch);
    const auto& st = rep.state;
    auto q = rational_correlations(st, RationalElement::q, 30);
    auto r = rational_correlations(st, RationalElement::r, 30);
    auto p = rational_correlations(st, RationalElement::p, 30);
    int G = 4096;
    double residue = 0;
    for (int n = 0; n <= 30; ++n) {
        Eigen::Matrix2d acc = Eigen::Matrix2d::Zero();
        for (int k = 0; k < G; ++k) acc += gmps_fourier(ch, 2 * pi * k / G).real() * std::cos(2 * pi * k * n / G) / G;
        residue = std::max({residue, std::abs(q.values[n] - acc(0, 0)), std::abs(r.values[n] - acc(0, 1)), std::abs(p.values[n] - acc(1, 1))});
    }
    auto parent = parent_hamiltonian(st);
    auto gs = ground_state_tinv(parent, offsets_on_axis(1, 0, 30), Limit::thermodynamic());
    double round = 0;
    for (int n = 0; n <= 30; ++n)
        round = std::max({round, std::abs(gs.gammaQ[n] - q.values[n]), std::abs(gs.gammaP[n] - p.values[n]), std::abs(gs.gammaQP[n] - r.values[n])});
    bool ok = four <= 1e-8 && purity <= 1e-7 && rep.purityResidual <= 1e-7 && residue <= 1e-8 && round <= 1e-8;
    return {ok, fmt("ring vs Fourier %.2e (1e-8), ring purity %.2e (1e-7), pq-r^2-d^2 %.2e (1e-7), residue vs FFT %.2e (1e-8), "
                    "parent round trip %.2e (1e-8)",
                    four, purity, rep.purityResidual, residue, round)};
}

Outcome trotter_suite() {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd(0, 0.5);
    auto rnd = [&](int N, bool sym) {
        Generator g = Generator::zero(N);
        for (int k = 0; k <= N / 2; ++k) {
            double a = nd(rng), b = nd(rng), c = nd(rng);
            g.P(k) = g.P((N - k) % N) = a;
            g.Q(k) = g.Q((N - k) % N) = b;
            g.C(k) = c;
            g.C((N - k) % N) = sym ? c : nd(rng);
        }
        return g;
    };
    double rmin = 1e300, rmax = 0;
    for (int i = 0; i < 20; ++i) {
        int N = 2 + i % 7;
        auto x = rnd(N, true), y = rnd(N, true);
        double e1 = trotter_product({{x, 1}, {y, 1}}, 1, 64).error, e2 = trotter_product({{x, 1}, {y, 1}}, 1, 128).error;
        rmin = std::min(rmin, e1 / e2);
        rmax = std::max(rmax, e1 / e2);
    }
    double comm = 0;
    for (int i = 0; i < 20; ++i) {
        int N = 2 + i % 11;
        auto a = rnd(N, false), b = rnd(N, false);
        Eigen::MatrixXd A = a.assemble(), B = b.assemble();
        comm = std::max(comm, max_abs(commutator_blocks(a, b).assemble() - (A * B - B * A)));
    }
    CouplingStencil good;
    good.Q.entries[{0}] = 2;
    good.P.entries[{0}] = 2;
    good.QP.entries[{1}] = good.QP.entries[{-1}] = 0.3;
    auto seq = compile_simulation(generator_from_hamiltonian(klein_gordon(0.5), 4), generator_from_hamiltonian(good, 4), 0.5);
    double err = verify_gate_sequence(seq);
    bool ok = rmin >= 1.8 && rmax <= 2.2 && comm <= 1e-12 && err <= 1e-3;
    return {ok, fmt("step-doubling ratio in [%.3f, %.3f] ([1.8, 2.2]), commutator blocks %.2e (1e-12), KG N=4 compile error %.2e "
                    "with %zu gates x %ld steps (1e-3)",
                    rmin, rmax, comm, err, seq.gates.size(), seq.repetitions)};
}

}  // namespace

int main() {
    std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"critical Klein-Gordon closed form", critical_closed_form},
        {"correlation length, two pipelines", correlation_length_pipelines},
        {"gap law near criticality", gap_law},
        {"1/n^3 log correction", log_correction},
        {"gapped power-law tail", gapped_power_law},
        {"2D critical scaling", critical_2d},
        {"FFT vs dense Williamson", oracle_equivalence},
        {"symplectic property suite", symplectic_suite},
        {"GMPS suite", gmps_suite},
        {"Trotter suite", trotter_suite},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
