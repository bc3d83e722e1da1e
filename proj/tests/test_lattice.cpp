#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "harmlat/errors.hpp"
#include "harmlat/lattice.hpp"
#include "oracles.hpp"

using namespace harmlat;
using oracle::max_abs;

namespace {

constexpr double pi = std::numbers::pi;

double E(const CouplingStencil& s, double phi) { return std::sqrt(spectral_value_squared(s, {phi})); }

}  // namespace

TEST_SUITE("lattice_model") {

TEST_CASE("Klein-Gordon stencil") {
    auto s = klein_gordon(0.5);
    CHECK(s.Q.coefficient({0}) == 1);
    CHECK(s.Q.coefficient({1}) == -0.25);
    CHECK(s.Q.coefficient({-1}) == -0.25);
    CHECK(s.P.coefficient({0}) == 1);
    CHECK(s.QP.empty());
    for (double phi : {0.0, 0.7, 2.0, pi}) {
        CHECK(E(klein_gordon(0), phi) == doctest::Approx(1).epsilon(1e-14));
        CHECK(E(s, phi) == doctest::Approx(std::sqrt(1 - 0.5 * std::cos(phi))).epsilon(1e-14));
        CHECK(evaluate_symbol(klein_gordon(0.3), Block::Q, {phi}).real() == doctest::Approx(1 - 0.3 * std::cos(phi)));
    }
    auto g = gap(klein_gordon(1));
    CHECK(g.gap < 1e-7);
    CHECK(std::abs(g.phi[0]) < 1e-6);
    CHECK(g.critical());
    CHECK_THROWS_AS(klein_gordon(1.5), OutOfRange);
}

TEST_CASE("power-law stencils and their critical on-site values") {
    auto neg = power_law(3, -0.5);
    CHECK(std::abs(evaluate_symbol(neg, Block::Q, {0.0}).real()) < 1e-10);
    auto pos = power_law(3, 0.5);
    CHECK(std::abs(evaluate_symbol(pos, Block::Q, {pi}).real()) < 1e-10);
    CHECK(neg.Q.tail->onSite == doctest::Approx(2 * 0.5 * 1.2020569031595942));
    CHECK(pos.Q.tail->onSite == doctest::Approx(1.5 * 0.5 * 1.2020569031595942));
    auto gapped = power_law(4, 0.5, 1, 5.0);
    CHECK(gap(gapped).gap > 1);
    CHECK(!gap(gapped).critical());
    CHECK_THROWS_AS(power_law(1, 0.5), NonSummable);
    CHECK_THROWS_AS(power_law(2, 0.5, 2), NonSummable);
    // truncated symbol against the polylog identity sum cos(n phi)/n^3 at phi = pi/2:
    // Re Li_3(i) = -3/32 zeta(3)
    auto pl = power_law(3, 1, 1, 0.0);
    CHECK(evaluate_symbol(pl, Block::Q, {pi / 2}).real() == doctest::Approx(2 * (-3.0 / 32) * 1.2020569031595942).epsilon(1e-10));
    CHECK(symbol_tail_bound(pl) <= 1e-11);
}

TEST_CASE("Fourier symbols") {
    CouplingStencil onsite;
    onsite.Q.entries[{0}] = 2.5;
    onsite.P.entries[{0}] = 1;
    auto fs = fourier_symbol(onsite, Block::Q, 16);
    for (auto v : fs.values) CHECK(v.real() == doctest::Approx(2.5));
    auto kg = fourier_symbol(klein_gordon(0.8), Block::Q, 32);
    for (int r = 0; r < 32; ++r) CHECK(kg.values[r].real() == doctest::Approx(1 - 0.8 * std::cos(2 * pi * r / 32)).epsilon(1e-14));
    // Fourier convention: a single offset +1 coefficient gives e^{-i phi}
    CouplingStencil one;
    one.QP.entries[{1}] = 1;
    Complex v = evaluate_symbol(one, Block::QP, {0.3});
    CHECK(v.real() == doctest::Approx(std::cos(0.3)));
    CHECK(v.imag() == doctest::Approx(-std::sin(0.3)));
}

TEST_CASE("circulant eigenvalues equal the symbol on the ring") {
    std::mt19937_64 rng(8);
    for (int d : {1, 2}) {
        for (int N : d == 1 ? std::vector<int>{5, 16, 64} : std::vector<int>{4, 8}) {
            auto s = oracle::random_gapped_stencil(d, rng, false);
            for (Block b : {Block::Q, Block::P, Block::QP}) {
                Eigen::MatrixXd m = circulant_block(s, b, N);
                Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
                auto fs = fourier_symbol(s, b, N);
                std::vector<double> sym;
                for (auto c : fs.values) sym.push_back(c.real());
                std::sort(sym.begin(), sym.end());
                for (std::size_t i = 0; i < sym.size(); ++i) CHECK(std::abs(sym[i] - ev(static_cast<Eigen::Index>(i))) < 1e-12);
            }
        }
    }
}

TEST_CASE("spectral function and gap") {
    auto g = gap(klein_gordon(0.75));
    CHECK(g.gap == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(g.phi[0]) < 1e-6);
    CouplingStencil id;
    id.Q.entries[{0}] = id.P.entries[{0}] = 1;
    CHECK(gap(id).gap == doctest::Approx(1));

    auto sf = spectral_function(klein_gordon(0.5), SpectralOptions{256});
    for (std::size_t r = 0; r < sf.values.size(); ++r) {
        double phi = 2 * pi * static_cast<double>(r) / 256;
        CHECK(sf.values[r] >= 0);
        CHECK(sf.values[r] * sf.values[r] == doctest::Approx(1 - 0.5 * std::cos(phi)).epsilon(1e-12));
    }
    CHECK(!sf.critical());

    auto crit = spectral_function(power_law(3, -0.5));
    REQUIRE(crit.critical());
    const auto& cp = crit.criticalPoints.front();
    CHECK(std::abs(cp.phi[0]) < 1e-3);
    CHECK(cp.order == 2);
    CHECK(cp.logCorrection);

    auto kg1 = spectral_function(klein_gordon(1));
    REQUIRE(kg1.critical());
    CHECK(kg1.criticalPoints.front().order == 2);
    CHECK(!kg1.criticalPoints.front().logCorrection);
}

TEST_CASE("negative symbols are invalid Hamiltonians") {
    CouplingStencil s;
    s.Q.entries[{0}] = 1;
    s.Q.entries[{1}] = s.Q.entries[{-1}] = -1;
    s.P.entries[{0}] = 1;
    CHECK_THROWS_AS(gap(s), NegativeSymbol);
    CHECK_THROWS_AS(ground_state_tinv(s, offsets_on_axis(1, 0, 3), Limit::thermodynamic()), NegativeSymbol);
}

TEST_CASE("point symmetrization") {
    auto kg = klein_gordon(0.4);
    auto same = point_symmetrize(kg);
    CHECK(same.Q.entries == kg.Q.entries);
    CHECK(same.P.entries == kg.P.entries);
    CouplingStencil s = kg;
    s.QP.entries[{1}] = 0.2;
    auto sym = point_symmetrize(s);
    CHECK(sym.QP.coefficient({1}) == doctest::Approx(0.1));
    CHECK(sym.QP.coefficient({-1}) == doctest::Approx(0.1));
    CHECK(sym.Q.entries == s.Q.entries);

    // dense oracle: H and its symmetrization share the ground state
    std::mt19937_64 rng(21);
    auto r = oracle::random_gapped_stencil(1, rng, true);
    auto a = ground_state(dense_hamiltonian(r, 8));
    auto b = ground_state(dense_hamiltonian(point_symmetrize(r), 8));
    CHECK(max_abs(a.cm.gamma - b.cm.gamma) < 1e-10);
}

TEST_CASE("critical Klein-Gordon closed form") {
    for (double k : {1.0, -1.0}) {
        auto st = ground_state_tinv(klein_gordon(k), offsets_on_axis(1, 1, 50), Limit::thermodynamic());
        CHECK(st.qDivergent);
        CHECK(st.gammaQ.empty());
        double err = 0;
        for (int n = 1; n <= 50; ++n) err = std::max(err, std::abs(st.gammaP[n - 1] - oracle::kg_critical_gammaP(k, n)));
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("decoupled chain has delta correlations") {
    auto st = ground_state_tinv(klein_gordon(0), offsets_on_axis(1, 0, 5), Limit::thermodynamic());
    for (int n = 0; n <= 5; ++n) {
        CHECK(st.gammaQ[n] == doctest::Approx(n == 0 ? 1 : 0));
        CHECK(st.gammaP[n] == doctest::Approx(n == 0 ? 1 : 0));
    }
}

TEST_CASE("finite ring matches the dense oracle") {
    auto s = klein_gordon(0.5);
    int N = 16;
    auto dense = ground_state(dense_hamiltonian(s, N));
    auto offs = offsets_on_axis(1, -8, 8);
    auto st = ground_state_tinv(s, offs, Limit::ring(N));
    double err = 0;
    for (std::size_t i = 0; i < offs.size(); ++i) {
        auto k = oracle::site(offs[i], N);
        err = std::max({err, std::abs(dense.cm.gamma(k, 0) - st.gammaQ[i]), std::abs(dense.cm.gamma(N + k, N) - st.gammaP[i]),
                        std::abs(dense.cm.gamma(k, N) - st.gammaQP[i])});
    }
    CHECK(err <= 1e-10);
    CHECK(st.energyPerSite == doctest::Approx(dense.E0 / N).epsilon(1e-12));
    // translation invariance of the dense oracle itself
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) CHECK(std::abs(dense.cm.gamma(a, b) - dense.cm.gamma((a + 3) % N, (b + 3) % N)) < 1e-10);
}

TEST_CASE("finite rings converge to the thermodynamic limit") {
    std::mt19937_64 rng(4);
    auto s = oracle::random_gapped_stencil(1, rng, false);
    s.Q.entries[{0}] -= 1.6;  // smaller gap, slower decay
    auto offs = offsets_on_axis(1, 0, 3);
    auto thermo = ground_state_tinv(s, offs, Limit::thermodynamic());
    double last = 1e300;
    for (int N : {8, 16, 32}) {
        auto st = ground_state_tinv(s, offs, Limit::ring(N));
        double diff = 0;
        for (std::size_t i = 0; i < offs.size(); ++i)
            diff = std::max({diff, std::abs(st.gammaQ[i] - thermo.gammaQ[i]), std::abs(st.gammaP[i] - thermo.gammaP[i])});
        CHECK(diff < last);
        last = diff;
    }
    CHECK(last < 1e-6);
}

TEST_CASE("pure outputs are point symmetric") {
    std::mt19937_64 rng(30);
    auto s = oracle::random_gapped_stencil(1, rng, true);
    auto offs = offsets_on_axis(1, -6, 6);
    auto st = ground_state_tinv(s, offs, Limit::thermodynamic());
    for (std::size_t i = 0; i < offs.size(); ++i) CHECK(std::abs(st.gammaQP[i] - st.gammaQP[offs.size() - 1 - i]) < 1e-10);
    // energy per site is half the mean of E
    double mean = 0;
    int G = 4096;
    for (int r = 0; r < G; ++r) mean += E(s, 2 * pi * r / G);
    CHECK(st.energyPerSite == doctest::Approx(mean / G / 2).epsilon(1e-10));
}

TEST_CASE("2D ring matches the dense oracle") {
    std::mt19937_64 rng(12);
    auto s = oracle::random_gapped_stencil(2, rng, true);
    int N = 6;
    auto dense = ground_state(dense_hamiltonian(s, N));
    auto offs = offsets_in_box(2, 3);
    auto st = ground_state_tinv(s, offs, Limit::ring(N));
    int M = N * N;
    double err = 0;
    for (std::size_t i = 0; i < offs.size(); ++i) {
        auto k = oracle::site(offs[i], N);
        err = std::max({err, std::abs(dense.cm.gamma(k, 0) - st.gammaQ[i]), std::abs(dense.cm.gamma(M + k, M) - st.gammaP[i]),
                        std::abs(dense.cm.gamma(k, M) - st.gammaQP[i])});
    }
    CHECK(err <= 1e-10);
}

TEST_CASE("stencil JSON round trip") {
    CouplingStencil s = klein_gordon(0.3);
    s.QP.entries[{2}] = 0.125;
    auto back = stencil_from_json(to_json(s));
    CHECK(back.Q.entries == s.Q.entries);
    CHECK(back.QP.entries == s.QP.entries);
    auto pl = power_law(3, -0.5);
    auto j = to_json(pl);
    CHECK(j["dimension"] == 1);
    CHECK(j["blocks"]["Q"]["tail"]["alpha"] == 3.0);
    auto back2 = stencil_from_json(j);
    REQUIRE(back2.Q.tail);
    CHECK(back2.Q.tail->onSite == doctest::Approx(pl.Q.tail->onSite));
    CHECK_THROWS_AS(stencil_from_json(nlohmann::json{{"dimension", 5}}), InvalidStencil);
}

}
