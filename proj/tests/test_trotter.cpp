#include <doctest.h>

#include <random>

#include "harmlat/errors.hpp"
#include "harmlat/lattice.hpp"
#include "harmlat/trotter.hpp"
#include "oracles.hpp"

using namespace harmlat;
using oracle::max_abs;

namespace {

// Random circulant generator; C reflection symmetric unless asked otherwise.
Generator random_generator(int N, std::mt19937_64& rng, bool symmetricC = true) {
    std::normal_distribution<double> nd(0, 0.5);
    Generator g = Generator::zero(N);
    for (int k = 0; k <= N / 2; ++k) {
        double p = nd(rng), q = nd(rng), c = nd(rng);
        g.P(k) = g.P((N - k) % N) = p;
        g.Q(k) = g.Q((N - k) % N) = q;
        g.C(k) = c;
        g.C((N - k) % N) = symmetricC ? c : nd(rng);
    }
    return g;
}

Generator good_interaction(int N) {
    CouplingStencil s;
    s.Q.entries[{0}] = 2;
    s.P.entries[{0}] = 2;
    s.QP.entries[{1}] = s.QP.entries[{-1}] = 0.3;
    return generator_from_hamiltonian(s, N);
}

}  // namespace

TEST_SUITE("trotter_sim") {

TEST_CASE("generators from Hamiltonians") {
    auto id = generator_from_hamiltonian(QuadraticHamiltonian<double>::from_matrix(Eigen::MatrixXd::Identity(8, 8)));
    CHECK(id.P(0) == 1);
    CHECK(id.Q(0) == 1);
    CHECK(id.C.norm() == 0);
    auto kg = generator_from_hamiltonian(klein_gordon(0.6), 5);
    CHECK(kg.Q(0) == doctest::Approx(1));
    CHECK(kg.Q(1) == doctest::Approx(-0.3));
    CHECK(kg.Q(4) == doctest::Approx(-0.3));
    CHECK(kg.P(0) == 1);
    CHECK(kg.P.tail(4).norm() == 0);
    CHECK(kg.C.norm() == 0);
    // A = sigma H and back
    auto h = dense_hamiltonian(klein_gordon(0.6), 5);
    CHECK(max_abs(kg.assemble() - symplectic_form<double>(5) * h.matrix()) < 1e-15);
    auto back = hamiltonian_from_generator(kg);
    CHECK(max_abs(back.matrix() - h.matrix()) < 1e-15);
    Eigen::MatrixXd notCirc = Eigen::MatrixXd::Identity(8, 8);
    notCirc(0, 1) = 0.5;
    CHECK_THROWS_AS(generator_from_matrix(notCirc), NotCirculant);
}

TEST_CASE("commutator blocks equal the dense commutator") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 30; ++trial) {
        int N = 2 + trial % 11;
        auto a = random_generator(N, rng, false), b = random_generator(N, rng, false);
        auto c = commutator_blocks(a, b);
        Eigen::MatrixXd A = a.assemble(), B = b.assemble();
        CHECK(max_abs(c.assemble() - (A * B - B * A)) <= 1e-12);
        CHECK(max_abs(c.C - circulant_transpose(c.C)) <= 1e-12);
    }
    auto a = random_generator(6, rng);
    CHECK(commutator_blocks(a, a).norm() <= 1e-14);
}

TEST_CASE("commutators with local generators") {
    std::mt19937_64 rng(2);
    auto a = random_generator(6, rng);
    // C' = 1/2: P'' = P and Q'' = -Q in this sign convention
    auto c1 = commutator_blocks(a, Generator::local(6, 0, 0, 0.5));
    CHECK(max_abs(c1.P - a.P) < 1e-14);
    CHECK(max_abs(c1.Q + a.Q) < 1e-14);
    CHECK(c1.C.norm() < 1e-14);
    // C = 0 commuted with Q' = 1/2 leaves only C'' = P / 2
    Generator noC = a;
    noC.C.setZero();
    auto c2 = commutator_blocks(noC, Generator::local(6, 0, 0.5, 0));
    CHECK(c2.P.norm() < 1e-14);
    CHECK(c2.Q.norm() < 1e-14);
    CHECK(max_abs(c2.C - 0.5 * a.P) < 1e-14);
}

TEST_CASE("block extraction is exact") {
    std::mt19937_64 rng(3);
    auto a = random_generator(6, rng);
    auto p = extract_block(a, ExtractBlock::P);
    CHECK(max_abs(p.P - a.P) < 1e-12);
    CHECK(p.Q.norm() < 1e-12);
    CHECK(p.C.norm() < 1e-12);
    auto q = extract_block(a, ExtractBlock::Q);
    CHECK(max_abs(q.Q - a.Q) < 1e-12);
    CHECK(q.P.norm() + q.C.norm() < 1e-12);
    auto c = extract_block(a, ExtractBlock::C);
    CHECK(max_abs(c.C - a.C) < 1e-12);
    CHECK(c.P.norm() + c.Q.norm() < 1e-12);
    Generator pure = Generator::zero(6);
    pure.Q = a.Q;
    CHECK(max_abs(extract_block(pure, ExtractBlock::Q).Q - pure.Q) < 1e-12);
}

TEST_CASE("exponentials are symplectic") {
    std::mt19937_64 rng(4);
    for (int N : {3, 6, 8}) {
        auto S = generator_exp(random_generator(N, rng), 0.7);
        auto sigma = symplectic_form<double>(N);
        CHECK(max_abs(S * sigma * S.transpose() - sigma) <= 1e-10);
    }
}

TEST_CASE("Lie-Trotter products") {
    std::mt19937_64 rng(5);
    auto a = random_generator(4, rng);
    // commuting generators: a and a scaled
    auto comm = trotter_product({{a, 1}, {a * 2, -0.7}}, 1, 1);
    CHECK(comm.error <= 1e-12);
    for (int trial = 0; trial < 5; ++trial) {
        int N = 2 + trial;
        auto x = random_generator(N, rng), y = random_generator(N, rng);
        double e1 = trotter_product({{x, 1}, {y, 1}}, 1, 64).error;
        double e2 = trotter_product({{x, 1}, {y, 1}}, 1, 128).error;
        CHECK(e1 / e2 >= 1.8);
        CHECK(e1 / e2 <= 2.2);
    }
    auto x = random_generator(4, rng) * 0.5, y = random_generator(4, rng) * 0.5;
    double prev = commutator_product(x, y, 16).error;
    for (long n : {64L, 256L, 1024L}) {
        double e = commutator_product(x, y, n).error;
        CHECK(e / prev == doctest::Approx(0.5).epsilon(0.15));
        prev = e;
    }
}

TEST_CASE("compile a Klein-Gordon evolution") {
    auto target = generator_from_hamiltonian(klein_gordon(0.5), 4);
    auto seq = compile_simulation(target, good_interaction(4), 0.5);
    CHECK(seq.achievedError <= 1e-3);
    CHECK(verify_gate_sequence(seq) == doctest::Approx(seq.achievedError).epsilon(1e-9));
    Eigen::MatrixXd exact = generator_exp(target, 0.5);
    CHECK(spectral_norm(gate_sequence_matrix(seq) - exact) <= 1e-3);
    // error falls as the step count doubles, within 10% jitter
    REQUIRE(seq.history.size() >= 3);
    for (std::size_t i = 1; i < seq.history.size(); ++i) {
        CHECK(seq.history[i].first == 2 * seq.history[i - 1].first);
        CHECK(seq.history[i].second <= 1.1 * seq.history[i - 1].second);
    }
    for (const auto& g : seq.gates)
        CHECK((g.id == "local_P" || g.id == "local_Q" || g.id == "local_C" || g.id == "interaction"));
    // JSON round trip keeps the product
    auto back = gate_sequence_from_json(to_json(seq));
    CHECK(verify_gate_sequence(back) == doctest::Approx(seq.achievedError).epsilon(1e-9));
}

TEST_CASE("compile trivial and impossible targets") {
    auto inter = good_interaction(4);
    auto self = compile_simulation(inter, inter, 0.5);
    CHECK(self.gates.size() == 1);
    CHECK(self.achievedError <= 1e-12);
    auto target = generator_from_hamiltonian(klein_gordon(0.5), 4);
    CHECK_THROWS_AS(compile_simulation(target, Generator::local(4, 1, 1, 0), 0.5), NotUniversalGateSet);
    Generator skew = inter;
    skew.C(1) += 0.2;
    CHECK_THROWS_AS(compile_simulation(target, skew, 0.5), NotUniversalGateSet);
    CompileOptions tight;
    tight.budget = 1e-9;
    tight.maxSteps = 8;
    CHECK_THROWS_AS(compile_simulation(target, inter, 0.5, tight), BudgetExceeded);
}

TEST_CASE("compile a next-nearest-neighbor coupling from nearest-neighbor gates") {
    auto inter = generator_from_hamiltonian(klein_gordon(0.5), 6);
    Generator target = Generator::zero(6);
    target.Q(2) = target.Q(4) = 0.5;
    CompileOptions o;
    o.maxSteps = 1L << 16;
    auto seq = compile_simulation(target, inter, 0.5, o);
    CHECK(seq.achievedError <= 1e-3);
    CHECK(verify_gate_sequence(seq) <= 1e-3);
    CHECK(seq.repetitions >= 1);
}

}
