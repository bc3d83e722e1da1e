#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary. Nothing here goes through the FFT or symbol code paths.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "harmlat/fft.hpp"
#include "harmlat/lattice.hpp"
#include "harmlat/symplectic.hpp"

namespace oracle {

using harmlat::CouplingStencil;
using harmlat::Offset;

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

// H = A^T A + shift, split into blocks.
inline harmlat::QuadraticHamiltonian<double> random_psd(int modes, std::mt19937_64& rng, double shift = 0.1) {
    std::normal_distribution<double> nd(0, 1);
    Eigen::MatrixXd a(2 * modes, 2 * modes);
    for (int i = 0; i < a.size(); ++i) a.data()[i] = nd(rng);
    Eigen::MatrixXd h = a.transpose() * a + shift * Eigen::MatrixXd::Identity(2 * modes, 2 * modes);
    return harmlat::QuadraticHamiltonian<double>::from_matrix(h);
}

// Gapped stencil with range-2 couplings; QP optionally not point symmetric.
// Diagonal dominance keeps H_Q >= 2, H_P >= 1.5 and |H_QP| <= 0.6.
inline CouplingStencil random_gapped_stencil(int dimension, std::mt19937_64& rng, bool asymmetricQP = true) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    CouplingStencil s;
    s.dimension = dimension;
    int range = dimension == 1 ? 2 : 1;
    std::vector<Offset> half;
    for (const auto& n : harmlat::offsets_in_box(dimension, range)) {
        bool zero = true, positive = false;
        for (int v : n) {
            if (v != 0 && zero) positive = v > 0;
            if (v != 0) zero = false;
        }
        if (!zero && positive) half.push_back(n);
    }
    double sq = 0, sp = 0, sqp = 0;
    for (const auto& n : half) {
        Offset m = n;
        for (int& v : m) v = -v;
        double q = u(rng), p = u(rng) * 0.6, x = u(rng) * 0.2;
        s.Q.entries[n] = s.Q.entries[m] = q;
        s.P.entries[n] = s.P.entries[m] = p;
        s.QP.entries[n] = x;
        s.QP.entries[m] = asymmetricQP ? u(rng) * 0.2 : x;
        sq += 2 * std::abs(q);
        sp += 2 * std::abs(p);
        sqp += std::abs(x) + std::abs(s.QP.entries[m]);
    }
    Offset o(static_cast<std::size_t>(dimension), 0);
    s.Q.entries[o] = 2 + sq;
    s.P.entries[o] = 1.5 + sp;
    s.QP.entries[o] = u(rng) * 0.4 * (0.6 - std::min(0.6, sqp)) / 0.6;
    return s;
}

// Critical Klein-Gordon oracle: (gamma_P)_n = -(2 sqrt2 / pi) sgn(kappa)^n / (4 n^2 - 1).
inline double kg_critical_gammaP(double kappa, int n) {
    double sg = (kappa > 0 || n % 2 == 0) ? 1.0 : -1.0;
    return -(2 * std::numbers::sqrt2 / std::numbers::pi) * sg / (4.0 * n * n - 1);
}

// Closed-form Klein-Gordon correlation length -1/log|(1 - sqrt(1-k^2))/k|.
inline double kg_xi(double kappa) {
    double k = std::abs(kappa);
    return -1 / std::log((1 - std::sqrt(1 - k * k)) / k);
}

// f(M) for a dense real symmetric matrix via its eigendecomposition.
template <class F>
Eigen::MatrixXd matrix_function(const Eigen::MatrixXd& m, F f) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd v = es.eigenvalues().unaryExpr(f);
    return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().transpose();
}

// Trapezoid rule for (1/2pi) int f(phi) cos(n phi) on a fine grid.
template <class F>
double cosine_coefficient(F f, int n, int grid = 1 << 14) {
    double acc = 0;
    for (int r = 0; r < grid; ++r) {
        double phi = 2 * std::numbers::pi * r / grid;
        acc += f(phi) * std::cos(n * phi);
    }
    return acc / grid;
}

// Index of offset n (mod N) among the N^d sites of a dense circulant.
inline Eigen::Index site(const Offset& n, int N) { return static_cast<Eigen::Index>(harmlat::grid_index(n, N)); }

}  // namespace oracle
