#pragma once

// Gaussian matrix product states from Jamiolkowski channel states.
//
// A channel state Gamma lives on modes A (bond ports, M), B (bond ports, M)
// and C (outputs), in blocked ordering q_A q_B q_C p_A p_B p_C.

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "harmlat/polynomial.hpp"
#include "harmlat/stencil.hpp"

namespace harmlat {

struct GaussianChannel {
    int bondCount = 1;
    int outputModes = 1;
    Eigen::MatrixXd cm;

    int modes() const { return 2 * bondCount + outputModes; }
    void validate(double purity_tol = 1e-8) const;
};

// Coordinate indices (q's then p's) of `modes` inside a blocked CM of n modes.
std::vector<Eigen::Index> mode_coordinates(const std::vector<int>& modes, int n);
Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows,
                          const std::vector<Eigen::Index>& cols);

// Two-mode squeezed vacuum on modes (0, 1): cosh 2r on the diagonal.
Eigen::MatrixXd two_mode_squeezed(double cosh2r);
Eigen::MatrixXd direct_sum(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);  // blocked CMs

// Random pure CM S S^T with S = exp(sigma X), X symmetric Gaussian of width `scale`.
Eigen::MatrixXd random_pure_cm(int modes, std::uint64_t seed, double scale = 0.4);
GaussianChannel random_channel(int bondCount, int outputModes, std::uint64_t seed, double scale = 0.4);

// gamma_out = Gamma_C - Gamma_CB (Gamma_B + theta gamma_in theta)^{-1} Gamma_BC
// for a state Gamma on (B, C) with B the first `inputModes` modes.
Eigen::MatrixXd channel_apply(const Eigen::MatrixXd& Gamma, int inputModes, const Eigen::MatrixXd& gammaIn);

// Projects modes a[k], b[k] onto EPR pairs; returns the CM of the other modes in order.
Eigen::MatrixXd epr_measure(const Eigen::MatrixXd& gamma, const std::vector<int>& a, const std::vector<int>& b);

// Closed ring of N sites; output modes site-major, blocked.
Eigen::MatrixXd build_gmps_ring(const GaussianChannel& ch, int N);
// Reference implementation: one EPR measurement per bond on the direct sum.
Eigen::MatrixXd build_gmps_ring_sequential(const GaussianChannel& ch, int N);

// gamma-hat(phi) with the convention gamma-hat = sum_n gamma_n e^{-i n phi}.
Eigen::MatrixXcd gmps_fourier(const GaussianChannel& ch, double phi);

struct TrigRationalState {
    RealPoly p, q, r, d;  // in x = cos phi, ascending
    int degree() const;
    // [[q, r], [r, p]] / d at x
    Eigen::Matrix2d evaluate(double x) const;
};

struct RationalFitOptions {
    int maxDegree = -1;       // -1: 2M+1 for GMPS, 8 for sampled functions
    bool fixedDegree = false;  // fit only at maxDegree
    double reconstructionTol = 1e-9;
    double purityTol = 1e-7;
};

struct RationalFitReport {
    TrigRationalState state;
    double reconstructionError = 0;  // max over a dense phi grid, relative
    double purityResidual = 0;       // max |pq - r^2 - d^2| coefficient / max |d^2| coefficient
    double singularGap = 0;          // sigma_min / sigma_next
};

// Fits the smallest degree that reproduces `symbol` (real 2x2 in blocked order).
RationalFitReport rational_from_samples(const std::function<Eigen::Matrix2d(double phi)>& symbol,
                                        const RationalFitOptions& opt = {});
TrigRationalState gmps_to_rational(const GaussianChannel& ch, const RationalFitOptions& opt = {});
RationalFitReport gmps_to_rational_report(const GaussianChannel& ch, const RationalFitOptions& opt = {});

double purity_residual(const TrigRationalState& s);

enum class RationalElement { q, r, p };  // gamma_Q, gamma_QP, gamma_P

struct RationalCorrelations {
    std::vector<double> values;  // n = 0..nMax
    double xi = 0;
    Complex dominantRoot;
};

RationalCorrelations rational_correlations(const TrigRationalState& s, RationalElement e, int nMax);
double rational_correlation(const TrigRationalState& s, RationalElement e, int n);

// H_Q = p(cos phi), H_P = q(cos phi), H_QP = -r(cos phi).
CouplingStencil parent_hamiltonian(const TrigRationalState& s);

nlohmann::json to_json(const GaussianChannel& ch);
GaussianChannel channel_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TrigRationalState& s);
TrigRationalState rational_from_json(const nlohmann::json& j);

}  // namespace harmlat
