#pragma once

// Translationally invariant Hamiltonians on Z_N^d built from coupling stencils.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "harmlat/fft.hpp"
#include "harmlat/stencil.hpp"
#include "harmlat/symplectic.hpp"

namespace harmlat {

CouplingStencil klein_gordon(double kappa);
// Q block V_n = c/|n|^alpha; P block identity. Without on_site the critical
// value is used (critical at phi = 0 for c < 0, at phi = pi for c > 0).
CouplingStencil power_law(double alpha, double c, int dimension = 1, std::optional<double> on_site = {});
double critical_on_site(double alpha, double c, int dimension);

// QP coefficients averaged over n <-> -n.
CouplingStencil point_symmetrize(const CouplingStencil& s);

struct FourierSymbol {
    int dimension = 1;
    int grid = 0;
    std::vector<Complex> values;  // at phi = 2 pi r / grid, first axis slowest
    double tailBound = 0;
};

// Samples M-hat(phi) = sum_n M_n e^{-i n phi}; coefficients are folded mod grid,
// which is exactly the circulant spectrum for a ring of `grid` sites.
FourierSymbol fourier_symbol(const CouplingStencil& s, Block b, int grid);
// Direct summation at one point.
Complex evaluate_symbol(const CouplingStencil& s, Block b, const std::vector<double>& phi);

// Real symbols of the point-symmetrized Hamiltonian on a grid.
struct SymbolGrid {
    int dimension = 1;
    int grid = 0;
    std::vector<double> Q, P, QP;
    double tailBound = 0;
    double e2(std::size_t i) const { return Q[i] * P[i] - QP[i] * QP[i]; }
};
SymbolGrid sample_symbols(const CouplingStencil& s, int grid);

double symbol_tail_bound(const CouplingStencil& s);
// E(phi)^2 = H_Q H_P - H_QP^2 of the symmetrized symbol, at one point.
double spectral_value_squared(const CouplingStencil& s, const std::vector<double>& phi);

struct CriticalPoint {
    std::vector<double> phi;
    int order = 0;          // nearest even order of E^2 at the zero
    double slope = 0;       // fitted d log E^2 / d log|phi - zeta|
    double residual = 0;    // rms of the log-log fit
    bool logCorrection = false;
};

struct GapResult {
    double gap = 0;
    std::vector<double> phi;
    double tailBound = 0;  // truncation bound of the symbols
    // E <= tol, or E^2 below the resolution left by truncated tails
    bool critical(double tol = 1e-7) const { return gap <= tol || gap * gap <= 100 * tailBound; }
};

struct SpectralFunction {
    int dimension = 1;
    int grid = 0;
    std::vector<double> values;  // E(phi) on the grid
    GapResult gap;
    std::vector<CriticalPoint> criticalPoints;
    bool critical() const { return !criticalPoints.empty(); }
};

struct SpectralOptions {
    int grid = 0;            // 0: 2^12 in 1D, capped by G^d <= 2^22
    double criticalTol = 1e-7;
};

int default_scan_grid(int dimension);
SpectralFunction spectral_function(const CouplingStencil& s, const SpectralOptions& opt = {});
GapResult gap(const CouplingStencil& s, const SpectralOptions& opt = {});
// All local minima of E on the scan grid, refined, ascending by value.
std::vector<GapResult> local_minima(const CouplingStencil& s, const SpectralOptions& opt = {});

// Quadrature / finite-ring selection shared by all lattice transforms.
struct Limit {
    int N = 0;                 // > 0: ring Z_N^d; 0: thermodynamic limit
    int startGrid = 0;          // thermodynamic: 0 -> 2^12 (1D), 256 (2D), 64 (3D)
    int maxGrid = 0;            // 0 -> 2^20 (1D), G^d <= 2^22 otherwise
    double tol = 0;             // 0 -> 1e-10 gapped, 1e-8 critical
    bool fixedGrid = false;     // use startGrid only

    static Limit ring(int n) { Limit l; l.N = n; return l; }
    static Limit thermodynamic() { return {}; }
    static Limit grid(int g) { Limit l; l.startGrid = g; l.fixedGrid = true; return l; }
};

// f(H_Q, H_P, H_QP) of the symmetrized symbol; numerator() is used to decide
// divergence at critical points (nullptr: never divergent).
struct SymbolFunction {
    std::string name;
    std::function<double(double q, double p, double qp)> f;
    std::function<double(double q, double p, double qp)> numerator;
};

// Ground-state block functions: gamma_Q = H_P/E, gamma_P = H_Q/E,
// gamma_QP = -H_QP/E, and E^{-1}, E.
enum class CorrelationBlock { gammaQ, gammaP, gammaQP, Einv, E };
SymbolFunction block_function(CorrelationBlock b);
std::string block_function_name(CorrelationBlock b);
CorrelationBlock parse_correlation_block(const std::string& name);

struct TransformResult {
    std::vector<std::vector<double>> values;  // one per function, per offset
    int grid = 0;
    bool converged = true;
    double lastChange = 0;
    double meanE = 0;  // grid mean of E at the final grid
    std::vector<bool> divergent;  // per function; values left empty
    std::vector<std::string> warnings;
};

// [f(M)]_n = (1/G^d) sum_r e^{2 pi i n.r/G} f(M-hat(2 pi r/G)) for every f.
// Divergent functions throw DivergentBlock unless allow_divergent is set.
TransformResult symbol_transform(const CouplingStencil& s, const std::vector<SymbolFunction>& fs,
                                 const std::vector<Offset>& offsets, const Limit& limit);
TransformResult symbol_transform(const CouplingStencil& s, const std::vector<SymbolFunction>& fs,
                                 const std::vector<Offset>& offsets, const Limit& limit, bool allow_divergent);
// Full transformed array at a fixed grid (used by the 2D correlation matrix).
std::vector<double> symbol_transform_array(const CouplingStencil& s, const SymbolFunction& f, int grid,
                                           double* meanE = nullptr);

struct TinvGroundState {
    std::vector<Offset> offsets;
    std::vector<double> gammaQ, gammaP, gammaQP;
    bool qDivergent = false;  // gammaQ left empty
    double energyPerSite = 0;  // E0 / N^d = 1/2 mean E
    int grid = 0;
    bool converged = true;
    std::vector<std::string> warnings;
};

TinvGroundState ground_state_tinv(const CouplingStencil& s, const std::vector<Offset>& offsets, const Limit& limit);

// Offsets with |n|_inf <= radius, lexicographic.
std::vector<Offset> offsets_in_box(int dimension, int radius);
std::vector<Offset> offsets_on_axis(int dimension, int from, int to);

// Dense circulant blocks on Z_N^d (row k, column l holds M_{k-l}).
MatrixX<double> circulant_block(const CouplingStencil& s, Block b, int N);
QuadraticHamiltonian<double> dense_hamiltonian(const CouplingStencil& s, int N);

}  // namespace harmlat
