#pragma once

// Real-space correlation sequences [f(M)]_n on rings and in the thermodynamic limit.

#include <iosfwd>
#include <string>
#include <vector>

#include "harmlat/lattice.hpp"

namespace harmlat {

struct CorrelationSequence {
    std::vector<Offset> offsets;
    std::vector<double> values;
    int grid = 0;
    bool converged = true;
    std::vector<std::string> warnings;
};

CorrelationSequence correlation_sequence(const CouplingStencil& s, CorrelationBlock f, const std::vector<Offset>& offsets,
                                         const Limit& limit);
CorrelationSequence correlation_sequence(const CouplingStencil& s, const SymbolFunction& f,
                                         const std::vector<Offset>& offsets, const Limit& limit);

struct Correlation2D {
    int radius = 0;
    int grid = 0;
    std::vector<double> values;  // (2R+1)^2 entries, n1 slowest
    double anisotropy = 0;       // max over |n|_2 of (max - min)/mean of |value|
    double at(int n1, int n2) const {
        int w = 2 * radius + 1;
        return values[static_cast<std::size_t>((n1 + radius) * w + (n2 + radius))];
    }
};

// Entries with |n|_inf <= radius from one grid^2 transform; the anisotropy
// diagnostic compares lattice points of equal Euclidean radius >= min_radius.
Correlation2D correlation_matrix_2d(const CouplingStencil& s, const SymbolFunction& f, int radius, int grid = 2048,
                                    double min_radius = 8);
Correlation2D correlation_matrix_2d(const CouplingStencil& s, CorrelationBlock f, int radius, int grid = 2048,
                                    double min_radius = 8);
double anisotropy(const Correlation2D& c, double min_radius);

// CSV with a header: n1[,n2[,n3]],value
void write_csv(std::ostream& out, const CorrelationSequence& seq);

}  // namespace harmlat
