#include "harmlat/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "harmlat/errors.hpp"

namespace harmlat {

CorrelationSequence correlation_sequence(const CouplingStencil& s, const SymbolFunction& f,
                                         const std::vector<Offset>& offsets, const Limit& limit) {
    TransformResult r = symbol_transform(s, {f}, offsets, limit);
    CorrelationSequence seq;
    seq.offsets = offsets;
    seq.values = std::move(r.values[0]);
    seq.grid = r.grid;
    seq.converged = r.converged;
    seq.warnings = std::move(r.warnings);
    return seq;
}

CorrelationSequence correlation_sequence(const CouplingStencil& s, CorrelationBlock f, const std::vector<Offset>& offsets,
                                         const Limit& limit) {
    return correlation_sequence(s, block_function(f), offsets, limit);
}

double anisotropy(const Correlation2D& c, double min_radius) {
    // lattice points with a >= b >= 0 sharing a^2 + b^2
    std::map<int, std::vector<double>> shells;
    for (int a = 0; a <= c.radius; ++a)
        for (int b = 0; b <= a; ++b) {
            int r2 = a * a + b * b;
            if (std::sqrt(static_cast<double>(r2)) < min_radius || r2 > c.radius * c.radius) continue;
            shells[r2].push_back(std::abs(c.at(a, b)));
        }
    double worst = 0;
    for (const auto& [r2, v] : shells) {
        if (v.size() < 2) continue;
        auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        double mean = 0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (mean > 0) worst = std::max(worst, (*hi - *lo) / mean);
    }
    return worst;
}

Correlation2D correlation_matrix_2d(const CouplingStencil& s, const SymbolFunction& f, int radius, int grid,
                                    double min_radius) {
    if (s.dimension != 2) throw DimensionMismatch("correlation_matrix_2d needs a two-dimensional stencil");
    if (2 * radius >= grid) throw OutOfRange("radius must be below grid/2");
    // divergence is checked with the same rules as correlation_sequence
    symbol_transform(s, {f}, {Offset{0, 0}}, Limit::grid(std::min(grid, 64)));
    std::vector<double> a = symbol_transform_array(s, f, grid);
    Correlation2D c;
    c.radius = radius;
    c.grid = grid;
    int w = 2 * radius + 1;
    c.values.resize(static_cast<std::size_t>(w * w));
    for (int n1 = -radius; n1 <= radius; ++n1)
        for (int n2 = -radius; n2 <= radius; ++n2)
            c.values[static_cast<std::size_t>((n1 + radius) * w + (n2 + radius))] = a[grid_index(Offset{n1, n2}, grid)];
    c.anisotropy = anisotropy(c, min_radius);
    return c;
}

Correlation2D correlation_matrix_2d(const CouplingStencil& s, CorrelationBlock f, int radius, int grid, double min_radius) {
    return correlation_matrix_2d(s, block_function(f), radius, grid, min_radius);
}

void write_csv(std::ostream& out, const CorrelationSequence& seq) {
    int d = seq.offsets.empty() ? 1 : static_cast<int>(seq.offsets.front().size());
    for (int a = 0; a < d; ++a) out << "n" << (a + 1) << ",";
    out << "value\n";
    out.precision(17);
    for (std::size_t i = 0; i < seq.offsets.size(); ++i) {
        for (int c : seq.offsets[i]) out << c << ",";
        out << seq.values[i] << "\n";
    }
}

}  // namespace harmlat
