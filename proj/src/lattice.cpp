#include "harmlat/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "harmlat/errors.hpp"
#include "harmlat/parallel.hpp"

namespace harmlat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxSamples = std::size_t{1} << 22;

std::size_t grid_size(int dimension, int grid) {
    std::size_t total = 1;
    for (int a = 0; a < dimension; ++a) total *= static_cast<std::size_t>(grid);
    return total;
}

// Visits every n != 0 with |n|_inf <= m.
template <class F>
void for_each_cube_offset(int dimension, long m, F&& f) {
    std::vector<long> n(static_cast<std::size_t>(dimension), -m);
    while (true) {
        bool zero = std::all_of(n.begin(), n.end(), [](long v) { return v == 0; });
        if (!zero) f(n);
        int a = dimension - 1;
        while (a >= 0 && n[static_cast<std::size_t>(a)] == m) n[static_cast<std::size_t>(a--)] = -m;
        if (a < 0) break;
        ++n[static_cast<std::size_t>(a)];
    }
}

// Coefficients folded onto Z_G^d.
std::vector<Complex> fold(const BlockStencil& b, int dimension, int grid, double* tail_bound) {
    std::vector<Complex> a(grid_size(dimension, grid), Complex(0, 0));
    for (const auto& [n, v] : b.entries) a[grid_index(n, grid)] += v;
    if (tail_bound) *tail_bound = 0;
    if (!b.tail) return a;
    const PowerTail& t = *b.tail;
    a[0] += t.onSite;
    TailCutoff cut = tail_cutoff(t, dimension);
    if (tail_bound) *tail_bound = cut.bound;
    if (dimension == 1) {
        for (long n = 1; n <= cut.nmax; ++n) {
            double v = t.c * std::exp(-t.alpha * std::log(static_cast<double>(n)));
            a[static_cast<std::size_t>(n % grid)] += v;
            a[static_cast<std::size_t>((grid - n % grid) % grid)] += v;
        }
        return a;
    }
    for_each_cube_offset(dimension, cut.nmax, [&](const std::vector<long>& n) {
        double r2 = 0;
        for (long v : n) r2 += static_cast<double>(v) * static_cast<double>(v);
        a[grid_index(n, grid)] += t.c * std::pow(r2, -t.alpha / 2);
    });
    return a;
}

// sum_{n=1}^{m} n^{-alpha} cos(n phi), with the rotation re-anchored periodically.
double tail_cosine_sum(double alpha, long m, double phi) {
    double sum = 0;
    Complex z(1, 0), w = std::polar(1.0, phi);
    for (long n = 1; n <= m; ++n) {
        if (n % 512 == 1)
            z = std::polar(1.0, static_cast<double>(n) * phi);
        else
            z *= w;
        sum += std::exp(-alpha * std::log(static_cast<double>(n))) * z.real();
    }
    return sum;
}

Complex evaluate_block(const BlockStencil& b, int dimension, const std::vector<double>& phi) {
    Complex v(0, 0);
    for (const auto& [n, c] : b.entries) {
        double arg = 0;
        for (int a = 0; a < dimension; ++a) arg += n[static_cast<std::size_t>(a)] * phi[static_cast<std::size_t>(a)];
        v += c * std::polar(1.0, -arg);
    }
    if (!b.tail) return v;
    const PowerTail& t = *b.tail;
    v += t.onSite;
    TailCutoff cut = tail_cutoff(t, dimension);
    if (dimension == 1) return v + 2 * t.c * tail_cosine_sum(t.alpha, cut.nmax, phi[0]);
    double s = 0;
    for_each_cube_offset(dimension, cut.nmax, [&](const std::vector<long>& n) {
        double r2 = 0, arg = 0;
        for (int a = 0; a < dimension; ++a) {
            double c = static_cast<double>(n[static_cast<std::size_t>(a)]);
            r2 += c * c;
            arg += c * phi[static_cast<std::size_t>(a)];
        }
        s += std::pow(r2, -t.alpha / 2) * std::cos(arg);
    });
    return v + t.c * s;
}

std::vector<double> grid_phi(std::size_t idx, int dimension, int grid) {
    std::vector<double> phi(static_cast<std::size_t>(dimension));
    for (int a = dimension - 1; a >= 0; --a) {
        phi[static_cast<std::size_t>(a)] = 2 * kPi * static_cast<double>(idx % static_cast<std::size_t>(grid)) / grid;
        idx /= static_cast<std::size_t>(grid);
    }
    return phi;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double r = (std::sqrt(5.0) - 1) / 2;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return (a + b) / 2;
}

double wrap_angle(double phi) {
    double w = std::fmod(phi, 2 * kPi);
    return w < 0 ? w + 2 * kPi : w;
}

GapResult refine_minimum(const CouplingStencil& s, std::vector<double> phi, double step) {
    int d = s.dimension;
    auto e2_at = [&](const std::vector<double>& p) { return spectral_value_squared(s, p); };
    double width = step;
    int sweeps = d == 1 ? 1 : 8;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int a = 0; a < d; ++a) {
            auto line = [&](double x) {
                auto p = phi;
                p[static_cast<std::size_t>(a)] = x;
                return e2_at(p);
            };
            double c = phi[static_cast<std::size_t>(a)];
            phi[static_cast<std::size_t>(a)] = golden_min(line, c - width, c + width, d == 1 ? 1e-12 : width * 1e-3);
        }
        width = std::max(width * 0.25, 1e-12);
    }
    for (auto& p : phi) p = wrap_angle(p);
    GapResult g;
    g.phi = phi;
    g.gap = std::sqrt(std::max(0.0, e2_at(phi)));
    g.tailBound = symbol_tail_bound(s);
    return g;
}

CriticalPoint classify_critical(const CouplingStencil& s, const std::vector<double>& zeta) {
    auto e2_along = [&](double delta) {
        auto p = zeta;
        p[0] += delta;
        double up = spectral_value_squared(s, p);
        p[0] = zeta[0] - delta;
        double down = spectral_value_squared(s, p);
        return 0.5 * (up + down);
    };
    auto fit = [&](double lo, double hi, int count, double* resid) {
        std::vector<double> x, y;
        for (int k = 0; k < count; ++k) {
            double t = std::log(lo) + (std::log(hi) - std::log(lo)) * k / (count - 1);
            double v = e2_along(std::exp(t));
            if (v <= 0) continue;
            x.push_back(t);
            y.push_back(std::log(v));
        }
        double n = static_cast<double>(x.size());
        if (n < 2) {
            if (resid) *resid = 0;
            return 0.0;
        }
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
        mx /= n;
        my /= n;
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
        double slope = sxy / sxx;
        if (resid) {
            double r = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                double e = y[i] - (my + slope * (x[i] - mx));
                r += e * e;
            }
            *resid = std::sqrt(r / n);
        }
        return slope;
    };
    CriticalPoint cp;
    cp.phi = zeta;
    cp.slope = fit(1e-4, 1e-2, 21, &cp.residual);
    cp.order = 2 * static_cast<int>(std::lround(cp.slope / 2));
    double low = fit(1e-4, 1e-3, 11, nullptr), high = fit(1e-3, 1e-2, 11, nullptr);
    cp.logCorrection = std::abs(low - high) > 5e-3;
    return cp;
}

double scale_of(const SymbolGrid& g) {
    double m = 1;
    for (std::size_t i = 0; i < g.Q.size(); ++i)
        m = std::max({m, std::abs(g.Q[i]), std::abs(g.P[i]), std::abs(g.QP[i])});
    return m;
}

}  // namespace

CouplingStencil klein_gordon(double kappa) {
    if (!(std::abs(kappa) <= 1)) throw OutOfRange("Klein-Gordon coupling must satisfy |kappa| <= 1");
    CouplingStencil s;
    s.dimension = 1;
    s.Q.entries[{0}] = 1;
    if (kappa != 0) {
        s.Q.entries[{1}] = -kappa / 2;
        s.Q.entries[{-1}] = -kappa / 2;
    }
    s.P.entries[{0}] = 1;
    return s;
}

double critical_on_site(double alpha, double c, int dimension) {
    if (alpha <= dimension) throw NonSummable("power-law exponent alpha must exceed the dimension");
    if (dimension == 1) {
        double zeta = std::riemann_zeta(alpha);
        return c < 0 ? 2 * std::abs(c) * zeta : 2 * c * (1 - std::pow(2.0, 1 - alpha)) * zeta;
    }
    // lattice sums: V-hat vanishes at phi = 0 (c < 0) or at (pi, .., pi) (c > 0)
    PowerTail t{alpha, c, 0};
    TailCutoff cut = tail_cutoff(t, dimension);
    double s = 0;
    for_each_cube_offset(dimension, cut.nmax, [&](const std::vector<long>& n) {
        double r2 = 0;
        long parity = 0;
        for (long v : n) r2 += static_cast<double>(v) * static_cast<double>(v), parity += v;
        double sign = c < 0 ? 1.0 : (parity % 2 == 0 ? 1.0 : -1.0);
        s += sign * std::pow(r2, -alpha / 2);
    });
    return -c * s;
}

CouplingStencil power_law(double alpha, double c, int dimension, std::optional<double> on_site) {
    if (dimension < 1 || dimension > 3) throw InvalidStencil("dimension must be 1, 2 or 3");
    if (alpha <= dimension) throw NonSummable("power-law exponent alpha must exceed the dimension");
    CouplingStencil s;
    s.dimension = dimension;
    double v0 = on_site ? *on_site : critical_on_site(alpha, c, dimension);
    s.Q.tail = PowerTail{alpha, c, v0};
    s.P.entries[Offset(static_cast<std::size_t>(dimension), 0)] = 1;
    return s;
}

CouplingStencil point_symmetrize(const CouplingStencil& s) {
    CouplingStencil out = s;
    out.QP.entries.clear();
    for (const auto& [n, v] : s.QP.entries) {
        Offset m(n);
        for (int& c : m) c = -c;
        out.QP.entries[n] += v / 2;
        out.QP.entries[m] += v / 2;
    }
    return out;
}

FourierSymbol fourier_symbol(const CouplingStencil& s, Block b, int grid) {
    s.validate();
    if (grid < 1 || grid_size(s.dimension, grid) > kMaxSamples * 4)
        throw GridTooLarge("grid " + std::to_string(grid) + " exceeds the sample budget");
    FourierSymbol f;
    f.dimension = s.dimension;
    f.grid = grid;
    f.values = fold(s.block(b), s.dimension, grid, &f.tailBound);
    fft_nd(f.values, s.dimension, grid, false);
    return f;
}

Complex evaluate_symbol(const CouplingStencil& s, Block b, const std::vector<double>& phi) {
    if (static_cast<int>(phi.size()) != s.dimension) throw DimensionMismatch("phi has wrong dimension");
    return evaluate_block(s.block(b), s.dimension, phi);
}

double symbol_tail_bound(const CouplingStencil& s) {
    double b = 0;
    for (auto blk : {Block::Q, Block::P, Block::QP})
        if (const auto& t = s.block(blk).tail) b = std::max(b, tail_cutoff(*t, s.dimension).bound);
    return b;
}

double spectral_value_squared(const CouplingStencil& s, const std::vector<double>& phi) {
    double q = evaluate_block(s.Q, s.dimension, phi).real();
    double p = evaluate_block(s.P, s.dimension, phi).real();
    double qp = evaluate_block(s.QP, s.dimension, phi).real();
    return q * p - qp * qp;
}

SymbolGrid sample_symbols(const CouplingStencil& s, int grid) {
    SymbolGrid g;
    g.dimension = s.dimension;
    g.grid = grid;
    CouplingStencil sym = point_symmetrize(s);
    auto q = fourier_symbol(sym, Block::Q, grid);
    auto p = fourier_symbol(sym, Block::P, grid);
    auto qp = fourier_symbol(sym, Block::QP, grid);
    g.tailBound = std::max({q.tailBound, p.tailBound, qp.tailBound});
    std::size_t total = q.values.size();
    g.Q.resize(total);
    g.P.resize(total);
    g.QP.resize(total);
    double worst = 0, scale = 1;
    for (std::size_t i = 0; i < total; ++i) {
        g.Q[i] = q.values[i].real();
        g.P[i] = p.values[i].real();
        g.QP[i] = qp.values[i].real();
        worst = std::max({worst, std::abs(q.values[i].imag()), std::abs(p.values[i].imag()), std::abs(qp.values[i].imag())});
        scale = std::max({scale, std::abs(g.Q[i]), std::abs(g.P[i]), std::abs(g.QP[i])});
    }
    if (worst > 1e-10 * scale) throw ImaginaryResidue("symbol of a symmetric block has imaginary part " + std::to_string(worst));
    return g;
}

int default_scan_grid(int dimension) { return dimension == 1 ? 4096 : dimension == 2 ? 2048 : 128; }

std::vector<GapResult> local_minima(const CouplingStencil& s, const SpectralOptions& opt) {
    int d = s.dimension;
    int grid = opt.grid > 0 ? opt.grid : default_scan_grid(d);
    SymbolGrid g = sample_symbols(s, grid);
    std::size_t total = g.Q.size();
    std::vector<double> e2(total);
    double lo = 0, hi = 0;
    for (std::size_t i = 0; i < total; ++i) {
        e2[i] = g.e2(i);
        if (i == 0 || e2[i] < lo) lo = e2[i];
        if (i == 0 || e2[i] > hi) hi = e2[i];
    }
    double scale = scale_of(g);
    if (lo < -1e-10 * scale * scale) throw NegativeSymbol("H_Q H_P - H_QP^2 = " + std::to_string(lo));
    double step = 2 * kPi / grid;
    std::vector<std::size_t> candidates;
    if (d == 1 && hi - lo > 1e-14 * scale * scale) {
        for (std::size_t i = 0; i < total; ++i) {
            double prev = e2[(i + total - 1) % total], next = e2[(i + 1) % total];
            if (e2[i] < prev && e2[i] <= next) candidates.push_back(i);
        }
    }
    if (candidates.empty())
        candidates.push_back(static_cast<std::size_t>(std::min_element(e2.begin(), e2.end()) - e2.begin()));
    std::vector<GapResult> out;
    for (std::size_t i : candidates) out.push_back(refine_minimum(s, grid_phi(i, d, grid), step));
    std::sort(out.begin(), out.end(), [](const GapResult& a, const GapResult& b) { return a.gap < b.gap; });
    return out;
}

GapResult gap(const CouplingStencil& s, const SpectralOptions& opt) {
    int d = s.dimension;
    int grid = opt.grid > 0 ? opt.grid : default_scan_grid(d);
    SymbolGrid g = sample_symbols(s, grid);
    std::size_t total = g.Q.size(), best = 0;
    double lo = 0;
    for (std::size_t i = 0; i < total; ++i) {
        double v = g.e2(i);
        if (i == 0 || v < lo) lo = v, best = i;
    }
    double scale = scale_of(g);
    if (lo < -1e-10 * scale * scale) throw NegativeSymbol("H_Q H_P - H_QP^2 = " + std::to_string(lo));
    return refine_minimum(s, grid_phi(best, d, grid), 2 * kPi / grid);
}

SpectralFunction spectral_function(const CouplingStencil& s, const SpectralOptions& opt) {
    SpectralFunction sf;
    sf.dimension = s.dimension;
    sf.grid = opt.grid > 0 ? opt.grid : default_scan_grid(s.dimension);
    SymbolGrid g = sample_symbols(s, sf.grid);
    double scale = scale_of(g);
    sf.values.resize(g.Q.size());
    for (std::size_t i = 0; i < g.Q.size(); ++i) {
        double v = g.e2(i);
        if (v < -1e-10 * scale * scale) throw NegativeSymbol("H_Q H_P - H_QP^2 = " + std::to_string(v));
        sf.values[i] = std::sqrt(std::max(0.0, v));
    }
    SpectralOptions o = opt;
    o.grid = sf.grid;
    auto minima = local_minima(s, o);
    sf.gap = minima.front();
    for (const auto& m : minima)
        if (m.critical(opt.criticalTol)) sf.criticalPoints.push_back(classify_critical(s, m.phi));
    return sf;
}

// ---------------------------------------------------------------------------

namespace {

struct Divergence {
    bool critical = false;
    std::vector<std::vector<double>> zeros;
};

Divergence find_zeros(const CouplingStencil& s) {
    Divergence dv;
    SpectralOptions opt;
    auto minima = local_minima(s, opt);
    for (const auto& m : minima)
        if (m.critical(opt.criticalTol)) dv.zeros.push_back(m.phi);
    dv.critical = !dv.zeros.empty();
    return dv;
}

bool diverges_at(const CouplingStencil& s, const SymbolFunction& f, const std::vector<double>& phi) {
    if (!f.numerator) return false;
    double q = evaluate_block(s.Q, s.dimension, phi).real();
    double p = evaluate_block(s.P, s.dimension, phi).real();
    double qp = evaluate_block(s.QP, s.dimension, phi).real();
    return std::abs(f.numerator(q, p, qp)) > 1e-10;
}

struct GridPass {
    std::vector<std::vector<Complex>> arrays;
    double meanE = 0;
};

GridPass evaluate_on_grid(const CouplingStencil& s, const std::vector<const SymbolFunction*>& fs, int grid) {
    SymbolGrid g = sample_symbols(s, grid);
    double scale = scale_of(g);
    std::size_t total = g.Q.size();
    GridPass pass;
    double lo = 0, esum = 0;
    for (std::size_t i = 0; i < total; ++i) {
        double v = g.e2(i);
        lo = std::min(lo, v);
        esum += std::sqrt(std::max(0.0, v));
    }
    if (lo < -1e-10 * scale * scale) throw NegativeSymbol("H_Q H_P - H_QP^2 = " + std::to_string(lo));
    pass.meanE = esum / static_cast<double>(total);
    for (const SymbolFunction* f : fs) {
        std::vector<Complex> a(total);
        parallel_for(total, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) a[i] = f->f(g.Q[i], g.P[i], g.QP[i]);
        });
        fft_nd(a, s.dimension, grid, true);
        pass.arrays.push_back(std::move(a));
    }
    return pass;
}

double imag_tolerance(const std::vector<Complex>& a) {
    double m = 1;
    for (const auto& v : a) m = std::max(m, std::abs(v.real()));
    return 1e-10 * m;
}

}  // namespace

TransformResult symbol_transform(const CouplingStencil& s, const std::vector<SymbolFunction>& fs,
                                 const std::vector<Offset>& offsets, const Limit& limit) {
    return symbol_transform(s, fs, offsets, limit, false);
}

TransformResult symbol_transform(const CouplingStencil& s, const std::vector<SymbolFunction>& fs,
                                 const std::vector<Offset>& offsets, const Limit& limit, bool allow_divergent) {
    s.validate();
    int d = s.dimension;
    for (const auto& n : offsets)
        if (static_cast<int>(n.size()) != d) throw DimensionMismatch("offset has wrong dimension");
    TransformResult res;
    res.values.assign(fs.size(), {});
    res.divergent.assign(fs.size(), false);

    std::vector<const SymbolFunction*> active;
    std::vector<std::size_t> slot;
    auto reject = [&](std::size_t k) {
        if (!allow_divergent) throw DivergentBlock(fs[k].name + " diverges at a zero of the spectral function");
        res.divergent[k] = true;
    };

    auto read = [&](const GridPass& pass, int grid) {
        std::vector<std::vector<double>> vals(active.size());
        for (std::size_t k = 0; k < active.size(); ++k) {
            double tol = imag_tolerance(pass.arrays[k]);
            for (const auto& n : offsets) {
                const Complex& v = pass.arrays[k][grid_index(n, grid)];
                if (std::abs(v.imag()) > tol)
                    throw ImaginaryResidue(active[k]->name + " has imaginary part " + std::to_string(v.imag()));
                vals[k].push_back(v.real());
            }
        }
        return vals;
    };
    auto store = [&](const std::vector<std::vector<double>>& vals) {
        for (std::size_t k = 0; k < active.size(); ++k) res.values[slot[k]] = vals[k];
    };

    if (limit.N > 0) {
        int grid = limit.N;
        if (grid_size(d, grid) > kMaxSamples * 4) throw GridTooLarge("ring too large");
        for (const auto& n : offsets)
            for (int c : n)
                if (std::abs(c) > grid / 2) throw OutOfRange("offset exceeds N/2");
        SymbolGrid g = sample_symbols(s, grid);
        for (std::size_t k = 0; k < fs.size(); ++k) {
            bool bad = false;
            if (fs[k].numerator)
                for (std::size_t i = 0; i < g.Q.size() && !bad; ++i)
                    bad = (std::sqrt(std::max(0.0, g.e2(i))) <= 1e-7 || g.e2(i) <= 100 * g.tailBound) && std::abs(fs[k].numerator(g.Q[i], g.P[i], g.QP[i])) > 1e-10;
            if (bad)
                reject(k);
            else
                active.push_back(&fs[k]), slot.push_back(k);
        }
        GridPass pass = evaluate_on_grid(s, active, grid);
        store(read(pass, grid));
        res.grid = grid;
        res.meanE = pass.meanE;
        return res;
    }

    Divergence dv = find_zeros(s);
    for (std::size_t k = 0; k < fs.size(); ++k) {
        bool bad = false;
        for (const auto& z : dv.zeros) bad = bad || diverges_at(s, fs[k], z);
        if (bad)
            reject(k);
        else
            active.push_back(&fs[k]), slot.push_back(k);
    }
    int grid = limit.startGrid > 0 ? limit.startGrid : (d == 1 ? 4096 : d == 2 ? 256 : 64);
    int cap = limit.maxGrid > 0 ? limit.maxGrid : (d == 1 ? (1 << 20) : d == 2 ? 2048 : 128);
    if (grid_size(d, grid) > kMaxSamples && d > 1) throw GridTooLarge("grid exceeds G^d <= 2^22");
    double tol = limit.tol > 0 ? limit.tol : (dv.critical ? 1e-8 : 1e-10);

    GridPass pass = evaluate_on_grid(s, active, grid);
    auto vals = read(pass, grid);
    res.grid = grid;
    res.meanE = pass.meanE;
    if (limit.fixedGrid || active.empty()) {
        store(vals);
        return res;
    }
    while (true) {
        int next = grid * 2;
        if (next > cap || (d > 1 && grid_size(d, next) > kMaxSamples)) {
            res.converged = false;
            res.warnings.push_back("ConvergenceWarning: quadrature change " + std::to_string(res.lastChange) +
                                   " above tolerance at grid " + std::to_string(grid));
            break;
        }
        GridPass p2 = evaluate_on_grid(s, active, next);
        auto v2 = read(p2, next);
        double change = 0;
        for (std::size_t k = 0; k < vals.size(); ++k)
            for (std::size_t i = 0; i < vals[k].size(); ++i) change = std::max(change, std::abs(v2[k][i] - vals[k][i]));
        vals = std::move(v2);
        grid = next;
        res.grid = grid;
        res.meanE = p2.meanE;
        res.lastChange = change;
        if (change <= tol) break;
    }
    store(vals);
    return res;
}

std::vector<double> symbol_transform_array(const CouplingStencil& s, const SymbolFunction& f, int grid, double* meanE) {
    s.validate();
    if (grid_size(s.dimension, grid) > kMaxSamples) throw GridTooLarge("grid exceeds G^d <= 2^22");
    GridPass pass = evaluate_on_grid(s, {&f}, grid);
    if (meanE) *meanE = pass.meanE;
    const auto& a = pass.arrays[0];
    double tol = imag_tolerance(a);
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::abs(a[i].imag()) > tol) throw ImaginaryResidue(f.name + " has imaginary part " + std::to_string(a[i].imag()));
        out[i] = a[i].real();
    }
    return out;
}

// ---------------------------------------------------------------------------

SymbolFunction block_function(CorrelationBlock b) {
    auto energy = [](double q, double p, double qp) { return std::sqrt(std::max(0.0, q * p - qp * qp)); };
    auto ratio = [energy](double num, double q, double p, double qp) {
        double e = energy(q, p, qp);
        return e > 0 ? num / e : 0.0;
    };
    switch (b) {
        case CorrelationBlock::gammaQ:
            return {"gammaQ", [ratio](double q, double p, double qp) { return ratio(p, q, p, qp); },
                    [](double, double p, double) { return p; }};
        case CorrelationBlock::gammaP:
            return {"gammaP", [ratio](double q, double p, double qp) { return ratio(q, q, p, qp); },
                    [](double q, double, double) { return q; }};
        case CorrelationBlock::gammaQP:
            return {"gammaQP", [ratio](double q, double p, double qp) { return ratio(-qp, q, p, qp); },
                    [](double, double, double qp) { return qp; }};
        case CorrelationBlock::Einv:
            return {"Einv", [energy](double q, double p, double qp) { return 1 / energy(q, p, qp); },
                    [](double, double, double) { return 1.0; }};
        case CorrelationBlock::E:
        default:
            return {"E", energy, nullptr};
    }
}

std::string block_function_name(CorrelationBlock b) { return block_function(b).name; }

CorrelationBlock parse_correlation_block(const std::string& name) {
    for (auto b : {CorrelationBlock::gammaQ, CorrelationBlock::gammaP, CorrelationBlock::gammaQP, CorrelationBlock::Einv,
                   CorrelationBlock::E})
        if (block_function_name(b) == name) return b;
    throw OutOfRange("unknown correlation block '" + name + "'");
}

TinvGroundState ground_state_tinv(const CouplingStencil& s, const std::vector<Offset>& offsets, const Limit& limit) {
    std::vector<SymbolFunction> fs = {block_function(CorrelationBlock::gammaQ), block_function(CorrelationBlock::gammaP),
                                      block_function(CorrelationBlock::gammaQP)};
    // only the Q block may be left undefined; other divergences are errors
    TransformResult r = symbol_transform(s, fs, offsets, limit, true);
    if (r.divergent[1] || r.divergent[2]) throw DivergentBlock("gammaP or gammaQP diverges at a zero of the spectral function");
    TinvGroundState gs;
    gs.offsets = offsets;
    gs.qDivergent = r.divergent[0];
    gs.gammaQ = r.values[0];
    gs.gammaP = r.values[1];
    gs.gammaQP = r.values[2];
    gs.energyPerSite = r.meanE / 2;
    gs.grid = r.grid;
    gs.converged = r.converged;
    gs.warnings = r.warnings;
    return gs;
}

std::vector<Offset> offsets_in_box(int dimension, int radius) {
    std::vector<Offset> out;
    Offset n(static_cast<std::size_t>(dimension), -radius);
    while (true) {
        out.push_back(n);
        int a = dimension - 1;
        while (a >= 0 && n[static_cast<std::size_t>(a)] == radius) n[static_cast<std::size_t>(a--)] = -radius;
        if (a < 0) break;
        ++n[static_cast<std::size_t>(a)];
    }
    return out;
}

std::vector<Offset> offsets_on_axis(int dimension, int from, int to) {
    std::vector<Offset> out;
    for (int k = from; k <= to; ++k) {
        Offset n(static_cast<std::size_t>(dimension), 0);
        n[0] = k;
        out.push_back(n);
    }
    return out;
}

MatrixX<double> circulant_block(const CouplingStencil& s, Block b, int N) {
    int d = s.dimension;
    std::vector<Complex> folded = fold(s.block(b), d, N, nullptr);
    std::size_t total = grid_size(d, N);
    MatrixX<double> m(static_cast<Index>(total), static_cast<Index>(total));
    std::vector<int> k(static_cast<std::size_t>(d)), l(static_cast<std::size_t>(d)), diff(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < total; ++i) {
        std::size_t r = i;
        for (int a = d - 1; a >= 0; --a) k[static_cast<std::size_t>(a)] = static_cast<int>(r % N), r /= N;
        for (std::size_t j = 0; j < total; ++j) {
            std::size_t c = j;
            for (int a = d - 1; a >= 0; --a) l[static_cast<std::size_t>(a)] = static_cast<int>(c % N), c /= N;
            for (int a = 0; a < d; ++a) diff[static_cast<std::size_t>(a)] = k[static_cast<std::size_t>(a)] - l[static_cast<std::size_t>(a)];
            m(static_cast<Index>(i), static_cast<Index>(j)) = folded[grid_index(diff, N)].real();
        }
    }
    return m;
}

QuadraticHamiltonian<double> dense_hamiltonian(const CouplingStencil& s, int N) {
    s.validate();
    return {circulant_block(s, Block::Q, N), circulant_block(s, Block::P, N), circulant_block(s, Block::QP, N)};
}

}  // namespace harmlat
