#include "harmlat/asymptotics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "harmlat/errors.hpp"
#include "harmlat/lattice.hpp"

namespace harmlat {

namespace {

// coefficients M_{-R..R} of a finite 1D block
std::vector<double> dense_coefficients(const BlockStencil& b, int R) {
    std::vector<double> c(static_cast<std::size_t>(2 * R + 1), 0.0);
    for (const auto& [n, v] : b.entries) c[static_cast<std::size_t>(n[0] + R)] += v;
    return c;
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

void require_finite_1d(const CouplingStencil& s, const char* what) {
    s.validate();
    if (s.dimension != 1) throw InvalidStencil(std::string(what) + " requires a one-dimensional stencil");
    if (s.range() < 0) throw InvalidStencil(std::string(what) + " requires a finite-range stencil");
}

}  // namespace

std::vector<double> spectral_cosine_coefficients(const CouplingStencil& s_in) {
    require_finite_1d(s_in, "spectral_cosine_coefficients");
    CouplingStencil s = point_symmetrize(s_in);
    int R = s.range();
    auto q = dense_coefficients(s.Q, R), p = dense_coefficients(s.P, R), r = dense_coefficients(s.QP, R);
    auto qp = convolve(q, p), rr = convolve(r, r);  // indices -2R..2R
    std::vector<double> w(qp.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = qp[i] - rr[i];
    int L = 2 * R;
    std::vector<double> c(static_cast<std::size_t>(L + 1));
    // E^2 = sum_n w_n e^{-i n phi} = w_0 + sum_{m>0} 2 w_m cos(m phi) for symmetric w
    for (int m = 0; m <= L; ++m) {
        double wm = 0.5 * (w[static_cast<std::size_t>(L + m)] + w[static_cast<std::size_t>(L - m)]);
        c[static_cast<std::size_t>(m)] = m == 0 ? wm : 2 * wm;
    }
    while (c.size() > 1 && c.back() == 0) c.pop_back();
    return c;
}

RealPoly spectral_polynomial(const std::vector<double>& cosine) {
    int L = static_cast<int>(cosine.size()) - 1;
    RealPoly p(static_cast<std::size_t>(2 * L + 1), 0.0);
    p[static_cast<std::size_t>(L)] = cosine[0];
    for (int m = 1; m <= L; ++m) {
        p[static_cast<std::size_t>(L + m)] += 0.5 * cosine[static_cast<std::size_t>(m)];
        p[static_cast<std::size_t>(L - m)] += 0.5 * cosine[static_cast<std::size_t>(m)];
    }
    return p;
}

CorrLengthReport correlation_length_from_zeros(const CouplingStencil& s) {
    CorrLengthReport rep;
    rep.cosineCoefficients = spectral_cosine_coefficients(s);
    if (rep.cosineCoefficients.size() < 2) throw EmptyInterior("spectral function is constant; g has no zeros");
    if (gap(s).critical()) throw CriticalInput("spectral function vanishes; the correlation length is infinite");
    RealPoly g = spectral_polynomial(rep.cosineCoefficients);
    auto roots = poly_roots(g);
    // a k-fold zero splits by ~eps^(1/k) in the companion solve; 1e-4 covers k = 3
    rep.zeros = cluster_roots(roots, 1e-4);
    const RootCluster* best = nullptr;
    for (const auto& c : rep.zeros) {
        double r = std::abs(c.z);
        if (std::abs(r - 1) <= 1e-9) throw CriticalInput("zero of g on the unit circle");
        if (r < 1 - 1e-9 && (!best || r > std::abs(best->z))) best = &c;
    }
    if (!best) throw EmptyInterior("no zero of g inside the unit disk");
    rep.zTilde = best->z;
    rep.order = best->multiplicity;
    rep.xi = -1 / std::log(std::abs(best->z));
    rep.classification = rep.order == 1 ? "exp_over_sqrt_n" : rep.order % 2 == 0 ? "pure_exp" : "exp_upper_bound";
    return rep;
}

double spectral_curvature(const CouplingStencil& s, double phi) {
    auto e = [&](double x) { return std::sqrt(std::max(0.0, spectral_value_squared(s, {x}))); };
    auto d5 = [&](double h) {
        return (-e(phi + 2 * h) + 16 * e(phi + h) - 30 * e(phi) + 16 * e(phi - h) - e(phi - 2 * h)) / (12 * h * h);
    };
    double h = 0.1;
    double prev = (16 * d5(h / 2) - d5(h)) / 15;
    for (int it = 0; it < 8; ++it) {
        h /= 2;
        double cur = (16 * d5(h / 2) - d5(h)) / 15;
        if (std::abs(cur - prev) <= 1e-8 * std::max(1.0, std::abs(cur))) return cur;
        prev = cur;
    }
    return prev;
}

GapLawPrediction gap_law_prediction(const CouplingStencil& s) {
    s.validate();
    if (s.dimension != 1) throw InvalidStencil("gap_law_prediction requires a one-dimensional stencil");
    auto minima = local_minima(s);
    if (minima.empty() || minima.front().critical()) throw CriticalInput("gapless spectrum; no gap law");
    std::optional<GapLawPrediction> best;
    double flat = 0;
    for (const auto& m : minima) {
        GapLawPrediction g;
        g.gap = m.gap;
        g.phi = m.phi[0];
        g.curvature = spectral_curvature(s, g.phi);
        if (g.curvature <= 1e-10) {
            flat = g.curvature;
            continue;
        }
        g.effectiveMass = 1 / g.curvature;
        g.xi = 1 / std::sqrt(g.gap * g.effectiveMass);
        if (!best || g.xi > best->xi) best = g;
    }
    if (!best)
        throw FlatBand("spectral function is flat at the band gap (E'' = " + std::to_string(flat) + "); m* is infinite");
    return *best;
}

std::string FitCandidate::label() const {
    char buf[128];
    if (model == "exp")
        std::snprintf(buf, sizeof buf, "A exp(-n/%.6g) n^%.4g", xi, p);
    else if (s == 0)
        std::snprintf(buf, sizeof buf, "A n^-%.4g%s", beta, betaFixed ? " (fixed)" : "");
    else
        std::snprintf(buf, sizeof buf, "A n^-%.4g (log n)^%.3g%s", beta, s, betaFixed ? " (fixed)" : "");
    return buf;
}

namespace {

struct Window {
    std::vector<double> n, logv;
    int nMin = 0, nMax = 0;
};

Window prepare(const std::vector<double>& n, const std::vector<double>& v, int lo, int hi, const FitOptions& opt) {
    bool wants_log_log = opt.power && !opt.logExponents.empty();
    // n^p needs n >= 1, log log n needs n >= 2
    lo = std::max(lo, wants_log_log ? 2 : 1);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n.size(); ++i)
        if (n[i] >= lo && (hi < 0 || n[i] <= hi)) idx.push_back(i);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return n[a] < n[b]; });
    double vmax = 0;
    for (auto i : idx) vmax = std::max(vmax, std::abs(v[i]));
    // stop at the first point lost in the noise floor
    std::size_t keep = 0;
    while (keep < idx.size() && std::isfinite(v[idx[keep]]) && std::abs(v[idx[keep]]) > opt.noiseFloor * vmax) ++keep;
    idx.resize(keep);
    if (idx.size() < 12)
        throw InsufficientData("fit window holds " + std::to_string(idx.size()) + " usable points; at least 12 needed");
    if (opt.power && !opt.envelope) {
        bool pos = false, neg = false;
        for (auto i : idx) (v[i] > 0 ? pos : neg) = true;
        if (pos && neg) throw ZeroCrossingInWindow("sign changes inside the fit window; enable envelope extraction");
    }
    Window w;
    double running = 0;
    std::vector<std::size_t> sel;
    if (opt.envelope) {
        for (auto it = idx.rbegin(); it != idx.rend(); ++it)
            if (std::abs(v[*it]) >= running) {
                running = std::abs(v[*it]);
                sel.push_back(*it);
            }
        std::reverse(sel.begin(), sel.end());
    } else {
        sel = idx;
    }
    if (sel.size() < 12)
        throw InsufficientData("envelope holds " + std::to_string(sel.size()) + " points; at least 12 needed");
    for (auto i : sel) {
        w.n.push_back(n[i]);
        w.logv.push_back(std::log(std::abs(v[i])));
    }
    w.nMin = static_cast<int>(n[idx.front()]);
    w.nMax = static_cast<int>(n[idx.back()]);
    return w;
}

FitCandidate least_squares(const Window& w, FitCandidate spec) {
    Eigen::Index m = static_cast<Eigen::Index>(w.n.size());
    Eigen::VectorXd y(m);
    Eigen::MatrixXd X;
    if (spec.model == "exp") {
        X.resize(m, 3);
        for (Eigen::Index i = 0; i < m; ++i) {
            double n = w.n[static_cast<std::size_t>(i)];
            X.row(i) << 1, -n, std::log(n);
            y(i) = w.logv[static_cast<std::size_t>(i)];
        }
    } else {
        X.resize(m, spec.betaFixed ? 1 : 2);
        for (Eigen::Index i = 0; i < m; ++i) {
            double n = w.n[static_cast<std::size_t>(i)], ln = std::log(n);
            y(i) = w.logv[static_cast<std::size_t>(i)] - (spec.s != 0 ? spec.s * std::log(ln) : 0.0);
            if (spec.betaFixed) {
                y(i) += spec.beta * ln;
                X(i, 0) = 1;
            } else {
                X.row(i) << 1, -ln;
            }
        }
    }
    Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
    Eigen::VectorXd res = y - X * coef;
    spec.residual = std::sqrt(res.squaredNorm() / static_cast<double>(m));
    spec.A = std::exp(coef(0));
    if (spec.model == "exp") {
        spec.xi = coef(1) > 0 ? 1 / coef(1) : std::numeric_limits<double>::infinity();
        spec.p = coef(2);
    } else if (!spec.betaFixed) {
        spec.beta = coef(1);
    }
    return spec;
}

std::vector<FitCandidate> candidate_specs(const FitOptions& opt) {
    std::vector<FitCandidate> out;
    if (opt.exponential) out.push_back({"exp"});
    if (opt.power)
        for (double s : opt.logExponents) {
            FitCandidate c{s == 0 ? "power" : "power_log"};
            c.s = s;
            if (opt.freeBeta) out.push_back(c);
            for (double b : opt.fixedBetas) {
                FitCandidate f = c;
                f.beta = b;
                f.betaFixed = true;
                out.push_back(f);
            }
        }
    return out;
}

}  // namespace

DecayFit fit_decay(const std::vector<double>& n, const std::vector<double>& values, const FitOptions& opt) {
    if (n.size() != values.size()) throw DimensionMismatch("positions and values differ in length");
    auto specs = candidate_specs(opt);
    if (specs.empty()) throw InsufficientData("no model family selected");
    Window w = prepare(n, values, opt.nMin, opt.nMax, opt);
    DecayFit fit;
    fit.nMin = w.nMin;
    fit.nMax = w.nMax;
    fit.points = static_cast<int>(w.n.size());
    for (const auto& sp : specs) fit.candidates.push_back(least_squares(w, sp));
    std::stable_sort(fit.candidates.begin(), fit.candidates.end(),
                     [](const auto& a, const auto& b) { return a.residual < b.residual; });
    fit.best = fit.candidates.front();
    if (fit.candidates.size() > 1) {
        fit.runnerUp = fit.candidates[1];
        fit.ambiguous = fit.best.residual > (1 - opt.margin) * fit.runnerUp->residual;
    }
    fit.sensitivityMin = std::max(opt.sensitivityMin, opt.nMin);
    try {
        // same end as the main window, so the noise cut is not re-based
        Window ws = prepare(n, values, fit.sensitivityMin, w.nMax, opt);
        fit.sensitivity = least_squares(ws, fit.best);
    } catch (const InsufficientData&) {
    }
    return fit;
}

nlohmann::json to_json(const CorrLengthReport& r) {
    nlohmann::json zeros = nlohmann::json::array();
    for (const auto& z : r.zeros) zeros.push_back({{"re", z.z.real()}, {"im", z.z.imag()}, {"multiplicity", z.multiplicity}});
    return {{"xi", r.xi},
            {"zTilde", {{"re", r.zTilde.real()}, {"im", r.zTilde.imag()}}},
            {"order", r.order},
            {"classification", r.classification},
            {"zeros", zeros},
            {"cosineCoefficients", r.cosineCoefficients}};
}

nlohmann::json to_json(const GapLawPrediction& g) {
    return {{"gap", g.gap}, {"effectiveMass", g.effectiveMass}, {"xiPredicted", g.xi}, {"phi", g.phi}, {"curvature", g.curvature}};
}

nlohmann::json to_json(const FitCandidate& c) {
    nlohmann::json params;
    params["A"] = c.A;
    if (c.model == "exp") {
        params["xi"] = std::isfinite(c.xi) ? nlohmann::json(c.xi) : nlohmann::json(nullptr);
        params["p"] = c.p;
    } else {
        params["beta"] = c.beta;
        params["s"] = c.s;
        params["betaFixed"] = c.betaFixed;
    }
    return {{"model", c.model}, {"label", c.label()}, {"params", params}, {"residual", c.residual}};
}

nlohmann::json to_json(const DecayFit& f) {
    nlohmann::json j = to_json(f.best);
    j["window"] = {f.nMin, f.nMax};
    j["points"] = f.points;
    j["ambiguous"] = f.ambiguous;
    j["runnerUp"] = f.runnerUp ? to_json(*f.runnerUp) : nlohmann::json(nullptr);
    nlohmann::json all = nlohmann::json::array();
    for (const auto& c : f.candidates) all.push_back(to_json(c));
    j["candidates"] = all;
    if (f.sensitivity) {
        j["sensitivity"] = to_json(*f.sensitivity);
        j["sensitivity"]["window"] = {f.sensitivityMin, f.nMax};
    }
    return j;
}

}  // namespace harmlat
