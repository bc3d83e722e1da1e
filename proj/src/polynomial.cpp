#include "harmlat/polynomial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "harmlat/errors.hpp"

namespace harmlat {

double poly_eval(const RealPoly& p, double x) {
    double v = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * x + *it;
    return v;
}

Complex poly_eval(const ComplexPoly& p, Complex z) {
    Complex v(0, 0);
    for (auto it = p.rbegin(); it != p.rend(); ++it) v = v * z + *it;
    return v;
}

RealPoly poly_mul(const RealPoly& a, const RealPoly& b) {
    if (a.empty() || b.empty()) return {};
    RealPoly c(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

ComplexPoly poly_mul(const ComplexPoly& a, const ComplexPoly& b) {
    if (a.empty() || b.empty()) return {};
    ComplexPoly c(a.size() + b.size() - 1, Complex(0, 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

RealPoly poly_add(const RealPoly& a, const RealPoly& b, double scale_b) {
    RealPoly c(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) c[i] += scale_b * b[i];
    return c;
}

RealPoly poly_trim(const RealPoly& p, double tol) {
    double m = 0;
    for (double c : p) m = std::max(m, std::abs(c));
    RealPoly q = p;
    while (!q.empty() && std::abs(q.back()) <= tol * m) q.pop_back();
    return q;
}

int poly_degree(const RealPoly& p, double tol) { return static_cast<int>(poly_trim(p, tol).size()) - 1; }

std::vector<Complex> poly_roots(const ComplexPoly& p_in) {
    ComplexPoly p = p_in;
    while (!p.empty() && p.back() == Complex(0, 0)) p.pop_back();
    if (p.size() < 2) return {};
    std::size_t deg = p.size() - 1;
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(deg), static_cast<Eigen::Index>(deg));
    for (std::size_t i = 1; i < deg; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1;
    for (std::size_t i = 0; i < deg; ++i) comp(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(deg - 1)) = -p[i] / p[deg];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    ComplexPoly dp(deg);
    for (std::size_t i = 1; i <= deg; ++i) dp[i - 1] = static_cast<double>(i) * p[i];
    std::vector<Complex> roots;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        Complex z = es.eigenvalues()(i);
        for (int it = 0; it < 1; ++it) {
            Complex f = poly_eval(p, z), d = poly_eval(dp, z);
            if (d == Complex(0, 0)) break;
            Complex zn = z - f / d;
            if (std::abs(poly_eval(p, zn)) >= std::abs(f)) break;
            z = zn;
        }
        roots.push_back(z);
    }
    return roots;
}

std::vector<Complex> poly_roots(const RealPoly& p) {
    ComplexPoly c(p.begin(), p.end());
    return poly_roots(c);
}

std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots, double radius) {
    std::vector<bool> used(roots.size(), false);
    std::vector<RootCluster> out;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (used[i]) continue;
        std::vector<std::size_t> members{i};
        used[i] = true;
        // grow transitively so that a split multiple root lands in one cluster
        for (std::size_t k = 0; k < members.size(); ++k)
            for (std::size_t j = 0; j < roots.size(); ++j)
                if (!used[j] && std::abs(roots[j] - roots[members[k]]) <= radius * std::max(1.0, std::abs(roots[j]))) {
                    used[j] = true;
                    members.push_back(j);
                }
        Complex c(0, 0);
        for (auto m : members) c += roots[m];
        out.push_back({c / static_cast<double>(members.size()), static_cast<int>(members.size())});
    }
    return out;
}

std::vector<double> monomial_to_cosine(const RealPoly& c) {
    // cos^k = 2^{1-k} sum_{j < k/2} binom(k, j) cos((k-2j) phi) + 2^{-k} binom(k, k/2)
    std::vector<double> a(c.size(), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
        double binom = 1;
        for (std::size_t j = 0; j <= k; ++j) {
            if (j > 0) binom = binom * static_cast<double>(k - j + 1) / static_cast<double>(j);
            std::size_t m = k >= 2 * j ? k - 2 * j : 2 * j - k;
            if (2 * j > k) continue;
            double w = std::ldexp(binom, -static_cast<int>(k)) * (m == 0 ? 1.0 : 2.0);
            a[m] += c[k] * w;
        }
    }
    return a;
}

RealPoly cosine_to_monomial(const std::vector<double>& a) {
    // Chebyshev T_m(x) = cos(m phi)
    RealPoly out(a.size(), 0.0);
    RealPoly t0{1}, t1{0, 1};
    for (std::size_t m = 0; m < a.size(); ++m) {
        const RealPoly& t = m == 0 ? t0 : t1;
        for (std::size_t k = 0; k < t.size(); ++k) out[k] += a[m] * t[k];
        if (m >= 1) {
            RealPoly next = poly_add(poly_mul(RealPoly{0, 2}, t1), t0, -1);
            t0 = t1;
            t1 = next;
        }
    }
    return out;
}

ComplexPoly joukowski(const RealPoly& p) {
    // (z + 1/z)/2 = (z^2 + 1)/(2z); x^k -> z^{K-k} ((z^2 + 1)/2)^k
    std::size_t K = p.empty() ? 0 : p.size() - 1;
    ComplexPoly out(2 * K + 1, Complex(0, 0));
    ComplexPoly power{Complex(1, 0)};
    for (std::size_t k = 0; k <= K; ++k) {
        for (std::size_t i = 0; i < power.size(); ++i) out[K - k + i] += p[k] * power[i];
        power = poly_mul(power, ComplexPoly{0.5, 0, 0.5});
    }
    return out;
}

}  // namespace harmlat
