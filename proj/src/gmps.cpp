#include "harmlat/gmps.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "harmlat/errors.hpp"
#include "harmlat/symplectic.hpp"

namespace harmlat {

using Eigen::Index;
using Eigen::MatrixXd;

namespace {

double min_abs_eigenvalue(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().minCoeff();
}

// U_YY - U_YX U_XX^{-1} U_XY with X the first k coordinates
template <class Mat, class Err>
Mat schur_complement(const Mat& u, Index k, const char* what) {
    Index rest = u.rows() - k;
    Mat uxx = u.topLeftCorner(k, k);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (uxx + uxx.adjoint()), Eigen::EigenvaluesOnly);
    if (k > 0 && es.eigenvalues().cwiseAbs().minCoeff() <= 1e-10) throw Err(what);
    Mat sol = uxx.partialPivLu().solve(u.topRightCorner(k, rest));
    Mat out = u.bottomRightCorner(rest, rest) - u.bottomLeftCorner(rest, k) * sol;
    return 0.5 * (out + out.adjoint().eval());
}

}  // namespace

void GaussianChannel::validate(double purity_tol) const {
    if (bondCount < 0 || outputModes < 1) throw DimensionMismatch("channel needs bondCount >= 0 and outputModes >= 1");
    if (cm.rows() != 2 * modes() || cm.cols() != 2 * modes())
        throw DimensionMismatch("channel CM must be " + std::to_string(2 * modes()) + " x " + std::to_string(2 * modes()));
    if ((cm - cm.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, cm.cwiseAbs().maxCoeff()))
        throw DimensionMismatch("channel CM is not symmetric");
    auto diag = validate_cm<double>(cm, purity_tol);
    if (!diag.pure)
        throw PurityViolation("channel CM is not pure: ||(G sigma)^2 + 1|| = " + std::to_string(diag.purityResidual));
}

std::vector<Index> mode_coordinates(const std::vector<int>& modes, int n) {
    std::vector<Index> idx;
    for (int m : modes) idx.push_back(m);
    for (int m : modes) idx.push_back(n + m);
    return idx;
}

MatrixXd submatrix(const MatrixXd& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
    MatrixXd out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) out(static_cast<Index>(i), static_cast<Index>(j)) = m(rows[i], cols[j]);
    return out;
}

MatrixXd two_mode_squeezed(double cosh2r) {
    double c = cosh2r, s = std::sqrt(std::max(0.0, c * c - 1));
    MatrixXd g = MatrixXd::Zero(4, 4);
    g << c, s, 0, 0,  //
        s, c, 0, 0,   //
        0, 0, c, -s,  //
        0, 0, -s, c;
    return g;
}

MatrixXd direct_sum(const MatrixXd& a, const MatrixXd& b) {
    Index na = a.rows() / 2, nb = b.rows() / 2, n = na + nb;
    MatrixXd g = MatrixXd::Zero(2 * n, 2 * n);
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            g.block(x * n, y * n, na, na) = a.block(x * na, y * na, na, na);
            g.block(x * n + na, y * n + na, nb, nb) = b.block(x * nb, y * nb, nb, nb);
        }
    return g;
}

MatrixXd random_pure_cm(int modes, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, scale);
    Index n2 = 2 * modes;
    MatrixXd x(n2, n2);
    for (Index i = 0; i < n2; ++i)
        for (Index j = 0; j <= i; ++j) x(i, j) = x(j, i) = nd(rng);
    MatrixXd a = symplectic_form<double>(modes) * x;
    MatrixXd s = a.exp();
    MatrixXd g = s * s.transpose();
    return 0.5 * (g + g.transpose());
}

GaussianChannel random_channel(int bondCount, int outputModes, std::uint64_t seed, double scale) {
    GaussianChannel ch;
    ch.bondCount = bondCount;
    ch.outputModes = outputModes;
    ch.cm = random_pure_cm(2 * bondCount + outputModes, seed, scale);
    return ch;
}

MatrixXd channel_apply(const MatrixXd& Gamma, int inputModes, const MatrixXd& gammaIn) {
    int n = static_cast<int>(Gamma.rows() / 2);
    if (Gamma.rows() != Gamma.cols() || Gamma.rows() % 2 || inputModes < 1 || inputModes >= n)
        throw DimensionMismatch("channel state must hold the input modes and at least one output mode");
    if (gammaIn.rows() != 2 * inputModes || gammaIn.cols() != 2 * inputModes)
        throw DimensionMismatch("input CM does not match the channel input ports");
    std::vector<int> b, c;
    for (int i = 0; i < n; ++i) (i < inputModes ? b : c).push_back(i);
    auto ib = mode_coordinates(b, n), ic = mode_coordinates(c, n);
    MatrixXd theta = MatrixXd::Identity(2 * inputModes, 2 * inputModes);
    theta.bottomRightCorner(inputModes, inputModes) *= -1;
    MatrixXd denom = submatrix(Gamma, ib, ib) + theta * gammaIn * theta;
    if (min_abs_eigenvalue(denom) <= 1e-10) throw SingularDenominator("Gamma_B + theta gamma_in theta is singular");
    MatrixXd gcb = submatrix(Gamma, ic, ib);
    MatrixXd out = submatrix(Gamma, ic, ic) - gcb * denom.ldlt().solve(gcb.transpose());
    return 0.5 * (out + out.transpose());
}

MatrixXd epr_measure(const MatrixXd& gamma, const std::vector<int>& a, const std::vector<int>& b) {
    int n = static_cast<int>(gamma.rows() / 2);
    if (a.size() != b.size() || a.empty()) throw DimensionMismatch("EPR measurement needs equally many modes on both sides");
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (auto v : {&a, &b})
        for (int m : *v) {
            if (m < 0 || m >= n || used[static_cast<std::size_t>(m)])
                throw DimensionMismatch("measured modes must be distinct and inside the state");
            used[static_cast<std::size_t>(m)] = true;
        }
    std::vector<int> rest;
    for (int m = 0; m < n; ++m)
        if (!used[static_cast<std::size_t>(m)]) rest.push_back(m);
    Index k = static_cast<Index>(a.size()), r = static_cast<Index>(rest.size());
    // rows: collapsed q, collapsed p, remaining q, remaining p
    MatrixXd w = MatrixXd::Zero(2 * (k + r), 2 * n);
    for (Index i = 0; i < k; ++i) {
        w(i, a[static_cast<std::size_t>(i)]) = 1;
        w(i, b[static_cast<std::size_t>(i)]) = 1;
        w(k + i, n + a[static_cast<std::size_t>(i)]) = 1;
        w(k + i, n + b[static_cast<std::size_t>(i)]) = -1;
    }
    for (Index i = 0; i < r; ++i) {
        w(2 * k + i, rest[static_cast<std::size_t>(i)]) = 1;
        w(2 * k + r + i, n + rest[static_cast<std::size_t>(i)]) = 1;
    }
    MatrixXd u = w * gamma * w.transpose();
    return schur_complement<MatrixXd, SingularCollapse>(u, 2 * k, "collapsed EPR block is singular");
}

MatrixXd build_gmps_ring(const GaussianChannel& ch, int N) {
    ch.validate(1e-6);
    if (N < 2) throw DimensionMismatch("a ring needs at least two sites");
    int M = ch.bondCount, Mo = ch.outputModes, K = ch.modes();
    Index local = 2 * K, total = static_cast<Index>(N) * local;
    MatrixXd big = MatrixXd::Zero(total, total);
    for (int i = 0; i < N; ++i) big.block(i * local, i * local, local, local) = ch.cm;
    auto q = [&](int site, int mode) { return static_cast<Index>(site) * local + mode; };
    auto p = [&](int site, int mode) { return static_cast<Index>(site) * local + K + mode; };
    Index na = static_cast<Index>(N) * M, nc = static_cast<Index>(N) * Mo;
    MatrixXd pi = MatrixXd::Zero(2 * na + 2 * nc, total);
    for (int i = 0; i < N; ++i) {
        int prev = (i + N - 1) % N;
        for (int k = 0; k < M; ++k) {
            Index row = static_cast<Index>(i) * M + k;
            pi(row, q(i, k)) += 1;
            pi(row, q(prev, M + k)) += 1;
            pi(na + row, p(i, k)) += 1;
            pi(na + row, p(prev, M + k)) -= 1;
        }
        for (int k = 0; k < Mo; ++k) {
            Index row = static_cast<Index>(i) * Mo + k;
            pi(2 * na + row, q(i, 2 * M + k)) = 1;
            pi(2 * na + nc + row, p(i, 2 * M + k)) = 1;
        }
    }
    MatrixXd u = pi * big * pi.transpose();
    return schur_complement<MatrixXd, SingularCollapse>(u, 2 * na, "collapsed bond block is singular (critical GMPS)");
}

MatrixXd build_gmps_ring_sequential(const GaussianChannel& ch, int N) {
    ch.validate(1e-6);
    if (N < 2) throw DimensionMismatch("a ring needs at least two sites");
    int M = ch.bondCount, K = ch.modes();
    MatrixXd g = ch.cm;
    for (int i = 1; i < N; ++i) g = direct_sum(g, ch.cm);
    // label[j] = original global mode of current mode j
    std::vector<int> label(static_cast<std::size_t>(N * K));
    for (int j = 0; j < N * K; ++j) label[static_cast<std::size_t>(j)] = j;
    auto find = [&](int global) {
        return static_cast<int>(std::find(label.begin(), label.end(), global) - label.begin());
    };
    for (int i = 0; i < N; ++i) {
        int next = (i + 1) % N;
        std::vector<int> a, b;
        for (int k = 0; k < M; ++k) {
            a.push_back(find(next * K + k));
            b.push_back(find(i * K + M + k));
        }
        if (a.empty()) continue;
        g = epr_measure(g, a, b);
        std::vector<int> kept;
        for (int j = 0; j < static_cast<int>(label.size()); ++j)
            if (std::find(a.begin(), a.end(), j) == a.end() && std::find(b.begin(), b.end(), j) == b.end())
                kept.push_back(label[static_cast<std::size_t>(j)]);
        label = kept;
    }
    return g;
}

Eigen::MatrixXcd gmps_fourier(const GaussianChannel& ch, double phi) {
    ch.validate(1e-6);
    int M = ch.bondCount, K = ch.modes();
    std::vector<int> ab, c;
    for (int i = 0; i < K; ++i) (i < 2 * M ? ab : c).push_back(i);
    auto iab = mode_coordinates(ab, K), ic = mode_coordinates(c, K);
    Eigen::MatrixXcd gab = submatrix(ch.cm, iab, iab).cast<Complex>();
    Eigen::MatrixXcd gcab = submatrix(ch.cm, ic, iab).cast<Complex>();
    Eigen::MatrixXcd gc = submatrix(ch.cm, ic, ic).cast<Complex>();
    if (M == 0) return gc;
    // Lambda maps (q_A q_B p_A p_B) to (q_A' p_A'); the shift contributes e^{-i phi}
    Complex e = std::exp(Complex(0, -phi));
    Eigen::MatrixXcd lam = Eigen::MatrixXcd::Zero(2 * M, 4 * M);
    for (int k = 0; k < M; ++k) {
        lam(k, k) = 1;
        lam(k, M + k) = e;
        lam(M + k, 2 * M + k) = 1;
        lam(M + k, 3 * M + k) = -e;
    }
    Eigen::MatrixXcd den = lam * gab * lam.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (den + den.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().cwiseAbs().minCoeff() <= 1e-10)
        throw SingularAtPhi("Lambda Gamma_AB Lambda^dagger is singular at phi = " + std::to_string(phi));
    Eigen::MatrixXcd x = gcab * lam.adjoint();
    Eigen::MatrixXcd out = gc - x * den.partialPivLu().solve(x.adjoint());
    return 0.5 * (out + out.adjoint());
}

int TrigRationalState::degree() const {
    int L = 0;
    for (const auto* v : {&p, &q, &r, &d}) L = std::max(L, poly_degree(*v));
    return L;
}

Eigen::Matrix2d TrigRationalState::evaluate(double x) const {
    double dd = poly_eval(d, x), rr = poly_eval(r, x);
    Eigen::Matrix2d m;
    m << poly_eval(q, x), rr, rr, poly_eval(p, x);
    return m / dd;
}

double purity_residual(const TrigRationalState& s) {
    RealPoly lhs = poly_add(poly_mul(s.p, s.q), poly_mul(s.r, s.r), -1);
    RealPoly d2 = poly_mul(s.d, s.d);
    RealPoly diff = poly_add(lhs, d2, -1);
    double num = 0, den = 0;
    for (double c : diff) num = std::max(num, std::abs(c));
    for (double c : d2) den = std::max(den, std::abs(c));
    return den > 0 ? num / den : std::numeric_limits<double>::infinity();
}

namespace {

struct FitAtDegree {
    TrigRationalState state;
    double sigmaMin = 0, sigmaNext = 0, sigmaMax = 0;
};

FitAtDegree fit_degree(const std::vector<double>& xs, const std::vector<Eigen::Matrix2d>& ys, int L) {
    Index cols = 4 * (L + 1), rows = 3 * static_cast<Index>(xs.size());
    MatrixXd a = MatrixXd::Zero(rows, cols);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double xp = 1;
        Index r0 = 3 * static_cast<Index>(k);
        for (int j = 0; j <= L; ++j, xp *= xs[k]) {
            // unknowns: q, r, p, d blocks
            a(r0, j) = xp;
            a(r0 + 1, (L + 1) + j) = xp;
            a(r0 + 2, 2 * (L + 1) + j) = xp;
            a(r0, 3 * (L + 1) + j) = -ys[k](0, 0) * xp;
            a(r0 + 1, 3 * (L + 1) + j) = -ys[k](0, 1) * xp;
            a(r0 + 2, 3 * (L + 1) + j) = -ys[k](1, 1) * xp;
        }
    }
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    FitAtDegree f;
    f.sigmaMax = sv(0);
    f.sigmaMin = sv(cols - 1);
    f.sigmaNext = cols > 1 ? sv(cols - 2) : sv(0);
    Eigen::VectorXd v = svd.matrixV().col(cols - 1);
    auto part = [&](int b) {
        RealPoly out(static_cast<std::size_t>(L + 1));
        for (int j = 0; j <= L; ++j) out[static_cast<std::size_t>(j)] = v(b * (L + 1) + j);
        return out;
    };
    f.state.q = part(0);
    f.state.r = part(1);
    f.state.p = part(2);
    f.state.d = part(3);
    double d1 = poly_eval(f.state.d, 1.0);
    if (d1 != 0)
        for (auto* poly : {&f.state.p, &f.state.q, &f.state.r, &f.state.d})
            for (double& c : *poly) c /= d1;
    return f;
}

void trim_state(TrigRationalState& s) {
    double m = 0;
    for (const auto* v : {&s.p, &s.q, &s.r, &s.d})
        for (double c : *v) m = std::max(m, std::abs(c));
    for (auto* v : {&s.p, &s.q, &s.r, &s.d}) {
        for (double& c : *v)
            if (std::abs(c) <= 1e-13 * m) c = 0;
        while (v->size() > 1 && v->back() == 0) v->pop_back();
    }
}

}  // namespace

RationalFitReport rational_from_samples(const std::function<Eigen::Matrix2d(double phi)>& symbol,
                                        const RationalFitOptions& opt) {
    int Lmax = opt.maxDegree >= 0 ? opt.maxDegree : 8;
    int K = 4 * Lmax + 8;
    std::vector<double> xs;
    std::vector<Eigen::Matrix2d> ys;
    for (int k = 0; k < K; ++k) {
        double phi = std::numbers::pi * (2 * k + 1) / (2.0 * K);
        xs.push_back(std::cos(phi));
        ys.push_back(symbol(phi));
    }
    constexpr int dense = 257;
    std::vector<Eigen::Matrix2d> check(dense);
    double scale = 0;
    for (int k = 0; k < dense; ++k) {
        check[static_cast<std::size_t>(k)] = symbol(std::numbers::pi * k / (dense - 1));
        scale = std::max(scale, check[static_cast<std::size_t>(k)].cwiseAbs().maxCoeff());
    }
    auto reconstruction = [&](const TrigRationalState& s) {
        double err = 0;
        for (int k = 0; k < dense; ++k) {
            Eigen::Matrix2d m = s.evaluate(std::cos(std::numbers::pi * k / (dense - 1)));
            double e = (m - check[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff();
            err = std::max(err, std::isfinite(e) ? e : std::numeric_limits<double>::infinity());
        }
        return err / scale;
    };
    double lastError = 0;
    for (int L = opt.fixedDegree ? Lmax : 0; L <= Lmax; ++L) {
        FitAtDegree f = fit_degree(xs, ys, L);
        RationalFitReport rep;
        rep.state = f.state;
        rep.reconstructionError = reconstruction(f.state);
        rep.singularGap = f.sigmaNext > 0 ? f.sigmaMin / f.sigmaNext : 1;
        lastError = rep.reconstructionError;
        if (!opt.fixedDegree && rep.reconstructionError > opt.reconstructionTol) continue;
        if (f.sigmaNext <= 1e-9 * f.sigmaMax)
            throw RankDeficientSampling("sampling system has a multi-dimensional null space at degree " + std::to_string(L));
        trim_state(rep.state);
        rep.purityResidual = purity_residual(rep.state);
        if (!(rep.purityResidual <= opt.purityTol))
            throw PurityViolation("pq - r^2 - d^2 residual " + std::to_string(rep.purityResidual) + " at degree " +
                                  std::to_string(L));
        return rep;
    }
    throw PurityViolation("no trig-rational representation of degree <= " + std::to_string(Lmax) +
                          " (reconstruction error " + std::to_string(lastError) + ")");
}

RationalFitReport gmps_to_rational_report(const GaussianChannel& ch, const RationalFitOptions& opt_in) {
    ch.validate();
    if (ch.outputModes != 1) throw DimensionMismatch("rational representation needs a single output mode");
    RationalFitOptions opt = opt_in;
    if (opt.maxDegree < 0) opt.maxDegree = 2 * ch.bondCount + 1;
    auto symbol = [&](double phi) {
        Eigen::MatrixXcd g = gmps_fourier(ch, phi);
        if (g.imag().cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, g.real().cwiseAbs().maxCoeff()))
            throw PurityViolation("gamma-hat is not real; the state lacks reflection symmetry");
        return Eigen::Matrix2d(g.real());
    };
    return rational_from_samples(symbol, opt);
}

TrigRationalState gmps_to_rational(const GaussianChannel& ch, const RationalFitOptions& opt) {
    return gmps_to_rational_report(ch, opt).state;
}

namespace {

// Taylor coefficients of p(z0 + t) up to order k, by repeated synthetic division
std::vector<Complex> taylor_shift(const ComplexPoly& p, Complex z0, int k) {
    std::vector<Complex> c(p.begin(), p.end()), out;
    for (int j = 0; j <= k; ++j) {
        if (c.empty()) {
            out.emplace_back(0, 0);
            continue;
        }
        std::vector<Complex> q(c.size() - 1);
        Complex acc = c.back();
        for (std::size_t i = c.size() - 1; i-- > 0;) {
            q[i] = acc;
            acc = c[i] + z0 * acc;
        }
        out.push_back(acc);
        c = std::move(q);
    }
    return out;
}

std::vector<Complex> series_mul(const std::vector<Complex>& a, const std::vector<Complex>& b, int k) {
    std::vector<Complex> c(static_cast<std::size_t>(k + 1), Complex(0, 0));
    for (int i = 0; i <= k && i < static_cast<int>(a.size()); ++i)
        for (int j = 0; i + j <= k && j < static_cast<int>(b.size()); ++j)
            c[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    return c;
}

struct ResidueSetup {
    ComplexPoly s, d;
    int shift = 0;  // integrand s~ z^{n - 1 + shift} / d~
    std::vector<RootCluster> roots;
    std::vector<std::size_t> inside;  // indices into roots
};

std::vector<RootCluster> denominator_roots(const RealPoly& den) {
    if (den.size() < 2) return {};
    auto roots = cluster_roots(poly_roots(joukowski(den)), 1e-6);
    for (const auto& c : roots)
        if (std::abs(std::abs(c.z) - 1) <= 1e-7) throw CriticalDenominator("denominator has a zero on the unit circle");
    return roots;
}

ResidueSetup residue_setup(const TrigRationalState& st, RationalElement e) {
    const RealPoly& num_raw = e == RationalElement::q ? st.q : e == RationalElement::p ? st.p : st.r;
    RealPoly num = poly_trim(num_raw, 1e-14), den = poly_trim(st.d, 1e-14);
    if (den.empty()) throw CriticalDenominator("denominator vanishes identically");
    ResidueSetup rs;
    if (num.empty()) return rs;
    int Ls = static_cast<int>(num.size()) - 1, Ld = static_cast<int>(den.size()) - 1;
    rs.s = joukowski(num);
    rs.d = joukowski(den);
    rs.shift = Ld - Ls;
    rs.roots = denominator_roots(den);
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
        if (std::abs(rs.roots[i].z) < 1) rs.inside.push_back(i);
    return rs;
}

double residue_sum(const ResidueSetup& rs, int n) {
    if (rs.s.empty()) return 0;
    int m = n - 1 + rs.shift;
    Complex total(0, 0);
    Complex lead = rs.d.back();
    for (std::size_t idx : rs.inside) {
        const RootCluster& root = rs.roots[idx];
        int nu = root.multiplicity, k = nu - 1;
        Complex z0 = root.z;
        std::vector<Complex> f = taylor_shift(rs.s, z0, k);
        // (z0 + t)^m = z0^m (1 + t/z0)^m
        std::vector<Complex> zm(static_cast<std::size_t>(k + 1));
        Complex binom(1, 0), base = std::pow(z0, m);
        for (int j = 0; j <= k; ++j) {
            zm[static_cast<std::size_t>(j)] = base * binom / std::pow(z0, j);
            binom *= static_cast<double>(m - j) / static_cast<double>(j + 1);
        }
        f = series_mul(f, zm, k);
        for (std::size_t j = 0; j < rs.roots.size(); ++j) {
            if (j == idx) continue;
            const RootCluster& other = rs.roots[j];
            Complex a = z0 - other.z;
            std::vector<Complex> inv(static_cast<std::size_t>(k + 1));
            for (int j = 0; j <= k; ++j) inv[static_cast<std::size_t>(j)] = std::pow(-1.0, j) / std::pow(a, j + 1);
            for (int v = 0; v < other.multiplicity; ++v) f = series_mul(f, inv, k);
        }
        total += f[static_cast<std::size_t>(k)] / lead;
    }
    if (m < 0) {
        // pole at the origin: coefficient of z^{-m-1} in s~/d~
        int k = -m - 1;
        std::vector<Complex> q(static_cast<std::size_t>(k + 1), Complex(0, 0));
        for (int j = 0; j <= k; ++j) {
            Complex acc = j < static_cast<int>(rs.s.size()) ? rs.s[static_cast<std::size_t>(j)] : Complex(0, 0);
            for (int i = 1; i <= j && i < static_cast<int>(rs.d.size()); ++i)
                acc -= rs.d[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(j - i)];
            q[static_cast<std::size_t>(j)] = acc / rs.d[0];
        }
        total += q[static_cast<std::size_t>(k)];
    }
    return total.real();
}

}  // namespace

RationalCorrelations rational_correlations(const TrigRationalState& s, RationalElement e, int nMax) {
    ResidueSetup rs = residue_setup(s, e);
    RationalCorrelations out;
    for (int n = 0; n <= nMax; ++n) out.values.push_back(residue_sum(rs, n));
    // the correlation length comes from the denominator zeros
    for (const auto& c : denominator_roots(poly_trim(s.d, 1e-14)))
        if (std::abs(c.z) < 1 && std::abs(c.z) > std::abs(out.dominantRoot)) out.dominantRoot = c.z;
    out.xi = std::abs(out.dominantRoot) > 0 ? -1 / std::log(std::abs(out.dominantRoot)) : 0;
    return out;
}

double rational_correlation(const TrigRationalState& s, RationalElement e, int n) {
    return residue_sum(residue_setup(s, e), std::abs(n));
}

CouplingStencil parent_hamiltonian(const TrigRationalState& s) {
    double res = purity_residual(s);
    if (!(res <= 1e-7)) throw PurityViolation("pq - r^2 = d^2 fails with residual " + std::to_string(res));
    CouplingStencil h;
    h.dimension = 1;
    auto fill = [](BlockStencil& b, const RealPoly& poly, double sign) {
        auto a = monomial_to_cosine(poly);
        for (std::size_t m = 0; m < a.size(); ++m) {
            if (a[m] == 0) continue;
            int k = static_cast<int>(m);
            if (m == 0)
                b.entries[{0}] = sign * a[0];
            else {
                b.entries[{k}] = sign * a[m] / 2;
                b.entries[{-k}] = sign * a[m] / 2;
            }
        }
    };
    fill(h.Q, s.p, 1);
    fill(h.P, s.q, 1);
    fill(h.QP, s.r, -1);
    return h;
}

nlohmann::json to_json(const GaussianChannel& ch) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < ch.cm.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(ch.cm.cols()));
        for (Index j = 0; j < ch.cm.cols(); ++j) row[static_cast<std::size_t>(j)] = ch.cm(i, j);
        rows.push_back(row);
    }
    return {{"bondCount", ch.bondCount}, {"outputModes", ch.outputModes}, {"cm", rows}};
}

GaussianChannel channel_from_json(const nlohmann::json& j) {
    GaussianChannel ch;
    try {
        ch.bondCount = j.at("bondCount").get<int>();
        ch.outputModes = j.at("outputModes").get<int>();
        auto rows = j.at("cm").get<std::vector<std::vector<double>>>();
        ch.cm.resize(static_cast<Index>(rows.size()), static_cast<Index>(rows.size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw DimensionMismatch("channel CM is not square");
            for (std::size_t k = 0; k < rows.size(); ++k) ch.cm(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k];
        }
    } catch (const nlohmann::json::exception& e) {
        throw DimensionMismatch(std::string("malformed channel document: ") + e.what());
    }
    ch.validate();
    return ch;
}

nlohmann::json to_json(const TrigRationalState& s) { return {{"p", s.p}, {"q", s.q}, {"r", s.r}, {"d", s.d}}; }

TrigRationalState rational_from_json(const nlohmann::json& j) {
    TrigRationalState s;
    try {
        s.p = j.at("p").get<RealPoly>();
        s.q = j.at("q").get<RealPoly>();
        s.r = j.value("r", RealPoly{0.0});
        s.d = j.at("d").get<RealPoly>();
    } catch (const nlohmann::json::exception& e) {
        throw DimensionMismatch(std::string("malformed rational state document: ") + e.what());
    }
    return s;
}

}  // namespace harmlat
