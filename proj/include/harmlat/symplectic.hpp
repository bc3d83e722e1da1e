#pragma once

// Symplectic linear algebra for quadratic bosonic Hamiltonians
// H = 1/2 R^T H R with R = (Q_1..Q_N, P_1..P_N) (blocked ordering).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "harmlat/errors.hpp"

namespace harmlat {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

enum class Ordering { blocked, interleaved };

template <typename Scalar>
struct SymplecticTolerances {
    Scalar psd = Scalar(1e-10);             // min eigenvalue of H allowed down to -psd
    Scalar pairing = Scalar(1e-8);          // relative +/- pairing of the spectrum of i sigma-form
    Scalar regularization = Scalar(1e-12);  // H + eps * 1 for zero modes
    Scalar kernel = Scalar(1e-10);          // relative threshold for ker H
    Scalar commute = Scalar(1e-9);          // simultaneous diagonalizability
    Scalar singular = Scalar(1e-12);        // lambda_min of E-hat
};

// Index map taking blocked coordinate i to its interleaved position.
inline Eigen::PermutationMatrix<Eigen::Dynamic> interleave_permutation(Index modes) {
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(2 * modes);
    for (Index k = 0; k < modes; ++k) {
        perm.indices()[k] = static_cast<int>(2 * k);
        perm.indices()[modes + k] = static_cast<int>(2 * k + 1);
    }
    return perm;
}

template <class Derived>
MatrixX<typename Derived::Scalar> to_interleaved(const Eigen::MatrixBase<Derived>& m) {
    auto perm = interleave_permutation(m.rows() / 2);
    return perm * m.derived() * perm.transpose();
}

template <class Derived>
MatrixX<typename Derived::Scalar> to_blocked(const Eigen::MatrixBase<Derived>& m) {
    auto perm = interleave_permutation(m.rows() / 2);
    return perm.transpose() * m.derived() * perm;
}

template <typename Scalar = double>
MatrixX<Scalar> symplectic_form(Index modes, Ordering ordering = Ordering::blocked) {
    MatrixX<Scalar> s = MatrixX<Scalar>::Zero(2 * modes, 2 * modes);
    s.topRightCorner(modes, modes).setIdentity();
    s.bottomLeftCorner(modes, modes) = -MatrixX<Scalar>::Identity(modes, modes);
    return ordering == Ordering::blocked ? s : to_interleaved(s);
}

template <typename Scalar = double>
struct QuadraticHamiltonian {
    MatrixX<Scalar> HQ, HP, HQP;

    Index modes() const { return HQ.rows(); }

    MatrixX<Scalar> matrix() const {
        Index n = modes();
        MatrixX<Scalar> h(2 * n, 2 * n);
        h << HQ, HQP, HQP.transpose(), HP;
        return h;
    }

    static QuadraticHamiltonian from_matrix(const MatrixX<Scalar>& h) {
        if (h.rows() != h.cols() || h.rows() % 2 != 0)
            throw DimensionMismatch("Hamiltonian matrix must be square of even size");
        Index n = h.rows() / 2;
        MatrixX<Scalar> sym = (h + h.transpose()) / Scalar(2);
        return {sym.topLeftCorner(n, n), sym.bottomRightCorner(n, n), sym.topRightCorner(n, n)};
    }

    Scalar min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(matrix(), Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }
};

template <typename Scalar = double>
struct CovarianceMatrix {
    MatrixX<Scalar> gamma;
    // divergent[i]: coordinate i carries a zero-mode direction; entries with
    // both coordinates flagged are NaN.
    std::vector<bool> divergent;

    Index modes() const { return gamma.rows() / 2; }
    bool has_divergence() const { return std::find(divergent.begin(), divergent.end(), true) != divergent.end(); }
    bool entry_divergent(Index i, Index j) const {
        return !divergent.empty() && divergent[static_cast<std::size_t>(i)] && divergent[static_cast<std::size_t>(j)];
    }
};

template <typename Scalar = double>
struct SymplecticSpectrum {
    VectorX<Scalar> eps;  // ascending, positive
    Index zeroModes = 0;
};

template <typename Scalar = double>
struct WilliamsonResult {
    MatrixX<Scalar> S;    // S H S^T = normal form, S sigma S^T = sigma
    VectorX<Scalar> eps;  // positive symplectic eigenvalues, one per finite mode
    Index zeroModes = 0;  // modes I..N-1 of the normal form are [[0,0],[0,1]]

    Index modes() const { return S.rows() / 2; }
    MatrixX<Scalar> normal_form() const {
        Index n = modes(), finite = eps.size();
        MatrixX<Scalar> nf = MatrixX<Scalar>::Zero(2 * n, 2 * n);
        for (Index j = 0; j < finite; ++j) nf(j, j) = nf(n + j, n + j) = eps(j);
        for (Index j = finite; j < n; ++j) nf(n + j, n + j) = Scalar(1);
        return nf;
    }
};

template <typename Scalar = double>
struct GroundState {
    CovarianceMatrix<Scalar> cm;
    Scalar E0 = 0;
    Scalar gap = 0;
};

template <typename Scalar = double>
struct CMDiagnostics {
    Scalar minEigenvalue = 0;   // of gamma + i sigma
    Scalar purityResidual = 0;  // ||(gamma sigma)^2 + 1||_inf
    bool valid = false;
    bool pure = false;
};

namespace detail {

template <typename Scalar>
struct KernelInfo {
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eig;
    MatrixX<Scalar> kernel;  // orthonormal basis of ker H
    Scalar scale = 1;
};

template <typename Scalar>
KernelInfo<Scalar> analyze_kernel(const MatrixX<Scalar>& h, const SymplecticTolerances<Scalar>& tol) {
    KernelInfo<Scalar> info;
    if ((h - h.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * std::max(Scalar(1), h.cwiseAbs().maxCoeff()))
        throw NotPositiveSemidefinite("Hamiltonian matrix is not symmetric");
    info.eig.compute(h);
    const auto& lam = info.eig.eigenvalues();
    if (lam(0) < -tol.psd)
        throw NotPositiveSemidefinite("minimum eigenvalue " + std::to_string(static_cast<double>(lam(0))));
    info.scale = std::max(Scalar(1), lam.cwiseAbs().maxCoeff());
    Index k = 0;
    while (k < lam.size() && lam(k) <= tol.kernel * info.scale) ++k;
    info.kernel = info.eig.eigenvectors().leftCols(k);
    if (k > 0) {
        Index n = h.rows() / 2;
        MatrixX<Scalar> gram = info.kernel.transpose() * symplectic_form<Scalar>(n) * info.kernel;
        if (gram.cwiseAbs().maxCoeff() > Scalar(1e-8))
            throw IrrelevantModes("ker H is not isotropic: the Hamiltonian contains modes with vanishing Q and P terms");
    }
    return info;
}

// Williamson form from an eigendecomposition of H with eigenvalues lam (>0).
template <typename Scalar>
WilliamsonResult<Scalar> williamson_from_eigen(const MatrixX<Scalar>& vecs, const VectorX<Scalar>& lam,
                                               const SymplecticTolerances<Scalar>& tol) {
    using Complex = std::complex<Scalar>;
    Index dim = vecs.rows(), n = dim / 2;
    MatrixX<Scalar> hs = vecs * lam.cwiseSqrt().asDiagonal() * vecs.transpose();
    MatrixX<Scalar> hsi = vecs * lam.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
    MatrixX<Scalar> a = hs * symplectic_form<Scalar>(n) * hs;
    a = (a - a.transpose()) / Scalar(2);
    MatrixX<Complex> ia = Complex(0, 1) * a.template cast<Complex>();
    Eigen::SelfAdjointEigenSolver<MatrixX<Complex>> es(ia);
    const auto& mu = es.eigenvalues();  // ascending: -eps_max .. -eps_min, eps_min .. eps_max
    for (Index j = 0; j < n; ++j) {
        Scalar pos = mu(n + j), neg = -mu(n - 1 - j);
        if (pos <= 0 || std::abs(pos - neg) > tol.pairing * std::max(Scalar(1), pos))
            throw PairingFailure("symplectic spectrum does not pair at index " + std::to_string(j));
    }
    WilliamsonResult<Scalar> w;
    w.eps = mu.tail(n);
    MatrixX<Scalar> o(dim, dim);
    for (Index j = 0; j < n; ++j) {
        // conj(v) spans the -eps space, so v^T v = 0 and x, y are orthonormal
        VectorX<Complex> v = es.eigenvectors().col(n + j);
        VectorX<Scalar> x = std::sqrt(Scalar(2)) * v.real(), y = std::sqrt(Scalar(2)) * v.imag();
        x.normalize();
        y -= y.dot(x) * x;
        y.normalize();
        // A x = eps y, A y = -eps x for i A v = eps v with v = (x + i y)/sqrt 2
        if (y.dot(a * x) < 0) y = -y;
        o.col(j) = y;
        o.col(n + j) = x;
    }
    VectorX<Scalar> d(dim);
    d << w.eps.cwiseSqrt(), w.eps.cwiseSqrt();
    w.S = d.asDiagonal() * o.transpose() * hsi;
    return w;
}

}  // namespace detail

// Symplectic eigenvalues (ascending, each once) and zero-mode count.
template <typename Scalar>
SymplecticSpectrum<Scalar> symplectic_eigenvalues(const QuadraticHamiltonian<Scalar>& ham,
                                                  const SymplecticTolerances<Scalar>& tol = {});

template <typename Scalar>
WilliamsonResult<Scalar> williamson(const QuadraticHamiltonian<Scalar>& ham, const SymplecticTolerances<Scalar>& tol = {}) {
    MatrixX<Scalar> h = ham.matrix();
    auto info = detail::analyze_kernel(h, tol);
    Index n = ham.modes(), zero = info.kernel.cols();
    VectorX<Scalar> lam = info.eig.eigenvalues();
    if (zero == 0) return detail::williamson_from_eigen(info.eig.eigenvectors(), lam, tol);

    // Same eigenvectors as H + eps 1; kernel eigenvalues are set to eps exactly.
    Scalar reg = tol.regularization * info.scale;
    for (Index k = 0; k < lam.size(); ++k) lam(k) = (k < zero ? Scalar(0) : std::max(lam(k), Scalar(0))) + reg;
    auto w = detail::williamson_from_eigen(info.eig.eigenvectors(), lam, tol);
    // Regularized zero modes are the smallest eps; squeeze them into [[0,0],[0,1]]
    // and move them behind the finite modes.
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = (j + zero) % n;
    MatrixX<Scalar> s(2 * n, 2 * n);
    VectorX<Scalar> eps(n - zero);
    for (Index j = 0; j < n; ++j) {
        Index src = order[static_cast<std::size_t>(j)];
        if (j < n - zero) {
            s.row(j) = w.S.row(src);
            s.row(n + j) = w.S.row(n + src);
            eps(j) = w.eps(src);
        } else {
            // the degenerate pair may come rotated; align its Q row with ker H
            Scalar e = w.eps(src);
            VectorX<Scalar> rq = w.S.row(src).transpose(), rp = w.S.row(n + src).transpose();
            Eigen::Matrix<Scalar, 2, 2> b;
            VectorX<Scalar> kq = info.kernel.transpose() * rq, kp = info.kernel.transpose() * rp;
            b << kq.squaredNorm(), kq.dot(kp), kq.dot(kp), kp.squaredNorm();
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 2, 2>> rot(b);
            Scalar c = rot.eigenvectors()(0, 1), sn = rot.eigenvectors()(1, 1);
            s.row(j) = std::sqrt(e) * (c * rq + sn * rp).transpose();
            s.row(n + j) = (-sn * rq + c * rp).transpose() / std::sqrt(e);
        }
    }
    // the 1/sqrt(eps) rows carry amplified roundoff: symplectic Gram-Schmidt against the earlier pairs
    MatrixX<Scalar> sigma = symplectic_form<Scalar>(n);
    for (Index j = n - zero; j < n; ++j) {
        VectorX<Scalar> u = s.row(j).transpose(), v = s.row(n + j).transpose();
        for (Index k = 0; k < j; ++k) {
            VectorX<Scalar> qk = s.row(k).transpose(), pk = s.row(n + k).transpose();
            u += -u.dot(sigma * pk) * qk + u.dot(sigma * qk) * pk;
            v += -v.dot(sigma * pk) * qk + v.dot(sigma * qk) * pk;
        }
        v /= u.dot(sigma * v);
        s.row(j) = u.transpose();
        s.row(n + j) = v.transpose();
    }
    WilliamsonResult<Scalar> out;
    out.S = std::move(s);
    out.eps = std::move(eps);
    out.zeroModes = zero;
    return out;
}

template <typename Scalar>
SymplecticSpectrum<Scalar> symplectic_eigenvalues(const QuadraticHamiltonian<Scalar>& ham,
                                                  const SymplecticTolerances<Scalar>& tol) {
    auto w = williamson(ham, tol);
    return {w.eps, w.zeroModes};
}

template <typename Scalar>
GroundState<Scalar> ground_state(const QuadraticHamiltonian<Scalar>& ham, const SymplecticTolerances<Scalar>& tol = {}) {
    MatrixX<Scalar> h = ham.matrix();
    auto info = detail::analyze_kernel(h, tol);
    GroundState<Scalar> gs;
    Index n = ham.modes();
    if (info.kernel.cols() == 0) {
        auto w = detail::williamson_from_eigen(info.eig.eigenvectors(), info.eig.eigenvalues(), tol);
        gs.cm.gamma = w.S.transpose() * w.S;
        gs.cm.gamma = (gs.cm.gamma + gs.cm.gamma.transpose()) / Scalar(2);
        gs.cm.divergent.assign(static_cast<std::size_t>(2 * n), false);
        gs.E0 = w.eps.sum() / Scalar(2);
        gs.gap = w.eps.minCoeff();
        return gs;
    }
    // Critical: finite entries from the regularized problem, divergent ones flagged.
    Index zero = info.kernel.cols();
    VectorX<Scalar> lam = info.eig.eigenvalues();
    Scalar reg = tol.regularization * info.scale;
    for (Index k = 0; k < lam.size(); ++k) lam(k) = (k < zero ? Scalar(0) : std::max(lam(k), Scalar(0))) + reg;
    auto w = detail::williamson_from_eigen(info.eig.eigenvectors(), lam, tol);
    gs.cm.gamma = w.S.transpose() * w.S;
    gs.cm.divergent.assign(static_cast<std::size_t>(2 * n), false);
    for (Index i = 0; i < 2 * n; ++i)
        gs.cm.divergent[static_cast<std::size_t>(i)] = info.kernel.row(i).cwiseAbs().maxCoeff() > Scalar(1e-8);
    for (Index i = 0; i < 2 * n; ++i)
        for (Index j = 0; j < 2 * n; ++j)
            if (gs.cm.entry_divergent(i, j)) gs.cm.gamma(i, j) = std::numeric_limits<Scalar>::quiet_NaN();
    gs.E0 = w.eps.tail(n - zero).sum() / Scalar(2);
    gs.gap = 0;
    return gs;
}

template <typename Scalar>
GroundState<Scalar> ground_state_simultaneous(const QuadraticHamiltonian<Scalar>& ham,
                                              const SymplecticTolerances<Scalar>& tol = {}) {
    const auto &hq = ham.HQ, &hp = ham.HP, &hqp = ham.HQP;
    Index n = ham.modes();
    Scalar scale = std::max({Scalar(1), hq.cwiseAbs().maxCoeff(), hp.cwiseAbs().maxCoeff(), hqp.cwiseAbs().maxCoeff()});
    auto comm = [&](const MatrixX<Scalar>& a, const MatrixX<Scalar>& b) {
        return (a * b - b * a).cwiseAbs().maxCoeff() / (scale * scale);
    };
    if ((hqp - hqp.transpose()).cwiseAbs().maxCoeff() > tol.commute * scale)
        throw NotSimultaneouslyDiagonalizable("H_QP is not symmetric");
    if (comm(hq, hp) > tol.commute || comm(hq, hqp) > tol.commute || comm(hp, hqp) > tol.commute)
        throw NotSimultaneouslyDiagonalizable("blocks do not commute");

    MatrixX<Scalar> e2 = hq * hp - hqp * hqp;
    e2 = (e2 + e2.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> es(e2);
    // eigenvalues of E^2 at roundoff level are zeros; their square roots would not be
    Scalar floor = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), es.eigenvalues().cwiseAbs().maxCoeff());
    VectorX<Scalar> lam = es.eigenvalues().unaryExpr([&](Scalar v) { return v <= floor ? Scalar(0) : std::sqrt(v); });
    const MatrixX<Scalar>& u = es.eigenvectors();
    GroundState<Scalar> gs;
    gs.cm.divergent.assign(static_cast<std::size_t>(2 * n), false);
    gs.E0 = lam.sum() / Scalar(2);
    gs.gap = lam.minCoeff();
    gs.cm.gamma = MatrixX<Scalar>::Zero(2 * n, 2 * n);
    if (lam.minCoeff() >= tol.singular) {
        MatrixX<Scalar> einv = u * lam.cwiseInverse().asDiagonal() * u.transpose();
        MatrixX<Scalar> gq = einv * hp, gp = einv * hq, gqp = -einv * hqp;
        gs.cm.gamma << (gq + gq.transpose()) / 2, (gqp + gqp.transpose()) / 2, (gqp + gqp.transpose()) / 2,
            (gp + gp.transpose()) / 2;
        return gs;
    }
    if (hqp.cwiseAbs().maxCoeff() > tol.commute * scale)
        throw SingularSpectralMatrix("lambda_min(E) = " + std::to_string(static_cast<double>(lam.minCoeff())));
    // H_QP = 0: gamma_P = sqrt(H_Q) H_P^{-1/2} stays finite; Q block diverges on ker E.
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> ep(hp);
    if (ep.eigenvalues()(0) < tol.singular)
        throw SingularSpectralMatrix("H_P is singular together with E");
    Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> eq(hq);
    MatrixX<Scalar> sq = eq.eigenvectors() * eq.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal() *
                         eq.eigenvectors().transpose();
    MatrixX<Scalar> hpi = ep.eigenvectors() * ep.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                          ep.eigenvectors().transpose();
    MatrixX<Scalar> gp = sq * hpi;
    gs.cm.gamma.bottomRightCorner(n, n) = (gp + gp.transpose()) / 2;
    gs.gap = 0;
    Index zero = 0;
    while (zero < n && lam(zero) < tol.singular) ++zero;
    MatrixX<Scalar> ker = u.leftCols(zero);
    // Q block: finite modes contribute H_P / E; zero modes diverge.
    VectorX<Scalar> inv = VectorX<Scalar>::Zero(n);
    for (Index k = zero; k < n; ++k) inv(k) = Scalar(1) / lam(k);
    MatrixX<Scalar> gq = u * inv.asDiagonal() * u.transpose() * hp;
    gs.cm.gamma.topLeftCorner(n, n) = (gq + gq.transpose()) / 2;
    for (Index i = 0; i < n; ++i) gs.cm.divergent[static_cast<std::size_t>(i)] = ker.row(i).cwiseAbs().maxCoeff() > Scalar(1e-8);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            if (gs.cm.entry_divergent(i, j)) gs.cm.gamma(i, j) = std::numeric_limits<Scalar>::quiet_NaN();
    return gs;
}

template <typename Scalar>
CMDiagnostics<Scalar> validate_cm(const MatrixX<Scalar>& gamma, Scalar tol = Scalar(1e-8)) {
    using Complex = std::complex<Scalar>;
    Index n = gamma.rows() / 2;
    MatrixX<Scalar> sigma = symplectic_form<Scalar>(n);
    MatrixX<Complex> m = gamma.template cast<Complex>() + Complex(0, 1) * sigma.template cast<Complex>();
    Eigen::SelfAdjointEigenSolver<MatrixX<Complex>> es(m, Eigen::EigenvaluesOnly);
    CMDiagnostics<Scalar> d;
    d.minEigenvalue = es.eigenvalues()(0);
    MatrixX<Scalar> gs = gamma * sigma;
    d.purityResidual = (gs * gs + MatrixX<Scalar>::Identity(2 * n, 2 * n)).cwiseAbs().rowwise().sum().maxCoeff();
    d.valid = d.minEigenvalue >= -tol;
    d.pure = d.valid && d.purityResidual <= tol;
    return d;
}

// Lowest-energy tr[gamma H]/4 of a covariance matrix.
template <typename Scalar>
Scalar energy(const MatrixX<Scalar>& gamma, const QuadraticHamiltonian<Scalar>& ham) {
    return (gamma.cwiseProduct(ham.matrix())).sum() / Scalar(4);
}

}  // namespace harmlat
