#include "harmlat/trotter.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <functional>

#include "harmlat/errors.hpp"
#include "harmlat/lattice.hpp"

namespace harmlat {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Generator Generator::zero(int N) {
    Generator g;
    g.N = N;
    g.P = g.Q = g.C = VectorXd::Zero(N);
    return g;
}

Generator Generator::local(int N, double p, double q, double c) {
    Generator g = zero(N);
    g.P(0) = p;
    g.Q(0) = q;
    g.C(0) = c;
    return g;
}

MatrixXd Generator::assemble() const {
    MatrixXd a(2 * N, 2 * N);
    MatrixXd c = circulant_matrix(C);
    a << -c, circulant_matrix(P), -circulant_matrix(Q), c.transpose();
    return a;
}

Generator Generator::operator+(const Generator& o) const {
    Generator g = *this;
    g.P += o.P;
    g.Q += o.Q;
    g.C += o.C;
    return g;
}

Generator Generator::operator-(const Generator& o) const { return *this + o * -1.0; }

Generator Generator::operator*(double s) const {
    Generator g = *this;
    g.P *= s;
    g.Q *= s;
    g.C *= s;
    return g;
}

double Generator::norm() const {
    return std::max({P.cwiseAbs().maxCoeff(), Q.cwiseAbs().maxCoeff(), C.cwiseAbs().maxCoeff()});
}

bool Generator::reflection_symmetric(double tol) const {
    double scale = std::max(1.0, norm());
    for (const VectorXd* v : {&P, &Q, &C})
        if ((*v - circulant_transpose(*v)).cwiseAbs().maxCoeff() > tol * scale) return false;
    return true;
}

VectorXd circulant_multiply(const VectorXd& a, const VectorXd& b) {
    Index n = a.size();
    VectorXd c = VectorXd::Zero(n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) c((i + j) % n) += a(i) * b(j);
    return c;
}

VectorXd circulant_transpose(const VectorXd& a) {
    Index n = a.size();
    VectorXd t(n);
    for (Index k = 0; k < n; ++k) t(k) = a((n - k) % n);
    return t;
}

MatrixXd circulant_matrix(const VectorXd& a) {
    Index n = a.size();
    MatrixXd m(n, n);
    for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < n; ++l) m(k, l) = a(((k - l) % n + n) % n);
    return m;
}

VectorXd circulant_column(const MatrixXd& m, double tol) {
    VectorXd c = m.col(0);
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((circulant_matrix(c) - m).cwiseAbs().maxCoeff() > tol * scale)
        throw NotCirculant("block is not circulant (not translation invariant)");
    return c;
}

Generator generator_from_hamiltonian(const QuadraticHamiltonian<double>& h) {
    Generator g;
    g.N = static_cast<int>(h.modes());
    g.P = circulant_column(h.HP);
    g.Q = circulant_column(h.HQ);
    g.C = -circulant_transpose(circulant_column(h.HQP));
    return g;
}

Generator generator_from_hamiltonian(const CouplingStencil& s, int N) {
    return generator_from_hamiltonian(dense_hamiltonian(s, N));
}

Generator generator_from_matrix(const MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() % 2) throw DimensionMismatch("generator must be 2N x 2N");
    Index n = A.rows() / 2;
    Generator g;
    g.N = static_cast<int>(n);
    g.C = -circulant_column(A.topLeftCorner(n, n));
    g.P = circulant_column(A.topRightCorner(n, n));
    g.Q = -circulant_column(A.bottomLeftCorner(n, n));
    VectorXd ct = circulant_column(A.bottomRightCorner(n, n));
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((ct - circulant_transpose(g.C)).cwiseAbs().maxCoeff() > 1e-12 * scale ||
        (circulant_matrix(g.P) - circulant_matrix(g.P).transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
        (circulant_matrix(g.Q) - circulant_matrix(g.Q).transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw DimensionMismatch("matrix is not of the form [[-C, P], [-Q, C^T]] with symmetric P, Q");
    return g;
}

QuadraticHamiltonian<double> hamiltonian_from_generator(const Generator& g) {
    QuadraticHamiltonian<double> h;
    h.HQ = circulant_matrix(g.Q);
    h.HP = circulant_matrix(g.P);
    h.HQP = -circulant_matrix(g.C).transpose();
    return h;
}

Generator commutator_blocks(const Generator& a, const Generator& b) {
    if (a.N != b.N) throw DimensionMismatch("generators act on rings of different size");
    // circulants commute; the symmetric parts of C enter
    VectorXd cs = a.C + circulant_transpose(a.C), cs2 = b.C + circulant_transpose(b.C);
    Generator g;
    g.N = a.N;
    g.P = circulant_multiply(a.P, cs2) - circulant_multiply(b.P, cs);
    g.Q = circulant_multiply(b.Q, cs) - circulant_multiply(a.Q, cs2);
    g.C = circulant_multiply(a.P, b.Q) - circulant_multiply(b.P, a.Q);
    return g;
}

double spectral_norm(const MatrixXd& m) {
    Eigen::JacobiSVD<MatrixXd> svd(m);
    return svd.singularValues()(0);
}

MatrixXd generator_exp(const Generator& g, double t) { return (g.assemble() * t).exp(); }

MatrixXd matrix_power(const MatrixXd& m, long n) {
    MatrixXd result = MatrixXd::Identity(m.rows(), m.cols()), base = m;
    while (n > 0) {
        if (n & 1) result = result * base;
        base = base * base;
        n >>= 1;
    }
    return result;
}

TrotterResult trotter_product(const std::vector<std::pair<Generator, double>>& terms, double t, long n) {
    if (terms.empty()) throw DimensionMismatch("no generators");
    if (n < 1) throw OutOfRange("step count must be positive");
    int N = terms.front().first.N;
    MatrixXd step = MatrixXd::Identity(2 * N, 2 * N), sum = MatrixXd::Zero(2 * N, 2 * N);
    for (const auto& [g, w] : terms) {
        MatrixXd a = g.assemble();
        step = step * (a * (w * t / static_cast<double>(n))).exp();
        sum += w * a;
    }
    TrotterResult r;
    r.product = matrix_power(step, n);
    r.exact = (sum * t).exp();
    r.error = spectral_norm(r.product - r.exact);
    return r;
}

TrotterResult commutator_product(const Generator& a, const Generator& b, long n) {
    if (n < 1) throw OutOfRange("step count must be positive");
    double s = 1 / std::sqrt(static_cast<double>(n));
    MatrixXd A = a.assemble(), B = b.assemble();
    MatrixXd step = (A * s).exp() * (B * s).exp() * (-A * s).exp() * (-B * s).exp();
    TrotterResult r;
    r.product = matrix_power(step, n);
    r.exact = (A * B - B * A).exp();
    r.error = spectral_norm(r.product - r.exact);
    return r;
}

Generator extract_block(const Generator& a, ExtractBlock which) {
    int N = a.N;
    auto lp = [&](double v) { return Generator::local(N, v, 0, 0); };
    auto lq = [&](double v) { return Generator::local(N, 0, v, 0); };
    auto lc = [&](double v) { return Generator::local(N, 0, 0, v); };
    // [A, C' = 1/2] -> (P, -Q, 0)
    Generator noC = commutator_blocks(a, lc(0.5));
    if (which == ExtractBlock::P) return commutator_blocks(commutator_blocks(noC, lq(1)), lp(-0.5));
    Generator q = commutator_blocks(commutator_blocks(noC, lp(1)), lq(0.5));
    if (which == ExtractBlock::Q) return q;
    Generator p = commutator_blocks(commutator_blocks(noC, lq(1)), lp(-0.5));
    return a - p - q;
}

namespace {

struct Node {
    Generator g;
    std::string leaf;  // non-empty for gates
    int left = -1, right = -1;
    int depth = 0;
    std::string expr;
};

// symmetric circulant coordinates c_0..c_{N/2} of each block
VectorXd coordinates(const Generator& g) {
    int h = g.N / 2;
    VectorXd v(3 * (h + 1));
    int o = 0;
    for (const VectorXd* b : {&g.P, &g.Q, &g.C}) {
        for (int k = 0; k <= h; ++k) v(o + k) = 0.5 * ((*b)(k) + (*b)((g.N - k) % g.N));
        o += h + 1;
    }
    return v;
}

// Nested commutators are realized in `inner` substeps: the inner approximant's
// second-order error does not cancel in the outer group commutator, so without
// substeps the error would only fall like n^{-1/2}.
void realize(const std::vector<Node>& nodes, int idx, double tau, long inner, std::vector<Gate>& out) {
    const Node& n = nodes[static_cast<std::size_t>(idx)];
    if (tau == 0) return;
    if (!n.leaf.empty()) {
        out.push_back({n.leaf, tau});
        return;
    }
    // e^{2a^2 [X, Y]} from G(a) G(-a), G(a) = e^{aX} e^{aY} e^{-aX} e^{-aY}
    int x = tau > 0 ? n.left : n.right, y = tau > 0 ? n.right : n.left;
    double a = std::sqrt(std::abs(tau) / 2);
    auto part = [&](int child, double s) {
        long reps = nodes[static_cast<std::size_t>(child)].leaf.empty() ? inner : 1;
        for (long r = 0; r < reps; ++r) realize(nodes, child, s / static_cast<double>(reps), inner, out);
    };
    for (double s : {a, -a}) {
        part(x, s);
        part(y, s);
        part(x, -s);
        part(y, -s);
    }
}

Generator gate_generator(const std::string& id, const Generator& interaction) {
    int N = interaction.N;
    if (id == "local_P") return Generator::local(N, 1, 0, 0);
    if (id == "local_Q") return Generator::local(N, 0, 1, 0);
    if (id == "local_C") return Generator::local(N, 0, 0, 1);
    if (id == "interaction") return interaction;
    throw DimensionMismatch("unknown gate id " + id);
}

}  // namespace

Eigen::MatrixXd gate_sequence_matrix(const GateSequence& seq) {
    int N = seq.interaction.N;
    std::vector<MatrixXd> gens;
    for (const char* id : {"local_P", "local_Q", "local_C", "interaction"})
        gens.push_back(gate_generator(id, seq.interaction).assemble());
    auto which = [](const std::string& id) {
        return id == "local_P" ? 0 : id == "local_Q" ? 1 : id == "local_C" ? 2 : 3;
    };
    MatrixXd step = MatrixXd::Identity(2 * N, 2 * N);
    for (const auto& g : seq.gates) {
        gate_generator(g.id, seq.interaction);  // validates the id
        step = step * (gens[static_cast<std::size_t>(which(g.id))] * g.duration).exp();
    }
    return matrix_power(step, seq.repetitions);
}

double verify_gate_sequence(const GateSequence& seq) {
    if (seq.target.N != seq.interaction.N) throw DimensionMismatch("target and interaction act on different rings");
    return spectral_norm(gate_sequence_matrix(seq) - generator_exp(seq.target, seq.time));
}

GateSequence compile_simulation(const Generator& target, const Generator& interaction, double t,
                                const CompileOptions& opt) {
    int N = interaction.N;
    if (target.N != N) throw DimensionMismatch("target and interaction act on different rings");
    if (!interaction.reflection_symmetric() || !target.reflection_symmetric())
        throw NotUniversalGateSet("generators must be reflection symmetric (C = C^T)");
    bool nonlocal = false;
    for (const VectorXd* b : {&interaction.P, &interaction.Q, &interaction.C})
        for (int k = 1; k < N; ++k) nonlocal = nonlocal || std::abs((*b)(k)) > 1e-14;
    if (!nonlocal) throw NotUniversalGateSet("interaction is purely local; only local generators are reachable");

    std::vector<Node> nodes;
    for (const char* id : {"local_P", "local_Q", "local_C", "interaction"})
        nodes.push_back({gate_generator(id, interaction), id, -1, -1, 0, id});
    const int leaves = static_cast<int>(nodes.size());

    VectorXd y = coordinates(target);
    Index D = y.size();
    std::vector<int> basis;
    MatrixXd ortho(D, 0);
    auto try_add = [&](int idx) {
        VectorXd v = coordinates(nodes[static_cast<std::size_t>(idx)].g);
        double n0 = v.norm();
        if (n0 <= 1e-12) return false;
        VectorXd w = v;
        for (int pass = 0; pass < 2; ++pass) w -= ortho * (ortho.transpose() * w);
        if (w.norm() <= 1e-9 * n0) return false;
        ortho.conservativeResize(D, ortho.cols() + 1);
        ortho.col(ortho.cols() - 1) = w / w.norm();
        basis.push_back(idx);
        return true;
    };
    auto target_residual = [&]() {
        VectorXd r = y - ortho * (ortho.transpose() * y);
        return r.norm() / std::max(1.0, y.norm());
    };
    for (int i = 0; i < leaves; ++i) try_add(i);
    int depth = 0;
    while (target_residual() > 1e-10 && static_cast<Index>(basis.size()) < D && depth < opt.maxDepth) {
        ++depth;
        std::size_t count = nodes.size();
        for (std::size_t x = 0; x < count && target_residual() > 1e-10; ++x) {
            if (nodes[x].depth != depth - 1) continue;
            for (int l = 0; l < leaves; ++l) {
                Generator g = commutator_blocks(nodes[x].g, nodes[static_cast<std::size_t>(l)].g);
                nodes.push_back({g, "", static_cast<int>(x), l, depth,
                                 "[" + nodes[x].expr + ", " + nodes[static_cast<std::size_t>(l)].expr + "]"});
                if (!try_add(static_cast<int>(nodes.size()) - 1)) nodes.pop_back();
            }
        }
    }
    if (target_residual() > 1e-10)
        throw NotUniversalGateSet("target is outside the span of commutators up to depth " + std::to_string(opt.maxDepth));

    MatrixXd B(D, static_cast<Index>(basis.size()));
    for (std::size_t j = 0; j < basis.size(); ++j)
        B.col(static_cast<Index>(j)) = coordinates(nodes[static_cast<std::size_t>(basis[j])].g);
    VectorXd coef = B.colPivHouseholderQr().solve(y);

    GateSequence seq;
    seq.time = t;
    seq.target = target;
    seq.interaction = interaction;
    std::vector<std::pair<int, double>> terms;
    for (std::size_t j = 0; j < basis.size(); ++j) {
        double c = coef(static_cast<Index>(j));
        if (std::abs(c) <= 1e-12 * std::max(1.0, coef.cwiseAbs().maxCoeff())) continue;
        terms.emplace_back(basis[j], c);
        seq.basis.push_back(nodes[static_cast<std::size_t>(basis[j])].expr);
        seq.coefficients.push_back(c);
    }
    MatrixXd exact = generator_exp(target, t);
    double best = std::numeric_limits<double>::infinity();
    GateSequence best_seq;
    for (long n = 1; n <= opt.maxSteps; n *= 2) {
        GateSequence s = seq;
        s.repetitions = n;
        long inner = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n))));
        for (const auto& [idx, c] : terms) realize(nodes, idx, c * t / static_cast<double>(n), inner, s.gates);
        double err = spectral_norm(gate_sequence_matrix(s) - exact);
        seq.history.emplace_back(n, err);
        if (err < best) {
            best = err;
            best_seq = s;
        }
        if (err <= opt.budget) {
            best_seq.achievedError = err;
            best_seq.history = seq.history;
            return best_seq;
        }
    }
    throw BudgetExceeded("error budget not reached within " + std::to_string(opt.maxSteps) + " Trotter steps", best);
}

nlohmann::json to_json(const Generator& g) {
    auto vec = [](const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    return {{"N", g.N}, {"P", vec(g.P)}, {"Q", vec(g.Q)}, {"C", vec(g.C)}};
}

Generator generator_from_json(const nlohmann::json& j) {
    Generator g;
    try {
        g.N = j.at("N").get<int>();
        auto rd = [&](const char* k) {
            auto v = j.at(k).get<std::vector<double>>();
            if (static_cast<int>(v.size()) != g.N) throw DimensionMismatch(std::string("block ") + k + " has wrong length");
            return VectorXd(Eigen::Map<VectorXd>(v.data(), g.N));
        };
        g.P = rd("P");
        g.Q = rd("Q");
        g.C = rd("C");
    } catch (const nlohmann::json::exception& e) {
        throw DimensionMismatch(std::string("malformed generator document: ") + e.what());
    }
    return g;
}

nlohmann::json to_json(const GateSequence& s) {
    nlohmann::json gates = nlohmann::json::array();
    for (const auto& g : s.gates) gates.push_back({{"id", g.id}, {"duration", g.duration}});
    nlohmann::json hist = nlohmann::json::array();
    for (const auto& [n, e] : s.history) hist.push_back({{"steps", n}, {"error", e}});
    return {{"gates", gates},
            {"repetitions", s.repetitions},
            {"time", s.time},
            {"achievedError", s.achievedError},
            {"target", to_json(s.target)},
            {"interaction", to_json(s.interaction)},
            {"basis", s.basis},
            {"coefficients", s.coefficients},
            {"history", hist}};
}

GateSequence gate_sequence_from_json(const nlohmann::json& j) {
    GateSequence s;
    try {
        for (const auto& g : j.at("gates")) s.gates.push_back({g.at("id").get<std::string>(), g.at("duration").get<double>()});
        s.repetitions = j.value("repetitions", 1L);
        s.time = j.at("time").get<double>();
        s.achievedError = j.value("achievedError", 0.0);
        s.target = generator_from_json(j.at("target"));
        s.interaction = generator_from_json(j.at("interaction"));
    } catch (const nlohmann::json::exception& e) {
        throw DimensionMismatch(std::string("malformed gate sequence document: ") + e.what());
    }
    return s;
}

}  // namespace harmlat
