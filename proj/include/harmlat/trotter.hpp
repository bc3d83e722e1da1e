#pragma once

// Translation-invariant symplectic generators A = [[-C, P], [-Q, C^T]] on a
// ring of N modes and the Lie-Trotter machinery for simulating them.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "harmlat/stencil.hpp"
#include "harmlat/symplectic.hpp"

namespace harmlat {

// Circulant blocks stored by first column: (k, l) holds v[(k - l) mod N].
struct Generator {
    int N = 0;
    Eigen::VectorXd P, Q, C;

    static Generator zero(int N);
    static Generator local(int N, double p, double q, double c);
    Eigen::MatrixXd assemble() const;
    Generator operator+(const Generator& o) const;
    Generator operator-(const Generator& o) const;
    Generator operator*(double s) const;
    double norm() const;  // max |coefficient|
    bool reflection_symmetric(double tol = 1e-12) const;
};

Eigen::VectorXd circulant_multiply(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd circulant_transpose(const Eigen::VectorXd& a);
Eigen::MatrixXd circulant_matrix(const Eigen::VectorXd& a);
// First column of a dense circulant matrix; NotCirculant otherwise.
Eigen::VectorXd circulant_column(const Eigen::MatrixXd& m, double tol = 1e-12);

// A = sigma H, so P = H_P, Q = H_Q, C = -H_QP^T.
Generator generator_from_hamiltonian(const QuadraticHamiltonian<double>& h);
Generator generator_from_hamiltonian(const CouplingStencil& s, int N);
Generator generator_from_matrix(const Eigen::MatrixXd& A);
QuadraticHamiltonian<double> hamiltonian_from_generator(const Generator& g);

// Blocks of [A, A'] = A A' - A' A.
Generator commutator_blocks(const Generator& a, const Generator& b);

struct TrotterResult {
    Eigen::MatrixXd product;
    Eigen::MatrixXd exact;
    double error = 0;  // spectral norm of the difference
};

double spectral_norm(const Eigen::MatrixXd& m);
Eigen::MatrixXd generator_exp(const Generator& g, double t);
Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, long n);

// (prod_k e^{w_k A_k t / n})^n against e^{sum_k w_k A_k t}
TrotterResult trotter_product(const std::vector<std::pair<Generator, double>>& terms, double t, long n);
// (e^{A/sqrt n} e^{B/sqrt n} e^{-A/sqrt n} e^{-B/sqrt n})^n against e^{[A, B]}
TrotterResult commutator_product(const Generator& a, const Generator& b, long n);

enum class ExtractBlock { P, Q, C };
// Leaves only one block, using commutators with local generators.
Generator extract_block(const Generator& a, ExtractBlock which);

struct Gate {
    std::string id;  // local_P, local_Q, local_C, interaction
    double duration = 0;
};

struct GateSequence {
    std::vector<Gate> gates;  // one Trotter step
    long repetitions = 1;
    double time = 0;
    double achievedError = 0;
    Generator target;
    Generator interaction;
    std::vector<std::pair<long, double>> history;  // (steps, error) per doubling
    std::vector<std::string> basis;  // commutator expressions used
    std::vector<double> coefficients;
};

struct CompileOptions {
    double budget = 1e-3;
    long maxSteps = 1L << 20;
    int maxDepth = 6;
};

GateSequence compile_simulation(const Generator& target, const Generator& interaction, double t,
                                const CompileOptions& opt = {});
// Product of the gate exponentials, repeated.
Eigen::MatrixXd gate_sequence_matrix(const GateSequence& seq);
// Recomputes the error of a sequence against e^{target t}.
double verify_gate_sequence(const GateSequence& seq);

nlohmann::json to_json(const Generator& g);
Generator generator_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GateSequence& s);
GateSequence gate_sequence_from_json(const nlohmann::json& j);

}  // namespace harmlat
