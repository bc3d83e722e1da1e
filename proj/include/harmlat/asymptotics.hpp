#pragma once

// Correlation lengths and decay laws of 1D ground-state correlations.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmlat/polynomial.hpp"
#include "harmlat/stencil.hpp"

namespace harmlat {

struct CorrLengthReport {
    double xi = 0;
    Complex zTilde;
    int order = 0;
    std::string classification;  // exp_over_sqrt_n, pure_exp, exp_upper_bound
    std::vector<RootCluster> zeros;
    std::vector<double> cosineCoefficients;  // E^2 = sum_m c_m cos(m phi)
};

// Cosine coefficients c_0..c_L of H_Q H_P - H_QP^2 (symmetrized) by convolution.
std::vector<double> spectral_cosine_coefficients(const CouplingStencil& s);
// z^L g(z) with g(z) = sum_m c_m (z^m + z^-m)/2, ascending in z.
RealPoly spectral_polynomial(const std::vector<double>& cosine);

CorrLengthReport correlation_length_from_zeros(const CouplingStencil& s);

struct GapLawPrediction {
    double gap = 0;
    double effectiveMass = 0;
    double xi = 0;
    double phi = 0;
    double curvature = 0;  // E''(phi)
};

GapLawPrediction gap_law_prediction(const CouplingStencil& s);
// E'' at phi by 5-point differences with Richardson refinement of the step.
double spectral_curvature(const CouplingStencil& s, double phi);

struct FitOptions {
    int nMin = 8;
    int nMax = -1;  // -1: last point
    bool exponential = true;
    bool power = true;
    std::vector<double> logExponents{0.0, 0.5, 1.0};  // s in n^-beta (log n)^s
    bool freeBeta = true;
    std::vector<double> fixedBetas;  // extra candidates with beta pinned
    bool envelope = false;
    double margin = 0.1;
    double noiseFloor = 1e-13;  // relative to max |value| in the window
    int sensitivityMin = 16;
};

struct FitCandidate {
    std::string model;  // exp, power, power_log
    double A = 0, xi = 0, p = 0, beta = 0, s = 0;
    bool betaFixed = false;
    double residual = 0;  // rms in log space
    std::string label() const;
};

struct DecayFit {
    FitCandidate best;
    std::optional<FitCandidate> runnerUp;
    bool ambiguous = false;
    int nMin = 0, nMax = 0, points = 0;
    std::vector<FitCandidate> candidates;  // ascending residual
    std::optional<FitCandidate> sensitivity;  // best model refit on [sensitivityMin, nMax]
    int sensitivityMin = 0;
};

DecayFit fit_decay(const std::vector<double>& n, const std::vector<double>& values, const FitOptions& opt = {});

nlohmann::json to_json(const CorrLengthReport& r);
nlohmann::json to_json(const GapLawPrediction& g);
nlohmann::json to_json(const FitCandidate& c);
nlohmann::json to_json(const DecayFit& f);

}  // namespace harmlat
