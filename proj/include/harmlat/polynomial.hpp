#pragma once

// Dense polynomials with ascending coefficients.

#include <complex>
#include <vector>

namespace harmlat {

using Complex = std::complex<double>;
using RealPoly = std::vector<double>;
using ComplexPoly = std::vector<Complex>;

struct RootCluster {
    Complex z;
    int multiplicity = 1;
};

double poly_eval(const RealPoly& p, double x);
Complex poly_eval(const ComplexPoly& p, Complex z);
RealPoly poly_mul(const RealPoly& a, const RealPoly& b);
RealPoly poly_add(const RealPoly& a, const RealPoly& b, double scale_b = 1);
ComplexPoly poly_mul(const ComplexPoly& a, const ComplexPoly& b);
// Drops trailing coefficients with |c| <= tol * max|c|.
RealPoly poly_trim(const RealPoly& p, double tol = 0);
int poly_degree(const RealPoly& p, double tol = 0);

// Roots of p (degree >= 1) from the companion matrix, with one Newton step
// per root, kept only when it reduces |p|.
std::vector<Complex> poly_roots(const ComplexPoly& p);
std::vector<Complex> poly_roots(const RealPoly& p);
// Groups roots closer than `radius`; the cluster centre is the mean.
std::vector<RootCluster> cluster_roots(const std::vector<Complex>& roots, double radius = 1e-6);

// sum_k c_k x^k with x = cos(phi)  <->  sum_m a_m cos(m phi)
std::vector<double> monomial_to_cosine(const RealPoly& c);
RealPoly cosine_to_monomial(const std::vector<double>& a);

// z^K p((z + 1/z)/2) as a polynomial in z, K = deg p.
ComplexPoly joukowski(const RealPoly& p);

}  // namespace harmlat
