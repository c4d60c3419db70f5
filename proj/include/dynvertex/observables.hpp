#pragma once
// The q-moment identity of the dynamical q-Hahn boson model and its partial exclusion limit,
// checked by Monte Carlo, by exact enumeration and by contour quadrature.

#include <optional>
#include <string>
#include <vector>

#include "dynvertex/models.hpp"

namespace dv {

struct QHahnObservable {
    int k = 1;
    std::vector<int> x;  // one site per factor
    int N = 1;
    double q = 0.5, delta = 0.0;
    std::vector<double> B;
    std::vector<int> J;
};

ModelSpec model_of(const QHahnObservable& o);
// 1/(1/delta; q)_k prod_j (q^j/delta - q^{-h(x_j)} prod c prod_{i<x_j} b_i)(q^j - q^{h(x_j)}), written
// as prod_j (q^j - delta Y_j)/(delta - q^j) (q^j - q^h) so that delta = 0 is allowed
double lhs_functional(const QHahnObservable& o, const std::function<long(int)>& current);
double lhs_exact(const QHahnObservable& o, std::size_t bound = 200000);
MCEstimate lhs_mc(const QHahnObservable& o, long samples, std::uint64_t seed, EnsembleOptions opt = {});

struct Circle {
    cplx center;
    double radius;
    bool contains(cplx z) const { return std::abs(z - center) < radius; }
};

struct ContourSpec {
    std::vector<Circle> circles;  // circles[j] carries variable j + 1
    int nodes = 512;              // per circle, doubled until converged or 4096
};

struct Quadrature {
    cplx value;
    double error;  // |I(2M) - I(M)|
    int nodes;
};

// Nested real-axis circles for the q-Hahn form: circle 1 innermost, q * circle j containing
// circle i for i < j, so that no circle encloses a cross pole z_i = q z_j. spread in (0, 1)
// moves the edges between the pole cluster and the excluded points, giving distinct
// admissible geometries.
ContourSpec qhahn_contours(const QHahnObservable& o, double spread = 0.5);
// throws ContourInfeasible when the circles miss a required pole or enclose a forbidden one
void check_qhahn_contours(const QHahnObservable& o, const ContourSpec& c);
Quadrature rhs_quadrature(const QHahnObservable& o, const ContourSpec& c);
Quadrature rhs_quadrature(const QHahnObservable& o);

// ---- partial exclusion form ----

// LHS: (gamma)_k^{-1} E prod_j (NJ - (J+1)(x_j + h_shift - 1) - h(x_j + h_shift) - gamma - j)(h(x_j + h_shift) - j)
// RHS: sign (2 pi i)^{-k} oint prod_{i<j} (y_i - y_j)/(y_i - y_j - 1)
//      prod_j ((y_j - J - 1)/y_j)^{x_j + exponent_shift} ((y_j - 1)/(y_j - J - 1))^N dy_j
// with sign = (-1)^k when alternating. The derived convention is {0, -1, true}, equivalently
// {1, 0, true} after x -> x + 1; the printed statement corresponds to {1, 1, false}.
struct PepConvention {
    int h_shift = 0;
    int exponent_shift = -1;
    bool alternating = true;
    std::string label() const;
};

struct PepObservable {
    int k = 1;
    std::vector<int> x;
    int N = 1;
    int J = 1;
    double gamma = 3.0;
    PepConvention conv;
};

double pep_lhs_functional(const PepObservable& o, const std::function<long(int)>& current);
double pep_lhs_exact(const PepObservable& o, std::size_t bound = 200000);
MCEstimate pep_lhs_mc(const PepObservable& o, long samples, std::uint64_t seed, EnsembleOptions opt = {});
// circle j + 1 contains circle i for i < j; feasible for k <= 2
ContourSpec pep_contours(const PepObservable& o, double spread = 0.5);
void check_pep_contours(const PepObservable& o, const ContourSpec& c);
Quadrature pep_rhs_quadrature(const PepObservable& o, const ContourSpec& c);
Quadrature pep_rhs_quadrature(const PepObservable& o);

struct SweepEntry {
    PepConvention conv;
    double max_residual;  // over all sampled cases
};

// Exact enumeration against quadrature for every convention with shifts in [-1, 1] and
// both signs, over small N, x and k; sorted by residual.
std::vector<SweepEntry> pep_offset_sweep(int J, double gamma, int maxN = 3, int maxk = 2);

struct IdentityReport {
    std::optional<double> lhs_exact;
    std::optional<MCEstimate> lhs_mc;
    Quadrature rhs;
    ContourSpec contour;
    std::optional<double> exact_vs_rhs;  // |exact - rhs|
    std::optional<double> mc_sigmas;     // |mc - rhs| / stderr
    std::string convention;              // pep form only
    bool sites_decreasing = true;        // the identity needs x_1 >= x_2 >= ... >= x_k
};

bool weakly_decreasing(const std::vector<int>& x);

// samples = 0 skips Monte Carlo; exact enumeration runs when N <= max_exact_N
IdentityReport identity_check(const QHahnObservable& o, long samples, std::uint64_t seed, int max_exact_N = 6,
                              EnsembleOptions opt = {});
IdentityReport identity_check(const PepObservable& o, long samples, std::uint64_t seed, int max_exact_N = 6,
                              EnsembleOptions opt = {});

} // namespace dv
