#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "dynvertex/errors.hpp"

namespace dv {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

enum class Mode { elliptic, trigonometric };

// Immutable evaluation context. q = exp(-4 pi i eta) is fixed at construction.
class EllipticContext {
public:
    static EllipticContext trigonometric(cplx eta, double series_tol = 1e-17, int max_terms = 64);
    static EllipticContext elliptic(cplx tau, cplx eta, double series_tol = 1e-17, int max_terms = 64);

    Mode mode() const { return mode_; }
    bool is_trig() const { return mode_ == Mode::trigonometric; }
    cplx tau() const { return tau_; }
    cplx eta() const { return eta_; }
    cplx q() const { return q_; }
    double series_tol() const { return tol_; }
    int max_terms() const { return max_terms_; }

    // same mode/tau/tolerances, different eta
    EllipticContext with_eta(cplx eta) const;

private:
    EllipticContext(Mode m, cplx tau, cplx eta, double tol, int max_terms);
    Mode mode_;
    cplx tau_;
    cplx eta_;
    cplx q_;
    double tol_;
    int max_terms_;
};

cplx q_pochhammer(cplx a, cplx q, int k);
cplx rational_pochhammer(cplx a, int k);
double rational_pochhammer(double a, int k);

cplx theta1(cplx z, const EllipticContext& ctx);
cplx theta1_prime(cplx z, const EllipticContext& ctx);

// theta in elliptic mode, sin(pi z) in trigonometric mode
cplx f_eval(cplx z, const EllipticContext& ctx);
cplx f_prime(cplx z, const EllipticContext& ctx);

// [a]_k = prod_{j<k} f(a - 2 eta j); negative k gives prod_{j=1}^{-k} 1/f(a + 2 eta j)
cplx elliptic_pochhammer(cplx a, int k, const EllipticContext& ctx);

// sum_k z^k/(q;q)_k prod (numer;q)_k / prod (denom;q)_k. When terminate_at is given the
// sum stops there; otherwise it runs until terms drop below tol relative to the sum.
cplx basic_hyp(const std::vector<cplx>& numer, const std::vector<cplx>& denom, cplx q, cplx z,
               std::optional<int> terminate_at = std::nullopt, double tol = 1e-17, int max_terms = 4096);

// very-well-poised r+1 W r (a1; rest; q, z)
cplx vwp_basic_W(cplx a1, const std::vector<cplx>& rest, cplx q, cplx z,
                 std::optional<int> terminate_at = std::nullopt, double tol = 1e-17, int max_terms = 4096);

// very-well-poised elliptic r+1 v r (a1; rest; z); terminating at index n (caller-supplied)
cplx vwp_elliptic_v(cplx a1, const std::vector<cplx>& rest, cplx z, std::optional<int> terminate_at,
                    const EllipticContext& ctx);

// A quantity c * eps^order, used to take eps -> 0 limits of products that are 0 * inf
// at integer points.
struct Lead {
    cplx c{1.0, 0.0};
    int order = 0;
    Lead& operator*=(const Lead& o) { c *= o.c; order += o.order; return *this; }
    Lead& operator/=(const Lead& o) { c /= o.c; order -= o.order; return *this; }
    friend Lead operator*(Lead a, const Lead& b) { return a *= b; }
    friend Lead operator/(Lead a, const Lead& b) { return a /= b; }
};

// f(a + da*eps) to leading order. An argument with |f(a)| below zero_tol and da != 0 is
// treated as a simple zero.
Lead f_lead(cplx a, cplx da, const EllipticContext& ctx, double zero_tol = 1e-10);
// [a + da*eps]_k to leading order
Lead elliptic_pochhammer_lead(cplx a, cplx da, int k, const EllipticContext& ctx, double zero_tol = 1e-10);

inline cplx check_denominator(cplx d, const char* where) {
    if (std::abs(d) < kPoleTol) fail(ErrorKind::SingularParameter, where);
    return d;
}

} // namespace dv
