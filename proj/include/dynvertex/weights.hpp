#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dynvertex/specfun.hpp"

namespace dv {

// (i1, j1; i2, j2): vertical in, horizontal in, vertical out, horizontal out
struct ArrowConfig {
    int i1 = 0, j1 = 0, i2 = 0, j2 = 0;
    bool conserving() const { return i1 + j1 == i2 + j2; }
    bool nonnegative() const { return i1 >= 0 && j1 >= 0 && i2 >= 0 && j2 >= 0; }
};

struct UnfusedWeightParams {
    cplx v;       // spectral parameter of the (bottom) row, v = w - z - eta
    cplx lambda;  // additive dynamical parameter (top of the column for fused weights)
    cplx Lambda;  // spin
    EllipticContext ctx;
};

// u stands for the product u*xi of row and column spectral parameters
struct PsiParams {
    cplx u, s, q;
    int J = 1;
    cplx kappa;
};

struct PhiParams {
    cplx q, a, b, kappa;
};

cplx w1(const ArrowConfig& c, const UnfusedWeightParams& p);

// Product of W1 down a column of J = |J1| rows. Row k (1 = bottom) has spectral parameter
// v + 2 eta (k-1); the top row has dynamical parameter lambda.
cplx column_weight(int i1, const std::vector<int>& J1, int i2, const std::vector<int>& J2,
                   const UnfusedWeightParams& p);

// sum of column weights over all J1, J2 of the given sizes (the unnormalized fused weight)
cplx column_sum(int J, const ArrowConfig& c, const UnfusedWeightParams& p);

// Memoized four-term recursion for the unnormalized fused weights at one parameter point.
class FusedRecursion {
public:
    explicit FusedRecursion(const UnfusedWeightParams& p) : p_(p) {}
    // hat W_J(c | v, lambda + 2 eta * offset)
    cplx hat(int J, const ArrowConfig& c, int offset = 0);
    // W_J = hat W_J / C(J, j2)
    cplx fused(int J, const ArrowConfig& c, int offset = 0);

private:
    UnfusedWeightParams p_;
    std::unordered_map<std::uint64_t, cplx> memo_;
};

cplx w_fused_recursive(int J, const ArrowConfig& c, const UnfusedWeightParams& p);
cplx w_fused_closed(int J, const ArrowConfig& c, const UnfusedWeightParams& p);

enum class FusedCase { jJ, j20, j2J, vLambda };
cplx w_fused_special(int J, const ArrowConfig& c, const UnfusedWeightParams& p, FusedCase which);

// elliptic binomial [2 eta J]_J / ([2 eta j]_j [2 eta (J-j)]_{J-j})
cplx elliptic_binomial(int J, int j, const EllipticContext& ctx);

cplx c_correction(int J, const ArrowConfig& c, cplx lambda, cplx Lambda, const EllipticContext& ctx);
cplx sigma(int J, const ArrowConfig& c, const UnfusedWeightParams& p);

// The additive parameters that realize psi through sigma
struct PsiToSigma {
    EllipticContext ctx;
    cplx v, Lambda, lambda;
};
PsiToSigma psi_parameters(const PsiParams& p, int j1);

cplx psi(const ArrowConfig& c, const PsiParams& p);
// the printed 10W9 form with z = q; valid only where it is not 0*inf (i1 >= j2, j1 + j2 <= J)
cplx psi_series_form(const ArrowConfig& c, const PsiParams& p);
// all psi(i1, j1; i1 + j1 - j2, j2), j2 = 0..J
std::vector<cplx> psi_row(int i1, int j1, const PsiParams& p);

cplx phi(int j, int i, const PhiParams& p);
std::vector<double> phi_row(int i, const PhiParams& p);

// Degenerations
// asymmetric PEP: a = q^{-1}, b = q^{-2}
double asym_pep_phi(int j, int i, double q, double kappa);
// Hahn PEP with c = q^J, a = q^{-A}, kappa = q^{-khat}
double hahn_pep_phi(int j, int i, int J, int A, double khat);
// dynamical (J; gamma)-PEP: probability that a site holding eta particles sends eta - 1
// (keeps one). Upsilon = +inf gives the non-dynamical model.
double jgamma_keep_prob(int eta, int J, double Upsilon);
// discrete-time AIP: a stack of i particles either all jumps (B/(A+B)) or stays
double aip_phi(int j, int i, double A, double B);
// multi-particle asymmetric diffusion rate
double madm_rate(int j, int i, double q, double khat);

double binomial(int n, int k);

} // namespace dv
