#include "dynvertex/weights.hpp"

#include <cmath>
#include <limits>

namespace dv {

namespace {

bool in_support(int J, const ArrowConfig& c) {
    return c.nonnegative() && c.conserving() && c.j1 <= J && c.j2 <= J;
}

cplx ep(cplx a, int k, const EllipticContext& ctx) { return elliptic_pochhammer(a, k, ctx); }

} // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * double(n - k + j) / double(j);
    return r;
}

cplx w1(const ArrowConfig& c, const UnfusedWeightParams& p) {
    const auto& ctx = p.ctx;
    const cplx eta = ctx.eta(), v = p.v, lam = p.lambda, L = p.Lambda;
    const int k = c.i1;
    auto f = [&](cplx z) { return f_eval(z, ctx); };
    enum { none, a, b, cc, d } kind = none;
    if (c.i1 < 0 || c.i2 < 0) return 0.0;
    if (c.j1 == 0 && c.j2 == 0 && c.i2 == k) kind = a;
    else if (c.j1 == 1 && c.j2 == 0 && c.i2 == k + 1) kind = b;
    else if (c.j1 == 0 && c.j2 == 1 && c.i2 == k - 1) kind = cc;
    else if (c.j1 == 1 && c.j2 == 1 && c.i2 == k) kind = d;
    if (kind == none) return 0.0;

    const cplx D = check_denominator(f(eta * L - v), "w1: f(eta Lambda - v) = 0") *
                   check_denominator(f(lam), "w1: f(lambda) = 0");
    switch (kind) {
    case a: return f(eta * (L - 2.0 * double(k)) - v) * f(lam + 2.0 * double(k) * eta) / D;
    case b: return f(v + lam + eta * (2.0 * k + 2.0 - L)) * f(2.0 * eta) / D;
    case cc: {
        const cplx f2 = check_denominator(f(2.0 * eta), "w1: f(2 eta) = 0");
        return f(lam - v + eta * (2.0 * k - 2.0 - L)) * f(2.0 * eta * (L + 1.0 - double(k))) *
               f(2.0 * double(k) * eta) / (D * f2);
    }
    default: return f(eta * (2.0 * k - L) - v) * f(lam + 2.0 * eta * (double(k) - L)) / D;
    }
}

cplx column_weight(int i1, const std::vector<int>& J1, int i2, const std::vector<int>& J2,
                   const UnfusedWeightParams& p) {
    const int J = int(J1.size());
    if (int(J2.size()) != J) fail(ErrorKind::InadmissibleParameters, "column_weight: |J1| != |J2|");
    const cplx e2 = 2.0 * p.ctx.eta();
    // phi[y] is the dynamical parameter of row y (1 = bottom); rows are stored bottom first
    std::vector<cplx> phi(J + 1);
    if (J > 0) phi[J] = p.lambda;
    for (int y = J - 1; y >= 1; --y) phi[y] = phi[y + 1] + (J1[y] == 1 ? e2 : -e2);

    cplx w = 1.0;
    int i = i1;
    for (int y = 1; y <= J; ++y) {
        const int out = i + J1[y - 1] - J2[y - 1];
        if (out < 0) return 0.0;
        UnfusedWeightParams row{p.v + e2 * double(y - 1), phi[y], p.Lambda, p.ctx};
        w *= w1({i, J1[y - 1], out, J2[y - 1]}, row);
        if (w == cplx(0.0, 0.0)) return 0.0;
        i = out;
    }
    return i == i2 ? w : cplx(0.0);
}

cplx column_sum(int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    if (J > 16) fail(ErrorKind::SizeLimit, "column_sum: J too large for enumeration");
    if (!in_support(J, c)) return 0.0;
    cplx s = 0.0;
    std::vector<int> J1(J), J2(J);
    for (unsigned m1 = 0; m1 < (1u << J); ++m1) {
        if (__builtin_popcount(m1) != c.j1) continue;
        for (int y = 0; y < J; ++y) J1[y] = (m1 >> y) & 1;
        for (unsigned m2 = 0; m2 < (1u << J); ++m2) {
            if (__builtin_popcount(m2) != c.j2) continue;
            for (int y = 0; y < J; ++y) J2[y] = (m2 >> y) & 1;
            s += column_weight(c.i1, J1, c.i2, J2, p);
        }
    }
    return s;
}

cplx FusedRecursion::hat(int J, const ArrowConfig& c, int offset) {
    if (J < 0 || !in_support(J, c)) return 0.0;
    if (J == 0) return (c.j1 == 0 && c.j2 == 0 && c.i1 == c.i2) ? 1.0 : 0.0;
    if (J >= 256 || c.i1 >= 1024 || c.i2 >= 1024 || offset <= -8192 || offset >= 8192)
        fail(ErrorKind::SizeLimit, "FusedRecursion: index out of memo range");
    const std::uint64_t key = std::uint64_t(J) | std::uint64_t(c.i1) << 8 | std::uint64_t(c.j1) << 18 |
                              std::uint64_t(c.i2) << 28 | std::uint64_t(c.j2) << 38 |
                              std::uint64_t(offset + 8192) << 48;
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    const cplx e2 = 2.0 * p_.ctx.eta();
    // top row of the column, at spectral parameter v + 2 eta (J - 1)
    UnfusedWeightParams top{p_.v + e2 * double(J - 1), p_.lambda + e2 * double(offset), p_.Lambda, p_.ctx};
    const int i1 = c.i1, j1 = c.j1, i2 = c.i2, j2 = c.j2;
    cplx r = 0.0;
    auto add = [&](const ArrowConfig& sub, int sub_off, const ArrowConfig& row) {
        cplx h = hat(J - 1, sub, sub_off);
        if (h != cplx(0.0, 0.0)) r += h * w1(row, top);
    };
    add({i1, j1, i2, j2}, offset - 1, {i2, 0, i2, 0});
    add({i1, j1 - 1, i2 - 1, j2}, offset + 1, {i2 - 1, 1, i2, 0});
    add({i1, j1, i2 + 1, j2 - 1}, offset - 1, {i2 + 1, 0, i2, 1});
    add({i1, j1 - 1, i2, j2 - 1}, offset + 1, {i2, 1, i2, 1});
    memo_.emplace(key, r);
    return r;
}

cplx FusedRecursion::fused(int J, const ArrowConfig& c, int offset) {
    if (!in_support(J, c)) return 0.0;
    return hat(J, c, offset) / binomial(J, c.j2);
}

cplx w_fused_recursive(int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    if (J < 1) fail(ErrorKind::InadmissibleParameters, "w_fused_recursive: J must be >= 1");
    FusedRecursion rec(p);
    return rec.fused(J, c);
}

cplx w_fused_closed(int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    if (J < 1) fail(ErrorKind::InadmissibleParameters, "w_fused_closed: J must be >= 1");
    if (!in_support(J, c)) return 0.0;
    const auto& ctx = p.ctx;
    const cplx eta = ctx.eta(), e = 2.0 * eta, v = p.v, lam = p.lambda, L = p.Lambda;
    const int i1 = c.i1, j1 = c.j1, i2 = c.i2, j2 = c.j2;
    const double d1 = double(i1), dj1 = double(j1), di2 = double(i2), dj2 = double(j2), dJ = double(J);

    // i1, i2 -> i + eps and J -> J + sqrt(2) eps wherever they enter an f-argument continuously;
    // the eps -> 0 limit resolves the 0 * inf cancellations at integer points
    const cplx dI = e, dJp = e * std::sqrt(2.0);
    auto P = [&](cplx a, cplx da, int k) { return elliptic_pochhammer_lead(a, da, k, ctx); };

    const cplx f2 = f_eval(e, ctx);
    Lead pre{std::pow(f2, i2 - i1) * ep(e * L, i1, ctx) / ep(e * L, i2, ctx), 0};
    pre *= P(e * d1, dI, j2);
    pre *= P(e * (dJ - dj2), dJp, j1);
    pre *= P(eta * L - v - e * (d1 + dj1), -dI, J - j1 - j2);
    pre *= P(e * (L - d1 + dj2), -dI, j1);
    pre *= P(lam + e * di2, dI, J - j1 - j2);
    pre *= P(lam + e * (d1 + 2.0 * dj1 - dJ) - eta * L - v, dI - dJp, j2);
    pre *= P(lam + v + e * (d1 + 2.0 * dj1 - 1.0) - eta * L, dI, j1);
    pre /= P(e * dj1, 0.0, j1);
    pre /= P(eta * L - v, 0.0, J);
    pre /= P(lam + e * (2.0 * dj1 + dj2 - dJ), -dJp, j2);
    pre /= P(lam + e * dj1, 0.0, J - j1 - j2);
    pre /= P(lam + e * (2.0 * dj1 + dj2 - dJ - 1.0), -dJp, j1);

    struct Arg { cplx a, da; };
    const Arg a1{lam + e * (2.0 * dj1 + dj2 - dJ), -dJp};
    const Arg rest[] = {
        {e * dj1, 0.0},
        {e * dj2, 0.0},
        {lam + e * dj1, 0.0},
        {lam + e * (d1 + 2.0 * dj1 - dJ - 1.0 - L), dI - dJp},
        {eta * L + v + e * (dj2 - d1 - 1.0), -dI},
        {eta * L - v - e * (d1 - dj2 + dJ), -dI - dJp},
        {lam + e * (di2 + dj1 + dj2 - dJ), dI - dJp},
    };

    const int n = std::min(j1, j2);
    std::vector<Lead> terms;
    terms.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        Lead t = P(a1.a, a1.da, k) / P(-e, 0.0, k);
        t *= f_lead(a1.a - 2.0 * e * double(k), a1.da, ctx);
        t /= f_lead(a1.a, a1.da, ctx);
        for (const auto& r : rest) {
            t *= P(r.a, r.da, k);
            t /= P(a1.a - r.a - e, a1.da - r.da, k);
        }
        terms.push_back(pre * t);
    }
    int lowest = std::numeric_limits<int>::max();
    for (const auto& t : terms) lowest = std::min(lowest, t.order);
    if (lowest > 0) return 0.0;
    if (lowest < 0) fail(ErrorKind::SingularParameter, "w_fused_closed: divergent limit");
    cplx s = 0.0;
    for (const auto& t : terms)
        if (t.order == 0) s += t.c;
    return s;
}

cplx elliptic_binomial(int J, int j, const EllipticContext& ctx) {
    const cplx e = 2.0 * ctx.eta();
    return ep(e * double(J), J, ctx) /
           check_denominator(ep(e * double(j), j, ctx) * ep(e * double(J - j), J - j, ctx), "elliptic_binomial");
}

cplx w_fused_special(int J, const ArrowConfig& c, const UnfusedWeightParams& p, FusedCase which) {
    const auto& ctx = p.ctx;
    const cplx eta = ctx.eta(), e = 2.0 * eta, v = p.v, lam = p.lambda, L = p.Lambda;
    const cplx f2 = f_eval(e, ctx);
    auto E = [&](int jj) { return elliptic_binomial(J, jj, ctx); };
    auto den = [](cplx d) { return check_denominator(d, "w_fused_special: vanishing denominator"); };
    switch (which) {
    case FusedCase::jJ: {
        // (i, J; i + J - j, j)
        if (c.j1 != J || !in_support(J, c)) fail(ErrorKind::PatternMismatch, "jJ case needs j1 = J");
        const double i = c.i1, j = c.j2;
        return std::pow(f2, J - c.j2) * ep(e * i - eta * L - v, c.j2, ctx) / den(ep(eta * L - v, J, ctx)) *
               ep(v + lam - eta * L + e * (i + 2.0 * J - j - 1.0), J - c.j2, ctx) *
               ep(lam + e * (i + J - L - 1.0), c.j2, ctx) / den(ep(lam + e * double(J - 1), J, ctx));
    }
    case FusedCase::j20: {
        // (i, j; i + j, 0)
        if (c.j2 != 0 || !in_support(J, c)) fail(ErrorKind::PatternMismatch, "j20 case needs j2 = 0");
        const double i = c.i1, j = c.j1;
        const int jj = c.j1;
        return std::pow(f2, jj) * E(jj) * ep(lam + e * (i + j), J - jj, ctx) / den(ep(eta * L - v, J, ctx)) *
               ep(v + lam + e * (i + 2.0 * j - 1.0) - eta * L, jj, ctx) * ep(eta * L - e * (i + j) - v, J - jj, ctx) /
               den(ep(lam + e * j, J - jj, ctx) * ep(lam + e * (2.0 * j - J - 1.0), jj, ctx));
    }
    case FusedCase::j2J: {
        // (i, j; i + j - J, J)
        if (c.j2 != J || !in_support(J, c)) fail(ErrorKind::PatternMismatch, "j2J case needs j2 = J");
        const double i = c.i1, j = c.j1;
        const int jj = c.j1;
        return std::pow(f2, jj - J) * E(jj) * ep(e * i, J - jj, ctx) * ep(e * (i + j - J) - eta * L - v, jj, ctx) *
               ep(e * (L - i - j + double(J)), J - jj, ctx) / den(ep(eta * L - v, J, ctx)) *
               ep(lam + e * (i + j - J) - eta * L - v, J - jj, ctx) * ep(lam + e * (i + 2.0 * j - J - L - 1.0), jj, ctx) /
               den(ep(lam + e * j, J - jj, ctx) * ep(lam + e * (2.0 * j - J - 1.0), jj, ctx));
    }
    case FusedCase::vLambda: {
        if (std::abs(v + eta * L) > 1e-12 * (1.0 + std::abs(v)))
            fail(ErrorKind::PatternMismatch, "vLambda case needs v = -eta Lambda");
        if (!in_support(J, c)) return 0.0;
        if (c.i1 < c.j2) return 0.0;
        const double i1 = c.i1, i2 = c.i2, j1 = c.j1;
        return std::pow(f2, c.i2 - c.i1) * E(c.j1) * ep(e * L, c.i1, ctx) / den(ep(e * L, c.i2, ctx)) *
               ep(e * i1, c.j2, ctx) * ep(e * (L - i1), J - c.j2, ctx) / den(ep(e * L, J, ctx)) *
               ep(lam + e * i2, J - c.j1, ctx) * ep(lam + e * (i2 + j1 - L - 1.0), c.j1, ctx) /
               den(ep(lam + e * j1, J - c.j1, ctx) * ep(lam + e * (2.0 * j1 - J - 1.0), c.j1, ctx));
    }
    }
    fail(ErrorKind::PatternMismatch, "unknown fused case");
}

cplx c_correction(int J, const ArrowConfig& c, cplx lambda, cplx Lambda, const EllipticContext& ctx) {
    const cplx e = 2.0 * ctx.eta(), lam = lambda, L = Lambda;
    const int i1 = c.i1, j1 = c.j1, i2 = c.i2, j2 = c.j2;
    const double d1 = i1, dj1 = j1, dj2 = j2, dJ = J;
    auto den = [](cplx d) { return check_denominator(d, "c_correction: vanishing denominator"); };
    cplx r = std::pow(f_eval(e, ctx), j2 - j1) * ep(e * L, i2, ctx) / den(ep(e * L, i1, ctx));
    r *= ep(lam + e * (d1 + 2.0 * dj1 - dJ), j2, ctx) * ep(lam + e * (d1 + 2.0 * dj1 - dj2 - 1.0 - L), J - j2, ctx);
    r /= den(ep(lam + e * (d1 + dj1 - dj2), J - j1, ctx) * ep(lam + e * (d1 + 2.0 * dj1 - dj2 - 1.0 - L), j1, ctx));
    r *= ep(lam + e * dj1, J - j1, ctx) * ep(lam + e * (2.0 * dj1 - dJ - 1.0), j1, ctx);
    r /= den(ep(lam + e * (2.0 * d1 + 2.0 * dj1 - dj2 - L), j2, ctx) *
             ep(lam + e * (2.0 * d1 + 2.0 * dj1 - 2.0 * dj2 - 1.0 - L), J - j2, ctx));
    return r;
}

namespace {

cplx sigma_with(FusedRecursion& rec, int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    if (!in_support(J, c)) return 0.0;
    const cplx w = rec.fused(J, c);
    if (w == cplx(0.0, 0.0)) return 0.0;
    return c_correction(J, c, p.lambda, p.Lambda, p.ctx) * w * elliptic_binomial(J, c.j2, p.ctx) /
           elliptic_binomial(J, c.j1, p.ctx);
}

void require_trig(const EllipticContext& ctx, const char* who) {
    if (!ctx.is_trig()) fail(ErrorKind::ModeError, std::string(who) + " is only stochastic in trigonometric mode");
}

// multiplicative kappa = 0 is approached through a tiny kappa (the weights are analytic at 0)
constexpr double kKappaFloor = 1e-30;

} // namespace

cplx sigma(int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    require_trig(p.ctx, "sigma");
    FusedRecursion rec(p);
    return sigma_with(rec, J, c, p);
}

PsiToSigma psi_parameters(const PsiParams& p, int j1) {
    if (p.q == cplx(0.0, 0.0)) fail(ErrorKind::InadmissibleParameters, "psi: q = 0");
    if (p.u == cplx(0.0, 0.0) || p.s == cplx(0.0, 0.0))
        fail(ErrorKind::InadmissibleParameters, "psi: u and s must be nonzero");
    const cplx eta = kI * std::log(p.q) / (4.0 * kPi);
    const cplx two_pi_i = 2.0 * kPi * kI;
    cplx kappa = p.kappa;
    if (std::abs(kappa) < kKappaFloor) kappa = kKappaFloor;
    const cplx eta_L = std::log(p.s) / two_pi_i;
    return PsiToSigma{EllipticContext::trigonometric(eta), kI * std::log(p.u) / (2.0 * kPi), eta_L / eta,
                      std::log(std::pow(p.q, 2 * j1 - p.J) / kappa) / two_pi_i};
}

std::vector<cplx> psi_row(int i1, int j1, const PsiParams& p) {
    std::vector<cplx> out(p.J + 1, 0.0);
    if (i1 < 0 || j1 < 0 || j1 > p.J) return out;
    const auto m = psi_parameters(p, j1);
    UnfusedWeightParams up{m.v, m.lambda, m.Lambda, m.ctx};
    FusedRecursion rec(up);
    for (int j2 = 0; j2 <= p.J; ++j2) {
        const int i2 = i1 + j1 - j2;
        if (i2 < 0) continue;
        out[j2] = sigma_with(rec, p.J, {i1, j1, i2, j2}, up);
    }
    return out;
}

cplx psi(const ArrowConfig& c, const PsiParams& p) {
    if (p.J < 1) fail(ErrorKind::InadmissibleParameters, "psi: J must be >= 1");
    if (!in_support(p.J, c)) return 0.0;
    const auto m = psi_parameters(p, c.j1);
    UnfusedWeightParams up{m.v, m.lambda, m.Lambda, m.ctx};
    FusedRecursion rec(up);
    return sigma_with(rec, p.J, c, up);
}

cplx psi_series_form(const ArrowConfig& c, const PsiParams& p) {
    if (!in_support(p.J, c)) return 0.0;
    const cplx q = p.q, s = p.s, u = p.u, ki = 1.0 / p.kappa;
    const int J = p.J, i1 = c.i1, j1 = c.j1, j2 = c.j2;
    auto qp = [&](cplx a, int k) { return q_pochhammer(a, q, k); };
    auto qn = [&](int n) { return std::pow(q, n); };
    cplx r = std::pow(q, (j2 - i1) * J) * std::pow(u / s, j1);
    r *= qp(qn(i1 - j2 + 1), j2) * qp(qn(j2 - J), j1) * qp(s * u * qn(J), i1 - j2) * qp(s * s * qn(i1 - j2), j1);
    r /= qp(s * u, i1 + j1) * qp(q, j2) * qp(qn(j2 - J), j1 - j2);
    r *= qp(u / s * ki * qn(-i1), j2) * qp(qn(1 - i1 - J) / (u * s) * ki, j1) * qp(q * ki, j1) *
         qp(qn(j2 - 2 * i1 + 1) / (s * s) * ki, i1 - j2);
    r /= qp(qn(1 - j2) * ki, j1) * qp(qn(j2 - i1 - J + 1) / (s * s) * ki, j1) *
         qp(qn(j2 - 2 * i1 - J) / (s * s) * ki, j2) * qp(qn(2 * j2 - 2 * i1 - J + 1) / (s * s) * ki, i1 - j2);
    const cplx a = qn(-j2) * ki;
    const std::vector<cplx> rest = {qn(-j1), qn(-j2), qn(j1 - J) * ki, qn(1 - i1) / (s * s) * ki,
                                    s / u * qn(i1 - j2 + 1), u * s * qn(i1 - j2 + J), qn(-i1) * ki};
    return r * vwp_basic_W(a, rest, q, q, std::min(j1, j2));
}

cplx phi(int j, int i, const PhiParams& p) {
    if (j < 0 || i < 0 || j > i) return 0.0;
    const cplx q = p.q, a = p.a, b = p.b, k = p.kappa;
    if (q == cplx(0.0, 0.0)) fail(ErrorKind::InadmissibleParameters, "phi: q = 0");
    auto qp = [&](cplx x, int n) { return q_pochhammer(x, q, n); };
    auto den = [](cplx d) { return check_denominator(d, "phi: vanishing denominator"); };
    auto qn = [&](int n) { return std::pow(q, n); };
    cplx r = std::pow(a, j) * qp(q, i) / den(qp(q, j) * qp(q, i - j));
    r *= qp(b / a, j) * qp(a, i - j) / den(qp(b, i));
    r *= qp(qn(i) * b * k, i - j) * qp(qn(i - j + 1) * k, j);
    r /= den(qp(qn(i - j) * a * k, i - j) * qp(qn(2 * i - 2 * j + 1) * a * k, j));
    return r;
}

std::vector<double> phi_row(int i, const PhiParams& p) {
    std::vector<double> out(std::max(i, 0) + 1);
    for (int j = 0; j <= i; ++j) out[j] = phi(j, i, p).real();
    return out;
}

double asym_pep_phi(int j, int i, double q, double kappa) {
    return phi(j, i, {q, 1.0 / q, 1.0 / (q * q), kappa}).real();
}

double hahn_pep_phi(int j, int i, int J, int A, double khat) {
    if (j < 0 || j > i || j > J || i - j > A) return 0.0;
    auto rp = [](double a, int k) { return rational_pochhammer(a, k); };
    const double num = rp(i - A - J - khat, i - j) * rp(i - j - khat + 1.0, j);
    const double den = rp(i - j - A - khat, i - j) * rp(2.0 * i - 2.0 * j + 1.0 - A - khat, j);
    if (std::abs(den) < kPoleTol) fail(ErrorKind::SingularParameter, "hahn_pep_phi: vanishing denominator");
    return binomial(J, j) * binomial(A, i - j) / binomial(A + J, i) * num / den;
}

double jgamma_keep_prob(int eta, int J, double Upsilon) {
    if (eta < 0 || eta > J + 1) fail(ErrorKind::InadmissibleParameters, "jgamma_keep_prob: occupancy outside [0, J+1]");
    const double base = double(eta) / double(J + 1);
    if (std::isinf(Upsilon)) return base;
    if (Upsilon < double(J + 1)) fail(ErrorKind::InadmissibleParameters, "jgamma_keep_prob: Upsilon < J + 1");
    return base * (1.0 + double(J + 1 - eta) / Upsilon);
}

double aip_phi(int j, int i, double A, double B) {
    if (!(A > 0.0 && B > 0.0)) fail(ErrorKind::InadmissibleParameters, "aip_phi: A, B must be positive");
    if (i == 0) return j == 0 ? 1.0 : 0.0;
    if (j == 0) return A / (A + B);
    if (j == i) return B / (A + B);
    return 0.0;
}

double madm_rate(int j, int i, double q, double khat) {
    if (j < 1) fail(ErrorKind::InadmissibleParameters, "madm_rate: jump size must be >= 1");
    if (j > i) return 0.0;
    const double num = std::pow(q, j) * (1.0 - std::pow(q, 2 * i - 2 * j + 1) * khat);
    const double den = (1.0 - std::pow(q, j)) * (1.0 - std::pow(q, 2 * i - j + 1) * khat);
    if (std::abs(den) < kPoleTol) fail(ErrorKind::SingularParameter, "madm_rate: vanishing denominator");
    return num / den;
}

} // namespace dv
