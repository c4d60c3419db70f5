#include "dynvertex/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dv {

const char* kind_name(ErrorKind k) {
    switch (k) {
    case ErrorKind::SingularParameter: return "SingularParameter";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::NonTerminating: return "NonTerminating";
    case ErrorKind::PatternMismatch: return "PatternMismatch";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::InadmissibleWeights: return "InadmissibleWeights";
    case ErrorKind::ContourInfeasible: return "ContourInfeasible";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::ModeError: return "ModeError";
    case ErrorKind::InadmissibleParameters: return "InadmissibleParameters";
    }
    return "Unknown";
}

EllipticContext::EllipticContext(Mode m, cplx tau, cplx eta, double tol, int max_terms)
    : mode_(m), tau_(tau), eta_(eta), q_(std::exp(-4.0 * kPi * kI * eta)), tol_(tol), max_terms_(max_terms) {
    if (!(tol > 0.0 && tol <= 1e-6)) fail(ErrorKind::InadmissibleParameters, "series_tol must lie in (0, 1e-6]");
    if (max_terms < 64) fail(ErrorKind::InadmissibleParameters, "max_terms must be >= 64");
    if (m == Mode::elliptic && !(tau.imag() > 0.0))
        fail(ErrorKind::InadmissibleParameters, "elliptic mode needs Im(tau) > 0");
}

EllipticContext EllipticContext::trigonometric(cplx eta, double tol, int max_terms) {
    return EllipticContext(Mode::trigonometric, cplx(0.0, 0.0), eta, tol, max_terms);
}

EllipticContext EllipticContext::elliptic(cplx tau, cplx eta, double tol, int max_terms) {
    return EllipticContext(Mode::elliptic, tau, eta, tol, max_terms);
}

EllipticContext EllipticContext::with_eta(cplx eta) const {
    return EllipticContext(mode_, tau_, eta, tol_, max_terms_);
}

cplx q_pochhammer(cplx a, cplx q, int k) {
    cplx r = 1.0;
    if (k >= 0) {
        cplx qj = 1.0;
        for (int j = 0; j < k; ++j) {
            r *= 1.0 - qj * a;
            qj *= q;
        }
        return r;
    }
    cplx qinv = 1.0 / q, qj = qinv;
    for (int j = 1; j <= -k; ++j) {
        r /= check_denominator(1.0 - a * qj, "q_pochhammer: vanishing factor at negative index");
        qj *= qinv;
    }
    return r;
}

cplx rational_pochhammer(cplx a, int k) {
    cplx r = 1.0;
    if (k >= 0) {
        for (int j = 0; j < k; ++j) r *= a + double(j);
        return r;
    }
    for (int j = 1; j <= -k; ++j) r /= check_denominator(a - double(j), "rational_pochhammer");
    return r;
}

double rational_pochhammer(double a, int k) { return rational_pochhammer(cplx(a, 0.0), k).real(); }

namespace {

// -sum_j c_j exp(pi i tau (j+1/2)^2 + 2 pi i (j+1/2)(z+1/2)), c_j = 1 or 2 pi i (j+1/2)
template <bool Deriv>
cplx theta_series(cplx z, const EllipticContext& ctx) {
    if (ctx.mode() != Mode::elliptic) fail(ErrorKind::ModeError, "theta1 requires elliptic mode");
    const cplx tau = ctx.tau();
    cplx sum = 0.0;
    double scale = 0.0;
    for (int n = 0; n < ctx.max_terms(); ++n) {
        // pair j = n with j = -n-1 so the truncation stays symmetric
        double mag = 0.0;
        for (int j : {n, -n - 1}) {
            double h = j + 0.5;
            cplx t = std::exp(kPi * kI * tau * (h * h) + 2.0 * kPi * kI * h * (z + 0.5));
            if constexpr (Deriv) t *= 2.0 * kPi * kI * h;
            sum += t;
            mag = std::max(mag, std::abs(t));
        }
        scale = std::max(scale, mag);
        if (n > 0 && mag < ctx.series_tol() * std::max(std::abs(sum), scale)) return -sum;
    }
    fail(ErrorKind::NonConvergent, "theta1: max_terms reached");
}

} // namespace

cplx theta1(cplx z, const EllipticContext& ctx) { return theta_series<false>(z, ctx); }
cplx theta1_prime(cplx z, const EllipticContext& ctx) { return theta_series<true>(z, ctx); }

cplx f_eval(cplx z, const EllipticContext& ctx) {
    if (ctx.is_trig()) return std::sin(kPi * z);
    return theta1(z, ctx);
}

cplx f_prime(cplx z, const EllipticContext& ctx) {
    if (ctx.is_trig()) return kPi * std::cos(kPi * z);
    return theta1_prime(z, ctx);
}

cplx elliptic_pochhammer(cplx a, int k, const EllipticContext& ctx) {
    const cplx two_eta = 2.0 * ctx.eta();
    cplx r = 1.0;
    if (k >= 0) {
        for (int j = 0; j < k; ++j) r *= f_eval(a - two_eta * double(j), ctx);
        return r;
    }
    for (int j = 1; j <= -k; ++j)
        r /= check_denominator(f_eval(a + two_eta * double(j), ctx), "elliptic_pochhammer: vanishing factor");
    return r;
}

Lead f_lead(cplx a, cplx da, const EllipticContext& ctx, double zero_tol) {
    cplx v = f_eval(a, ctx);
    if (std::abs(v) < zero_tol && da != cplx(0.0, 0.0)) return Lead{f_prime(a, ctx) * da, 1};
    return Lead{v, 0};
}

Lead elliptic_pochhammer_lead(cplx a, cplx da, int k, const EllipticContext& ctx, double zero_tol) {
    const cplx two_eta = 2.0 * ctx.eta();
    Lead r;
    if (k >= 0) {
        for (int j = 0; j < k; ++j) r *= f_lead(a - two_eta * double(j), da, ctx, zero_tol);
        return r;
    }
    for (int j = 1; j <= -k; ++j) r /= f_lead(a + two_eta * double(j), da, ctx, zero_tol);
    return r;
}

namespace {

template <class TermRatio>
cplx sum_series(TermRatio&& next, std::optional<int> terminate_at, double tol, int max_terms, const char* name) {
    // next(k, term_k) returns term_{k+1}
    cplx term = 1.0, sum = 1.0;
    if (terminate_at) {
        if (*terminate_at < 0) return 0.0;
        for (int k = 0; k < *terminate_at; ++k) {
            term = next(k, term);
            sum += term;
        }
        return sum;
    }
    int small_run = 0;
    for (int k = 0; k < max_terms; ++k) {
        term = next(k, term);
        sum += term;
        if (std::abs(term) < tol * std::abs(sum)) {
            if (++small_run >= 2) return sum;
        } else {
            small_run = 0;
        }
    }
    fail(ErrorKind::NonConvergent, std::string(name) + ": no convergence within max_terms");
}

} // namespace

cplx basic_hyp(const std::vector<cplx>& numer, const std::vector<cplx>& denom, cplx q, cplx z,
               std::optional<int> terminate_at, double tol, int max_terms) {
    if (z == cplx(0.0, 0.0)) return 1.0;
    auto next = [&](int k, cplx t) {
        cplx qk = std::pow(q, k);
        for (const auto& a : numer) t *= 1.0 - a * qk;
        for (const auto& b : denom) t /= check_denominator(1.0 - b * qk, "basic_hyp: denominator Pochhammer vanishes");
        t /= check_denominator(1.0 - q * qk, "basic_hyp: (q;q)_k vanishes");
        return t * z;
    };
    return sum_series(next, terminate_at, tol, max_terms, "basic_hyp");
}

cplx vwp_basic_W(cplx a1, const std::vector<cplx>& rest, cplx q, cplx z, std::optional<int> terminate_at,
                 double tol, int max_terms) {
    // term_k = z^k (a1)_k/(q)_k (1 - a1 q^{2k})/(1 - a1) prod (a_j)_k/(q a1/a_j)_k; ratio evaluated directly
    check_denominator(1.0 - a1, "vwp_basic_W: a1 = 1");
    auto next = [&](int k, cplx t) {
        cplx qk = std::pow(q, k);
        t *= (1.0 - a1 * qk) / check_denominator(1.0 - q * qk, "vwp_basic_W: (q;q)_k vanishes");
        t *= (1.0 - a1 * qk * qk * q * q) / check_denominator(1.0 - a1 * qk * qk, "vwp_basic_W: 1 - a1 q^{2k}");
        for (const auto& a : rest)
            t *= (1.0 - a * qk) / check_denominator(1.0 - q * a1 / a * qk, "vwp_basic_W: denominator vanishes");
        return t * z;
    };
    return sum_series(next, terminate_at, tol, max_terms, "vwp_basic_W");
}

cplx vwp_elliptic_v(cplx a1, const std::vector<cplx>& rest, cplx z, std::optional<int> terminate_at,
                    const EllipticContext& ctx) {
    if (!terminate_at) fail(ErrorKind::NonTerminating, "vwp_elliptic_v needs a termination index");
    const cplx e2 = 2.0 * ctx.eta();
    const cplx fa1 = check_denominator(f_eval(a1, ctx), "vwp_elliptic_v: f(a1) = 0");
    cplx sum = 0.0, zk = 1.0;
    for (int k = 0; k <= *terminate_at; ++k) {
        cplx t = zk * elliptic_pochhammer(a1, k, ctx) / elliptic_pochhammer(-e2, k, ctx);
        t *= f_eval(a1 - 2.0 * e2 * double(k), ctx) / fa1;
        for (const auto& a : rest) {
            cplx d = elliptic_pochhammer(a1 - a - e2, k, ctx);
            t *= elliptic_pochhammer(a, k, ctx) / check_denominator(d, "vwp_elliptic_v: denominator vanishes");
        }
        sum += t;
        zk *= z;
    }
    return sum;
}

} // namespace dv
