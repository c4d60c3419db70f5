#include "dynvertex/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dv {

namespace {

template <class T>
T at1(const std::vector<T>& v, int i) {
    return v[std::min<std::size_t>(std::size_t(std::max(i, 1)) - 1, v.size() - 1)];
}

void check_sites(int k, const std::vector<int>& x, int N) {
    if (k < 1 || int(x.size()) != k) fail(ErrorKind::OutOfDomain, "need exactly k sites");
    for (int v : x)
        if (v < 1) fail(ErrorKind::OutOfDomain, "sites must be positive");
    if (N < 1) fail(ErrorKind::OutOfDomain, "N must be positive");
}

int max_of(const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()); }

// (1/2 pi i)^k oint ... oint prod_j G_j(z_j) prod_{i<j} P(z_i, z_j) dz_1 ... dz_k with M nodes per circle
template <class G, class P>
cplx nested_trapezoid(const std::vector<Circle>& circ, int M, const G& g, const P& pair) {
    const int k = int(circ.size());
    std::vector<std::vector<cplx>> z(k, std::vector<cplx>(M)), w(k, std::vector<cplx>(M));
    for (int j = 0; j < k; ++j)
        for (int m = 0; m < M; ++m) {
            const cplx e = std::polar(circ[j].radius, 2.0 * kPi * (m + 0.5) / M);
            z[j][m] = circ[j].center + e;
            w[j][m] = g(j, z[j][m]) * e / double(M);
        }
    cplx total = 0.0;
    if (k == 1) {
        for (int a = 0; a < M; ++a) total += w[0][a];
    } else if (k == 2) {
        for (int a = 0; a < M; ++a) {
            cplx s = 0.0;
            for (int b = 0; b < M; ++b) s += w[1][b] * pair(z[0][a], z[1][b]);
            total += w[0][a] * s;
        }
    } else if (k == 3) {
        std::vector<cplx> inner(M);
        for (int a = 0; a < M; ++a) {
            cplx s = 0.0;
            for (int c = 0; c < M; ++c) inner[c] = w[2][c] * pair(z[0][a], z[2][c]);
            for (int b = 0; b < M; ++b) {
                cplx t = 0.0;
                for (int c = 0; c < M; ++c) t += inner[c] * pair(z[1][b], z[2][c]);
                s += w[1][b] * pair(z[0][a], z[1][b]) * t;
            }
            total += w[0][a] * s;
        }
    } else {
        fail(ErrorKind::OutOfDomain, "quadrature supports k <= 3");
    }
    return total;
}

template <class G, class P>
Quadrature converge(const ContourSpec& c, const G& g, const P& pair) {
    int M = std::max(8, c.nodes);
    cplx prev = nested_trapezoid(c.circles, M, g, pair);
    for (;;) {
        const cplx cur = nested_trapezoid(c.circles, 2 * M, g, pair);
        const double err = std::abs(cur - prev);
        if (err <= 1e-13 * std::max(1.0, std::abs(cur)) || 2 * M >= 4096) {
            if (err > 1e-7 * std::max(1.0, std::abs(cur)))
                fail(ErrorKind::NotConverged, "contour quadrature did not converge at " + std::to_string(2 * M) + " nodes");
            return {cur, err, 2 * M};
        }
        prev = cur;
        M *= 2;
    }
}

// a point must lie strictly inside or outside a circle, away from it
bool inside(const Circle& c, cplx z) { return std::abs(z - c.center) < c.radius * (1 - 1e-9); }
bool outside(const Circle& c, cplx z) { return std::abs(z - c.center) > c.radius * (1 + 1e-9); }

} // namespace

// ---- q-Hahn form ----

ModelSpec model_of(const QHahnObservable& o) { return ModelSpec{QHahnModel{o.q, o.delta, o.B, o.J}, {}}; }

double lhs_functional(const QHahnObservable& o, const std::function<long(int)>& current) {
    double cprod = 1.0;
    for (int i = 1; i <= o.N; ++i) cprod *= std::pow(o.q, at1(o.J, i));
    double v = 1.0;
    for (int j = 0; j < o.k; ++j) {
        const int x = o.x[j];
        const long h = current(x);
        double Y = std::pow(o.q, -double(h)) * cprod;
        for (int i = 1; i < x; ++i) Y *= at1(o.B, i);
        const double qj = std::pow(o.q, j);
        const double den = o.delta - qj;
        if (std::abs(den) < kPoleTol) fail(ErrorKind::SingularParameter, "delta = q^j makes (1/delta; q)_k vanish");
        v *= (qj - o.delta * Y) / den * (qj - std::pow(o.q, double(h)));
    }
    return v;
}

double lhs_exact(const QHahnObservable& o, std::size_t bound) {
    check_sites(o.k, o.x, o.N);
    const auto law = exact_law(model_of(o), o.N, bound);
    return exact_expectation(law, [&](const std::vector<int>& c) {
        return lhs_functional(o, [&](int x) { return current_of(c, x); });
    });
}

MCEstimate lhs_mc(const QHahnObservable& o, long samples, std::uint64_t seed, EnsembleOptions opt) {
    check_sites(o.k, o.x, o.N);
    return run_ensemble(model_of(o), o.N, samples, seed,
                        [&](const SystemState& s) {
                            return std::vector<double>{lhs_functional(o, [&](int x) { return s.current(x); })};
                        },
                        opt)[0];
}

namespace {

struct Geometry {
    double lo, hi;              // required cluster [lo, hi]
    std::vector<double> excl;   // excluded points
};

Geometry qhahn_geometry(const QHahnObservable& o) {
    check_sites(o.k, o.x, o.N);
    if (!(o.q > 0 && o.q < 1)) fail(ErrorKind::ContourInfeasible, "contours are built for 0 < q < 1");
    int Jmax = 1;
    for (int i = 1; i <= o.N; ++i) Jmax = std::max(Jmax, at1(o.J, i));
    Geometry g{1.0, std::pow(o.q, 1 - Jmax), {0.0}};
    for (int i = 1; i < max_of(o.x); ++i) g.excl.push_back(at1(o.B, i));
    return g;
}

} // namespace

ContourSpec qhahn_contours(const QHahnObservable& o, double spread) {
    const auto g = qhahn_geometry(o);
    double elo = 0.0, ehi = INFINITY;
    for (double b : g.excl) {
        if (b >= g.lo * (1 - 1e-12) && b <= g.hi * (1 + 1e-12))
            fail(ErrorKind::ContourInfeasible, "a pole b_i lies inside the required cluster");
        if (b < g.lo) elo = std::max(elo, b);
        else ehi = std::min(ehi, b);
    }
    const int k = o.k;
    // circle 1 is innermost and circle j + 1 contains circle j / q: common left edge, right
    // edges R_1 = hi phi, R_{j+1} = R_j phi / q, all left of the nearest excluded point
    const double L = elo + (g.lo - elo) * (1 - spread);
    double phi = 1 + spread;
    if (!std::isinf(ehi)) {
        const double pmax = std::pow(ehi * std::pow(o.q, k - 1) / g.hi, 1.0 / k);
        if (pmax <= 1.0) fail(ErrorKind::ContourInfeasible, "no room for nested circles right of the cluster");
        phi = 1 + (pmax - 1) * spread;
    }
    ContourSpec c;
    double R = g.hi * phi;
    for (int j = 0; j < k; ++j) {
        c.circles.push_back(Circle{0.5 * (L + R), 0.5 * (R - L)});
        R *= phi / o.q;
    }
    check_qhahn_contours(o, c);
    return c;
}

void check_qhahn_contours(const QHahnObservable& o, const ContourSpec& c) {
    const auto g = qhahn_geometry(o);
    if (int(c.circles.size()) != o.k) fail(ErrorKind::ContourInfeasible, "need one circle per variable");
    int Jmax = 1;
    for (int i = 1; i <= o.N; ++i) Jmax = std::max(Jmax, at1(o.J, i));
    for (std::size_t j = 0; j < c.circles.size(); ++j) {
        const auto& C = c.circles[j];
        for (int p = 0; p < Jmax; ++p)
            if (!inside(C, std::pow(o.q, -p))) fail(ErrorKind::ContourInfeasible, "circle misses a required pole");
        for (double e : g.excl)
            if (!outside(C, e)) fail(ErrorKind::ContourInfeasible, "circle encloses 0 or some b_i");
        for (std::size_t i = 0; i < j; ++i) {
            // q * circle j must strictly contain circle i, so no circle encloses a pole z_i = q z_j
            const auto& I = c.circles[i];
            if (std::abs(o.q * C.center - I.center) + I.radius >= o.q * C.radius * (1 - 1e-9))
                fail(ErrorKind::ContourInfeasible, "circles are not nested");
        }
    }
}

Quadrature rhs_quadrature(const QHahnObservable& o, const ContourSpec& c) {
    check_qhahn_contours(o, c);
    std::vector<double> cs(o.N);
    for (int i = 1; i <= o.N; ++i) cs[i - 1] = std::pow(o.q, at1(o.J, i));
    const double q = o.q;
    auto g = [&](int j, cplx z) {
        cplx v = 1.0 / z;
        for (int i = 1; i < o.x[j]; ++i) v *= (1.0 - z) / (1.0 - z / at1(o.B, i));
        for (double ci : cs) v *= (1.0 - ci * z) / (1.0 - z);
        return v;
    };
    auto pair = [&](cplx a, cplx b) { return (a - b) / (a - q * b); };
    auto r = converge(c, g, pair);
    r.value *= std::pow(q, o.k * (o.k - 1) / 2);
    r.error *= std::pow(q, o.k * (o.k - 1) / 2);
    return r;
}

Quadrature rhs_quadrature(const QHahnObservable& o) { return rhs_quadrature(o, qhahn_contours(o)); }

// ---- partial exclusion form ----

std::string PepConvention::label() const {
    std::ostringstream s;
    s << "h(x" << (h_shift >= 0 ? "+" : "") << h_shift << "), exponent x" << (exponent_shift >= 0 ? "+" : "")
      << exponent_shift << ", sign " << (alternating ? "(-1)^k" : "+1");
    return s.str();
}

double pep_lhs_functional(const PepObservable& o, const std::function<long(int)>& current) {
    double v = 1.0;
    for (int j = 0; j < o.k; ++j) {
        const int x = o.x[j] + o.conv.h_shift;
        const double h = double(current(x));
        const double a = double(o.N) * o.J - double(o.J + 1) * (x - 1) - h - o.gamma - j;
        v *= a * (h - j) / (o.gamma + j);
    }
    return v;
}

namespace {

void check_pep(const PepObservable& o) {
    check_sites(o.k, o.x, o.N);
    for (int x : o.x)
        if (x + o.conv.h_shift < 1) fail(ErrorKind::OutOfDomain, "shifted site must be positive");
}

} // namespace

double pep_lhs_exact(const PepObservable& o, std::size_t bound) {
    check_pep(o);
    const auto law = exact_law(ModelSpec{JGammaPEP{o.J, o.gamma}, {}}, o.N, bound);
    return exact_expectation(law, [&](const std::vector<int>& c) {
        return pep_lhs_functional(o, [&](int x) { return current_of(c, x); });
    });
}

MCEstimate pep_lhs_mc(const PepObservable& o, long samples, std::uint64_t seed, EnsembleOptions opt) {
    check_pep(o);
    return run_ensemble(ModelSpec{JGammaPEP{o.J, o.gamma}, {}}, o.N, samples, seed,
                        [&](const SystemState& s) {
                            return std::vector<double>{pep_lhs_functional(o, [&](int x) { return s.current(x); })};
                        },
                        opt)[0];
}

ContourSpec pep_contours(const PepObservable& o, double spread) {
    check_pep(o);
    // circle 1 is innermost and circle j + 1 contains circle j - 1; the left edges step down
    // by more than 1 and must stay right of 0, which leaves room for k <= 2 only
    const double room = 3.0 - o.k;
    if (room <= 0) fail(ErrorKind::ContourInfeasible, "nested circles around 2..J+1 excluding 0 exist only for k <= 2");
    const double f = 0.25 + 0.5 * spread;
    const double step = o.k > 1 ? 1.0 + room * (1 - f) / (2.0 * (o.k - 1)) : 0.0;
    double L = room * f + step * (o.k - 1);
    const double R = o.J + 1.5 + spread;
    ContourSpec c;
    for (int j = 0; j < o.k; ++j) {
        c.circles.push_back(Circle{0.5 * (L + R), 0.5 * (R - L)});
        L -= step;
    }
    check_pep_contours(o, c);
    return c;
}

void check_pep_contours(const PepObservable& o, const ContourSpec& c) {
    if (int(c.circles.size()) != o.k) fail(ErrorKind::ContourInfeasible, "need one circle per variable");
    for (std::size_t j = 0; j < c.circles.size(); ++j) {
        const auto& C = c.circles[j];
        for (int p = 2; p <= o.J + 1; ++p)
            if (!inside(C, double(p))) fail(ErrorKind::ContourInfeasible, "circle misses a required pole");
        if (!outside(C, 0.0)) fail(ErrorKind::ContourInfeasible, "circle encloses 0");
        for (std::size_t i = 0; i < j; ++i) {
            // circle j + 1 must strictly contain circle i
            const auto& I = c.circles[i];
            if (std::abs(C.center + 1.0 - I.center) + I.radius >= C.radius * (1 - 1e-9))
                fail(ErrorKind::ContourInfeasible, "circles are not nested");
        }
    }
}

Quadrature pep_rhs_quadrature(const PepObservable& o, const ContourSpec& c) {
    check_pep(o);
    check_pep_contours(o, c);
    const double J1 = o.J + 1.0;
    auto g = [&](int j, cplx y) {
        return std::pow((y - J1) / y, o.x[j] + o.conv.exponent_shift) * std::pow((y - 1.0) / (y - J1), o.N);
    };
    auto pair = [](cplx a, cplx b) { return (a - b) / (a - b - 1.0); };
    auto r = converge(c, g, pair);
    if (o.conv.alternating && o.k % 2) r.value = -r.value;
    return r;
}

Quadrature pep_rhs_quadrature(const PepObservable& o) { return pep_rhs_quadrature(o, pep_contours(o)); }

std::vector<SweepEntry> pep_offset_sweep(int J, double gamma, int maxN, int maxk) {
    std::vector<SweepEntry> out;
    for (int hs = -1; hs <= 1; ++hs)
        for (int es = -1; es <= 1; ++es)
            for (bool alt : {true, false}) {
                SweepEntry e{{hs, es, alt}, 0.0};
                for (int N = 1; N <= maxN; ++N)
                    for (int k = 1; k <= maxk; ++k) {
                        std::vector<std::vector<int>> xs =
                            k == 1 ? std::vector<std::vector<int>>{{2}, {3}} : std::vector<std::vector<int>>{{2, 2}, {3, 2}, {4, 3}};
                        for (auto& x : xs) {
                            PepObservable o{k, x, N, J, gamma, e.conv};
                            const double lhs = pep_lhs_exact(o);
                            const cplx rhs = pep_rhs_quadrature(o).value;
                            e.max_residual = std::max(e.max_residual, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
                        }
                    }
                out.push_back(e);
            }
    std::stable_sort(out.begin(), out.end(), [](const SweepEntry& a, const SweepEntry& b) { return a.max_residual < b.max_residual; });
    return out;
}

// ---- reports ----

bool weakly_decreasing(const std::vector<int>& x) { return std::is_sorted(x.rbegin(), x.rend()); }

namespace {

template <class O, class Exact, class MC, class Rhs>
IdentityReport report(const O& o, long samples, std::uint64_t seed, int max_exact_N, EnsembleOptions opt,
                      const Exact& exact, const MC& mc, const Rhs& rhs, ContourSpec contour) {
    IdentityReport r;
    r.contour = contour;
    r.sites_decreasing = weakly_decreasing(o.x);
    r.rhs = rhs(contour);
    if (o.N <= max_exact_N) {
        r.lhs_exact = exact();
        r.exact_vs_rhs = std::abs(*r.lhs_exact - r.rhs.value);
    }
    if (samples > 0) {
        r.lhs_mc = mc(samples, seed, opt);
        const double diff = std::abs(r.lhs_mc->mean - r.rhs.value);
        r.mc_sigmas = r.lhs_mc->stderr_ > 0 ? diff / r.lhs_mc->stderr_ : (diff < 1e-12 ? 0.0 : INFINITY);
    }
    return r;
}

} // namespace

IdentityReport identity_check(const QHahnObservable& o, long samples, std::uint64_t seed, int max_exact_N,
                              EnsembleOptions opt) {
    return report(
        o, samples, seed, max_exact_N, opt, [&] { return lhs_exact(o); },
        [&](long n, std::uint64_t s, EnsembleOptions op) { return lhs_mc(o, n, s, op); },
        [&](const ContourSpec& c) { return rhs_quadrature(o, c); }, qhahn_contours(o));
}

IdentityReport identity_check(const PepObservable& o, long samples, std::uint64_t seed, int max_exact_N,
                              EnsembleOptions opt) {
    auto r = report(
        o, samples, seed, max_exact_N, opt, [&] { return pep_lhs_exact(o); },
        [&](long n, std::uint64_t s, EnsembleOptions op) { return pep_lhs_mc(o, n, s, op); },
        [&](const ContourSpec& c) { return pep_rhs_quadrature(o, c); }, pep_contours(o));
    r.convention = o.conv.label();
    return r;
}

} // namespace dv
