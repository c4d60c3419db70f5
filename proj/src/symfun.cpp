#include "dynvertex/symfun.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>

namespace dv {

Signature::Signature(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        if (parts_[i] < 0) fail(ErrorKind::OutOfDomain, "signature parts must be nonnegative");
        if (i > 0 && parts_[i] > parts_[i - 1]) fail(ErrorKind::OutOfDomain, "signature must be weakly decreasing");
    }
}

int Signature::size() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }

int Signature::multiplicity(int j) const { return int(std::count(parts_.begin(), parts_.end(), j)); }

std::vector<Signature> signatures(int length, int max_part) {
    std::vector<Signature> out;
    std::vector<int> cur;
    std::function<void(int)> rec = [&](int bound) {
        if (int(cur.size()) == length) {
            out.emplace_back(cur);
            return;
        }
        for (int p = bound; p >= 0; --p) {
            cur.push_back(p);
            rec(p);
            cur.pop_back();
        }
    };
    rec(max_part);
    return out;
}

namespace {

void need_columns(const std::vector<cplx>& Z, const std::vector<cplx>& L, int X) {
    if (int(Z.size()) <= X || int(L.size()) <= X)
        fail(ErrorKind::OutOfDomain, "column parameters Z, L must cover columns 0.." + std::to_string(X));
}

std::vector<int> row_sizes(const ColumnSpec& s) {
    if (s.J.empty()) return std::vector<int>(s.W.size(), 1);
    if (s.J.size() != s.W.size()) fail(ErrorKind::OutOfDomain, "J and W must have equal length");
    for (int j : s.J)
        if (j < 1) fail(ErrorKind::OutOfDomain, "fusion sizes must be positive");
    return s.J;
}

cplx fused_weight(int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    if (J == 1) return w1(c, p);
    FusedRecursion rec(p);
    return rec.fused(J, c);
}

} // namespace

cplx partition_function(const Signature& mu, const Signature& nu, const std::vector<cplx>& w,
                        const std::vector<int>& J, cplx base, const std::vector<cplx>& Z,
                        const std::vector<cplx>& L, const EllipticContext& ctx, PathEntry entry,
                        const VertexWeightFn& weight) {
    const int r = int(w.size());
    if (int(J.size()) != r) fail(ErrorKind::OutOfDomain, "row sizes and spectral parameters differ in length");
    const int total = std::accumulate(J.begin(), J.end(), 0);
    const bool left = entry == PathEntry::left;
    if (mu.length() != nu.length() + (left ? total : 0)) return 0.0;
    if (nu.first() > mu.first()) return 0.0;
    const int X = mu.first();
    need_columns(Z, L, X);
    const cplx eta = ctx.eta(), e2 = 2.0 * eta;

    // rows indexed from the bottom from here on
    std::vector<int> Jb(J.rbegin(), J.rend());
    std::vector<cplx> wb(w.rbegin(), w.rend());
    // dynamical parameter at the top of each row in column 0
    std::vector<cplx> phi0(r);
    cplx acc = 0.0;
    for (int y = 0; y < r; ++y) {
        acc += double(left ? -Jb[y] : Jb[y]);
        phi0[y] = base + e2 * acc;
    }

    std::map<std::vector<int>, cplx> states;
    states[left ? Jb : std::vector<int>(r, 0)] = 1.0;
    cplx Lsum = 0.0;
    int nu_before = 0;
    for (int x = 0; x <= X; ++x) {
        const int in_bottom = nu.multiplicity(x), out_top = mu.multiplicity(x);
        std::map<std::vector<int>, cplx> next;
        std::vector<int> out(r);
        for (const auto& [h, wt] : states) {
            // depth-first over the column, bottom to top
            std::function<void(int, int, cplx, int, int)> go = [&](int y, int i1, cplx acc_w, int hsum, int lsum) {
                if (y == r) {
                    if (i1 == out_top) next[out] += acc_w;
                    return;
                }
                const int j1 = h[y];
                hsum += j1;
                lsum += left ? Jb[y] : 0;
                // paths that left row y upward through columns < x
                const int up = nu_before + lsum - hsum;
                UnfusedWeightParams p{wb[y] - Z[x] - eta, phi0[y] + 4.0 * eta * double(up) - e2 * Lsum, L[x], ctx};
                for (int j2 = 0; j2 <= Jb[y]; ++j2) {
                    const int i2 = i1 + j1 - j2;
                    if (i2 < 0) continue;
                    const cplx v = weight(x, Jb[y], {i1, j1, i2, j2}, p);
                    if (v == cplx(0.0)) continue;
                    out[y] = j2;
                    go(y + 1, i2, acc_w * v, hsum, lsum);
                }
            };
            go(0, in_bottom, wt, 0, 0);
        }
        if (next.size() > kSymfunStateLimit) fail(ErrorKind::SizeLimit, "symfun DP state space too large");
        states = std::move(next);
        Lsum += L[x];
        nu_before += in_bottom;
    }
    auto it = states.find(std::vector<int>(r, 0));
    return it == states.end() ? cplx(0.0) : it->second;
}

namespace {

cplx run(const Signature& mu, const Signature& nu, const ColumnSpec& s, PathEntry entry, const VertexWeightFn& wf) {
    const auto J = row_sizes(s);
    const int total = std::accumulate(J.begin(), J.end(), 0);
    const cplx e2 = 2.0 * s.ctx.eta();
    // B(W | lambda) has lambda + 2 eta M at (0, 0); D(W | lambda) has lambda - 2 eta N
    const cplx base = s.lambda + e2 * double(entry == PathEntry::left ? total : -total);
    return partition_function(mu, nu, s.W, J, base, s.Z, s.L, s.ctx, entry, wf);
}

const VertexWeightFn kFused = [](int, int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
    return fused_weight(J, c, p);
};

void require_unfused(const ColumnSpec& s) {
    for (int j : s.J)
        if (j != 1) fail(ErrorKind::OutOfDomain, "unfused partition function given fused rows");
}

} // namespace

cplx b_munu(const Signature& mu, const Signature& nu, const ColumnSpec& spec) {
    require_unfused(spec);
    return run(mu, nu, spec, PathEntry::left, kFused);
}

cplx d_munu(const Signature& mu, const Signature& nu, const ColumnSpec& spec) {
    require_unfused(spec);
    return run(mu, nu, spec, PathEntry::bottom_only, kFused);
}

cplx d_munu_normalized(const Signature& mu, const Signature& nu, const ColumnSpec& spec) {
    cplx norm = 1.0;
    const int N = int(spec.W.size());
    for (int k = 0; k < N; ++k) norm *= f_eval(spec.lambda + 2.0 * spec.ctx.eta() * double(k), spec.ctx);
    return d_munu(mu, nu, spec) * norm;
}

cplx b_fused(const Signature& mu, const Signature& nu, const ColumnSpec& spec) {
    return run(mu, nu, spec, PathEntry::left, kFused);
}

std::vector<cplx> expand_blocks(const ColumnSpec& spec) {
    const auto J = row_sizes(spec);
    std::vector<cplx> out;
    for (std::size_t k = 0; k < J.size(); ++k)
        for (int j = 0; j < J[k]; ++j) out.push_back(spec.W[k] + 2.0 * spec.ctx.eta() * double(j));
    return out;
}

cplx d_rho(const Signature& mu, cplx lambda, const std::vector<cplx>& L, const EllipticContext& ctx) {
    if (!ctx.is_trig()) fail(ErrorKind::ModeError, "the rho specialization needs trigonometric mode");
    const int M = mu.length();
    if (M == 0) return 1.0;
    if (mu.last() == 0) return 0.0;
    need_columns(L, L, mu.first());
    const cplx e2 = 2.0 * ctx.eta();
    auto f = [&](cplx z) { return f_eval(z, ctx); };
    // c_mu without the factors that cancel against the prefactor of D
    cplx c = 1.0;
    int below = 0;
    cplx Lbelow = L[0];
    for (int i = 1; i <= mu.first(); ++i) {
        const int m = mu.multiplicity(i);
        const cplx Lupto = Lbelow + L[i];
        for (int j = 0; j < m; ++j) {
            const cplx den = f(e2 * (L[i] - double(j)));
            check_denominator(den, "c_mu");
            c *= f(lambda + e2 * (double(2 * below + m + j) - Lupto)) * f(lambda + e2 * (double(2 * below + j + 1) - Lbelow)) / den;
        }
        below += m;
        Lbelow = Lupto;
    }
    check_denominator(c, "c_mu");
    cplx num = double(M % 2 ? -1 : 1);
    for (int j = 0; j < M; ++j) num *= f(lambda + e2 * (double(j + 1) - L[0]));
    return num / c;
}

cplx b_stochastic(const Signature& mu, const Signature& nu, const ColumnSpec& spec, const RhoSpecialization& rho) {
    if (!spec.ctx.is_trig()) fail(ErrorKind::ModeError, "stochastic B needs trigonometric mode");
    const auto u = expand_blocks(spec);
    const int r = int(u.size());
    const cplx eta = spec.ctx.eta(), e2 = 2.0 * eta;
    auto f = [&](cplx z) { return f_eval(z, spec.ctx); };
    const cplx dmu = d_rho(mu, spec.lambda, spec.L, spec.ctx);
    if (dmu == cplx(0.0)) return 0.0;
    const cplx dnu = d_rho(nu, spec.lambda + e2 * double(r), spec.L, spec.ctx);
    check_denominator(dnu, "D(rho) of nu");
    const cplx p0 = rho.p0(eta), q0 = rho.q0(eta);
    cplx pre = std::pow(-1.0 / f(e2), r);
    for (int j = 0; j < r; ++j) {
        const cplx den = f(u[j] - p0);
        check_denominator(den, "f(u - p0)");
        pre *= f(u[j] - q0) * f(spec.lambda + e2 * double(j)) / den;
    }
    ColumnSpec flat = spec;
    flat.W = u;
    flat.J.clear();
    return pre * dmu / dnu * b_munu(mu, nu, flat);
}

cplx b_stochastic(const Signature& mu, const Signature& nu, const ColumnSpec& spec) {
    if (spec.Z.empty() || spec.L.empty()) fail(ErrorKind::OutOfDomain, "column 0 parameters missing");
    return b_stochastic(mu, nu, spec, RhoSpecialization{spec.Z[0], spec.L[0]});
}

cplx b_stochastic_vertex_form(const Signature& mu, const Signature& nu, const ColumnSpec& spec) {
    if (!spec.ctx.is_trig()) fail(ErrorKind::ModeError, "stochastic B needs trigonometric mode");
    const VertexWeightFn sig = [](int x, int J, const ArrowConfig& c, const UnfusedWeightParams& p) {
        return x == 0 ? cplx(1.0) : sigma(J, c, p);
    };
    return run(mu, nu, spec, PathEntry::left, sig);
}

} // namespace dv
