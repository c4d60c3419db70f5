#include "dynvertex/models.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>

namespace dv {

namespace {

template <class T>
T at1(const std::vector<T>& v, int i) {
    return v[std::min<std::size_t>(std::size_t(std::max(i, 1)) - 1, v.size() - 1)];
}

template <class... F>
struct overload : F... {
    using F::operator()...;
};
template <class... F>
overload(F...) -> overload<F...>;

[[noreturn]] void bad_weights(const std::string& what, int x, int t, const ModelSpec& spec) {
    std::ostringstream o;
    o << what << " at site " << x << ", time " << t << " (" << model_name(spec) << ")";
    fail(ErrorKind::InadmissibleWeights, o.str());
}

// probability that a singly occupied asym-PEP site sends its particle, kappa = delta q^{-zeta}
double asym_send(double q, double delta, long zeta) {
    if (delta == 0.0) return 1.0 / (1.0 + q);
    const double qz = std::pow(q, double(zeta));
    return (qz - q * delta) / ((q + 1.0) * (qz - delta));
}

// Upsilon(k; s) for the partial exclusion process
double upsilon(const JGammaPEP& m, int k, int s, long h) {
    return m.gamma + double(2 * h + long(m.J + 1) * (k - 1) - long(m.J) * s);
}

double send_prob_jgamma(const JGammaPEP& m, int eta, double Ups) {
    // P[X = eta], the complement of jgamma_keep_prob
    return 1.0 - jgamma_keep_prob(eta, m.J, Ups);
}

} // namespace

const char* model_name(const ModelSpec& spec) {
    return std::visit(overload{[](const GeneralModel&) { return "general"; },
                               [](const QHahnModel&) { return "qhahn"; },
                               [](const JGammaPEP&) { return "pep"; },
                               [](const AsymPEP&) { return "asym-pep"; }},
                      spec.model);
}

int entering(const ModelSpec& spec, int t) {
    return std::visit(overload{[&](const GeneralModel& m) { return at1(m.J, t); },
                               [&](const QHahnModel& m) { return at1(m.J, t); },
                               [](const JGammaPEP& m) { return m.J; }, [](const AsymPEP&) { return 1; }},
                      spec.model);
}

void validate(const ModelSpec& spec) {
    auto bad = [](const std::string& m) { fail(ErrorKind::InadmissibleParameters, m); };
    auto check_J = [&](const std::vector<int>& J) {
        if (J.empty()) bad("J list is empty");
        for (int j : J)
            if (j < 1) bad("J entries must be positive");
    };
    auto check_q = [&](double q) {
        if (!(q > 0.0) || q == 1.0) bad("q must be positive and different from 1");
    };
    std::visit(overload{[&](const GeneralModel& m) {
                            check_q(m.q);
                            check_J(m.J);
                            if (m.U.empty() || m.Xi.empty() || m.S.empty()) bad("U, Xi, S must be nonempty");
                        },
                        [&](const QHahnModel& m) {
                            check_q(m.q);
                            check_J(m.J);
                            if (m.B.empty()) bad("B must be nonempty");
                        },
                        [&](const JGammaPEP& m) {
                            if (m.J < 1) bad("J must be positive");
                            if (!(m.gamma >= m.J + 1)) bad("gamma must be at least J + 1");
                        },
                        [&](const AsymPEP& m) { check_q(m.q); }},
               spec.model);
}

// ---- state ----

long SystemState::current(int x) const {
    const int n = int(occ_.size());
    if (x > n) return 0;
    if (x > frozen) return suffix_[x - frozen - 1];
    const long window = suffix_.empty() ? 0 : suffix_[0];
    return window + long(cap) * (frozen - std::max(x, 1) + 1);
}

int SystemState::rightmost() const {
    int n = int(occ_.size());
    while (n > 0 && occ_[n - 1] == 0) --n;
    return n;
}

std::vector<int> SystemState::configuration() const { return std::vector<int>(occ_.begin(), occ_.begin() + rightmost()); }

void SystemState::refresh() {
    occ_.resize(rightmost());
    if (cap > 0)
        while (frozen < int(occ_.size()) && occ_[frozen] == cap) ++frozen;
    suffix_.assign(occ_.size() - std::min<std::size_t>(occ_.size(), frozen), 0);
    long acc = 0;
    for (int i = int(occ_.size()) - 1; i >= frozen; --i) {
        acc += occ_[i];
        suffix_[i - frozen] = acc;
    }
}

// ---- sampler ----

Sampler::Sampler(ModelSpec spec) : spec_(std::move(spec)) { validate(spec_); }

int kappa_q_exponent(const ModelSpec& spec, int t, long h_at_x) {
    long e = -2 * h_at_x;
    for (int k = 1; k <= t; ++k) e += entering(spec, k);
    return int(e);
}

std::vector<double> Sampler::local_law(int x, int t, int i1, int j1, long h) {
    const int s = t - 1;
    return std::visit(
        overload{
            [&](const GeneralModel& m) {
                const auto key = std::make_tuple(x, t, i1, j1, h);
                if (auto it = memo_.find(key); it != memo_.end()) return it->second;
                const int J = at1(m.J, t);
                double kappa = m.delta * std::pow(m.q, double(kappa_q_exponent(spec_, s, h)));
                for (int k = 1; k < x; ++k) kappa *= at1(m.S, k) * at1(m.S, k);
                const auto row = psi_row(i1, j1, PsiParams{at1(m.U, t) * at1(m.Xi, x), at1(m.S, x), m.q, J, kappa});
                std::vector<double> out(row.size());
                for (std::size_t k = 0; k < row.size(); ++k) {
                    if (std::abs(row[k].imag()) > 1e-10 * std::max(1.0, std::abs(row[k].real())))
                        bad_weights("complex weight", x, t, spec_);
                    out[k] = row[k].real();
                }
                if (memo_.size() > 1000000) memo_.clear();
                return memo_[key] = out;
            },
            [&](const QHahnModel& m) {
                const auto key = std::make_tuple(x, t, i1, 0, h);
                if (auto it = memo_.find(key); it != memo_.end()) return it->second;
                const int J = at1(m.J, t);
                const double b = at1(m.B, x);
                double kappa = m.delta * std::pow(m.q, double(kappa_q_exponent(spec_, s, h)));
                for (int k = 1; k < x; ++k) kappa *= at1(m.B, k);
                auto out = phi_row(i1, PhiParams{m.q, b * std::pow(m.q, J), b, kappa});
                out.resize(std::max<std::size_t>(out.size(), J + 1), 0.0);
                if (memo_.size() > 1000000) memo_.clear();
                return memo_[key] = out;
            },
            [&](const JGammaPEP& m) {
                std::vector<double> out(m.J + 1, 0.0);
                if (i1 == 0) {
                    out[0] = 1.0;
                    return out;
                }
                if (i1 > m.J + 1) bad_weights("site above capacity", x, t, spec_);
                const double keep = jgamma_keep_prob(i1, m.J, upsilon(m, x, s, h));
                out[i1 - 1] = keep;
                if (i1 <= m.J) out[i1] = 1.0 - keep;
                return out;
            },
            [&](const AsymPEP& m) {
                std::vector<double> out(2, 0.0);
                if (i1 == 0) out[0] = 1.0;
                else if (i1 >= 2) out[1] = 1.0;
                else {
                    const double p = asym_send(m.q, m.delta, 2 * h + 2 * (x - 1) - s);
                    out[0] = 1.0 - p;
                    out[1] = p;
                }
                return out;
            }},
        spec_.model);
}

int Sampler::sample(const std::vector<double>& w, std::mt19937_64& g, int x, int t) {
    double sum = 0.0;
    int nonzero = 0, last = 0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!std::isfinite(w[k])) bad_weights("non-finite weight", x, t, spec_);
        if (w[k] < -1e-12) bad_weights("negative weight " + std::to_string(w[k]), x, t, spec_);
        if (w[k] < 0.0 && w[k] != 0.0) ++stats.clamped;
        if (w[k] > 0.0) {
            sum += w[k];
            ++nonzero;
            last = int(k);
        }
    }
    if (std::abs(sum - 1.0) > 1e-10) bad_weights("weights sum to " + std::to_string(sum), x, t, spec_);
    if (nonzero == 1) return last;
    const double u = uniform01(g) * sum;
    double acc = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] <= 0.0) continue;
        acc += w[k];
        if (u < acc) return int(k);
    }
    return last;
}

void Sampler::step(SystemState& s, std::vector<VertexRecord>* trace) {
    if (s.suffix_.size() + s.frozen != s.occ_.size()) s.refresh();
    std::visit(overload{[&](const JGammaPEP& m) { step_jgamma(s, m, trace); },
                        [&](const AsymPEP& m) { step_asym(s, m, trace); },
                        [&](const auto&) { step_sweep(s, trace); }},
               spec_.model);
    s.refresh();
}

void Sampler::step_sweep(SystemState& s, std::vector<VertexRecord>* trace) {
    const int t = s.time + 1;
    const int Jt = entering(spec_, t);
    const int old_n = int(s.occ_.size());
    int j1 = Jt;
    for (int x = 1;; ++x) {
        if (x > int(s.occ_.size())) {
            if (j1 == 0) break;
            s.occ_.push_back(0);
        }
        const int i1 = s.occ_[x - 1];
        if (i1 == 0 && j1 == 0) continue;
        const long h = x <= old_n ? s.current(x) : 0;
        const int j2 = sample(local_law(x, t, i1, j1, h), s.rng, x, t);
        const int i2 = i1 + j1 - j2;
        if (i2 < 0) bad_weights("arrow conservation violated", x, t, spec_);
        if (trace) trace->push_back({x, {i1, j1, i2, j2}});
        s.occ_[x - 1] = i2;
        j1 = j2;
    }
    s.total += Jt;
    s.time = t;
}

void Sampler::step_jgamma(SystemState& s, const JGammaPEP& m, std::vector<VertexRecord>* trace) {
    s.cap = m.J + 1;
    const int t = s.time + 1, sprev = s.time;
    const int old_n = int(s.occ_.size());
    if (trace)
        for (int x = 1; x <= s.frozen; ++x) trace->push_back({x, {m.J + 1, m.J, m.J + 1, m.J}});
    int j1 = m.J;  // X_{k-1}
    for (int x = s.frozen + 1;; ++x) {
        if (x > int(s.occ_.size())) {
            if (j1 == 0) break;
            s.occ_.push_back(0);
        }
        const int eta = s.occ_[x - 1];
        if (eta == 0 && j1 == 0) continue;
        int X = 0;
        if (eta > m.J + 1) bad_weights("site above capacity", x, t, spec_);
        if (eta == m.J + 1) X = m.J;
        else if (eta > 0) {
            const long h = x <= old_n ? s.current(x) : 0;
            const double p = send_prob_jgamma(m, eta, upsilon(m, x, sprev, h));
            if (p < -1e-12 || p > 1.0 + 1e-12) bad_weights("probability outside [0, 1]", x, t, spec_);
            X = uniform01(s.rng) < p ? eta : eta - 1;
        }
        if (trace) trace->push_back({x, {eta, j1, eta + j1 - X, X}});
        s.occ_[x - 1] = eta + j1 - X;
        j1 = X;
    }
    s.total += m.J;
    s.time = t;
}

void Sampler::step_asym(SystemState& s, const AsymPEP& m, std::vector<VertexRecord>* trace) {
    s.cap = 2;
    const int t = s.time + 1, sprev = s.time;
    const int old_n = int(s.occ_.size());
    if (trace)
        for (int x = 1; x <= s.frozen; ++x) trace->push_back({x, {2, 1, 2, 1}});
    int j1 = 1;
    for (int x = s.frozen + 1;; ++x) {
        if (x > int(s.occ_.size())) {
            if (j1 == 0) break;
            s.occ_.push_back(0);
        }
        const int eta = s.occ_[x - 1];
        if (eta == 0 && j1 == 0) continue;
        int X = eta >= 2 ? 1 : 0;
        if (eta > 2) bad_weights("site above capacity", x, t, spec_);
        if (eta == 1) {
            const long h = x <= old_n ? s.current(x) : 0;
            const double p = asym_send(m.q, m.delta, 2 * h + 2 * (x - 1) - sprev);
            if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) bad_weights("probability outside [0, 1]", x, t, spec_);
            X = uniform01(s.rng) < p ? 1 : 0;
        }
        if (trace) trace->push_back({x, {eta, j1, eta + j1 - X, X}});
        s.occ_[x - 1] = eta + j1 - X;
        j1 = X;
    }
    s.total += 1;
    s.time = t;
}

// ---- seeds and sums ----

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index) {
    return splitmix64(base_seed + index * 0x9E3779B97F4A7C15ull);
}

double pairwise_sum(const double* v, std::size_t n, std::size_t stride) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i * stride];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h, stride) + pairwise_sum(v + h * stride, n - h, stride);
}

// ---- exact law ----

long current_of(const std::vector<int>& conf, int x) {
    long h = 0;
    for (int k = std::max(x, 1); k <= int(conf.size()); ++k) h += conf[k - 1];
    return h;
}

ExactLaw exact_law(const ModelSpec& spec, int N, std::size_t bound, bool allow_signed) {
    Sampler smp(spec);
    const int extra = spec.site_capacity_hint.value_or(8);
    std::map<std::vector<int>, double> states{{{}, 1.0}};
    for (int t = 1; t <= N; ++t) {
        std::map<std::vector<int>, double> next;
        for (const auto& [conf, pr] : states) {
            const int n = int(conf.size());
            std::vector<long> h(n + 2, 0);
            for (int x = n; x >= 1; --x) h[x] = h[x + 1] + conf[x - 1];
            std::vector<int> cur = conf;
            std::function<void(int, int, double)> go = [&](int x, int j1, double w) {
                if (x > int(cur.size()) && j1 == 0) {
                    std::vector<int> c = cur;
                    while (!c.empty() && c.back() == 0) c.pop_back();
                    next[c] += w;
                    return;
                }
                if (x > n + extra) return;
                const bool grew = x > int(cur.size());
                if (grew) cur.push_back(0);
                const int i1 = cur[x - 1];
                const auto law = smp.local_law(x, t, i1, j1, x <= n ? h[x] : 0);
                for (int j2 = 0; j2 < int(law.size()); ++j2) {
                    const double p = law[j2];
                    if (p < -1e-12 && !allow_signed) bad_weights("negative weight", x, t, spec);
                    if (p == 0.0 || (p < 0.0 && !allow_signed)) continue;
                    const int i2 = i1 + j1 - j2;
                    if (i2 < 0) continue;
                    cur[x - 1] = i2;
                    go(x + 1, j2, w * p);
                }
                cur[x - 1] = i1;
                if (grew) cur.pop_back();
            };
            go(1, entering(spec, t), pr);
            if (next.size() > bound) fail(ErrorKind::SizeLimit, "exact law support exceeds the bound");
        }
        states = std::move(next);
    }
    ExactLaw law;
    law.support = std::move(states);
    for (const auto& kv : law.support) law.total_mass += kv.second;
    return law;
}

double exact_expectation(const ExactLaw& law, const std::function<double(const std::vector<int>&)>& f) {
    double e = 0.0;
    for (const auto& [c, p] : law.support) e += p * f(c);
    return e;
}

// ---- ensembles ----

namespace {

int thread_count(const EnsembleOptions& opt) {
    if (opt.deterministic) return 1;
    if (opt.threads > 0) return opt.threads;
    if (const char* env = std::getenv("DYNVERTEX_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

std::vector<std::vector<MCEstimate>> run_ensemble(const ModelSpec& spec, const std::vector<int>& record_times,
                                                  long samples, std::uint64_t base_seed, const ObservableFn& obs,
                                                  EnsembleOptions opt) {
    validate(spec);
    if (samples < 1) fail(ErrorKind::OutOfDomain, "run_ensemble needs at least one sample");
    for (std::size_t i = 1; i < record_times.size(); ++i)
        if (record_times[i] < record_times[i - 1]) fail(ErrorKind::OutOfDomain, "record times must be ascending");
    const std::size_t R = record_times.size();
    std::vector<std::vector<double>> vals(samples);
    std::atomic<long> next{0};
    std::mutex err_mu;
    std::optional<Error> first_err;
    long err_index = -1;
    auto worker = [&] {
        Sampler smp(spec);
        for (long i; (i = next.fetch_add(1)) < samples;) {
            try {
                SystemState st(trajectory_seed(base_seed, std::uint64_t(i)));
                auto& out = vals[i];
                for (int T : record_times) {
                    while (st.time < T) smp.step(st);
                    const auto v = obs(st);
                    out.insert(out.end(), v.begin(), v.end());
                }
            } catch (const Error& e) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!first_err || i < err_index) {
                    first_err = Error(e.kind(), std::string(e.what()) + " (trajectory " + std::to_string(i) + ")");
                    err_index = i;
                }
                next = samples;
            }
        }
    };
    const int nt = std::min<long>(thread_count(opt), samples);
    if (nt == 1) worker();
    else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_err) throw *first_err;
    const std::size_t width = vals[0].size();
    for (const auto& v : vals)
        if (v.size() != width) fail(ErrorKind::OutOfDomain, "observable returned a varying number of values");
    const std::size_t K = R == 0 ? 0 : width / R;
    std::vector<std::vector<MCEstimate>> res(R, std::vector<MCEstimate>(K));
    std::vector<double> col(samples);
    for (std::size_t r = 0; r < R; ++r)
        for (std::size_t k = 0; k < K; ++k) {
            for (long i = 0; i < samples; ++i) col[i] = vals[i][r * K + k];
            const double mean = pairwise_sum(col.data(), col.size()) / double(samples);
            for (long i = 0; i < samples; ++i) col[i] = (col[i] - mean) * (col[i] - mean);
            const double var = samples > 1 ? pairwise_sum(col.data(), col.size()) / double(samples - 1) : 0.0;
            res[r][k] = MCEstimate{mean, std::sqrt(var / double(samples)), samples, base_seed};
        }
    return res;
}

std::vector<MCEstimate> run_ensemble(const ModelSpec& spec, int N, long samples, std::uint64_t base_seed,
                                     const ObservableFn& obs, EnsembleOptions opt) {
    return run_ensemble(spec, std::vector<int>{N}, samples, base_seed, obs, opt)[0];
}

// ---- corner growth ----

int CornerState::at(int x) const {
    const int i = x - x0;
    if (i >= 0 && i < int(heights.size())) return heights[i];
    return std::abs(2 * x - t - 2);
}

double CornerRule::up(int z) const {
    switch (kind) {
    case fixed: return p;
    case dynamic: return 0.5 * (1.0 - 1.0 / (gamma + z));
    case asym_dynamic: return asym_send(q, delta, z);
    }
    return p;
}

CornerState corner_initial() { return CornerState{0, 1, {0}}; }

namespace {

// sites whose height can differ from 2|u| at time t
std::pair<int, int> corner_window(int t) { return {1 - (t + 1) / 2 - 1, 1 + (3 * t + 1) / 2 + 1}; }

} // namespace

void corner_step(CornerState& s, const CornerRule& rule, std::mt19937_64& g) {
    const auto [lo, hi] = corner_window(s.t + 1);
    CornerState n{s.t + 1, lo, std::vector<int>(hi - lo + 1)};
    for (int x = lo; x <= hi; ++x) {
        const int a = s.at(x - 1), b = s.at(x);
        if (a != b) n.heights[x - lo] = (a + b) / 2;
        else n.heights[x - lo] = uniform01(g) < rule.up(a) ? a + 1 : a - 1;
    }
    s = std::move(n);
}

CornerState corner_view(const std::vector<int>& conf, int t, int lo, int hi) {
    CornerState c{t, lo, {}};
    const long h1 = current_of(conf, 1);
    for (int x = lo; x <= hi; ++x) {
        const long h = x >= 1 ? current_of(conf, x) : h1 + 2L * (1 - x);
        c.heights.push_back(int(2 * h + 2 * (x - 1) - t));
    }
    return c;
}

CornerState corner_view(const SystemState& s, int lo, int hi) { return corner_view(s.configuration(), s.time, lo, hi); }

std::map<std::vector<int>, double> corner_exact_law(const CornerRule& rule, int t, int lo, int hi) {
    std::map<std::vector<int>, double> states;
    const auto c0 = corner_initial();
    std::map<std::pair<int, std::vector<int>>, double> cur{{{c0.x0, c0.heights}, 1.0}};
    for (int step = 0; step < t; ++step) {
        std::map<std::pair<int, std::vector<int>>, double> next;
        const auto [wlo, whi] = corner_window(step + 1);
        for (const auto& [key, pr] : cur) {
            const CornerState s{step, key.first, key.second};
            std::vector<int> h(whi - wlo + 1);
            std::function<void(int, double)> go = [&](int x, double w) {
                if (x > whi) {
                    next[{wlo, h}] += w;
                    return;
                }
                const int a = s.at(x - 1), b = s.at(x);
                if (a != b) {
                    h[x - wlo] = (a + b) / 2;
                    go(x + 1, w);
                    return;
                }
                const double p = rule.up(a);
                h[x - wlo] = a + 1;
                if (p > 0) go(x + 1, w * p);
                h[x - wlo] = a - 1;
                if (p < 1) go(x + 1, w * (1 - p));
            };
            go(wlo, pr);
        }
        cur = std::move(next);
    }
    for (const auto& [key, pr] : cur) {
        const CornerState s{t, key.first, key.second};
        std::vector<int> v;
        for (int x = lo; x <= hi; ++x) v.push_back(s.at(x));
        states[v] += pr;
    }
    return states;
}

} // namespace dv
