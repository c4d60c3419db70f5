#include <cmath>

#include "doctest.h"
#include "dynvertex/models.hpp"

using namespace dv;

namespace {

double tv(const ExactLaw& a, const ExactLaw& b) {
    std::map<std::vector<int>, double> d;
    for (auto& [c, p] : a.support) d[c] += p;
    for (auto& [c, p] : b.support) d[c] -= p;
    double s = 0;
    for (auto& kv : d) s += std::abs(kv.second);
    return 0.5 * s;
}

// frequencies of configurations from n independent trajectories
std::map<std::vector<int>, double> frequencies(const ModelSpec& spec, int N, long n, std::uint64_t seed) {
    Sampler smp(spec);
    std::map<std::vector<int>, double> f;
    for (long i = 0; i < n; ++i) {
        SystemState s(trajectory_seed(seed, i));
        for (int t = 0; t < N; ++t) smp.step(s);
        f[s.configuration()] += 1.0 / double(n);
    }
    return f;
}

void check_mc_against_exact(const ModelSpec& spec, int N, long n, std::uint64_t seed) {
    const auto law = exact_law(spec, N);
    CHECK(std::abs(law.total_mass - 1.0) < 1e-10);
    auto f = frequencies(spec, N, n, seed);
    int checked = 0;
    for (auto& [c, p] : law.support) {
        CHECK(p >= -1e-12);
        if (p < 1e-3) continue;
        const double sigma = std::sqrt(p * (1 - p) / double(n));
        CHECK(std::abs(f[c] - p) < 4 * sigma + 1e-12);
        ++checked;
    }
    CHECK(checked > 1);
    for (auto& [c, fr] : f) CHECK(law.support.count(c) == 1);
}

std::vector<double> h_at(const SystemState& s, int x) { return {double(s.current(x))}; }

} // namespace

TEST_SUITE("models") {

TEST_CASE("first step and the current") {
    for (int J : {1, 2, 3}) {
        Sampler smp(ModelSpec{JGammaPEP{J, 7.0}});
        SystemState s(11);
        CHECK(s.current(1) == 0);
        smp.step(s);
        CHECK(s.occupancy(1) == J);
        CHECK(s.configuration() == std::vector<int>{J});
        for (int t = 2; t <= 40; ++t) {
            smp.step(s);
            CHECK(s.current(1) == long(J) * t);
            for (int x = 1; x <= s.rightmost() + 1; ++x) CHECK(s.current(x) >= s.current(x + 1));
            CHECK(s.current(s.rightmost() + 1) == 0);
        }
    }
    QHahnModel m{0.5, 0.0, {8.0}, {1, 2}};
    Sampler q(ModelSpec{m});
    SystemState s(3);
    for (int t = 1; t <= 5; ++t) q.step(s);
    CHECK(s.current(1) == 1 + 2 * 4);
    CHECK(s.total == 9);
}

TEST_CASE("exact law basics") {
    QHahnModel m{0.5, -0.5, {1.0 / 8}, {1}};
    auto l0 = exact_law(ModelSpec{m}, 0);
    CHECK(l0.support.size() == 1);
    CHECK(l0.support.begin()->first.empty());
    auto l1 = exact_law(ModelSpec{m}, 1);
    CHECK(l1.support.size() == 1);
    CHECK(l1.support.at({1}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(exact_law(ModelSpec{JGammaPEP{2, 10}}, 6, 10), Error);
}

TEST_CASE("q-Hahn against the general model") {
    // u xi = s reduces psi to phi with b = s^2, a = s^2 q^J
    const double q = 0.5, u = 0.7;
    for (double delta : {0.0, -0.5})
        for (double b : {5.0, 0.7})
            for (std::vector<int> J : {std::vector<int>{1}, std::vector<int>{2}, std::vector<int>{1, 2}}) {
                const double s = std::sqrt(b);
                GeneralModel g{q, delta, {u}, {s / u}, {s}, J};
                QHahnModel h{q, delta, {b}, J};
                // signed measures: only b = 5 with J = 1 is a probability law here
                const auto l1 = exact_law(ModelSpec{g}, 2, 200000, true), l2 = exact_law(ModelSpec{h}, 2, 200000, true);
                CHECK(l1.support.size() > 1);
                CHECK(tv(l1, l2) < 1e-10);
            }
    const auto a = exact_law(ModelSpec{GeneralModel{q, -0.5, {u}, {std::sqrt(5.0) / u}, {std::sqrt(5.0)}, {1}}}, 3);
    const auto b = exact_law(ModelSpec{QHahnModel{q, -0.5, {5.0}, {1}}}, 3);
    CHECK(std::abs(a.total_mass - 1.0) < 1e-10);
    CHECK(tv(a, b) < 1e-10);
}

TEST_CASE("local laws against the closed forms") {
    Sampler a(ModelSpec{AsymPEP{0.25, -0.5}});
    for (int x = 1; x <= 4; ++x)
        for (long h = 0; h <= 3; ++h) {
            const int t = 3;
            const long zeta = 2 * h + 2 * (x - 1) - (t - 1);
            const double kappa = -0.5 * std::pow(0.25, -double(zeta));
            auto law = a.local_law(x, t, 1, 0, h);
            CHECK(law[1] == doctest::Approx(asym_pep_phi(1, 1, 0.25, kappa)).epsilon(1e-12));
            CHECK(law[0] == doctest::Approx(asym_pep_phi(0, 1, 0.25, kappa)).epsilon(1e-12));
        }
    for (int J : {1, 2, 3}) {
        const double gamma = 9.5;
        Sampler p(ModelSpec{JGammaPEP{J, gamma}});
        for (int eta = 1; eta <= J + 1; ++eta) {
            const int x = 3, t = 2;
            const long h = 4;
            const double ups = gamma + 2 * h + (J + 1) * (x - 1) - J * (t - 1);
            auto law = p.local_law(x, t, eta, 0, h);
            for (int j = 0; j <= J; ++j) CHECK(law[j] == doctest::Approx(hahn_pep_phi(j, eta, J, 1, ups)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Monte Carlo against the exact law") {
    check_mc_against_exact(ModelSpec{JGammaPEP{2, 5.0}}, 3, 100000, 1);
    check_mc_against_exact(ModelSpec{AsymPEP{0.5, -0.5}}, 3, 100000, 2);
    const double q = 0.5;
    check_mc_against_exact(ModelSpec{QHahnModel{q, -0.5, {std::pow(q, -3.0)}, {1, 2}}}, 3, 100000, 3);
}

TEST_CASE("two-step current of the gamma process") {
    const double gamma = 10;
    ModelSpec spec{JGammaPEP{1, gamma}};
    auto law = exact_law(spec, 2);
    const double p = exact_expectation(law, [](const std::vector<int>& c) { return double(current_of(c, 2)); });
    CHECK(p == doctest::Approx(gamma / (2 * (gamma + 1))).epsilon(1e-13));
    auto est = run_ensemble(spec, 2, 20000, 99, [](const SystemState& s) { return h_at(s, 2); });
    CHECK(std::abs(est[0].mean - p) < 4 * est[0].stderr_);
}

TEST_CASE("ensembles") {
    ModelSpec spec{JGammaPEP{2, 6.0}};
    auto one = run_ensemble(spec, 5, 100, 1, [](const SystemState&) { return std::vector<double>{1.0}; });
    CHECK(one[0].mean == 1.0);
    CHECK(one[0].stderr_ == 0.0);
    auto obs = [](const SystemState& s) { return std::vector<double>{double(s.current(3)), double(s.current(5))}; };
    auto a = run_ensemble(spec, 12, 300, 42, obs, {0, true});
    auto b = run_ensemble(spec, 12, 300, 42, obs, {0, true});
    auto c = run_ensemble(spec, 12, 300, 42, obs, {3, false});
    for (int k = 0; k < 2; ++k) {
        CHECK(a[k].mean == b[k].mean);
        CHECK(a[k].stderr_ == b[k].stderr_);
        CHECK(a[k].mean == c[k].mean);
    }
    auto d = run_ensemble(spec, 12, 300, 43, obs, {0, true});
    CHECK((a[0].mean != d[0].mean || a[1].mean != d[1].mean));
    CHECK(trajectory_seed(1, 0) != trajectory_seed(1, 1));

    auto multi = run_ensemble(spec, {3, 12}, 300, 42, obs, {0, true});
    CHECK(multi.size() == 2);
    CHECK(multi[1][0].mean == a[0].mean);

    const double v[] = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
    CHECK(pairwise_sum(v, 11) == 66.0);
}

TEST_CASE("dynamical parameter bookkeeping") {
    // kappa picks up q^{J_t - 2 j1} going up through a vertex and q^{2 i2} b_x going right
    const double q = 0.5;
    ModelSpec spec{QHahnModel{q, -0.5, {std::pow(q, -3.0)}, {1, 2, 1}}};
    Sampler smp(spec);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        SystemState s(seed);
        for (int t = 1; t <= 6; ++t) {
            const auto before = s.configuration();
            std::vector<VertexRecord> tr;
            smp.step(s, &tr);
            const auto after = s.configuration();
            for (auto& v : tr) {
                const int e_prev = kappa_q_exponent(spec, t - 1, current_of(before, v.x));
                const int e_now = kappa_q_exponent(spec, t, current_of(after, v.x));
                CHECK(e_now == e_prev + entering(spec, t) - 2 * v.c.j1);
                CHECK(kappa_q_exponent(spec, t, current_of(after, v.x + 1)) == e_now + 2 * v.c.i2);
                CHECK(v.c.i1 + v.c.j1 == v.c.i2 + v.c.j2);
            }
        }
    }
}

TEST_CASE("partial exclusion caps") {
    for (int J : {1, 2}) {
        const double gamma = J + 1.5;
        JGammaPEP m{J, gamma};
        Sampler smp(ModelSpec{m});
        SystemState s(5);
        for (int t = 1; t <= 200; ++t) {
            std::vector<VertexRecord> tr;
            const SystemState before = s;
            smp.step(s, &tr);
            for (auto& v : tr) {
                CHECK(v.c.i2 <= J + 1);
                const double ups = gamma + 2.0 * before.current(v.x) + (J + 1) * (v.x - 1) - J * (t - 1);
                CHECK(ups >= gamma);
            }
        }
        CHECK(s.current(1) == 200L * J);
    }
}

TEST_CASE("admissibility errors") {
    CHECK_THROWS_AS(Sampler(ModelSpec{JGammaPEP{2, 2.5}}), Error);
    CHECK_THROWS_AS(Sampler(ModelSpec{QHahnModel{0.5, 0, {}, {1}}}), Error);
    // b > 1 with a = b q gives negative q-Hahn weights
    Sampler bad(ModelSpec{QHahnModel{0.5, 0.0, {0.3}, {1}}});
    SystemState s(1);
    bool threw = false;
    try {
        for (int t = 0; t < 10; ++t) bad.step(s);
    } catch (const Error& e) {
        threw = e.kind() == ErrorKind::InadmissibleWeights;
    }
    CHECK(threw);
}

TEST_CASE("corner growth") {
    auto c = corner_initial();
    for (int x = -3; x <= 5; ++x) CHECK(c.at(x) == std::abs(2 * (x - 1)));
    std::mt19937_64 g(1);
    corner_step(c, CornerRule{}, g);
    CHECK(c.at(1) == 1);
    CHECK(c.at(2) == 1);
    for (int x = -3; x <= 5; ++x) CHECK(c.at(x) == int(std::abs(2 * c.point(x))));
    for (int t = 2; t <= 30; ++t) {
        corner_step(c, CornerRule{}, g);
        for (int x = -t; x <= 2 * t + 2; ++x) CHECK(c.at(x) >= std::abs(2 * c.point(x)));
    }
    auto v0 = corner_view(std::vector<int>{}, 0, -2, 4);
    for (int x = -2; x <= 4; ++x) CHECK(v0.at(x) == std::abs(2 * (x - 1)));
}

TEST_CASE("corner view against the midpoint dynamics") {
    struct Case {
        ModelSpec spec;
        CornerRule rule;
    };
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<Case> cases = {
        {ModelSpec{JGammaPEP{1, inf}}, CornerRule{CornerRule::fixed, 0.5}},
        {ModelSpec{JGammaPEP{1, 3.0}}, CornerRule{CornerRule::dynamic, 0.5, 3.0}},
        {ModelSpec{AsymPEP{0.5, -0.5}}, CornerRule{CornerRule::asym_dynamic, 0, 0, 0.5, -0.5}},
    };
    for (auto& cs : cases)
        for (int t = 0; t <= 3; ++t) {
            const int lo = -t - 1, hi = 2 * t + 3;
            std::map<std::vector<int>, double> pep;
            for (auto& [conf, p] : exact_law(cs.spec, t).support) pep[corner_view(conf, t, lo, hi).heights] += p;
            auto mid = corner_exact_law(cs.rule, t, lo, hi);
            REQUIRE(pep.size() == mid.size());
            for (auto& [h, p] : mid) CHECK(pep[h] == doctest::Approx(p).epsilon(1e-12));
        }
}

}
