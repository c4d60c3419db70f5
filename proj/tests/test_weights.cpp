#include "doctest.h"
#include "weight_checks.hpp"

using namespace dv;

namespace {

UnfusedWeightParams trig_point() {
    return {cplx(-0.13, 0.02), cplx(0.41, 0.05), 2.3, EllipticContext::trigonometric(cplx(0.07, 0.013))};
}

} // namespace

TEST_SUITE("weights") {

TEST_CASE("unfused weights") {
    auto p = trig_point();
    CHECK(std::abs(w1({0, 0, 0, 0}, p) - 1.0) < 1e-14);
    CHECK(w1({1, 0, 0, 0}, p) == cplx(0.0));
    CHECK(w1({0, 1, 0, 0}, p) == cplx(0.0));

    // (2,1;2,1) by direct substitution
    UnfusedWeightParams d{-0.05, 0.8, 2.0, EllipticContext::trigonometric(0.07)};
    const double eta = 0.07, v = -0.05, lam = 0.8, L = 2.0;
    auto s = [](double x) { return std::sin(kPi * x); };
    const double expect = s(eta * (4 - L) - v) * s(lam + 2 * eta * (2 - L)) / (s(eta * L - v) * s(lam));
    CHECK(std::abs(w1({2, 1, 2, 1}, d) - expect) < 1e-14);
    CHECK(std::abs(column_weight(2, {1}, 2, {1}, d) - expect) < 1e-14);

    UnfusedWeightParams bad = p;
    bad.lambda = 0.0;
    CHECK_THROWS_AS(w1({0, 0, 0, 0}, bad), Error);
}

TEST_CASE("column weights") {
    auto p = trig_point();
    const cplx e2 = 2.0 * p.ctx.eta();
    // two b-type vertices: bottom row at v with lambda + 2 eta, top row at v + 2 eta with lambda
    UnfusedWeightParams bottom{p.v, p.lambda + e2, p.Lambda, p.ctx}, top{p.v + e2, p.lambda, p.Lambda, p.ctx};
    const cplx hand = w1({0, 1, 1, 0}, bottom) * w1({1, 1, 2, 0}, top);
    CHECK(oracle::rel_err(column_weight(0, {1, 1}, 2, {0, 0}, p), hand) < 1e-14);
    CHECK(column_weight(0, {0, 0}, 0, {1, 0}, p) == cplx(0.0));

    // exchangeability in the output vector
    for (int i1 = 0; i1 <= 3; ++i1)
        for (int j1 = 0; j1 <= 2; ++j1) {
            const int i2 = i1 + j1 - 1;
            if (i2 < 0) continue;
            cplx s10 = 0, s01 = 0;
            for (std::vector<int> J1 : {std::vector<int>{0, 0}, {1, 0}, {0, 1}, {1, 1}}) {
                if (J1[0] + J1[1] != j1) continue;
                s10 += column_weight(i1, J1, i2, {1, 0}, p);
                s01 += column_weight(i1, J1, i2, {0, 1}, p);
            }
            CHECK(oracle::rel_err(s10, s01) < 1e-12);
        }
}

TEST_CASE("fused weights: recursion, closed form and special cases") {
    auto p = trig_point();
    CHECK(w_fused_recursive(1, {1, 1, 1, 1}, p) == w1({1, 1, 1, 1}, p));
    CHECK(w_fused_recursive(2, {0, 3, 0, 3}, p) == cplx(0.0));
    CHECK(w_fused_recursive(2, {0, 0, 0, 3}, p) == cplx(0.0));
    CHECK(oracle::rel_err(w_fused_recursive(2, {1, 1, 1, 1}, p), column_sum(2, {1, 1, 1, 1}, p) / 2.0) < 1e-13);
    for (int i = 0; i < 3; ++i) CHECK(oracle::rel_err(w_fused_closed(1, {i, 1, i, 1}, p), w1({i, 1, i, 1}, p)) < 1e-12);
    CHECK(oracle::rel_err(w_fused_special(2, {1, 2, 2, 1}, p, FusedCase::jJ), w_fused_closed(2, {1, 2, 2, 1}, p)) < 1e-12);
    CHECK_THROWS_AS(w_fused_special(2, {1, 1, 1, 1}, p, FusedCase::jJ), Error);
    CHECK_THROWS_AS(w_fused_special(2, {1, 1, 2, 0}, p, FusedCase::vLambda), Error);
    UnfusedWeightParams pv = p;
    pv.v = -p.ctx.eta() * p.Lambda;
    CHECK(w_fused_special(2, {0, 2, 1, 1}, pv, FusedCase::vLambda) == cplx(0.0));

    oracle::Rng r(2024);
    for (auto mode : {Mode::trigonometric, Mode::elliptic}) {
        for (int n = 0; n < 3; ++n) {
            auto q = wcheck::random_params(r, mode);
            auto c = wcheck::oracle_chain(q, 3, 3);
            CHECK(c.enum_vs_rec < 1e-9);
            CHECK(c.rec_vs_closed < 1e-9);
            CHECK(wcheck::special_cases(q, 3, 3) < 1e-9);
            CHECK(wcheck::decomposition(q, 3, 2) < 1e-9);
        }
    }
}

TEST_CASE("stochastic correction and sigma") {
    auto p = trig_point();
    CHECK(std::abs(c_correction(3, {0, 0, 0, 0}, p.lambda, p.Lambda, p.ctx) - 1.0) < 1e-13);
    CHECK(std::abs(sigma(2, {0, 0, 0, 0}, p) - 1.0) < 1e-13);
    for (int J = 1; J <= 3; ++J)
        for (int i = 0; i <= 3; ++i)
            for (int j1 = 0; j1 <= J; ++j1) {
                cplx s = 0;
                for (int j2 = 0; j2 <= J; ++j2) s += sigma(J, {i, j1, i + j1 - j2, j2}, p);
                CHECK(std::abs(s - 1.0) < 1e-10);
            }
    UnfusedWeightParams ell = p;
    ell.ctx = EllipticContext::elliptic(cplx(0, 1), p.ctx.eta());
    CHECK_THROWS_AS(sigma(1, {0, 0, 0, 0}, ell), Error);
}

TEST_CASE("psi weights") {
    PsiParams p{cplx(0.35, -0.2), cplx(0.7, 0.1), 0.4, 2, cplx(0.3, 0.05)};
    CHECK(std::abs(psi({0, 0, 0, 0}, p) - 1.0) < 1e-12);
    CHECK(psi({0, 3, 0, 3}, p) == cplx(0.0));
    CHECK(psi({1, 1, 1, 0}, p) == cplx(0.0));
    for (int J = 1; J <= 3; ++J) {
        p.J = J;
        for (int i = 0; i <= 4; ++i)
            for (int j = 0; j <= J; ++j) {
                auto row = psi_row(i, j, p);
                cplx s = 0;
                for (auto x : row) s += x;
                CHECK(std::abs(s - 1.0) < 1e-10);
                // u = s gives the q-Hahn weights
                PsiParams ps = p;
                ps.u = p.s;
                auto rs = psi_row(i, j, ps);
                PhiParams ph{p.q, p.s * p.s * std::pow(p.q, J), p.s * p.s, p.kappa};
                for (int j2 = 0; j2 <= J; ++j2) CHECK(std::abs(rs[j2] - phi(j2, i, ph)) < 1e-10);
            }
    }
    // the printed series with z = q on its nondegenerate range
    p.J = 3;
    for (auto [i1, j1, j2] : {std::tuple{3, 1, 1}, {3, 1, 2}, {4, 1, 2}, {2, 0, 1}, {4, 2, 1}}) {
        ArrowConfig c{i1, j1, i1 + j1 - j2, j2};
        CHECK(oracle::rel_err(psi_series_form(c, p), psi(c, p)) < 1e-9);
    }
    // kappa -> 0 has a finite limit; negative kappa works through the principal log
    PsiParams k8 = p, k10 = p;
    k8.kappa = 1e-8;
    k10.kappa = 1e-10;
    CHECK(std::abs(psi({2, 1, 2, 1}, k8) - psi({2, 1, 2, 1}, k10)) < 1e-6);
    PsiParams kn = p, kn_s = p;
    kn.kappa = -0.4;
    kn_s.kappa = -0.4;
    kn_s.u = kn.s;
    PhiParams ph{p.q, p.s * p.s * std::pow(p.q, 3), p.s * p.s, -0.4};
    CHECK(std::abs(psi({2, 1, 2, 1}, kn_s) - phi(1, 2, ph)) < 1e-10);
}

TEST_CASE("phi weights and degenerations") {
    PhiParams p{0.3, 0.2, 0.1, -0.5};
    CHECK(phi(0, 0, p) == cplx(1.0));
    CHECK(phi(3, 2, p) == cplx(0.0));
    for (int i = 0; i <= 6; ++i) {
        double s = 0;
        for (double x : phi_row(i, p)) s += x;
        CHECK(std::abs(s - 1.0) < 1e-12);
    }
    const double q = 0.4, k = -0.7;
    CHECK(asym_pep_phi(0, 1, q, k) == doctest::Approx((q - k) / ((q + 1) * (1 - k))).epsilon(1e-12));
    CHECK(asym_pep_phi(1, 1, q, k) == doctest::Approx((1 - q * k) / ((q + 1) * (1 - k))).epsilon(1e-12));
    CHECK(asym_pep_phi(1, 2, q, k) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(asym_pep_phi(1, 1, q, 0.0) == doctest::Approx(1.0 / (1.0 + q)));

    CHECK(jgamma_keep_prob(1, 1, 5.0) == doctest::Approx(0.5 * (1.0 + 1.0 / 5.0)));
    CHECK(jgamma_keep_prob(2, 3, 1e12) == doctest::Approx(0.5));
    CHECK(jgamma_keep_prob(4, 3, 7.0) == doctest::Approx(1.0));
    CHECK(jgamma_keep_prob(0, 3, 7.0) == 0.0);
    CHECK_THROWS_AS(jgamma_keep_prob(1, 3, 2.0), Error);

    // Hahn PEP with A = 1 is the (J; gamma)-PEP: phi(i-1|i) is the keep-one probability
    for (int J = 1; J <= 3; ++J)
        for (int i = 1; i <= J + 1; ++i) {
            const double khat = 9.5;
            double s = 0;
            for (int j = 0; j <= i; ++j) s += hahn_pep_phi(j, i, J, 1, khat);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(hahn_pep_phi(i - 1, i, J, 1, khat) == doctest::Approx(jgamma_keep_prob(i, J, khat)).epsilon(1e-12));
        }
    // hahn PEP is the q -> 1 limit of phi with c = q^J, a = q^{-A}, kappa = q^{-khat}
    {
        const int J = 2, A = 1;
        const double khat = 8.3, qq = 1.0 - 1e-4;
        const double b = std::pow(qq, -A - J), a = std::pow(qq, -A);
        for (int i = 0; i <= A + J; ++i)
            for (int j = 0; j <= std::min(i, J); ++j)
                CHECK(phi(j, i, {qq, a, b, std::pow(qq, -khat)}).real() ==
                      doctest::Approx(hahn_pep_phi(j, i, J, A, khat)).epsilon(1e-2));
    }
    CHECK(aip_phi(0, 3, 1.0, 3.0) == doctest::Approx(0.25));
    CHECK(aip_phi(3, 3, 1.0, 3.0) == doctest::Approx(0.75));
    CHECK(aip_phi(1, 3, 1.0, 3.0) == 0.0);
    // MADM rate is the eps -> 0 slope of phi with a = q, b = (1 - eps) q
    {
        const double qq = 0.45, kh = -0.3, eps = 1e-7;
        for (int i = 1; i <= 3; ++i)
            for (int j = 1; j <= i; ++j)
                CHECK(phi(j, i, {qq, qq, (1 - eps) * qq, kh}).real() / eps ==
                      doctest::Approx(madm_rate(j, i, qq, kh)).epsilon(1e-5));
    }
}

}
