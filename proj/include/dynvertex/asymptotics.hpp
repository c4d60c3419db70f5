#pragma once
// Limit objects for the large-time behaviour of the partial exclusion processes, and the
// finite-T experiments that compare simulations against them.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dynvertex/models.hpp"

namespace dv {

// H(s, r) = (2 pi i)^{-1} int exp(r J z^2 / 2 - s (J + 1) z) dz / z^2 over Re z = 1, oriented
// upwards; evaluated by adaptive quadrature in z = 1 + i t.
double heat_profile(double s, double r, int J);

// chi_{a,b} has density b^a x^{a-1} e^{-b x} / Gamma(a)
struct GammaLaw {
    double a = 1, b = 1;
};
double gamma_moment(const GammaLaw& g, int m);
double gamma_sample(const GammaLaw& g, std::mt19937_64& rng);
// E[(2 sqrt(s^2 + chi))^m], the limit moments of the rescaled dynamical corner height
double corner_quartic_moment(double s, const GammaLaw& g, int m);

// Law of large numbers and fluctuation scale of the asymmetric process: m(eta), f(eta) in
// eta, and the corner growth versions M(s), F(s) with p = 1 / (1 + q).
enum class Shape { m, f, M, F };
// closed interval on which the shape is evaluated
std::pair<double, double> shape_domain(double q, Shape which);
double lln_shape(double q, Shape which, double point);

// ---- experiments ----

struct ExperimentConfig {
    int J = 1;
    double r = 1.0;
    double gamma = 3.0;
    double q = 0.25;
    std::vector<int> T{1600};
    std::vector<double> s{0.0};
    std::vector<double> eta{0.5};
    std::vector<int> m{1};
    long samples = 1000;
    std::uint64_t seed = 1;
    double tolerance = 0.05;
    double slope_lo = 0.23, slope_hi = 0.43;  // kpz-exponent window
    double lln_tolerance = 0.02;              // asym-scaling law of large numbers
    // added to floor(J r T / (J + 1) + s T^a): with sites numbered from 1 the fully packed
    // initial profile has its edge one site right of J r T / (J + 1)
    int site_offset = 1;
    EnsembleOptions ensemble;
};

// the configuration used by the acceptance runs for each experiment kind
ExperimentConfig default_config(const std::string& kind);
const std::vector<std::string>& experiment_kinds();

struct CheckRecord {
    std::string name;
    double value = 0, stderr_ = 0;  // stderr_ = 0 for closed-form values
    double target = 0;
    double residual = 0;  // relative |value - target| / |target|, or the gated statistic
    double tolerance = 0;
    bool gated = true;
    bool pass = true;
};

// one row per s or eta value, written out as CSV by the command-line tool
struct ProfileRow {
    double point;
    double theory;
    double mean;
    double stderr_;
};

struct ExperimentReport {
    std::string kind;
    ExperimentConfig config;
    std::vector<CheckRecord> checks;
    std::vector<ProfileRow> profile;
    std::vector<std::string> notes;
    bool passed() const;
};

// kinds: heat, gamma, kpz-exponent, f-collapse, asym-scaling (lln, exponent and collapse from
// one ensemble), corner-quartic
ExperimentReport run_experiment(const std::string& kind, const ExperimentConfig& c);

// least-squares slope of y against x
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace dv
