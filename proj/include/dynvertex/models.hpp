#pragma once
// Monte Carlo samplers for the dynamical particle systems and an exact forward oracle for
// small systems. Sites are numbered from 1; particles enter at site 1 from the left.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <tuple>
#include <variant>
#include <vector>

#include "dynvertex/weights.hpp"

namespace dv {

// Parameter sequences are indexed from 1 (site or time); past the end the last entry repeats.
struct GeneralModel {
    double q = 0.5, delta = 0.0;
    std::vector<double> U;   // u_t per time step
    std::vector<double> Xi;  // xi_x per site
    std::vector<double> S;   // s_x per site
    std::vector<int> J;      // J_t per time step
};

// b_x per site, c_t = q^{J_t}
struct QHahnModel {
    double q = 0.5, delta = 0.0;
    std::vector<double> B;
    std::vector<int> J;
};

// gamma = +inf gives the non-dynamical partial exclusion process
struct JGammaPEP {
    int J = 1;
    double gamma = std::numeric_limits<double>::infinity();
};

struct AsymPEP {
    double q = 0.5, delta = 0.0;
};

using ModelVariant = std::variant<GeneralModel, QHahnModel, JGammaPEP, AsymPEP>;

struct ModelSpec {
    ModelVariant model;
    std::optional<int> site_capacity_hint;
};

const char* model_name(const ModelSpec& spec);
// number of paths entering at site 1 in step t >= 1
int entering(const ModelSpec& spec, int t);
// throws InadmissibleParameters for malformed parameter lists
void validate(const ModelSpec& spec);

class SystemState {
public:
    SystemState() = default;
    explicit SystemState(std::uint64_t seed) : rng(seed) {}

    int time = 0;
    long total = 0;
    std::mt19937_64 rng;

    int occupancy(int x) const { return x >= 1 && x <= int(occ_.size()) ? occ_[x - 1] : 0; }
    const std::vector<int>& sites() const { return occ_; }  // sites 1..size()
    // h_t(x) = number of particles at sites >= x
    long current(int x) const;
    // last occupied site, 0 when empty
    int rightmost() const;
    // the occupancy with trailing empty sites dropped
    std::vector<int> configuration() const;

    // leading sites known to be full and frozen (jgamma and asym only), each holding cap
    int frozen = 0, cap = 0;
    std::vector<int> occ_;
    std::vector<long> suffix_;  // suffix_[i] = h(frozen + 1 + i)
    void refresh();
};

// Per-vertex record of a sampled step: the vertex at site x takes (i1, j1) to (i2, j2).
struct VertexRecord {
    int x;
    ArrowConfig c;
};

// Counts how often tiny negative weights were clamped to zero.
struct SamplingStats {
    long clamped = 0;
};

class Sampler {
public:
    explicit Sampler(ModelSpec spec);
    const ModelSpec& spec() const { return spec_; }
    // advances the state by one time step; trace receives every vertex with a path through it
    void step(SystemState& s, std::vector<VertexRecord>* trace = nullptr);
    // the law of j2 at a vertex with i1 particles, j1 incoming, during step t, where h is the
    // current at x before the step
    std::vector<double> local_law(int x, int t, int i1, int j1, long h);
    SamplingStats stats;

private:
    ModelSpec spec_;
    std::map<std::tuple<int, int, int, int, long>, std::vector<double>> memo_;
    int sample(const std::vector<double>& w, std::mt19937_64& g, int x, int t);
    void step_sweep(SystemState& s, std::vector<VertexRecord>* trace);
    void step_jgamma(SystemState& s, const JGammaPEP& m, std::vector<VertexRecord>* trace);
    void step_asym(SystemState& s, const AsymPEP& m, std::vector<VertexRecord>* trace);
};

// exponent of q in kappa_{x,t} = delta q^{-2 h_t(x)} prod_{k<x} b_k prod_{k<=t} c_k, ignoring b
int kappa_q_exponent(const ModelSpec& spec, int t, long h_at_x);

// uniform draw in [0, 1)
inline double uniform01(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }

// published splitmix64 finalizer; trajectory i gets splitmix64(base + (i+1) * golden)
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t trajectory_seed(std::uint64_t base_seed, std::uint64_t index);

struct ExactLaw {
    std::map<std::vector<int>, double> support;  // configuration (trailing zeros dropped) -> probability
    double total_mass = 0;
};

// allow_signed skips the sign check, so that non-positive parameter choices still give the
// (signed) measure for identity tests
ExactLaw exact_law(const ModelSpec& spec, int N, std::size_t bound = 200000, bool allow_signed = false);
// exact expectation of a function of the configuration
double exact_expectation(const ExactLaw& law, const std::function<double(const std::vector<int>&)>& f);
// current of a trimmed configuration
long current_of(const std::vector<int>& conf, int x);

struct MCEstimate {
    double mean = 0, stderr_ = 0;
    long n_samples = 0;
    std::uint64_t base_seed = 0;
};

// observable evaluated on a state, returning one value per named quantity
using ObservableFn = std::function<std::vector<double>(const SystemState&)>;

struct EnsembleOptions {
    int threads = 0;  // 0: DYNVERTEX_THREADS or hardware concurrency
    bool deterministic = false;  // forces one thread
};

// Runs `samples` trajectories and evaluates obs after each time in record_times (ascending).
// result[i][k] is the estimate of observable k at record_times[i].
std::vector<std::vector<MCEstimate>> run_ensemble(const ModelSpec& spec, const std::vector<int>& record_times,
                                                  long samples, std::uint64_t base_seed, const ObservableFn& obs,
                                                  EnsembleOptions opt = {});
// single-time convenience form
std::vector<MCEstimate> run_ensemble(const ModelSpec& spec, int N, long samples, std::uint64_t base_seed,
                                     const ObservableFn& obs, EnsembleOptions opt = {});

// sum in a fixed pairwise order
double pairwise_sum(const double* v, std::size_t n, std::size_t stride = 1);

// ---- corner growth ----

// Height function zeta_t at the grid points u = x - t/2 - 1, x integer; outside the stored
// window zeta_t(u) = 2|u|.
struct CornerState {
    int t = 0;
    int x0 = 0;             // site index of heights[0]
    std::vector<int> heights;
    int at(int x) const;    // zeta_t at the point of site index x
    double point(int x) const { return x - 0.5 * t - 1.0; }
};

// up-probability of a flat segment at height z, time t
struct CornerRule {
    enum Kind { fixed, dynamic, asym_dynamic } kind = fixed;
    double p = 0.5;
    double gamma = 0;
    double q = 0.5, delta = 0;
    double up(int height) const;
};

CornerState corner_initial();
void corner_step(CornerState& s, const CornerRule& rule, std::mt19937_64& g);
// the height function of a J = 1 partial exclusion state, on sites [lo, hi]
CornerState corner_view(const SystemState& s, int lo, int hi);
CornerState corner_view(const std::vector<int>& conf, int t, int lo, int hi);
// exact law of the heights on sites [lo, hi] after t steps of the midpoint dynamics
std::map<std::vector<int>, double> corner_exact_law(const CornerRule& rule, int t, int lo, int hi);

} // namespace dv
