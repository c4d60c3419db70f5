// dynvertex command-line tool. Every run writes a JSON report; the exit code is 0 when all
// gated checks pass, 1 when one fails or the computation raises, 2 for usage or config errors.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dynvertex/asymptotics.hpp"
#include "dynvertex/observables.hpp"
#include "identity_checks.hpp"
#include "symfun_checks.hpp"
#include "weight_checks.hpp"

using json = nlohmann::json;
using namespace dv;

namespace {

// a usage or schema problem found after CLI11 has parsed the flags
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Report {
    json config = json::object();
    json checks = json::array();
    json results = json::object();

    void check(const std::string& name, double value, double residual, double tolerance, bool gated = true) {
        checks.push_back({{"name", name},
                          {"value", value},
                          {"residual", residual},
                          {"tolerance", tolerance},
                          {"gated", gated},
                          {"pass", residual < tolerance}});
    }
    bool passed() const {
        for (auto& c : checks)
            if (c["gated"].get<bool>() && !c["pass"].get<bool>()) return false;
        return true;
    }
};

// shared flags
struct Common {
    std::uint64_t seed = 1;
    std::string out;
    bool deterministic = false;
    int threads = 0;
    EnsembleOptions ensemble() const { return {threads, deterministic}; }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "base seed (64-bit)");
    app->add_option("--out", c.out, "report path (default: stdout)");
    app->add_flag("--deterministic", c.deterministic, "single-threaded reproducible run");
    app->add_option("--threads", c.threads, "worker threads (0: DYNVERTEX_THREADS or all cores)");
}

json cjson(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json estimate(const MCEstimate& e) {
    return {{"mean", e.mean}, {"stderr", e.stderr_}, {"samples", e.n_samples}, {"base_seed", e.base_seed}};
}

json contour_json(const ContourSpec& c) {
    json a = json::array();
    for (auto& k : c.circles) a.push_back({{"center", cjson(k.center)}, {"radius", k.radius}});
    return a;
}

int emit(const std::string& sub, const Common& c, Report& r, double seconds) {
    json doc{{"tool", "dynvertex"},
             {"version", DYNVERTEX_VERSION},
             {"subcommand", sub},
             {"seed", c.seed},
             {"config", r.config},
             {"checks", r.checks},
             {"results", r.results},
             {"passed", r.passed()},
             {"timing", {{"wall_seconds", seconds}}}};
    const std::string text = doc.dump(2) + "\n";
    if (c.out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(c.out);
        if (!f) throw ConfigError("cannot write " + c.out);
        f << text;
    }
    return r.passed() ? 0 : 1;
}

// ---- check-weights ----

struct WeightArgs {
    std::string family = "all", grid = "default";
};

void run_check_weights(const WeightArgs& a, const Common& c, Report& r) {
    const bool small = a.grid == "small";
    r.config = {{"family", a.family}, {"grid", a.grid}};
    if (a.family != "fused") {
        const auto s = wcheck::stochasticity(c.seed, small ? 24 : 240);
        r.results["stochastic_points"] = s.points;
        r.results["psi_rows"] = s.rows;
        if (a.family != "psi") r.check("sum_j phi = 1", s.phi_sum, s.phi_sum, 1e-10);
        if (a.family != "phi") {
            r.check("sum_j2 psi = 1", s.psi_sum, s.psi_sum, 1e-10);
            r.check("psi(u = s) = phi", s.psi_vs_phi, s.psi_vs_phi, 1e-10);
        }
    }
    if (a.family == "fused" || a.family == "all") {
        for (auto mode : {Mode::trigonometric, Mode::elliptic}) {
            const std::string m = mode == Mode::trigonometric ? "trigonometric" : "elliptic";
            oracle::Rng g(c.seed + (mode == Mode::elliptic));
            double er = 0, rc = 0, sp = 0;
            int configs = 0;
            for (int i = 0; i < (small ? 3 : 20); ++i) {
                const auto p = wcheck::random_params(g, mode);
                const auto ch = wcheck::oracle_chain(p);
                er = std::max(er, ch.enum_vs_rec);
                rc = std::max(rc, ch.rec_vs_closed);
                sp = std::max(sp, wcheck::special_cases(p));
                configs += ch.configs;
            }
            r.results["fused_configs_" + m] = configs;
            r.check("column enumeration = recursion (" + m + ")", er, er, 1e-9);
            r.check("recursion = closed form (" + m + ")", rc, rc, 1e-9);
            r.check("special cases (" + m + ")", sp, sp, 1e-9);
        }
    }
}

// ---- specfun ----

struct SpecArgs {
    std::string check = "all";
    int points = 100;
};

std::vector<EllipticContext> spec_contexts() {
    return {EllipticContext::elliptic(cplx(0, 1), cplx(0.07, 0.01)), EllipticContext::elliptic(cplx(0.1, 1.3), cplx(0.05, 0.0)),
            EllipticContext::trigonometric(cplx(0.07, 0.01))};
}

void run_specfun(const SpecArgs& a, const Common& c, Report& r) {
    r.config = {{"check", a.check}, {"points", a.points}};
    auto want = [&](const char* k) { return a.check == "all" || a.check == k; };
    auto see = [&](const idcheck::Residual& x, const std::string& suffix) { r.check(x.name + suffix, x.max_rel, x.max_rel, 1e-10); };
    if (want("basic"))
        for (auto& x : idcheck::basic_identities(c.seed, a.points)) see(x, "");
    if (want("rogers")) see(idcheck::rogers(c.seed, a.points), "");
    const auto ctxs = spec_contexts();
    for (std::size_t i = 0; i < ctxs.size(); ++i) {
        const std::string suffix = " [context " + std::to_string(i) + "]";
        if (want("elliptic"))
            for (auto& x : idcheck::elliptic_identities(ctxs[i], c.seed + i, a.points)) see(x, suffix);
        if (want("riemann")) see(idcheck::riemann(ctxs[i], c.seed + i, a.points), suffix);
        if (want("jackson")) see(idcheck::jackson(ctxs[i], c.seed + i, a.points), suffix);
    }
}

// ---- symfun ----

struct SymArgs {
    std::string check = "all", mode = "both";
    int max_size = 6, cutoff = 8, specs = 2;
};

void run_symfun(const SymArgs& a, const Common& c, Report& r) {
    r.config = {{"check", a.check}, {"mode", a.mode}, {"max_size", a.max_size}, {"cutoff", a.cutoff}, {"specs", a.specs}};
    auto want = [&](const char* k) { return a.check == "all" || a.check == k; };
    int instances = 0;
    auto see = [&](const std::string& name, const symcheck::Result& x) {
        instances += x.instances;
        r.check(name, x.max_rel, x.max_rel, 1e-9);
    };
    for (auto mode : {Mode::trigonometric, Mode::elliptic}) {
        const std::string m = mode == Mode::trigonometric ? "trigonometric" : "elliptic";
        if (a.mode != "both" && a.mode != m) continue;
        oracle::Rng g(c.seed + (mode == Mode::elliptic));
        for (int k = 0; k < a.specs; ++k) {
            const std::string tag = " (" + m + ", spec " + std::to_string(k) + ")";
            const auto s2 = symcheck::random_spec(g, mode, 2, a.cutoff + 1);
            const auto s3 = symcheck::random_spec(g, mode, 3, a.cutoff + 1);
            if (want("symmetry")) {
                see("symmetry, 2 rows" + tag, symcheck::symmetry(s2, a.max_size, a.cutoff));
                see("symmetry, 3 rows" + tag, symcheck::symmetry(s3, a.max_size, a.cutoff));
            }
            if (want("branching")) {
                see("branching, 2 rows" + tag, symcheck::branching(s2, a.max_size, a.cutoff));
                see("branching, 3 rows" + tag, symcheck::branching(s3, a.max_size, a.cutoff));
            }
            if (want("fusion")) {
                see("fusion J=(2)" + tag, symcheck::fusion(s2, {2}, a.max_size, a.cutoff));
                see("fusion J=(1,2)" + tag, symcheck::fusion(s2, {1, 2}, a.max_size, a.cutoff));
            }
            // the stochastic specialization needs the trigonometric degeneration
            if (want("stochastic") && mode == Mode::trigonometric)
                for (auto J : std::vector<std::vector<int>>{{1}, {2}, {1, 1}})
                    see("stochastic vertex form J=" + json(J).dump() + tag, symcheck::stochastic(s2, J, a.max_size, a.cutoff));
        }
    }
    r.results["instances"] = instances;
}

// ---- simulate ----

struct SimArgs {
    std::string model = "pep";
    double q = 0.5, delta = 0.0, gamma = std::numeric_limits<double>::infinity();
    std::vector<int> J{1};
    std::vector<double> B, U, Xi, S;
    int N = 10;
    long samples = 1000;
    std::vector<int> sites{1}, record;
    bool exact = false;
    std::string trajectory_csv;
};

ModelSpec sim_model(const SimArgs& a) {
    if (a.model == "pep") return {JGammaPEP{a.J.at(0), a.gamma}, {}};
    if (a.model == "asym-pep") return {AsymPEP{a.q, a.delta}, {}};
    if (a.model == "qhahn") {
        auto B = a.B;
        if (B.empty()) B = {std::pow(a.q, -1.0 - *std::max_element(a.J.begin(), a.J.end()))};
        return {QHahnModel{a.q, a.delta, B, a.J}, {}};
    }
    if (a.model == "general") {
        if (a.U.empty() || a.Xi.empty() || a.S.empty()) throw ConfigError("general model needs --U, --Xi and --S");
        return {GeneralModel{a.q, a.delta, a.U, a.Xi, a.S, a.J}, {}};
    }
    throw ConfigError("unknown model " + a.model);
}

void run_simulate(const SimArgs& a, const Common& c, Report& r) {
    const ModelSpec spec = sim_model(a);
    validate(spec);
    auto times = a.record.empty() ? std::vector<int>{a.N} : a.record;
    std::sort(times.begin(), times.end());
    r.config = {{"model", a.model}, {"q", a.q},         {"delta", a.delta}, {"gamma", std::isinf(a.gamma) ? json("inf") : json(a.gamma)},
                {"J", a.J},         {"B", a.B},         {"U", a.U},         {"Xi", a.Xi},
                {"S", a.S},         {"N", a.N},         {"samples", a.samples}, {"sites", a.sites},
                {"record", times},  {"exact", a.exact}};
    auto res = run_ensemble(
        spec, times, a.samples, c.seed,
        [&](const SystemState& s) {
            std::vector<double> v;
            for (int x : a.sites) v.push_back(double(s.current(x)));
            return v;
        },
        c.ensemble());
    json rows = json::array();
    for (std::size_t t = 0; t < times.size(); ++t)
        for (std::size_t k = 0; k < a.sites.size(); ++k)
            rows.push_back({{"time", times[t]}, {"site", a.sites[k]}, {"current", estimate(res[t][k])}});
    r.results["mean_current"] = rows;
    if (a.exact)
        for (std::size_t t = 0; t < times.size(); ++t) {
            const auto law = exact_law(spec, times[t]);
            for (std::size_t k = 0; k < a.sites.size(); ++k) {
                const int x = a.sites[k];
                const double ex = exact_expectation(law, [&](const std::vector<int>& conf) { return double(current_of(conf, x)); });
                const auto& e = res[t][k];
                const double sig = e.stderr_ > 0 ? std::abs(e.mean - ex) / e.stderr_ : (std::abs(e.mean - ex) < 1e-12 ? 0 : 1e9);
                r.check("E h_" + std::to_string(times[t]) + "(" + std::to_string(x) + ") within 4 sigma of exact", e.mean, sig, 4.0);
            }
        }
    if (!a.trajectory_csv.empty()) {
        std::ofstream f(a.trajectory_csv);
        if (!f) throw ConfigError("cannot write " + a.trajectory_csv);
        f << "time,site,occupancy,current\n";
        Sampler smp(spec);
        SystemState s(trajectory_seed(c.seed, 0));
        for (int t = 1; t <= times.back(); ++t) {
            smp.step(s);
            for (int x = 1; x <= s.rightmost(); ++x) f << t << ',' << x << ',' << s.occupancy(x) << ',' << s.current(x) << '\n';
        }
        r.results["trajectory_csv"] = a.trajectory_csv;
    }
}

// ---- verify-identity ----

struct IdArgs {
    std::string form = "qhahn", sign = "alternating";
    int k = 1, N = 1;
    std::vector<int> x{1}, J{1};
    std::vector<double> B;
    double q = 0.5, delta = 0.0, gamma = 4.0, tol = 1e-8, spread = 0.5, spread2 = 0.8;
    long samples = 10000;
    int max_exact_N = 6, h_shift = 0, exponent_shift = -1;
    bool sweep = false;
};

void identity_report(const IdentityReport& rep, double other_rhs, double tol, Report& r) {
    r.results["contour"] = contour_json(rep.contour);
    r.results["rhs"] = {{"value", cjson(rep.rhs.value)}, {"error_estimate", rep.rhs.error}, {"nodes", rep.rhs.nodes}};
    r.results["sites_weakly_decreasing"] = rep.sites_decreasing;
    if (!rep.sites_decreasing) r.results["warning"] = "the identity holds for weakly decreasing sites only";
    if (rep.lhs_exact) {
        r.results["lhs_exact"] = *rep.lhs_exact;
        r.check("exact left side = quadrature", *rep.lhs_exact, *rep.exact_vs_rhs, tol);
    }
    if (rep.lhs_mc) {
        r.results["lhs_mc"] = estimate(*rep.lhs_mc);
        r.check("Monte Carlo within 4 sigma of quadrature", rep.lhs_mc->mean, *rep.mc_sigmas, 4.0);
    }
    r.check("imaginary part of the quadrature", rep.rhs.value.imag(), std::abs(rep.rhs.value.imag()), 1e-10);
    r.check("contour independence", other_rhs, std::abs(other_rhs - rep.rhs.value.real()), 1e-8);
}

void run_verify_identity(const IdArgs& a, const Common& c, Report& r) {
    if (int(a.x.size()) != a.k) throw ConfigError("--x needs exactly k sites");
    r.config = {{"form", a.form}, {"k", a.k}, {"N", a.N}, {"x", a.x}, {"J", a.J}, {"samples", a.samples},
                {"tol", a.tol}, {"spread", a.spread}, {"spread2", a.spread2}, {"max_exact_N", a.max_exact_N}};
    if (a.form == "qhahn") {
        QHahnObservable o{a.k, a.x, a.N, a.q, a.delta, a.B, a.J};
        if (o.B.empty()) o.B = {std::pow(a.q, -1.0 - *std::max_element(a.J.begin(), a.J.end()))};
        r.config["q"] = a.q;
        r.config["delta"] = a.delta;
        r.config["B"] = o.B;
        validate(model_of(o));
        auto rep = identity_check(o, a.samples, c.seed, a.max_exact_N, c.ensemble());
        rep.rhs = rhs_quadrature(o, rep.contour = qhahn_contours(o, a.spread));
        if (rep.lhs_exact) rep.exact_vs_rhs = std::abs(*rep.lhs_exact - rep.rhs.value);
        identity_report(rep, rhs_quadrature(o, qhahn_contours(o, a.spread2)).value.real(), a.tol, r);
        return;
    }
    if (a.form == "pep") {
        PepObservable o{a.k, a.x, a.N, a.J.at(0), a.gamma, {a.h_shift, a.exponent_shift, a.sign == "alternating"}};
        r.config["gamma"] = a.gamma;
        r.config["convention"] = o.conv.label();
        if (a.sweep) {
            json sw = json::array();
            const auto table = pep_offset_sweep(o.J, o.gamma);
            for (auto& e : table) sw.push_back({{"convention", e.conv.label()}, {"max_residual", e.max_residual}});
            r.results["offset_sweep"] = sw;
            // conventions that agree to rounding are equivalent; keep the requested one if it is among them
            bool keep = false;
            for (auto& e : table)
                if (e.conv.label() == o.conv.label()) keep = e.max_residual < table.front().max_residual + 1e-9;
            if (!keep) o.conv = table.front().conv;
            r.results["selected_convention"] = o.conv.label();
        }
        auto rep = identity_check(o, a.samples, c.seed, a.max_exact_N, c.ensemble());
        rep.rhs = pep_rhs_quadrature(o, rep.contour = pep_contours(o, a.spread));
        if (rep.lhs_exact) rep.exact_vs_rhs = std::abs(*rep.lhs_exact - rep.rhs.value);
        r.results["convention"] = rep.convention;
        identity_report(rep, pep_rhs_quadrature(o, pep_contours(o, a.spread2)).value.real(), a.tol, r);
        return;
    }
    throw ConfigError("unknown form " + a.form);
}

// ---- asymptotics ----

struct AsymArgs {
    std::string experiment, config, csv;
    long samples = 0;
    bool seed_given = false;
};

ExperimentConfig load_config(const std::string& kind, const std::string& path) {
    ExperimentConfig c = default_config(kind);
    if (path.empty()) return c;
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (auto& [k, v] : j.items()) {
            if (k == "J") c.J = v.get<int>();
            else if (k == "r") c.r = v.get<double>();
            else if (k == "gamma") c.gamma = v.get<double>();
            else if (k == "q") c.q = v.get<double>();
            else if (k == "T") c.T = v.get<std::vector<int>>();
            else if (k == "s") c.s = v.get<std::vector<double>>();
            else if (k == "eta") c.eta = v.get<std::vector<double>>();
            else if (k == "m") c.m = v.get<std::vector<int>>();
            else if (k == "samples") c.samples = v.get<long>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "tolerance") c.tolerance = v.get<double>();
            else if (k == "slope_lo") c.slope_lo = v.get<double>();
            else if (k == "slope_hi") c.slope_hi = v.get<double>();
            else if (k == "lln_tolerance") c.lln_tolerance = v.get<double>();
            else if (k == "site_offset") c.site_offset = v.get<int>();
            else throw ConfigError("unknown config key '" + k + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    return c;
}

json config_json(const ExperimentConfig& c) {
    return {{"J", c.J},
            {"r", c.r},
            {"gamma", c.gamma},
            {"q", c.q},
            {"T", c.T},
            {"s", c.s},
            {"eta", c.eta},
            {"m", c.m},
            {"samples", c.samples},
            {"seed", c.seed},
            {"tolerance", c.tolerance},
            {"slope_lo", c.slope_lo},
            {"slope_hi", c.slope_hi},
            {"lln_tolerance", c.lln_tolerance},
            {"site_offset", c.site_offset}};
}

void run_asymptotics(const AsymArgs& a, Common& c, Report& r) {
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), a.experiment) == kinds.end())
        throw ConfigError("unknown experiment " + a.experiment);
    ExperimentConfig cfg = load_config(a.experiment, a.config);
    if (a.seed_given) cfg.seed = c.seed;
    c.seed = cfg.seed;
    if (a.samples > 0) cfg.samples = a.samples;
    cfg.ensemble = c.ensemble();
    r.config = config_json(cfg);
    r.config["experiment"] = a.experiment;
    const auto rep = run_experiment(a.experiment, cfg);
    for (auto& k : rep.checks) {
        json row{{"name", k.name}, {"value", k.value},         {"stderr", k.stderr_}, {"target", k.target},
                 {"residual", k.residual}, {"tolerance", k.tolerance}, {"gated", k.gated}, {"pass", k.pass}};
        r.checks.push_back(row);
    }
    json prof = json::array();
    for (auto& p : rep.profile) prof.push_back({{"point", p.point}, {"theory", p.theory}, {"mean", p.mean}, {"stderr", p.stderr_}});
    r.results["profile"] = prof;
    r.results["notes"] = rep.notes;
    if (!a.csv.empty()) {
        std::ofstream f(a.csv);
        if (!f) throw ConfigError("cannot write " + a.csv);
        f << "point,theory,mean,stderr\n";
        f.precision(17);
        for (auto& p : rep.profile) f << p.point << ',' << p.theory << ',' << p.mean << ',' << p.stderr_ << '\n';
        r.results["csv"] = a.csv;
    }
}

bool usage_kind(ErrorKind k) {
    return k == ErrorKind::OutOfDomain || k == ErrorKind::InadmissibleParameters || k == ErrorKind::ModeError;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynvertex: dynamical stochastic vertex models, their particle systems and moment identities"};
    app.require_subcommand(1);
    Common common;

    WeightArgs wa;
    auto* cw = app.add_subcommand("check-weights", "stochasticity and fused-weight oracle grids");
    cw->add_option("--family", wa.family, "phi, psi, fused or all")->check(CLI::IsMember({"phi", "psi", "fused", "all"}));
    cw->add_option("--grid", wa.grid, "default or small")->check(CLI::IsMember({"default", "small"}));
    add_common(cw, common);

    SpecArgs sa;
    auto* sf = app.add_subcommand("specfun", "special-function identity grids");
    sf->add_option("--check", sa.check, "basic, elliptic, riemann, rogers, jackson or all")
        ->check(CLI::IsMember({"basic", "elliptic", "riemann", "rogers", "jackson", "all"}));
    sf->add_option("--points", sa.points, "random points per identity")->check(CLI::PositiveNumber);
    add_common(sf, common);

    SymArgs ya;
    auto* sy = app.add_subcommand("symfun", "structure of the B and D partition functions");
    sy->add_option("--check", ya.check, "symmetry, branching, fusion, stochastic or all")
        ->check(CLI::IsMember({"symmetry", "branching", "fusion", "stochastic", "all"}));
    sy->add_option("--mode", ya.mode, "trigonometric, elliptic or both")->check(CLI::IsMember({"trigonometric", "elliptic", "both"}));
    sy->add_option("--max-size", ya.max_size, "largest |mu|")->check(CLI::NonNegativeNumber);
    sy->add_option("--cutoff", ya.cutoff, "largest part")->check(CLI::PositiveNumber);
    sy->add_option("--specs", ya.specs, "random parameter points per mode")->check(CLI::PositiveNumber);
    add_common(sy, common);

    SimArgs ma;
    auto* sm = app.add_subcommand("simulate",
                                  "Monte Carlo mean currents; --trajectory-csv writes one trajectory with columns "
                                  "time,site,occupancy,current");
    sm->add_option("--model", ma.model, "general, qhahn, pep or asym-pep")->check(CLI::IsMember({"general", "qhahn", "pep", "asym-pep"}));
    sm->add_option("--q", ma.q);
    sm->add_option("--delta", ma.delta);
    sm->add_option("--gamma", ma.gamma, "dynamical parameter of the pep model (inf: non-dynamical)");
    sm->add_option("--J", ma.J, "J per time step (pep: the first entry)")->expected(1, 1 << 20);
    sm->add_option("--B", ma.B, "b per site (qhahn; default q^{-1-max J})")->expected(1, 1 << 20);
    sm->add_option("--U", ma.U, "u per time step (general)")->expected(1, 1 << 20);
    sm->add_option("--Xi", ma.Xi, "xi per site (general)")->expected(1, 1 << 20);
    sm->add_option("--S", ma.S, "s per site (general)")->expected(1, 1 << 20);
    sm->add_option("--N", ma.N, "number of steps")->check(CLI::PositiveNumber);
    sm->add_option("--samples", ma.samples)->check(CLI::PositiveNumber);
    sm->add_option("--sites", ma.sites, "sites whose current is reported")->expected(1, 1 << 20);
    sm->add_option("--record", ma.record, "record times (default: N)")->expected(1, 1 << 20);
    sm->add_flag("--exact", ma.exact, "compare with exact enumeration (small N only)");
    sm->add_option("--trajectory-csv", ma.trajectory_csv);
    add_common(sm, common);

    IdArgs ia;
    auto* vi = app.add_subcommand("verify-identity", "moment identity: exact enumeration, Monte Carlo and contour quadrature");
    vi->add_option("--form", ia.form, "qhahn or pep")->check(CLI::IsMember({"qhahn", "pep"}));
    vi->add_option("--k", ia.k)->check(CLI::Range(1, 3));
    vi->add_option("--N", ia.N)->check(CLI::PositiveNumber);
    vi->add_option("--x", ia.x, "sites, weakly decreasing")->expected(1, 3);
    vi->add_option("--q", ia.q);
    vi->add_option("--delta", ia.delta);
    vi->add_option("--J", ia.J)->expected(1, 1 << 20);
    vi->add_option("--B", ia.B, "default q^{-1-max J}")->expected(1, 1 << 20);
    vi->add_option("--gamma", ia.gamma, "pep form");
    vi->add_option("--samples", ia.samples, "0 skips Monte Carlo")->check(CLI::NonNegativeNumber);
    vi->add_option("--max-exact-N", ia.max_exact_N);
    vi->add_option("--tol", ia.tol, "exact-versus-quadrature tolerance");
    vi->add_option("--spread", ia.spread, "contour geometry in (0, 1)");
    vi->add_option("--spread2", ia.spread2, "second geometry for the independence check");
    vi->add_option("--h-shift", ia.h_shift, "pep form: current evaluated at x + h_shift");
    vi->add_option("--exponent-shift", ia.exponent_shift, "pep form: exponent x + exponent_shift");
    vi->add_option("--sign", ia.sign, "pep form: alternating or plus")->check(CLI::IsMember({"alternating", "plus"}));
    vi->add_flag("--sweep", ia.sweep, "pep form: run the offset sweep and use the best convention");
    add_common(vi, common);

    AsymArgs aa;
    auto* as = app.add_subcommand("asymptotics",
                                  "finite-T scaling experiments; --csv writes the profile with columns point,theory,mean,stderr");
    as->add_option("--experiment", aa.experiment)->required()->check(CLI::IsMember(experiment_kinds()));
    as->add_option("--config", aa.config, "JSON object overriding the defaults (J, r, gamma, q, T, s, eta, m, samples, "
                                          "seed, tolerance, slope_lo, slope_hi, lln_tolerance, site_offset)");
    as->add_option("--samples", aa.samples, "overrides the config")->check(CLI::PositiveNumber);
    as->add_option("--csv", aa.csv);
    add_common(as, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    Report report;
    std::string sub;
    try {
        if (cw->parsed()) {
            sub = "check-weights";
            run_check_weights(wa, common, report);
        } else if (sf->parsed()) {
            sub = "specfun";
            run_specfun(sa, common, report);
        } else if (sy->parsed()) {
            sub = "symfun";
            run_symfun(ya, common, report);
        } else if (sm->parsed()) {
            sub = "simulate";
            run_simulate(ma, common, report);
        } else if (vi->parsed()) {
            sub = "verify-identity";
            run_verify_identity(ia, common, report);
        } else {
            sub = "asymptotics";
            aa.seed_given = as->count("--seed") > 0;
            run_asymptotics(aa, common, report);
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return emit(sub, common, report, secs);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return usage_kind(e.kind()) ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
