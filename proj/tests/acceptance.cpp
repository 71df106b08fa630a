// Acceptance run: one PASS/FAIL line per criterion, informational lines prefixed with "info".
// Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "mch2/cli.hpp"
#include "mch2/config.hpp"
#include "mch2/diagnostics.hpp"
#include "mch2/dynamics.hpp"
#include "mch2/experiments.hpp"
#include "mch2/io.hpp"
#include "mch2/verification.hpp"

using namespace mch2;
namespace fs = std::filesystem;

namespace {

const double pi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string summary;
};

std::string g(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

void info(const std::string& s) { std::cout << "      info: " << s << "\n" << std::flush; }

std::string config_path(const std::string& name) { return (fs::path(MCH2_CONFIG_DIR) / name).string(); }

State from_physical(const Grid& grid, const std::function<double(double)>& f) {
    RealVec v(grid.physical_size());
    for (int k = 0; k < grid.n(); ++k) v[k] = f(grid_point(grid, k));
    return State{{project(grid, v)}, SpectralField(grid)};
}

Outcome suite_outcome(const SuiteResult& r) {
    std::string worst;
    for (const Check& c : r.checks) {
        info(std::string(c.pass ? "ok   " : "FAIL ") + c.name + ": " + g(c.value) + " (tol " + g(c.tolerance) + ")");
        if (!c.pass) worst += (worst.empty() ? "" : ", ") + c.name;
    }
    return {r.ok(), std::to_string(r.passed()) + "/" + std::to_string(r.checks.size()) + " checks" +
                        (worst.empty() ? "" : ", failed: " + worst)};
}

Outcome operators() { return suite_outcome(operator_suite(1)); }

Outcome conservation() {
    const Grid grid(1, 256);
    SimConfig cfg;
    cfg.grid = grid;
    cfg.dt = 1e-4;
    cfg.t_end = 1.0;
    cfg.scheme = Scheme::rk4_random_pde;
    cfg.noise.kind = NoiseModel::Kind::linear;
    cfg.noise.c1 = cfg.noise.c2 = 0.5;
    cfg.record_every = 1;
    State y;
    y.u = {from_physical(grid, [](double x) { return std::sin(x) + 0.3 * std::cos(2 * x); }).u[0]};
    y.gamma = from_physical(grid, [](double x) { return 0.6 * std::cos(x + 0.4); }).u[0];
    const double scale = 1.0 / sobolev_norm(y, 3.0);
    y.u[0] *= scale;
    y.gamma *= scale;
    info("||y0||_{H^3} = " + g(sobolev_norm(y, 3.0)));
    const Trajectory tr = simulate(cfg, y, 2024);
    double worst = 0.0;
    for (double e : tr.energy) worst = std::max(worst, std::abs(e - tr.energy[0]) / tr.energy[0]);
    const bool ok = tr.status == Status::survived && tr.times.size() == 10001 && worst <= 1e-4;
    return {ok, "max |E(t) - E(0)| / E(0) = " + g(worst) + " over " + std::to_string(tr.times.size()) +
                    " records (tol 1e-4), status " + to_string(tr.status)};
}

Outcome decay() {
    const std::vector<int> ns{8, 16, 32, 64, 128};
    bool ok = true;
    std::string s;
    for (double sv : {2.5, 4.0}) {
        const DecayStudy st = decay_study(sv, 1.2, 2, ns, 1.0, 512);
        const double rel = std::abs(st.fit.theta - st.expected) / st.expected;
        ok = ok && rel <= 0.10;
        std::string errs;
        for (std::size_t k = 0; k < ns.size(); ++k) errs += " n=" + std::to_string(ns[k]) + ":" + g(st.errors[k]);
        info("s = " + g(sv) + " errors" + errs + ", fit rms " + g(st.fit.residual));
        s += (s.empty() ? "" : "; ") + std::string("s=") + g(sv) + " theta_hat " + g(st.fit.theta) + " vs " + g(st.expected) +
             " (rel " + g(rel) + ")";
    }
    return {ok, s + " (tol 10%)"};
}

Outcome closed_form() {
    const ClosedFormCheck c = closed_form_check(8, 2.5, 1, 0.37, 64);
    double worst = 0.0;
    std::string where;
    for (const DisplayCheck& d : c.displays)
        if (d.mismatch >= worst) worst = d.mismatch, where = d.name;
    info("literal S_i assembly with coefficients (3, -3, -3) differs from the summed displays by " + g(c.literal_assembly));
    return {worst <= 1e-8, std::to_string(c.displays.size()) + " displays, max mismatch " + g(worst) + " at " + where + " (tol 1e-8)"};
}

Outcome gap() {
    bool ok = true;
    std::string s;
    for (int n : {64, 128}) {
        const FamilyGap fg = family_gap(n, 2.5, 2, 1.0);
        const double lower = 2 * std::sqrt(2.0) * std::sin(1.0) - 5.0 / n;
        ok = ok && fg.initial <= 3.0 / n && fg.sup >= lower;
        s += "n=" + std::to_string(n) + " init " + g(fg.initial) + " <= " + g(3.0 / n) + ", sup " + g(fg.sup) + " >= " + g(lower) + "; ";
    }
    const SimulatedGap sg = simulated_gap(64, 2.5, 2, 1.0, 1);
    const bool sim_ok = sg.status_plus == Status::survived && sg.status_minus == Status::survived && sg.sup >= 0.5 * sg.family_sup;
    ok = ok && sim_ok;
    s += "simulated n=64 sup " + g(sg.sup) + " >= 0.5 x " + g(sg.family_sup);
    return {ok, s};
}

Outcome transport() {
    const Grid grid(1, 256);
    SimConfig cfg;
    cfg.grid = grid;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    cfg.scheme = Scheme::rk4_random_pde;
    cfg.noise.kind = NoiseModel::Kind::linear;
    cfg.noise.c1 = cfg.noise.c2 = 0.5;
    State y;
    y.u = {from_physical(grid, [](double x) { return 0.5 * std::sin(x) + 0.2 * std::cos(2 * x); }).u[0]};
    y.gamma = from_physical(grid, [](double x) { return 0.3 * std::cos(x) + 0.1 * std::sin(3 * x); }).u[0];
    FlowPath path;
    const Trajectory tr = simulate(cfg, y, 4, record_flow(path));
    std::vector<double> xs;
    for (int k = 0; k < 64; ++k) xs.push_back(2 * pi * (k + 0.31) / 64);
    const TransportCheck tc = transport_residual(path, 0.5, xs);
    const bool ok = tr.status == Status::survived && tc.relative <= 1e-3 && tc.min_phi_x > 0.0;
    return {ok, "relative residual " + g(tc.relative) + " (tol 1e-3), min Phi_x " + g(tc.min_phi_x) + " over 64 samples x " +
                    std::to_string(path.t.size()) + " times"};
}

Outcome breaking() {
    RunConfig rc = load_config(config_path("breaking.cfg"));
    const State y0 = initial_state(rc);
    SimConfig cfg = rc.sim;
    const double c = cfg.noise.c1;
    const BreakingAssessment b = breaking_condition(y0.u[0], y0.gamma, c, rc.lambda);
    info("H0 = " + g(b.min_slope0) + ", slope threshold " + g(b.threshold) + ", E0 = " + g(b.energy0) +
         ", condition " + (b.satisfied ? "holds" : "fails"));
    const std::optional<double> hs = calibrate_hs_threshold(cfg, y0);
    if (!hs) return {false, "zero-noise pilot never reached the W^{1,inf} threshold"};
    cfg.blowup_hs = *hs;
    info("W^{1,inf} threshold " + g(cfg.blowup_winf) + ", H^s threshold from pilot " + g(*hs));

    const EnsembleReport rep = breaking_ensemble(cfg, y0, rc.lambda, rc.members, rc.seed, 1);
    long max_gap = -1;
    bool gaps_ok = true;
    for (int k = 0; k < rep.members; ++k) {
        if (rep.status[k] != Status::broke) continue;
        const long gp = rep.clock_gaps[k];
        max_gap = std::max(max_gap, gp);
        gaps_ok = gaps_ok && gp >= 0 && gp <= 10;
    }
    const double frac = double(rep.broke) / rep.members;
    info("slope ordering (min slope below -sqrt(E0) before the first clock) " + std::string(rep.slope_ordering ? "held" : "violated"));

    SimConfig det = cfg;
    det.noise.c1 = det.noise.c2 = 1e-6;
    const EnsembleReport d = breaking_ensemble(det, y0, rc.lambda, 1, rc.seed, 1);
    const double window = d.riccati_window.value_or(0.0);
    const bool det_ok = d.broke == 1 && d.breaking_times.front() <= 1.5 * window;

    SimConfig fine = cfg;
    fine.record_every = 1;
    const EnsembleReport every = breaking_ensemble(fine, y0, rc.lambda, 10, rc.seed, 1);
    long step_gap = -1;
    for (long gp : every.clock_gaps) step_gap = std::max(step_gap, gp);
    info("clock gap measured in single steps on the first 10 paths: max " + std::to_string(step_gap));

    const bool ok = frac >= 0.5 && gaps_ok && det_ok && rep.broke > 0;
    return {ok, "broke " + std::to_string(rep.broke) + "/" + std::to_string(rep.members) + " (>= 0.5), deterministic t_break " +
                    (d.breaking_times.empty() ? std::string("none") : g(d.breaking_times.front())) + " <= 1.5 x " + g(window) +
                    ", max clock gap " + std::to_string(max_gap) + " records (<= 10)"};
}

Outcome global() {
    const RunConfig rc = load_config(config_path("global.cfg"));
    const State y0 = initial_state(rc);
    info("polynomial regime " + std::to_string(global_regime(rc.sim.noise)));
    const EnsembleReport rep = global_ensemble(rc.sim, y0, rc.members, rc.seed, 1);
    const double frac = rep.survival_fraction.value_or(0.0);
    const auto& e = rep.lognorm;
    bool bounded = std::isfinite(e.slope) && std::isfinite(e.residual) && !e.t.empty();
    for (std::size_t k = 0; k < e.t.size(); ++k) bounded = bounded && e.envelope[k] <= e.intercept + e.offset + e.slope * e.t[k] + 1e-12;
    info("log-norm envelope slope " + g(e.slope) + ", intercept " + g(e.intercept) + ", rms residual " + g(e.residual) +
         ", offset " + g(e.offset));

    const RunConfig sc = load_config(config_path("sweep.cfg"));
    const State s0 = initial_state(sc);
    const ScaleSweep sw = scale_sweep(sc.sim, s0, sc.scales, sc.winf_factor, sc.hs_factor, sc.members, sc.seed, 1);
    bool monotone = true;
    std::string counts;
    for (std::size_t k = 0; k < sw.reports.size(); ++k) {
        counts += (k ? "/" : "") + std::to_string(sw.reports[k].survived);
        if (k > 0) monotone = monotone && *sw.reports[k].survival_fraction >= *sw.reports[k - 1].survival_fraction;
    }

    // Dufresne: with mu-transformed clocks a path survives forever iff int_0^inf mu^{-1} < T*(a),
    // the zero-noise breaking time, and that integral is 2 / (c^2 Z) with Z ~ Exp(1).
    std::string oracle;
    const double c = sc.sim.noise.c1;
    for (double a : sc.scales) {
        State y = s0;
        y.u[0] *= a;
        y.gamma *= a;
        SimConfig quiet = sc.sim;
        quiet.noise.c1 = quiet.noise.c2 = 1e-9;
        quiet.t_end = 64.0;
        quiet.blowup_winf = sc.winf_factor * winf_norm(y);
        quiet.blowup_hs = sc.hs_factor * sobolev_norm(y, sc.sim.s);
        const Trajectory tr = simulate(quiet, y, 0);
        const double tstar = tr.status == Status::broke ? tr.t_stop : std::numeric_limits<double>::infinity();
        oracle += (oracle.empty() ? "" : ", ") + std::string("a=") + g(a) + ": T*=" + g(tstar) + " -> " +
                  g(sc.members * std::exp(-2.0 / (c * c * tstar)));
    }
    info("infinite-horizon survival predicted by Dufresne's identity (members): " + oracle);

    const bool ok = frac >= 0.95 && bounded && monotone;
    return {ok, "regime survival " + std::to_string(rep.survived) + "/" + std::to_string(rep.members) + " (>= 0.95), envelope slope " +
                    g(e.slope) + " rms " + g(e.residual) + "; scale sweep survivals " + counts + " (nondecreasing: " +
                    (monotone ? "yes" : "no") + ")"};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "mch2_acceptance_replay";
    fs::remove_all(dir);
    fs::create_directories(dir);
    write_text((dir / "run.cfg").string(),
               "grid.d = 1\ngrid.n = 128\nsim.dt = 1e-3\nsim.t_end = 0.5\nsim.record_every = 5\n"
               "noise.kind = polynomial\nnoise.c1 = 1\nnoise.c2 = 1\nnoise.delta1 = 1\nnoise.delta2 = 1.5\n"
               "data.u1 = 1 0 0.5; 2 0.2 0\ndata.gamma = 1 0.3 0\nensemble.members = 6\n");
    std::ostringstream sink;
    const int a = run_cli({"global", "--config", (dir / "run.cfg").string(), "--seed", "77", "--jobs", "1", "--out", (dir / "a").string()}, sink, sink);
    const int b = run_cli({"--replay", (dir / "a" / "manifest.json").string(), "--jobs", "3", "--out", (dir / "b").string()}, sink, sink);
    bool same = a == 0 && b == 0;
    int files = 0;
    if (same)
        for (const auto& entry : fs::directory_iterator(dir / "a")) {
            const std::string name = entry.path().filename().string();
            if (name == "manifest.json") continue;  // carries wall-clock and jobs
            same = same && fs::exists(dir / "b" / name) && read_text(entry.path().string()) == read_text((dir / "b" / name).string());
            ++files;
        }

    const RunConfig rc = load_config(config_path("breaking.cfg"));
    SimConfig cfg = rc.sim;
    cfg.grid = Grid(1, 256);
    cfg.t_end = 1.0;
    cfg.blowup_winf = 7.6;
    cfg.blowup_hs = 1e6;
    RunConfig small = rc;
    small.sim = cfg;
    const State y0 = initial_state(small);
    const std::string serial = to_json(breaking_ensemble(cfg, y0, rc.lambda, 8, 5, 1)).dump();
    const std::string parallel = to_json(breaking_ensemble(cfg, y0, rc.lambda, 8, 5, 4)).dump();
    const bool ok = same && files >= 4 && serial == parallel;
    return {ok, "replay: " + std::to_string(files) + " files " + (same ? "byte-identical" : "DIFFER") + "; breaking report jobs 1 vs 4 " +
                    (serial == parallel ? "identical" : "DIFFER")};
}

Outcome mollifier() { return suite_outcome(mollifier_suite(1)); }

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"operator identities", operators},
        {"H1 conservation under the random-PDE scheme", conservation},
        {"residual decay exponents", decay},
        {"closed-form drift on the oscillating family", closed_form},
        {"nonuniform dependence gap", gap},
        {"transport identity along characteristics", transport},
        {"wave breaking", breaking},
        {"global regimes and data-scale monotonicity", global},
        {"determinism", determinism},
        {"mollifier suite", mollifier},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));

    int failed = 0, ran = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = int(k) + 1;
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char head[96];
        std::snprintf(head, sizeof head, "%s %2d ", o.pass ? "PASS" : "FAIL", id);
        std::cout << head << criteria[k].first << ": " << o.summary << " [" << g(secs) << " s]\n" << std::flush;
        failed += !o.pass;
        ++ran;
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (ran - failed) << "/" << ran << " criteria passed in " << g(total) << " s\n";
    return failed == 0 ? 0 : 1;
}
