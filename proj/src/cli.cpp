#include "mch2/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "mch2/config.hpp"
#include "mch2/experiments.hpp"
#include "mch2/io.hpp"
#include "mch2/verification.hpp"

namespace mch2 {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// failed --check style assertions
class AssertionFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string out = "out";
    std::string config_path;
    std::optional<std::uint64_t> seed;
    int jobs = 0;

    // decay
    double s = 2.5, sigma = 1.2, T = 1.0, tolerance = -1.0;
    int d = 2, grid = 512;
    std::vector<int> ns{8, 16, 32, 64, 128};
    // gap
    int n = 64, samples = 64;
    bool simulate = false;
    double dt = 0.025, c = 0.0;
    // plot
    std::string csv, x = "t", output = "plot.svg", title;
    std::vector<std::string> y;
    bool logx = false, logy = false;
};

// Everything a command produces besides files: the JSON report and the list of outputs.
struct Run {
    std::string command;
    Options opt;
    std::optional<std::string> config_text;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> member_seeds;
    std::vector<std::string> outputs;
    json report;
    json options;  // re-emittable option values
    std::ostream* out = nullptr;

    std::string path(const std::string& name) {
        outputs.push_back(name);
        return (fs::path(opt.out) / name).string();
    }
};

const std::map<std::string, std::string>& descriptions() {
    static const std::map<std::string, std::string> d{
        {"simulate", "integrate one or more paths from a configuration file"},
        {"verify-ops", "run the operator identity and mollifier suites"},
        {"decay", "residual decay exponent of the oscillating family"},
        {"gap", "distance between the kappa = +1 and -1 members of the family"},
        {"global", "survival ensemble, or a data-scale sweep when sweep.scales is set"},
        {"breaking", "wave-breaking ensemble on steep-slope data"},
        {"plot", "SVG line plot of columns of a CSV file"},
    };
    return d;
}

// options that are not part of the run's identity
bool volatile_option(const std::string& name) {
    return name == "out" || name == "jobs" || name == "config" || name == "seed" || name == "help";
}

RunConfig run_config(const Run& r) {
    if (!r.config_text) throw UsageError(r.command + " needs --config");
    return parse_config(*r.config_text);
}

std::uint64_t resolve_seed(const Options& o, const std::optional<RunConfig>& cfg) {
    if (o.seed) return *o.seed;
    if (const char* env = std::getenv("MCH2_SEED")) {
        std::uint64_t v = 0;
        const std::string s(env);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("MCH2_SEED is not a nonnegative integer: '" + s + "'");
        return v;
    }
    return cfg ? cfg->seed : 1;
}

std::string status_code(Status s) { return to_string(s); }

CsvTable ensemble_table(const EnsembleReport& rep) {
    CsvTable t;
    t.header = {"member", "seed", "status", "t_stop", "clock_gap"};
    for (int k = 0; k < rep.members; ++k) {
        const std::string gap = k < int(rep.clock_gaps.size()) ? std::to_string(rep.clock_gaps[k]) : "nan";
        t.rows.push_back({std::to_string(k), std::to_string(rep.seeds[k]), status_code(rep.status[k]),
                          format_double(rep.stop_times[k]), gap});
    }
    return t;
}

void write_lognorm(Run& r, const EnsembleReport& rep, const std::string& stem) {
    CsvTable t;
    t.header = {"t", "envelope", "affine_bound"};
    const auto& e = rep.lognorm;
    Plot p{"log-norm growth envelope", "t", "max over paths of l(t) - l(0)", false, false, {}, {}};
    PlotSeries env{"envelope", {}, {}, true}, fit{"affine bound", {}, {}, true};
    for (std::size_t k = 0; k < e.t.size(); ++k) {
        const double b = e.intercept + e.offset + e.slope * e.t[k];
        t.add({e.t[k], e.envelope[k], b});
        env.x.push_back(e.t[k]), env.y.push_back(e.envelope[k]);
        fit.x.push_back(e.t[k]), fit.y.push_back(b);
    }
    p.series = {env, fit};
    p.notes = {"slope " + format_double(e.slope) + ", rms residual " + format_double(e.residual)};
    write_csv(r.path(stem + ".csv"), t);
    emit_svg(r.path(stem + ".svg"), p);
}

void cmd_verify(Run& r) {
    json checks = json::array();
    int passed = 0, total = 0;
    for (auto [label, suite] : {std::pair{"operators", operator_suite(r.seed)}, std::pair{"mollifier", mollifier_suite(r.seed)}}) {
        for (const Check& c : suite.checks) {
            *r.out << (c.pass ? "PASS " : "FAIL ") << label << ": " << c.name << "  value " << format_double(c.value)
                   << " tol " << format_double(c.tolerance) << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
            checks.push_back({{"suite", label}, {"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance},
                              {"pass", c.pass}});
        }
        passed += suite.passed();
        total += int(suite.checks.size());
    }
    *r.out << passed << "/" << total << " checks passed\n";
    r.report = {{"passed", passed}, {"total", total}, {"checks", checks}};
    if (passed != total) throw AssertionFailure(std::to_string(total - passed) + " operator checks failed");
}

void cmd_decay(Run& r) {
    const Options& o = r.opt;
    if (o.ns.size() < 4) throw UsageError("--n needs at least four values");
    const DecayStudy st = decay_study(o.s, o.sigma, o.d, o.ns, o.T, o.grid);
    CsvTable t;
    t.header = {"n", "grid_n", "error"};
    PlotSeries pts{"||E(T)||", {}, {}, false}, fit{"fit", {}, {}, true};
    for (std::size_t k = 0; k < st.ns.size(); ++k) {
        t.add({double(st.ns[k]), double(st.grid_ns[k]), st.errors[k]});
        pts.x.push_back(st.ns[k]), pts.y.push_back(st.errors[k]);
        fit.x.push_back(st.ns[k]), fit.y.push_back(std::exp(st.fit.intercept - st.fit.theta * std::log(double(st.ns[k]))));
    }
    write_csv(r.path("decay.csv"), t);
    Plot p{"residual decay", "n", "H^sigma norm of the residual integral", true, true, {pts, fit}, {}};
    p.notes = {"fitted theta = " + format_double(st.fit.theta) + ", expected " + format_double(st.expected)};
    emit_svg(r.path("decay.svg"), p);
    const double rel = std::abs(st.fit.theta - st.expected) / st.expected;
    *r.out << "theta_hat " << format_double(st.fit.theta) << "  expected " << format_double(st.expected) << "  relative "
           << format_double(rel) << "  rms " << format_double(st.fit.residual) << "\n";
    r.report = {{"theta_hat", st.fit.theta}, {"expected", st.expected}, {"relative_error", rel},
                {"fit_residual", st.fit.residual}, {"intercept", st.fit.intercept}, {"ns", st.ns},
                {"grid_ns", st.grid_ns}, {"errors", st.errors}};
    if (o.tolerance >= 0.0 && !(rel <= o.tolerance))
        throw AssertionFailure("fitted exponent off by " + format_double(rel) + " > " + format_double(o.tolerance));
}

double family_distance(const ApproxFamilyParams& p, double t, const Grid& g) {
    ApproxFamilyParams m = p;
    m.kappa = -p.kappa;
    const State a = approx_solution(p, t, g), b = approx_solution(m, t, g);
    State diff = a;
    for (std::size_t i = 0; i < diff.u.size(); ++i) diff.u[i] -= b.u[i];
    diff.gamma -= b.gamma;
    return sobolev_norm(diff, p.s);
}

void cmd_gap(Run& r) {
    const Options& o = r.opt;
    ApproxFamilyParams p;
    p.n = o.n, p.s = o.s, p.d = o.d, p.T = o.T;
    p.sigma = 0.5 * (o.d / 2.0 + std::min(o.s - 1.0, 1.0 + o.d / 2.0));
    p.validate();
    const Grid g(o.d, family_grid_size(o.n, 64));
    const FamilyGap fg = family_gap(o.n, o.s, o.d, o.T, o.samples);
    CsvTable t;
    Plot plot{"gap between the kappa = +1 and -1 solutions", "t", "H^s distance", false, false, {}, {}};
    PlotSeries fam{"family", {}, {}, true};
    r.report = {{"n", o.n}, {"s", o.s}, {"T", o.T}, {"family_initial", fg.initial}, {"family_sup", fg.sup}, {"family_t_sup", fg.t_sup}};
    *r.out << "family gap: initial " << format_double(fg.initial) << "  sup " << format_double(fg.sup) << " at t = "
           << format_double(fg.t_sup) << "\n";
    if (o.simulate) {
        const SimulatedGap sg = simulated_gap(o.n, o.s, o.d, o.T, r.seed, GapRun{o.grid, o.dt, o.c});
        t.header = {"t", "simulated", "family"};
        PlotSeries sim{"simulated", {}, {}, true};
        for (std::size_t k = 0; k < sg.t.size(); ++k) {
            const double f = family_distance(p, sg.t[k], g);
            t.add({sg.t[k], sg.gap[k], f});
            sim.x.push_back(sg.t[k]), sim.y.push_back(sg.gap[k]);
            fam.x.push_back(sg.t[k]), fam.y.push_back(f);
        }
        plot.series = {sim, fam};
        r.report["simulated_initial"] = sg.initial;
        r.report["simulated_sup"] = sg.sup;
        r.report["status_plus"] = to_string(sg.status_plus);
        r.report["status_minus"] = to_string(sg.status_minus);
        r.report["ratio_to_family"] = sg.sup / fg.sup;
        *r.out << "simulated gap: initial " << format_double(sg.initial) << "  sup " << format_double(sg.sup) << "  ratio "
               << format_double(sg.sup / fg.sup) << "\n";
    } else {
        t.header = {"t", "family"};
        for (int k = 0; k <= o.samples; ++k) {
            const double tk = o.T * k / o.samples, f = family_distance(p, tk, g);
            t.add({tk, f});
            fam.x.push_back(tk), fam.y.push_back(f);
        }
        plot.series = {fam};
    }
    write_csv(r.path("gap.csv"), t);
    emit_svg(r.path("gap.svg"), plot);
}

void cmd_simulate(Run& r) {
    const RunConfig cfg = run_config(r);
    const State y0 = initial_state(cfg);
    const int members = std::max(1, cfg.members);
    const std::vector<Trajectory> runs = run_members(cfg.sim, y0, members, r.seed, r.opt.jobs);
    Plot p{"W^{1,inf} norm", "t", "||y||_{W^{1,inf}}", false, true, {}, {}};
    char name[64];
    for (int k = 0; k < members; ++k) {
        std::snprintf(name, sizeof name, "trajectory_%03d.csv", k);
        write_csv(r.path(name), trajectory_table(runs[k]));
        r.member_seeds.push_back(runs[k].seed);
        if (k < 8) p.series.push_back({"member " + std::to_string(k), runs[k].times, runs[k].winf, true});
    }
    emit_svg(r.path("winf.svg"), p);
    if (members == 1) {
        r.report = trajectory_summary(runs[0]);
        *r.out << "status " << to_string(runs[0].status) << "  t_stop " << format_double(runs[0].t_stop) << "  records "
               << runs[0].times.size() << "\n";
    } else {
        const EnsembleReport rep = summarize(runs, cfg.sim.t_end);
        r.report = to_json(rep);
        write_csv(r.path("ensemble.csv"), ensemble_table(rep));
        *r.out << "members " << rep.members << "  survived " << rep.survived << "  broke " << rep.broke << "  dt underflow "
               << rep.underflow << "\n";
    }
}

void cmd_global(Run& r) {
    const RunConfig cfg = run_config(r);
    const State y0 = initial_state(cfg);
    if (cfg.scales.empty()) {
        const EnsembleReport rep = global_ensemble(cfg.sim, y0, cfg.members, r.seed, r.opt.jobs);
        r.member_seeds = rep.seeds;
        r.report = to_json(rep);
        r.report["regime"] = global_regime(cfg.sim.noise);
        write_csv(r.path("ensemble.csv"), ensemble_table(rep));
        write_lognorm(r, rep, "lognorm");
        *r.out << "members " << rep.members << "  survived " << rep.survived << "  fraction "
               << (rep.survival_fraction ? format_double(*rep.survival_fraction) : "undefined") << "  lognorm slope "
               << format_double(rep.lognorm.slope) << "\n";
        return;
    }
    const ScaleSweep sw = scale_sweep(cfg.sim, y0, cfg.scales, cfg.winf_factor, cfg.hs_factor, cfg.members, r.seed, r.opt.jobs);
    CsvTable t;
    t.header = {"scale", "members", "survived", "broke", "dt_underflow", "survival_fraction"};
    PlotSeries s{"survival fraction", {}, {}, true};
    json reps = json::array();
    for (std::size_t k = 0; k < sw.scales.size(); ++k) {
        const EnsembleReport& rep = sw.reports[k];
        const double f = rep.survival_fraction.value_or(std::nan(""));
        t.add({sw.scales[k], double(rep.members), double(rep.survived), double(rep.broke), double(rep.underflow), f});
        s.x.push_back(sw.scales[k]), s.y.push_back(f);
        reps.push_back(to_json(rep));
        *r.out << "scale " << format_double(sw.scales[k]) << "  survived " << rep.survived << "/" << rep.members << "\n";
    }
    if (!sw.reports.empty()) r.member_seeds = sw.reports.front().seeds;
    write_csv(r.path("sweep.csv"), t);
    emit_svg(r.path("sweep.svg"), Plot{"survival against data scale", "data scale", "survival fraction", true, false, {s}, {}});
    r.report = {{"scales", sw.scales}, {"reports", reps}};
}

void cmd_breaking(Run& r) {
    RunConfig cfg = run_config(r);
    const State y0 = initial_state(cfg);
    std::optional<double> hs;
    if (cfg.calibrate_hs) {
        hs = calibrate_hs_threshold(cfg.sim, y0);
        if (!hs) throw std::runtime_error("the zero-noise pilot never crossed sim.blowup_winf; cannot calibrate the H^s threshold");
        cfg.sim.blowup_hs = *hs;
    }
    const EnsembleReport rep = breaking_ensemble(cfg.sim, y0, cfg.lambda, cfg.members, r.seed, r.opt.jobs);
    r.member_seeds = rep.seeds;
    r.report = to_json(rep);
    if (hs) r.report["calibrated_blowup_hs"] = *hs;
    write_csv(r.path("ensemble.csv"), ensemble_table(rep));
    write_lognorm(r, rep, "lognorm");
    std::vector<double> sorted = rep.breaking_times;
    std::sort(sorted.begin(), sorted.end());
    PlotSeries cdf{"broken fraction", {}, {}, true};
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cdf.x.push_back(sorted[k]);
        cdf.y.push_back(double(k + 1) / std::max(1, rep.members));
    }
    emit_svg(r.path("breaking.svg"), Plot{"breaking times", "t", "fraction of paths broken", false, false, {cdf}, {}});
    *r.out << "members " << rep.members << "  broke " << rep.broke << "  riccati window "
           << (rep.riccati_window ? format_double(*rep.riccati_window) : "none") << "  slope ordering "
           << (rep.slope_ordering ? "held" : "violated") << "\n";
}

void cmd_plot(Run& r) {
    const Options& o = r.opt;
    if (o.csv.empty()) throw UsageError("plot needs --csv");
    if (o.y.empty()) throw UsageError("plot needs --y");
    const CsvTable t = read_csv(o.csv);
    auto column = [&](const std::string& name) {
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it == t.header.end()) throw UsageError("column '" + name + "' not in " + o.csv);
        const std::size_t j = std::size_t(it - t.header.begin());
        std::vector<double> v;
        for (const auto& row : t.rows) v.push_back(std::strtod(row[j].c_str(), nullptr));
        return v;
    };
    Plot p{o.title.empty() ? fs::path(o.csv).filename().string() : o.title, o.x, "", o.logx, o.logy, {}, {}};
    const std::vector<double> xs = column(o.x);
    for (const std::string& yname : o.y) p.series.push_back({yname, xs, column(yname), true});
    if (o.y.size() == 1) p.ylabel = o.y.front();
    emit_svg(r.path(o.output), p);
    *r.out << "wrote " << (fs::path(o.out) / o.output).string() << " (" << t.rows.size() << " rows)\n";
}

const std::map<std::string, std::function<void(Run&)>>& commands() {
    static const std::map<std::string, std::function<void(Run&)>> c{
        {"simulate", cmd_simulate}, {"verify-ops", cmd_verify}, {"decay", cmd_decay}, {"gap", cmd_gap},
        {"global", cmd_global},     {"breaking", cmd_breaking}, {"plot", cmd_plot},
    };
    return c;
}

// run options in a stable, re-parseable form
json collect_options(const CLI::App* sub) {
    json o = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt->count() == 0 || opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (volatile_option(name)) continue;
        if (opt->get_expected_min() == 0)
            o[name] = true;
        else
            o[name] = opt->results();
    }
    return o;
}

std::vector<std::string> options_to_args(const json& o) {
    std::vector<std::string> a;
    for (const auto& [name, v] : o.items()) {
        a.push_back("--" + name);
        if (v.is_array())
            for (const auto& s : v) a.push_back(s.get<std::string>());
    }
    return a;
}

json manifest(const Run& r, double wall, int jobs, bool with_volatile) {
    json m;
    m["version"] = version;
    m["command"] = r.command;
    m["options"] = r.options;
    m["config_text"] = r.config_text ? json(*r.config_text) : json();
    if (r.config_text) {
        json eff = json::object();
        for (const auto& [k, v] : parse_config(*r.config_text).effective) eff[k] = v;
        m["effective_config"] = eff;
    }
    m["seed"] = r.seed;
    m["member_seeds"] = r.member_seeds;
    m["outputs"] = r.outputs;
    if (with_volatile) {
        m["wall_clock_seconds"] = wall;
        m["jobs"] = jobs;
    }
    return m;
}

void add_common(CLI::App* sub, Options& o, bool config) {
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "base seed (beats MCH2_SEED and sim.seed)");
    sub->add_option("--jobs", o.jobs, "worker threads (default: logical cores)")->check(CLI::PositiveNumber);
    if (config) sub->add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    std::string replay;
    bool keys = false;
    CLI::App app{"mch2: pseudospectral simulator and verification suite for stochastic MCH2 on the torus", "mch2"};
    app.set_version_flag("--version", version);
    app.add_option("--replay", replay, "rerun the command recorded in a manifest.json")->check(CLI::ExistingFile);
    app.add_flag("--keys", keys, "list the configuration keys with their defaults");
    app.add_option("--out", o.out, "output directory for --replay");
    app.add_option("--jobs", o.jobs, "worker threads for --replay")->check(CLI::PositiveNumber);
    app.require_subcommand(0, 1);

    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, desc] : descriptions()) subs[name] = app.add_subcommand(name, desc);
    for (const char* name : {"simulate", "global", "breaking"}) add_common(subs[name], o, true);
    for (const char* name : {"verify-ops", "decay", "gap", "plot"}) add_common(subs[name], o, false);

    CLI::App* dc = subs["decay"];
    dc->add_option("--s", o.s, "Sobolev index")->capture_default_str();
    dc->add_option("--sigma", o.sigma, "measurement index")->capture_default_str();
    dc->add_option("--d", o.d, "dimension")->capture_default_str();
    dc->add_option("--n", o.ns, "frequencies, comma separated")->delimiter(',');
    dc->add_option("--T", o.T, "horizon")->capture_default_str();
    dc->add_option("--grid", o.grid, "requested grid size per axis")->capture_default_str();
    dc->add_option("--tolerance", o.tolerance, "exit 1 unless |theta_hat - theta| / theta <= tolerance");

    CLI::App* gp = subs["gap"];
    gp->add_option("--n", o.n, "frequency")->capture_default_str();
    gp->add_option("--s", o.s, "Sobolev index")->capture_default_str();
    gp->add_option("--d", o.d, "dimension")->capture_default_str();
    gp->add_option("--T", o.T, "horizon")->capture_default_str();
    gp->add_option("--samples", o.samples, "time samples of the closed-form gap")->capture_default_str();
    gp->add_flag("--simulate", o.simulate, "also integrate both initial data");
    gp->add_option("--grid", o.grid, "simulation grid per axis")->capture_default_str();
    gp->add_option("--dt", o.dt, "simulation step")->capture_default_str();
    gp->add_option("--c", o.c, "linear noise strength of the simulation")->capture_default_str();

    CLI::App* pl = subs["plot"];
    pl->add_option("--csv", o.csv, "input CSV");
    pl->add_option("--x", o.x, "x column")->capture_default_str();
    pl->add_option("--y", o.y, "y columns, comma separated")->delimiter(',');
    pl->add_flag("--logx", o.logx, "logarithmic x axis");
    pl->add_flag("--logy", o.logy, "logarithmic y axis");
    pl->add_option("--title", o.title, "plot title");
    pl->add_option("--output", o.output, "SVG file name inside --out")->capture_default_str();

    std::optional<std::string> replay_config;
    std::optional<std::uint64_t> replay_seed;
    auto parse = [&](std::vector<std::string> a) {
        std::reverse(a.begin(), a.end());
        app.parse(a);
    };
    try {
        parse(args);
        if (keys) {
            out << config_reference();
            return 0;
        }
        if (!replay.empty()) {
            if (!app.get_subcommands().empty()) throw UsageError("--replay takes no subcommand");
            json m;
            try {
                m = json::parse(read_text(replay));
            } catch (const json::exception& e) {
                throw UsageError("cannot read manifest '" + replay + "': " + e.what());
            }
            std::vector<std::string> a{m.at("command").get<std::string>()};
            for (auto& s : options_to_args(m.at("options"))) a.push_back(s);
            a.insert(a.end(), {"--out", o.out});
            if (o.jobs > 0) a.insert(a.end(), {"--jobs", std::to_string(o.jobs)});
            if (m.at("config_text").is_string()) replay_config = m["config_text"].get<std::string>();
            replay_seed = m.at("seed").get<std::uint64_t>();
            const std::string out_dir = o.out;
            o = Options{};
            o.out = out_dir;
            replay.clear();
            parse(a);
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        err << app.help();
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    if (app.get_subcommands().empty()) {
        err << app.help();
        return 2;
    }
    CLI::App* sub = app.get_subcommands().front();
    Run r;
    r.command = sub->get_name();
    r.out = &out;
    if (replay_seed) o.seed = replay_seed;
    if (o.jobs <= 0) o.jobs = int(std::max(1u, std::thread::hardware_concurrency()));
    r.opt = o;
    r.options = collect_options(sub);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (replay_config)
            r.config_text = replay_config;
        else if (!o.config_path.empty())
            r.config_text = read_text(o.config_path);
        std::optional<RunConfig> cfg;
        if (r.config_text) cfg = parse_config(*r.config_text);
        r.seed = resolve_seed(o, cfg);
        fs::create_directories(o.out);
        commands().at(r.command)(r);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n" << sub->help();
        return 2;
    } catch (const AssertionFailure& e) {
        err << "check failed: " << e.what() << "\n";
        // outputs are still written below
        r.report["check_failed"] = e.what();
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_json((fs::path(o.out) / "report.json").string(), {{"manifest", manifest(r, wall, o.jobs, false)}, {"report", r.report}});
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.outputs.push_back("report.json");
    r.outputs.push_back("manifest.json");
    try {
        write_json((fs::path(o.out) / "report.json").string(), {{"manifest", manifest(r, wall, o.jobs, false)}, {"report", r.report}});
        write_json((fs::path(o.out) / "manifest.json").string(), manifest(r, wall, o.jobs, true));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    out << "outputs in " << o.out << "\n";
    return 0;
}

}  // namespace mch2
