#include "mch2/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mch2/io.hpp"

namespace mch2 {

namespace {

enum class Type { number, integer, boolean, word, terms, modes, list };

struct KeyInfo {
    Type type;
    const char* fallback;  // documented default, nullptr when required or conditional
    const char* doc;
};

const std::map<std::string, KeyInfo>& schema() {
    static const std::map<std::string, KeyInfo> keys{
        {"grid.d", {Type::integer, nullptr, "dimension, 1 or 2 (required)"}},
        {"grid.n", {Type::integer, nullptr, "collocation points per axis, even, >= 8 (required)"}},
        {"grid.dealias", {Type::number, "0.6666666666666666", "retained fraction of the Nyquist band"}},
        {"sim.s", {Type::number, nullptr, "Sobolev index of the H^s clock, > 1 + d/2 (default 2 for d = 1, 2.5 for d = 2)"}},
        {"sim.dt", {Type::number, nullptr, "base step (required)"}},
        {"sim.t_end", {Type::number, nullptr, "horizon, a multiple of sim.dt (required)"}},
        {"sim.scheme", {Type::word, "euler_maruyama", "euler_maruyama | euler_maruyama_regularized | rk4_random_pde"}},
        {"sim.dt_min", {Type::number, "1e-10", "adaptive step floor"}},
        {"sim.record_every", {Type::integer, "1", "record cadence in steps"}},
        {"sim.adaptive", {Type::boolean, "true", "halve dt when the W^{1,inf} norm doubles"}},
        {"sim.blowup_winf", {Type::number, "1000", "W^{1,inf} clock threshold"}},
        {"sim.blowup_hs", {Type::number, "1000000", "H^s clock threshold"}},
        {"sim.transformed_clocks", {Type::boolean, "false", "clocks watch mu y (linear noise only)"}},
        {"sim.seed", {Type::integer, "1", "base seed (overridden by MCH2_SEED and --seed)"}},
        {"reg.epsilon", {Type::number, "0.5", "mollifier scale of the regularized scheme"}},
        {"reg.R", {Type::number, "1", "truncation radius of the regularized scheme"}},
        {"noise.kind", {Type::word, "zero", "zero | linear | polynomial | finite_mode"}},
        {"noise.c1", {Type::number, nullptr, "velocity noise strength (linear, polynomial)"}},
        {"noise.c2", {Type::number, nullptr, "density noise strength (polynomial; linear defaults to c1)"}},
        {"noise.delta1", {Type::number, nullptr, "velocity norm exponent (polynomial)"}},
        {"noise.delta2", {Type::number, nullptr, "density norm exponent (polynomial)"}},
        {"noise.s_norm", {Type::number, "2", "Sobolev index inside the polynomial noise"}},
        {"noise.modes", {Type::modes, nullptr, "finite_mode list 'q0 q1 a; ...'"}},
        {"data.kind", {Type::word, "modes", "modes | steep | family"}},
        {"data.u1", {Type::terms, "", "modes: 'm a b; ...' (d = 1) or 'm0 m1 a b; ...' (d = 2), a cos(m.x) + b sin(m.x)"}},
        {"data.u2", {Type::terms, "", "modes: second velocity component (d = 2)"}},
        {"data.gamma", {Type::terms, "", "modes: density deviation"}},
        {"data.amplitude", {Type::number, "4", "steep: slope depth A"}},
        {"data.width", {Type::number, "0.12", "steep: bump width w"}},
        {"data.gamma_amplitude", {Type::number, "0.1", "steep: gamma0 = amplitude cos x"}},
        {"data.n", {Type::integer, "8", "family: frequency n"}},
        {"data.kappa", {Type::integer, "1", "family: +1 or -1"}},
        {"data.scale", {Type::number, "1", "multiplies the initial data"}},
        {"ensemble.members", {Type::integer, "1", "number of independent paths"}},
        {"breaking.lambda", {Type::number, "0.5", "lambda in (0, 1) of the slope condition"}},
        {"breaking.calibrate_hs", {Type::boolean, "true", "set the H^s threshold from a zero-noise pilot run"}},
        {"sweep.scales", {Type::list, "", "data scales for the linear-noise sweep, e.g. '1, 0.5, 0.25'"}},
        {"sweep.winf_factor", {Type::number, "5", "sweep W^{1,inf} threshold relative to the scaled data"}},
        {"sweep.hs_factor", {Type::number, "5", "sweep H^s threshold relative to the scaled data"}},
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

bool parse_long(const std::string& s, long long& out) {
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, out);
    return ec == std::errc() && p == e;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Reader {
public:
    explicit Reader(std::map<std::string, Entry> e) : entries_(std::move(e)) {}

    bool has(const std::string& k) const { return entries_.count(k) > 0; }

    std::string raw(const std::string& k) const {
        auto it = entries_.find(k);
        if (it != entries_.end()) return it->second.value;
        const char* f = schema().at(k).fallback;
        if (!f) throw ConfigError("missing required key '" + k + "'");
        return f;
    }

    [[noreturn]] void fail(const std::string& k, const std::string& what) const {
        auto it = entries_.find(k);
        const std::string where = it != entries_.end() ? "line " + std::to_string(it->second.line) + ": " : "";
        throw ConfigError(where + "key '" + k + "' " + what);
    }

    double number(const std::string& k) const {
        double v;
        const std::string r = raw(k);
        if (!parse_double(r, v)) fail(k, "expects a number, got '" + r + "'");
        return v;
    }

    long long integer(const std::string& k) const {
        long long v;
        const std::string r = raw(k);
        if (!parse_long(r, v)) fail(k, "expects an integer, got '" + r + "'");
        return v;
    }

    bool boolean(const std::string& k) const {
        const std::string r = raw(k);
        if (r == "true" || r == "1") return true;
        if (r == "false" || r == "0") return false;
        fail(k, "expects true or false, got '" + r + "'");
    }

    std::vector<std::vector<double>> tuples(const std::string& k, std::size_t width) const {
        std::vector<std::vector<double>> out;
        const std::string r = raw(k);
        if (r.empty()) return out;
        for (const std::string& item : split(r, ';')) {
            if (item.empty()) continue;
            std::istringstream in(item);
            std::vector<double> vals;
            std::string tok;
            while (in >> tok) {
                double v;
                if (!parse_double(tok, v)) fail(k, "has a non-numeric entry '" + tok + "'");
                vals.push_back(v);
            }
            if (vals.size() != width)
                fail(k, "expects " + std::to_string(width) + " numbers per ';'-separated item, got '" + item + "'");
            out.push_back(vals);
        }
        return out;
    }

    std::vector<double> list(const std::string& k) const {
        std::vector<double> out;
        const std::string r = raw(k);
        if (r.empty()) return out;
        for (const std::string& item : split(r, ',')) {
            double v;
            if (!parse_double(item, v)) fail(k, "has a non-numeric entry '" + item + "'");
            out.push_back(v);
        }
        return out;
    }

private:
    std::map<std::string, Entry> entries_;
};

int as_int(double v, const Reader& rd, const std::string& k) {
    if (v != std::floor(v) || std::abs(v) > 1e6) rd.fail(k, "needs integer wavenumbers");
    return int(v);
}

std::vector<DataTerm> terms(const Reader& rd, const std::string& k, int d, int cutoff) {
    std::vector<DataTerm> out;
    for (const auto& t : rd.tuples(k, d == 1 ? 3 : 4)) {
        DataTerm term;
        term.m0 = as_int(t[0], rd, k);
        term.m1 = d == 2 ? as_int(t[1], rd, k) : 0;
        term.a = t[d == 1 ? 1 : 2];
        term.b = t[d == 1 ? 2 : 3];
        if (std::abs(term.m0) > cutoff || std::abs(term.m1) > cutoff)
            rd.fail(k, "has a wavenumber beyond the retained cutoff " + std::to_string(cutoff));
        out.push_back(term);
    }
    return out;
}

std::string join_terms(const std::vector<DataTerm>& ts, int d) {
    std::string s;
    for (const auto& t : ts) {
        if (!s.empty()) s += "; ";
        s += std::to_string(t.m0) + " ";
        if (d == 2) s += std::to_string(t.m1) + " ";
        s += format_double(t.a) + " " + format_double(t.b);
    }
    return s;
}

std::string join_list(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ", ") + format_double(x);
    return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    std::map<std::string, Entry> entries;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": missing key before '='");
        if (!schema().count(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for key '" + key + "'");
        auto [it, fresh] = entries.emplace(key, Entry{value, lineno});
        if (!fresh)
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' (first set on line " +
                              std::to_string(it->second.line) + ")");
    }
    const Reader rd(entries);
    RunConfig c;

    const long long d = rd.integer("grid.d"), n = rd.integer("grid.n");
    if (d != 1 && d != 2) rd.fail("grid.d", "must be 1 or 2");
    if (n < 8 || n % 2 != 0 || n > 65536) rd.fail("grid.n", "must be even and in [8, 65536]");
    const double frac = rd.number("grid.dealias");
    if (!(frac > 0.0 && frac <= 1.0)) rd.fail("grid.dealias", "must lie in (0, 1]");
    SimConfig& s = c.sim;
    s.grid = Grid(int(d), int(n), frac);
    s.s = rd.has("sim.s") ? rd.number("sim.s") : (d == 1 ? 2.0 : 2.5);
    s.dt = rd.number("sim.dt");
    s.t_end = rd.number("sim.t_end");
    try {
        s.scheme = scheme_from_string(rd.raw("sim.scheme"));
    } catch (const std::invalid_argument& e) {
        rd.fail("sim.scheme", "is not a scheme: " + std::string(e.what()));
    }
    s.dt_min = rd.number("sim.dt_min");
    s.record_every = int(rd.integer("sim.record_every"));
    s.adaptive = rd.boolean("sim.adaptive");
    s.blowup_winf = rd.number("sim.blowup_winf");
    s.blowup_hs = rd.number("sim.blowup_hs");
    s.transformed_clocks = rd.boolean("sim.transformed_clocks");
    const long long seed = rd.integer("sim.seed");
    if (seed < 0) rd.fail("sim.seed", "must be nonnegative");
    c.seed = std::uint64_t(seed);
    s.reg.epsilon = rd.number("reg.epsilon");
    s.reg.R = rd.number("reg.R");

    NoiseModel& nz = s.noise;
    try {
        nz.kind = noise_kind_from_string(rd.raw("noise.kind"));
    } catch (const std::invalid_argument& e) {
        rd.fail("noise.kind", "is not a noise model: " + std::string(e.what()));
    }
    auto need = [&](const std::string& k) {
        if (!rd.has(k)) throw ConfigError("noise.kind = " + to_string(nz.kind) + " requires key '" + k + "'");
        return rd.number(k);
    };
    switch (nz.kind) {
        case NoiseModel::Kind::zero: break;
        case NoiseModel::Kind::linear:
            nz.c1 = need("noise.c1");
            nz.c2 = rd.has("noise.c2") ? rd.number("noise.c2") : nz.c1;
            break;
        case NoiseModel::Kind::polynomial:
            nz.c1 = need("noise.c1");
            nz.c2 = need("noise.c2");
            nz.delta1 = need("noise.delta1");
            nz.delta2 = need("noise.delta2");
            nz.s_norm = rd.number("noise.s_norm");
            break;
        case NoiseModel::Kind::finite_mode:
            if (!rd.has("noise.modes")) throw ConfigError("noise.kind = finite_mode requires key 'noise.modes'");
            for (const auto& t : rd.tuples("noise.modes", 3))
                nz.modes.push_back(NoiseMode{as_int(t[0], rd, "noise.modes"), as_int(t[1], rd, "noise.modes"), t[2]});
            break;
    }

    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid configuration: ") + e.what());
    }

    DataSpec& data = c.data;
    const std::string dk = rd.raw("data.kind");
    const int K = s.grid.cutoff();
    if (dk == "modes") {
        data.kind = DataSpec::Kind::modes;
        data.u1 = terms(rd, "data.u1", int(d), K);
        data.u2 = terms(rd, "data.u2", int(d), K);
        data.gamma = terms(rd, "data.gamma", int(d), K);
        if (d == 1 && !data.u2.empty()) rd.fail("data.u2", "is only meaningful for grid.d = 2");
    } else if (dk == "steep") {
        data.kind = DataSpec::Kind::steep;
        if (d != 1) rd.fail("data.kind", "steep data are one-dimensional");
        data.steep = SteepData{rd.number("data.amplitude"), rd.number("data.width"), rd.number("data.gamma_amplitude")};
        if (!(data.steep.amplitude > 0.0) || !(data.steep.width > 0.0)) rd.fail("data.width", "and data.amplitude must be positive");
    } else if (dk == "family") {
        data.kind = DataSpec::Kind::family;
        if (d != 2) rd.fail("data.kind", "the oscillating family needs grid.d = 2");
        data.family_n = int(rd.integer("data.n"));
        data.family_kappa = int(rd.integer("data.kappa"));
        if (data.family_kappa != 1 && data.family_kappa != -1) rd.fail("data.kappa", "must be +1 or -1");
        if (data.family_n < 2 || 2 * data.family_n > K) rd.fail("data.n", "must satisfy 2 <= n and 2n <= cutoff " + std::to_string(K));
    } else {
        rd.fail("data.kind", "must be modes, steep or family");
    }
    data.scale = rd.number("data.scale");

    const long long members = rd.integer("ensemble.members");
    if (members < 0 || members > 1000000) rd.fail("ensemble.members", "must lie in [0, 10^6]");
    c.members = int(members);
    c.lambda = rd.number("breaking.lambda");
    if (!(c.lambda > 0.0 && c.lambda < 1.0)) rd.fail("breaking.lambda", "must lie in (0, 1)");
    c.calibrate_hs = rd.boolean("breaking.calibrate_hs");
    c.scales = rd.list("sweep.scales");
    for (double a : c.scales)
        if (!(a > 0.0)) rd.fail("sweep.scales", "must be positive");
    c.winf_factor = rd.number("sweep.winf_factor");
    c.hs_factor = rd.number("sweep.hs_factor");
    if (!(c.winf_factor > 1.0)) rd.fail("sweep.winf_factor", "must exceed 1");
    if (!(c.hs_factor > 1.0)) rd.fail("sweep.hs_factor", "must exceed 1");

    // canonical echo of everything in effect
    auto& e = c.effective;
    e["grid.d"] = std::to_string(d);
    e["grid.n"] = std::to_string(n);
    e["grid.dealias"] = format_double(frac);
    e["sim.s"] = format_double(s.s);
    e["sim.dt"] = format_double(s.dt);
    e["sim.t_end"] = format_double(s.t_end);
    e["sim.scheme"] = to_string(s.scheme);
    e["sim.dt_min"] = format_double(s.dt_min);
    e["sim.record_every"] = std::to_string(s.record_every);
    e["sim.adaptive"] = s.adaptive ? "true" : "false";
    e["sim.blowup_winf"] = format_double(s.blowup_winf);
    e["sim.blowup_hs"] = format_double(s.blowup_hs);
    e["sim.transformed_clocks"] = s.transformed_clocks ? "true" : "false";
    e["sim.seed"] = std::to_string(c.seed);
    if (s.scheme == Scheme::euler_maruyama_regularized) {
        e["reg.epsilon"] = format_double(s.reg.epsilon);
        e["reg.R"] = format_double(s.reg.R);
    }
    e["noise.kind"] = to_string(nz.kind);
    if (nz.kind == NoiseModel::Kind::linear || nz.kind == NoiseModel::Kind::polynomial) {
        e["noise.c1"] = format_double(nz.c1);
        e["noise.c2"] = format_double(nz.c2);
    }
    if (nz.kind == NoiseModel::Kind::polynomial) {
        e["noise.delta1"] = format_double(nz.delta1);
        e["noise.delta2"] = format_double(nz.delta2);
        e["noise.s_norm"] = format_double(nz.s_norm);
    }
    if (nz.kind == NoiseModel::Kind::finite_mode) {
        std::string m;
        for (const auto& q : nz.modes)
            m += (m.empty() ? "" : "; ") + std::to_string(q.q0) + " " + std::to_string(q.q1) + " " + format_double(q.amplitude);
        e["noise.modes"] = m;
    }
    e["data.kind"] = dk;
    if (data.kind == DataSpec::Kind::modes) {
        e["data.u1"] = join_terms(data.u1, int(d));
        if (d == 2) e["data.u2"] = join_terms(data.u2, int(d));
        e["data.gamma"] = join_terms(data.gamma, int(d));
    } else if (data.kind == DataSpec::Kind::steep) {
        e["data.amplitude"] = format_double(data.steep.amplitude);
        e["data.width"] = format_double(data.steep.width);
        e["data.gamma_amplitude"] = format_double(data.steep.gamma_amplitude);
    } else {
        e["data.n"] = std::to_string(data.family_n);
        e["data.kappa"] = std::to_string(data.family_kappa);
    }
    e["data.scale"] = format_double(data.scale);
    e["ensemble.members"] = std::to_string(c.members);
    e["breaking.lambda"] = format_double(c.lambda);
    e["breaking.calibrate_hs"] = c.calibrate_hs ? "true" : "false";
    e["sweep.scales"] = join_list(c.scales);
    e["sweep.winf_factor"] = format_double(c.winf_factor);
    e["sweep.hs_factor"] = format_double(c.hs_factor);
    return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_text(path)); }

State initial_state(const RunConfig& cfg) {
    const Grid& g = cfg.sim.grid;
    State y = State::zero(g);
    const DataSpec& data = cfg.data;
    auto fill = [&](SpectralField& f, const std::vector<DataTerm>& ts) {
        for (const auto& t : ts) {
            const cplx c = (t.m0 == 0 && t.m1 == 0) ? cplx(t.a) : cplx(0.5 * t.a, -0.5 * t.b);
            f.set_coeff(f.coeff(t.m0, t.m1) + c, t.m0, t.m1);
        }
    };
    switch (data.kind) {
        case DataSpec::Kind::modes:
            fill(y.u[0], data.u1);
            if (g.d() == 2) fill(y.u[1], data.u2);
            fill(y.gamma, data.gamma);
            break;
        case DataSpec::Kind::steep: y = steep_slope_data(g, data.steep); break;
        case DataSpec::Kind::family: {
            ApproxFamilyParams p;
            p.n = data.family_n;
            p.kappa = data.family_kappa;
            p.s = cfg.sim.s;
            p.sigma = 0.5 * (1.0 + std::min(p.s - 1.0, 2.0));
            y = approx_solution(p, 0.0, g);
            break;
        }
    }
    for (auto& ui : y.u) ui *= data.scale;
    y.gamma *= data.scale;
    return y;
}

std::string config_reference() {
    std::string out;
    for (const auto& [k, info] : schema()) {
        out += k + " = " + (info.fallback ? (std::string(info.fallback).empty() ? "(empty)" : info.fallback) : "(no default)") +
               "    # " + info.doc + "\n";
    }
    return out;
}

}  // namespace mch2
