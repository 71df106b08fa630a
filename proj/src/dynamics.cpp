#include "mch2/dynamics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mch2/diagnostics.hpp"

namespace mch2 {

std::string to_string(Scheme s) {
    switch (s) {
        case Scheme::euler_maruyama: return "euler_maruyama";
        case Scheme::euler_maruyama_regularized: return "euler_maruyama_regularized";
        case Scheme::rk4_random_pde: return "rk4_random_pde";
    }
    return "euler_maruyama";
}

Scheme scheme_from_string(const std::string& s) {
    if (s == "euler_maruyama") return Scheme::euler_maruyama;
    if (s == "euler_maruyama_regularized") return Scheme::euler_maruyama_regularized;
    if (s == "rk4_random_pde") return Scheme::rk4_random_pde;
    throw std::invalid_argument("unknown scheme '" + s + "'");
}

std::string to_string(Status s) {
    switch (s) {
        case Status::survived: return "survived";
        case Status::broke: return "broke";
        case Status::dt_underflow: return "dt_underflow";
    }
    return "survived";
}

void SimConfig::validate() const {
    const int d = grid.d();
    if (!(s > 1.0 + d / 2.0)) throw std::invalid_argument("sim.s must exceed 1 + d/2 (well-posedness index)");
    if (!(dt > 0.0)) throw std::invalid_argument("sim.dt must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("sim.t_end must be positive");
    if (!(dt_min > 0.0 && dt_min < dt)) throw std::invalid_argument("sim.dt_min must lie in (0, sim.dt)");
    if (!(blowup_winf > 0.0) || !(blowup_hs > 0.0)) throw std::invalid_argument("blow-up thresholds must be positive");
    if (record_every < 1) throw std::invalid_argument("sim.record_every must be >= 1");
    const double steps = t_end / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
        throw std::invalid_argument("sim.t_end must be an integer multiple of sim.dt");
    noise.validate(d);
    if (scheme == Scheme::rk4_random_pde && !noise.transformable())
        throw std::invalid_argument("rk4_random_pde needs zero noise or linear noise with c1 == c2");
    if (scheme == Scheme::euler_maruyama_regularized) reg.validate();
    if (transformed_clocks && !noise.transformable())
        throw std::invalid_argument("sim.transformed_clocks needs zero noise or linear noise with c1 == c2");
}

State step_em(const State& y, double t, double dt, const std::vector<double>& dW, const NoiseModel& model,
              const std::optional<RegularizationParams>& reg) {
    if (!(dt > 0.0)) throw std::invalid_argument("step must be positive");
    Tendency k = reg ? drift_regularized(y, *reg) : drift(y);
    k *= dt;
    const auto g = diffusion(t, y, model);
    if (dW.size() < g.size()) throw std::invalid_argument("fewer Brownian increments than noise drivers");
    for (std::size_t i = 0; i < g.size(); ++i) k.axpy(dW[i], g[i]);
    return advance(y, 1.0, k);
}

State step_rk4_random(const State& yt, double t, double dt, double W0, double W1, double c) {
    if (!(dt > 0.0)) throw std::invalid_argument("step must be positive");
    auto f = [&](double theta, const State& z) {
        Tendency k = drift(z);
        k *= 1.0 / mu(t + theta * dt, W0 + theta * (W1 - W0), c);
        return k;
    };
    const Tendency k1 = f(0.0, yt);
    const Tendency k2 = f(0.5, advance(yt, 0.5 * dt, k1));
    const Tendency k3 = f(0.5, advance(yt, 0.5 * dt, k2));
    const Tendency k4 = f(1.0, advance(yt, dt, k3));
    Tendency sum = k1;
    sum.axpy(2.0, k2);
    sum.axpy(2.0, k3);
    sum += k4;
    return advance(yt, dt / 6.0, sum);
}

namespace {

bool all_finite(const State& y) {
    auto ok = [](const SpectralField& f) {
        for (std::size_t i = 0; i < f.size(); ++i)
            if (!std::isfinite(f[i].real()) || !std::isfinite(f[i].imag())) return false;
        return true;
    };
    if (!ok(y.gamma)) return false;
    for (const auto& ui : y.u)
        if (!ok(ui)) return false;
    return true;
}

}  // namespace

Trajectory simulate(const SimConfig& cfg, const State& y0, std::uint64_t seed, const Observer& observer) {
    cfg.validate();
    if (!same_grid(y0) || y0.grid() != cfg.grid) throw std::invalid_argument("initial state does not match the grid");

    const int d = cfg.grid.d();
    const double dt0 = cfg.dt;
    const std::int64_t steps0 = std::llround(cfg.t_end / dt0);
    const int drivers = cfg.noise.drivers();
    const WienerPath path(seed, dt0, int(steps0), drivers);
    // the transformed variables y~ = mu y exist only for the exactly removable linear noise
    const bool transformed = cfg.noise.transformable();
    const double c = cfg.noise.transform_c();
    const bool rk4 = cfg.scheme == Scheme::rk4_random_pde;
    std::optional<RegularizationParams> reg;
    if (cfg.scheme == Scheme::euler_maruyama_regularized) reg = cfg.reg;

    Trajectory tr;
    tr.seed = seed;

    int level = 0;
    std::int64_t j = 0;
    auto time_of = [&](int l, std::int64_t i) { return std::ldexp(dt0, -l) * double(i); };
    auto W_at = [&](int driver, int l, std::int64_t i) { return drivers > driver ? path.at(driver, l, i) : 0.0; };

    State y = y0;          // original variables
    State yt = y0;         // transformed variables (rk4 only)
    double winf_ref = winf_norm(y0);
    // norms are homogeneous, so the clocks on mu y are mu times the norms of y
    auto clock_scale = [&](double m) { return cfg.transformed_clocks ? m : 1.0; };
    bool winf_hit = false, hs_hit = false;
    double t_winf = 0.0, t_hs = 0.0;

    auto record = [&](double t, double W, const State& state, double winf, double hu, double hg) {
        tr.times.push_back(t);
        tr.hs_u.push_back(hu);
        tr.hs_gamma.push_back(hg);
        tr.winf.push_back(winf);
        if (!std::isfinite(winf)) {
            tr.energy.push_back(std::numeric_limits<double>::infinity());
            tr.min_slope.push_back(-std::numeric_limits<double>::infinity());
            return;
        }
        const State ut = transformed ? transform_state(state, mu(t, W, c)) : state;
        tr.energy.push_back(h1_integral(ut));
        tr.min_slope.push_back(d == 1 ? min_slope(ut.u[0]) : std::numeric_limits<double>::quiet_NaN());
    };

    record(0.0, 0.0, y, winf_norm(y), sobolev_norm(y.u, cfg.s), sobolev_norm(y.gamma, cfg.s));
    if (observer) observer(0.0, 0.0, 1.0, y, y);

    long step_count = 0;
    Status status = Status::survived;
    double t_stop = cfg.t_end;
    while (j < (steps0 << level)) {
        const double t = time_of(level, j), dt = std::ldexp(dt0, -level);
        const double W0 = W_at(0, level, j), W1 = W_at(0, level, j + 1);
        if (rk4) {
            yt = step_rk4_random(yt, t, dt, W0, W1, c);
        } else {
            std::vector<double> dW(static_cast<std::size_t>(drivers));
            for (int k = 0; k < drivers; ++k) dW[k] = W_at(k, level, j + 1) - W_at(k, level, j);
            y = step_em(y, t, dt, dW, cfg.noise, reg);
        }
        ++j;
        ++step_count;
        const double tn = time_of(level, j);
        const double mun = mu(tn, W1, c);
        if (rk4) y = untransform_state(yt, mun);

        const bool finite = all_finite(y);
        const double inf = std::numeric_limits<double>::infinity();
        double winf = finite ? winf_norm(y) : inf;
        double hu = finite ? sobolev_norm(y.u, cfg.s) : inf;
        double hg = finite ? sobolev_norm(y.gamma, cfg.s) : inf;
        // overflow anywhere counts as overflow of every clock
        const bool bad = !std::isfinite(winf) || !std::isfinite(hu) || !std::isfinite(hg);
        if (bad) winf = hu = hg = inf;

        const double cs = clock_scale(mun);
        const bool new_winf = !winf_hit && cs * winf >= cfg.blowup_winf;
        const bool new_hs = !hs_hit && cs * std::hypot(hu, hg) >= cfg.blowup_hs;
        const bool done = j == (steps0 << level);
        if (new_winf || new_hs || bad || done || step_count % cfg.record_every == 0) {
            record(tn, W1, y, winf, hu, hg);
            const long idx = long(tr.times.size()) - 1;
            if (new_winf) {
                winf_hit = true;
                t_winf = tn;
                tr.winf_crossing = idx;
            }
            if (new_hs) {
                hs_hit = true;
                t_hs = tn;
                tr.hs_crossing = idx;
            }
        }
        if (observer && !bad) observer(tn, W1, transformed ? mun : 1.0, transformed ? transform_state(y, mun) : y, y);

        if (bad || (winf_hit && hs_hit)) {
            status = Status::broke;
            break;
        }
        if (cfg.adaptive && !done && cs * winf >= 2.0 * std::max(winf_ref, 1.0)) {
            if (0.5 * dt < cfg.dt_min) {
                status = Status::dt_underflow;
                t_stop = tn;
                break;
            }
            ++level;
            j *= 2;
            winf_ref = cs * winf;
        }
    }
    if (status != Status::dt_underflow && (winf_hit || hs_hit)) {
        status = Status::broke;
        t_stop = winf_hit ? t_winf : t_hs;
    } else if (status == Status::broke) {
        // non-finite state before either threshold registered
        t_stop = tr.times.back();
    }
    tr.status = status;
    tr.t_stop = t_stop;
    tr.final_state = y;
    return tr;
}

Observer record_flow(FlowPath& path) {
    return [&path](double t, double W, double, const State& yt, const State&) {
        path.t.push_back(t);
        path.W.push_back(W);
        path.y_tilde.push_back(yt);
    };
}

Characteristics characteristic_flow(const FlowPath& path, double c, const std::vector<double>& x0) {
    if (path.y_tilde.empty()) throw std::invalid_argument("empty velocity path");
    if (path.y_tilde.front().d() != 1) throw std::invalid_argument("characteristic flow is implemented for d = 1");
    if (path.t.size() != path.y_tilde.size() || path.W.size() != path.y_tilde.size())
        throw std::invalid_argument("velocity path arrays differ in length");

    const std::size_t nt = path.t.size(), np = x0.size();
    // velocity v = mu^{-1} u~ and its slope at each snapshot
    std::vector<SpectralField> v(nt), vx(nt);
    for (std::size_t k = 0; k < nt; ++k) {
        v[k] = (1.0 / mu(path.t[k], path.W[k], c)) * path.y_tilde[k].u[0];
        vx[k] = partial(v[k], 0);
    }

    Characteristics out;
    out.t = path.t;
    std::vector<double> phi = x0, logj(np, 0.0);
    auto push = [&] {
        out.phi.push_back(phi);
        std::vector<double> j(np);
        for (std::size_t p = 0; p < np; ++p) j[p] = std::exp(logj[p]);
        out.phi_x.push_back(std::move(j));
    };
    push();
    for (std::size_t k = 0; k + 1 < nt; ++k) {
        const double h = path.t[k + 1] - path.t[k];
        auto rate = [&](double theta, double x, double& dx, double& dl) {
            dx = dl = 0.0;
            if (theta < 1.0) {
                dx += (1.0 - theta) * evaluate(v[k], x);
                dl += (1.0 - theta) * evaluate(vx[k], x);
            }
            if (theta > 0.0) {
                dx += theta * evaluate(v[k + 1], x);
                dl += theta * evaluate(vx[k + 1], x);
            }
        };
        for (std::size_t p = 0; p < np; ++p) {
            const double x = phi[p];
            double a1, b1, a2, b2, a3, b3, a4, b4;
            rate(0.0, x, a1, b1);
            rate(0.5, x + 0.5 * h * a1, a2, b2);
            rate(0.5, x + 0.5 * h * a2, a3, b3);
            rate(1.0, x + h * a3, a4, b4);
            phi[p] = x + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4);
            logj[p] += h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4);
        }
        push();
    }
    return out;
}

}  // namespace mch2
