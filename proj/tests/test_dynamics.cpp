#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "mch2/diagnostics.hpp"
#include "mch2/dynamics.hpp"
#include "support.hpp"

using namespace mch2;
using testing_support::max_coeff;
using testing_support::max_coeff_diff;
using testing_support::sample;

namespace {

State smooth_1d(const Grid& g, double amp) {
    return State{{sample(g, [&](double x, double) { return amp * (std::sin(x) + 0.3 * std::cos(2 * x)); })},
                 sample(g, [&](double x, double) { return amp * 0.6 * std::cos(x + 0.4); })};
}

double state_diff(const State& a, const State& b) {
    double mx = max_coeff_diff(a.gamma, b.gamma);
    for (std::size_t i = 0; i < a.u.size(); ++i) mx = std::max(mx, max_coeff_diff(a.u[i], b.u[i]));
    return mx;
}

double state_max(const State& a) {
    double mx = max_coeff(a.gamma);
    for (const auto& f : a.u) mx = std::max(mx, max_coeff(f));
    return mx;
}

// textbook RK4 written against drift() alone
State plain_rk4(const State& y, double h) {
    const Tendency k1 = drift(y);
    const Tendency k2 = drift(advance(y, h / 2, k1));
    const Tendency k3 = drift(advance(y, h / 2, k2));
    const Tendency k4 = drift(advance(y, h, k3));
    State out = advance(y, h / 6, k1);
    out = advance(out, h / 3, k2);
    out = advance(out, h / 3, k3);
    return advance(out, h / 6, k4);
}

SimConfig base_config(const Grid& g) {
    SimConfig cfg;
    cfg.grid = g;
    cfg.s = g.d() == 1 ? 2.0 : 2.5;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    return cfg;
}

}  // namespace

TEST_CASE("config validation") {
    SimConfig cfg = base_config(Grid(1, 32));
    CHECK_NOTHROW(cfg.validate());
    cfg.s = 1.5;
    CHECK_THROWS(cfg.validate());
    cfg = base_config(Grid(2, 16));
    cfg.s = 2.0;
    CHECK_THROWS(cfg.validate());
    cfg = base_config(Grid(1, 32));
    cfg.dt_min = cfg.dt;
    CHECK_THROWS(cfg.validate());
    cfg = base_config(Grid(1, 32));
    cfg.t_end = 0.505;
    CHECK_THROWS(cfg.validate());
    cfg = base_config(Grid(1, 32));
    cfg.scheme = Scheme::rk4_random_pde;
    cfg.noise.kind = NoiseModel::Kind::linear;
    cfg.noise.c1 = 1.0;
    cfg.noise.c2 = 0.5;
    CHECK_THROWS(cfg.validate());
    cfg.noise.c2 = 1.0;
    CHECK_NOTHROW(cfg.validate());
    CHECK(scheme_from_string(to_string(Scheme::euler_maruyama_regularized)) == Scheme::euler_maruyama_regularized);
    CHECK_THROWS(scheme_from_string("milstein"));
}

TEST_CASE("single steps") {
    Grid g(1, 32);
    const State z = State::zero(g);
    NoiseModel lin;
    lin.kind = NoiseModel::Kind::linear;
    lin.c1 = lin.c2 = 0.7;
    CHECK(state_max(step_em(z, 0.0, 0.01, {0.3}, lin)) == 0.0);
    CHECK(state_max(step_rk4_random(z, 0.0, 0.01, 0.0, 0.2, 0.7)) == 0.0);

    const State y = smooth_1d(g, 0.5);
    // zero noise: forward Euler on the drift
    CHECK(state_diff(step_em(y, 0.0, 0.01, {}, NoiseModel{}), advance(y, 0.01, drift(y))) == 0.0);
    // linear noise adds c y dW
    State expect = advance(y, 0.01, drift(y));
    expect = advance(expect, 0.7 * 0.05, as_tendency(y));
    CHECK(state_diff(step_em(y, 0.0, 0.01, {0.05}, lin), expect) < 1e-15);
    CHECK_THROWS(step_em(y, 0.0, 0.01, {}, lin));
    // c = 0: the random PDE step is deterministic RK4
    CHECK(state_diff(step_rk4_random(y, 0.0, 0.01, 0.0, 0.3, 0.0), plain_rk4(y, 0.01)) < 1e-15);
}

TEST_CASE("RK4 temporal order") {
    Grid g(1, 32);
    const State y0 = smooth_1d(g, 1.0);
    auto run = [&](int steps) {
        State y = y0;
        for (int k = 0; k < steps; ++k) y = step_rk4_random(y, 0.0, 1.0 / steps, 0.0, 0.0, 0.0);
        return y;
    };
    const State ref = run(640);
    std::vector<double> err;
    for (int steps : {10, 20, 40}) err.push_back(state_diff(run(steps), ref));
    for (std::size_t i = 0; i + 1 < err.size(); ++i) {
        const double ratio = err[i] / err[i + 1];
        MESSAGE("RK4 error ratio " << ratio);
        CHECK(ratio >= 12.0);
        CHECK(ratio <= 20.0);
    }
}

TEST_CASE("Euler-Maruyama strong order against the transformed reference") {
    Grid g(1, 32);
    const State y0 = smooth_1d(g, 0.4);
    const double c = 0.5, T = 0.5;
    NoiseModel lin;
    lin.kind = NoiseModel::Kind::linear;
    lin.c1 = lin.c2 = c;
    const int paths = 40, ref_level = 9;
    const double dt0 = T / 4;
    std::vector<double> err(4, 0.0), err_rk(3, 0.0), gap(4, 0.0);
    for (int p = 0; p < paths; ++p) {
        const WienerPath w = sample_path(500 + p, dt0, 4, 1);
        auto rk = [&](int level) {
            const int steps = 4 << level;
            const double h = dt0 / (1 << level);
            State yt = y0;
            for (int k = 0; k < steps; ++k) yt = step_rk4_random(yt, k * h, h, w.at(0, level, k), w.at(0, level, k + 1), c);
            return untransform_state(yt, mu(T, w.at(0, level, steps), c));
        };
        const State ref = rk(ref_level);
        for (int i = 0; i < 4; ++i) {
            const int level = 2 + i, steps = 4 << level;
            const double h = dt0 / (1 << level);
            State y = y0;
            for (int k = 0; k < steps; ++k) y = step_em(y, k * h, h, {w.at(0, level, k + 1) - w.at(0, level, k)}, lin);
            err[i] += sobolev_norm(State{{y.u[0] - ref.u[0]}, y.gamma - ref.gamma}, 2.0) / paths;
            const State r = rk(level);
            gap[i] += sobolev_norm(State{{y.u[0] - r.u[0]}, y.gamma - r.gamma}, 2.0) / paths;
        }
        for (int i = 0; i < 3; ++i) {
            const State a = rk(2 + i);
            err_rk[i] += sobolev_norm(State{{a.u[0] - ref.u[0]}, a.gamma - ref.gamma}, 2.0) / paths;
        }
    }
    for (int i = 0; i < 3; ++i) {
        const double ratio = err[i] / err[i + 1];
        MESSAGE("EM strong error " << err[i] << " ratio " << ratio);
        CHECK(ratio >= std::sqrt(2.0) * 0.7);
        CHECK(ratio <= std::sqrt(2.0) * 1.3);
    }
    // EM and the untransformed random PDE on the same path approach each other
    for (int i = 0; i < 3; ++i) CHECK(gap[i + 1] < gap[i]);
    // the untransformed random-PDE solution converges as well, and faster
    CHECK(err_rk[1] < err_rk[0]);
    CHECK(err_rk[2] < err_rk[1]);
    CHECK(err_rk[2] < err[3]);
}

TEST_CASE("simulate: trivial and smooth runs") {
    Grid g(1, 32);
    SimConfig cfg = base_config(g);
    const Trajectory z = simulate(cfg, State::zero(g), 1);
    CHECK(z.status == Status::survived);
    CHECK(z.times.size() == 51);
    for (std::size_t k = 0; k < z.times.size(); ++k) {
        CHECK(z.winf[k] == 0.0);
        CHECK(z.hs_u[k] == 0.0);
        CHECK(z.energy[k] == 0.0);
    }
    for (std::size_t k = 1; k < z.times.size(); ++k) CHECK(z.times[k] > z.times[k - 1]);
    CHECK(z.times.back() == doctest::Approx(0.5).epsilon(1e-14));

    cfg.record_every = 7;
    const Trajectory r = simulate(cfg, smooth_1d(g, 0.3), 1);
    CHECK(r.times.size() == 1 + 50 / 7 + 1);
    CHECK(r.times.back() == doctest::Approx(0.5).epsilon(1e-14));

    CHECK_THROWS(simulate(cfg, State::zero(Grid(1, 64)), 1));
}

TEST_CASE("H1 energy of the transformed variables is conserved by the random-PDE scheme") {
    Grid g(1, 64);
    SimConfig cfg = base_config(g);
    cfg.scheme = Scheme::rk4_random_pde;
    cfg.noise.kind = NoiseModel::Kind::linear;
    cfg.noise.c1 = cfg.noise.c2 = 0.5;
    cfg.dt = 1e-3;
    cfg.t_end = 0.5;
    const Trajectory tr = simulate(cfg, smooth_1d(g, 0.3), 99);
    double worst = 0.0;
    for (double e : tr.energy) worst = std::max(worst, std::abs(e - tr.energy[0]) / tr.energy[0]);
    MESSAGE("relative energy drift " << worst);
    CHECK(worst <= 1e-10);
    // the SPDE variables themselves are not conserved under noise
    CHECK(tr.hs_u.back() != doctest::Approx(tr.hs_u.front()));
}

TEST_CASE("determinism and scheme agreement") {
    Grid g(1, 32);
    SimConfig cfg = base_config(g);
    cfg.noise.kind = NoiseModel::Kind::linear;
    cfg.noise.c1 = cfg.noise.c2 = 0.5;
    const State y0 = smooth_1d(g, 0.3);
    const Trajectory a = simulate(cfg, y0, 1234), b = simulate(cfg, y0, 1234), c = simulate(cfg, y0, 1235);
    CHECK(a.times == b.times);
    CHECK(a.hs_u == b.hs_u);
    CHECK(a.winf == b.winf);
    CHECK(a.energy == b.energy);
    CHECK(state_diff(a.final_state, b.final_state) == 0.0);
    CHECK(a.hs_u != c.hs_u);
}

TEST_CASE("adaptive and fixed steps agree on a smooth steepening run") {
    Grid g(1, 64);
    SimConfig cfg = base_config(g);
    cfg.scheme = Scheme::rk4_random_pde;
    cfg.dt = 0.004;
    cfg.t_end = 0.8;
    const State y0{{sample(g, [](double x, double) { return 1.5 * std::sin(x); })},
                   sample(g, [](double x, double) { return 0.2 * std::cos(x); })};
    const Trajectory ad = simulate(cfg, y0, 5);
    // the adaptive run must actually have refined: find its smallest step
    double hmin = 1.0;
    for (std::size_t k = 1; k < ad.times.size(); ++k) hmin = std::min(hmin, ad.times[k] - ad.times[k - 1]);
    MESSAGE("smallest adaptive step " << hmin);
    REQUIRE(hmin < 0.5 * cfg.dt);
    SimConfig fixed = cfg;
    fixed.adaptive = false;
    fixed.dt = std::ldexp(cfg.dt, -int(std::lround(std::log2(cfg.dt / hmin))));
    const Trajectory fx = simulate(fixed, y0, 5);
    CHECK(ad.status == Status::survived);
    const double diff = state_diff(ad.final_state, fx.final_state);
    MESSAGE("adaptive vs fixed " << diff);
    CHECK(diff <= 1e-6);
}

TEST_CASE("stopping rules") {
    Grid g(1, 64);
    SimConfig cfg = base_config(g);
    cfg.scheme = Scheme::rk4_random_pde;
    cfg.t_end = 2.0;
    const State y0{{sample(g, [](double x, double) { return 1.5 * std::sin(x); })}, SpectralField(g)};
    cfg.blowup_winf = 2.0;
    cfg.blowup_hs = 6.0;
    const Trajectory tr = simulate(cfg, y0, 3);
    CHECK(tr.status == Status::broke);
    REQUIRE(tr.winf_crossing >= 0);
    REQUIRE(tr.hs_crossing >= 0);
    CHECK(tr.winf[std::size_t(tr.winf_crossing)] >= cfg.blowup_winf);
    CHECK(tr.winf[std::size_t(tr.winf_crossing) - 1] < cfg.blowup_winf);
    CHECK(tr.t_stop == tr.times[std::size_t(tr.winf_crossing)]);
    CHECK(tr.winf.back() >= cfg.blowup_winf);
    CHECK(tr.t_stop < cfg.t_end);

    // an underflow floor just below the first halving
    SimConfig under = cfg;
    under.blowup_winf = under.blowup_hs = 1e9;
    under.dt_min = 0.6 * cfg.dt;
    const Trajectory u = simulate(under, y0, 3);
    CHECK(u.status == Status::dt_underflow);
    CHECK(u.t_stop < cfg.t_end);

    // a wildly unstable explicit step overflows and is reported as breaking
    SimConfig wild = base_config(g);
    wild.dt = 0.5;
    wild.t_end = 200.0;
    wild.adaptive = false;
    wild.blowup_winf = wild.blowup_hs = std::numeric_limits<double>::infinity();
    const Trajectory w = simulate(wild, State{{sample(g, [](double x, double) { return 8 * std::sin(x); })}, SpectralField(g)}, 3);
    CHECK(w.status == Status::broke);
    CHECK_FALSE(std::isfinite(w.winf.back()));
}

TEST_CASE("observer sees every step") {
    Grid g(1, 32);
    SimConfig cfg = base_config(g);
    cfg.noise.kind = NoiseModel::Kind::linear;
    cfg.noise.c1 = cfg.noise.c2 = 0.8;
    cfg.record_every = 5;
    FlowPath fp;
    const Trajectory tr = simulate(cfg, smooth_1d(g, 0.3), 8, record_flow(fp));
    CHECK(fp.t.size() == 51);
    CHECK(fp.t.front() == 0.0);
    // y~ = mu y at every observed time
    const State back = untransform_state(fp.y_tilde.back(), mu(fp.t.back(), fp.W.back(), 0.8));
    CHECK(state_diff(back, tr.final_state) <= 1e-14 * state_max(back));
}

TEST_CASE("characteristic flow") {
    Grid g(1, 32);
    const std::vector<double> xs{0.0, 0.7, 2.0, 5.5};
    FlowPath still;
    for (int k = 0; k <= 10; ++k) {
        still.t.push_back(0.05 * k);
        still.W.push_back(0.0);
        still.y_tilde.push_back(State::zero(g));
    }
    const Characteristics a = characteristic_flow(still, 0.0, xs);
    for (std::size_t k = 0; k < a.t.size(); ++k)
        for (std::size_t p = 0; p < xs.size(); ++p) {
            CHECK(a.phi[k][p] == xs[p]);
            CHECK(a.phi_x[k][p] == 1.0);
        }

    FlowPath shift = still;
    SpectralField v0(g);
    v0.set_coeff(0.8, 0);
    for (auto& y : shift.y_tilde) y.u[0] = v0;
    const Characteristics b = characteristic_flow(shift, 0.0, xs);
    for (std::size_t k = 0; k < b.t.size(); ++k)
        for (std::size_t p = 0; p < xs.size(); ++p) {
            CHECK(b.phi[k][p] == doctest::Approx(xs[p] + 0.8 * b.t[k]).epsilon(1e-14));
            CHECK(b.phi_x[k][p] == doctest::Approx(1.0).epsilon(1e-14));
        }

    // velocity mu^{-1} u~ with W frozen at 0.5 and c = 1: mu^{-1}(t) = exp(0.5 - t/2),
    // linear between snapshots, so the displacement is exact only to O(h^2)
    FlowPath noisy = shift;
    for (auto& w : noisy.W) w = 0.5;
    const Characteristics cflow = characteristic_flow(noisy, 1.0, xs);
    const double exact = 0.8 * 2.0 * std::exp(0.5) * (1.0 - std::exp(-0.25));
    CHECK(cflow.phi.back()[0] == doctest::Approx(exact).epsilon(1e-4));

    FlowPath bad;
    bad.t = {0.0};
    bad.W = {0.0};
    bad.y_tilde = {State::zero(Grid(2, 16))};
    CHECK_THROWS(characteristic_flow(bad, 0.0, xs));
    CHECK_THROWS(characteristic_flow(FlowPath{}, 0.0, xs));
}
