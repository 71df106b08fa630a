#include "mch2/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "mch2/diagnostics.hpp"

namespace mch2 {

namespace {

const double pi = std::numbers::pi;

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int smallest_grid(int requested, int min_cutoff) {
    int n = 8;
    while (n < requested) n *= 2;
    while (Grid(2, n).cutoff() < min_cutoff) n *= 2;
    return n;
}

void check_family_grid(const ApproxFamilyParams& p, const Grid& g) {
    if (g.d() != p.d) throw std::invalid_argument("grid dimension differs from the family dimension");
    if (2 * p.n > g.cutoff())
        throw std::invalid_argument("family frequency n = " + std::to_string(p.n) + " is under-resolved (needs 2n <= K = " +
                                    std::to_string(g.cutoff()) + ")");
}

// adds amp * cos(n x_axis - kappa t) (or sin) to f
void add_wave(SpectralField& f, double amp, int n, int axis, double phase, bool sine) {
    const cplx e = std::polar(0.5 * amp, -phase);
    const cplx c = sine ? cplx(0.0, -1.0) * e : e;
    if (axis == 0)
        f.set_coeff(f.coeff(n, 0) + c, n, 0);
    else
        f.set_coeff(f.coeff(0, n) + c, 0, n);
}

// eta_i depends on the complementary coordinate
int eta_axis(int i) { return 1 - i; }

void fill_family(State& y, const ApproxFamilyParams& p, double t) {
    const double b = std::pow(double(p.n), -p.s), phase = p.kappa * t;
    for (int i = 0; i < 2; ++i) {
        y.u[i].set_coeff(cplx(double(p.kappa) / p.n), 0, 0);
        add_wave(y.u[i], b, p.n, eta_axis(i), phase, false);
        add_wave(y.gamma, b, p.n, eta_axis(i), phase, false);
    }
}

double tendency_norm(const Tendency& k, double s) {
    const double a = sobolev_norm(k.du, s), b = sobolev_norm(k.dgamma, s);
    return std::sqrt(a * a + b * b);
}

template <class F>
SpectralField sample2(const Grid& g, F&& f) {
    const int n = g.n();
    RealVec v(g.physical_size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v[std::size_t(i) * n + j] = f(grid_point(g, i), grid_point(g, j));
    return to_spectral(g, v);
}

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
    return mx;
}

double max_coeff(const SpectralField& a) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i]));
    return mx;
}

SpectralField prod(const SpectralField& a, const SpectralField& b) { return dealiased_product(a, b); }

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

void ApproxFamilyParams::validate() const {
    if (kappa != 1 && kappa != -1) throw std::invalid_argument("kappa must be +1 or -1");
    if (n < 2) throw std::invalid_argument("family frequency n must be >= 2");
    if (d != 2)
        throw std::invalid_argument("the oscillating family is implemented for d = 2 only (the odd-dimension family is zero at d = 1)");
    if (!(s > 1.0 + d / 2.0)) throw std::invalid_argument("s must exceed 1 + d/2 (well-posedness index)");
    if (!(sigma > d / 2.0 && sigma < std::min(s - 1.0, 1.0 + d / 2.0)))
        throw std::invalid_argument("sigma must lie in (d/2, min(s - 1, 1 + d/2))");
    if (!(T > 0.0)) throw std::invalid_argument("horizon T must be positive");
}

int family_grid_size(int n, int requested) { return smallest_grid(requested, 2 * n); }

State approx_solution(const ApproxFamilyParams& p, double t, const Grid& g) {
    p.validate();
    check_family_grid(p, g);
    State y = State::zero(g);
    fill_family(y, p, t);
    return y;
}

Tendency approx_time_derivative(const ApproxFamilyParams& p, double t, const Grid& g) {
    p.validate();
    check_family_grid(p, g);
    Tendency k = Tendency::zero(g);
    const double a = p.kappa * std::pow(double(p.n), -p.s), phase = p.kappa * t;
    for (int i = 0; i < 2; ++i) {
        add_wave(k.du[i], a, p.n, eta_axis(i), phase, true);
        add_wave(k.dgamma, a, p.n, eta_axis(i), phase, true);
    }
    return k;
}

Tendency family_residual(const ApproxFamilyParams& p, double t, const Grid& g) {
    Tendency r = approx_time_derivative(p, t, g);
    r.axpy(-1.0, drift(approx_solution(p, t, g)));
    return r;
}

ResidualSeries residual_error(const ApproxFamilyParams& p, const std::vector<double>& t_grid, int requested_n, int panels) {
    p.validate();
    if (t_grid.empty() || t_grid.front() != 0.0) throw std::invalid_argument("time grid must start at 0");
    if (panels < 1) throw std::invalid_argument("panels must be >= 1");
    for (std::size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("time grid must increase");

    ResidualSeries out;
    out.grid_n = family_grid_size(p.n, requested_n);
    const Grid g(p.d, out.grid_n);
    Tendency E = Tendency::zero(g);
    Tendency left = family_residual(p, 0.0, g);
    out.t.push_back(0.0);
    out.norm.push_back(0.0);
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double a = t_grid[k - 1], h = (t_grid[k] - a) / panels;
        for (int q = 0; q < panels; ++q) {
            const double t0 = a + q * h;
            const Tendency mid = family_residual(p, t0 + 0.5 * h, g);
            Tendency right = family_residual(p, q + 1 == panels ? t_grid[k] : t0 + h, g);
            E.axpy(h / 6.0, left);
            E.axpy(4.0 * h / 6.0, mid);
            E.axpy(h / 6.0, right);
            left = std::move(right);
        }
        out.t.push_back(t_grid[k]);
        out.norm.push_back(tendency_norm(E, p.sigma));
    }
    return out;
}

DecayFit decay_fit(const std::vector<double>& ns, const std::vector<double>& errors) {
    if (ns.size() != errors.size()) throw std::invalid_argument("n and error lists differ in length");
    if (ns.size() < 4) throw std::invalid_argument("decay fit needs at least four values of n");
    const double ratio = ns[1] / ns[0];
    if (!(ns[0] > 0.0) || !(ratio > 1.0)) throw std::invalid_argument("n values must be positive and increasing");
    for (std::size_t k = 1; k < ns.size(); ++k)
        if (std::abs(ns[k] / ns[k - 1] - ratio) > 1e-9 * ratio) throw std::invalid_argument("n values must be geometric");
    for (double e : errors)
        if (!(e > 0.0) || !std::isfinite(e)) throw std::invalid_argument("degenerate decay fit: errors must be positive and finite");

    const std::size_t m = ns.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double x = std::log(ns[k]), y = std::log(errors[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    DecayFit f;
    f.theta = -slope;
    f.intercept = (sy - slope * sx) / m;
    double rr = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double e = std::log(errors[k]) - (f.intercept + slope * std::log(ns[k]));
        rr += e * e;
    }
    f.residual = std::sqrt(rr / m);
    return f;
}

double expected_decay(double s, double sigma, int d) {
    ApproxFamilyParams p;
    p.s = s;
    p.sigma = sigma;
    p.d = d;
    p.validate();
    return s <= 3.0 ? 2.0 * s - sigma - 1.0 : s - sigma + 2.0;
}

DecayStudy decay_study(double s, double sigma, int d, const std::vector<int>& ns, double T, int requested_n) {
    DecayStudy st;
    st.expected = expected_decay(s, sigma, d);
    std::vector<double> nd;
    for (int n : ns) {
        ApproxFamilyParams p;
        p.n = n;
        p.s = s;
        p.sigma = sigma;
        p.d = d;
        p.T = T;
        const ResidualSeries r = residual_error(p, {0.0, T}, requested_n);
        st.ns.push_back(n);
        st.grid_ns.push_back(r.grid_n);
        st.errors.push_back(r.norm.back());
        nd.push_back(n);
    }
    st.fit = decay_fit(nd, st.errors);
    return st;
}

ClosedFormCheck closed_form_check(int n, double s, int kappa, double t, int grid_n) {
    ApproxFamilyParams p;
    p.n = n;
    p.s = s;
    p.kappa = kappa;
    p.sigma = 0.5 * (1.0 + std::min(s - 1.0, 2.0));
    p.validate();
    if (!is_power_of_two(grid_n)) throw std::invalid_argument("grid size must be a power of two");
    const Grid g(2, grid_n);
    const State y = approx_solution(p, t, g);
    const Velocity& u = y.u;

    const double a = std::pow(double(n), 3.0 - 2.0 * s), b = std::pow(double(n), 1.0 - 2.0 * s),
                 c = kappa * std::pow(double(n), -s);
    // eta_i(x0, x1): eta_0 uses x1, eta_1 uses x0
    auto eta = [&](int i, double x0, double x1) { return n * (i == 0 ? x1 : x0) - kappa * t; };
    auto field = [&](auto f) { return sample2(g, f); };
    auto S = [&](int i, double x0, double x1) { return std::sin(eta(i, x0, x1)); };
    auto C = [&](int i, double x0, double x1) { return std::cos(eta(i, x0, x1)); };
    auto L = [](const SpectralField& f) { return bessel_potential(f, -2.0); };

    // Jacobian G_ij = d_j u_i and the column divergence (div M)_i = sum_j d_j M_ji
    SpectralField G[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) G[i][j] = partial(u[i], j);
    auto div_cols = [&](const SpectralField M[2][2], int i) { return partial(M[0][i], 0) + partial(M[1][i], 1); };
    const SpectralField divu = G[0][0] + G[1][1];

    ClosedFormCheck out;
    auto add = [&](const std::string& name, const SpectralField& got, const SpectralField& want) {
        out.displays.push_back({name, max_coeff_diff(got, want), max_coeff(want)});
    };

    const Tendency dt = approx_time_derivative(p, t, g);
    SpectralField gsq(g);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) gsq += prod(G[i][j], G[i][j]);
    SpectralField M6[2][2], GtG[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            SpectralField gg(g), ggt(g), gtg(g);
            for (int k = 0; k < 2; ++k) {
                gg += prod(G[i][k], G[k][j]);
                ggt += prod(G[i][k], G[j][k]);
                gtg += prod(G[k][i], G[k][j]);
            }
            M6[i][j] = gg + ggt - gtg - prod(divu, G[i][j]);
            GtG[i][j] = gtg;
        }
    SpectralField usq(g);
    for (int k = 0; k < 2; ++k) usq += prod(u[k], u[k]);

    const Velocity L1 = l1(u);
    Velocity L2(2, SpectralField(g));
    for (int k = 0; k < 2; ++k) {
        const Velocity part = l2(u[k]);
        for (int i = 0; i < 2; ++i) L2[i] += part[i];
    }
    const Tendency r = family_residual(p, t, g);
    SpectralField gamma_sum(g);

    for (int i = 0; i < 2; ++i) {
        const int j = 1 - i;
        const std::string tag = "[" + std::to_string(i + 1) + "]";
        const SpectralField SiCj = field([&](double x0, double x1) { return S(i, x0, x1) * C(j, x0, x1); });
        const SpectralField SjCj = field([&](double x0, double x1) { return S(j, x0, x1) * C(j, x0, x1); });
        const SpectralField Si = field([&](double x0, double x1) { return S(i, x0, x1); });
        const SpectralField Sj = field([&](double x0, double x1) { return S(j, x0, x1); });

        add("time derivative" + tag, dt.du[i], c * Si);
        const SpectralField conv_cf = -1.0 * (c * Si + b * SiCj);
        add("convection" + tag, convection(u, u[i]), conv_cf);
        const SpectralField d35 = L(a * SjCj), d36 = L(a * (-2.0 * SjCj + SiCj)), d37 = -1.0 * L(c * Sj + b * SjCj);
        add("gradient-square term" + tag, L(partial(0.5 * gsq, i)), d35);
        add("matrix term" + tag, L(div_cols(M6, i)), d36);
        add("transport term" + tag, L(prod(divu, u[i]) + prod(u[0], G[0][i]) + prod(u[1], G[1][i])), d37);
        add("L1 total" + tag, L1[i], d35 + d36 + d37);
        const SpectralField d38 = L(2.0 * (a - b) * SjCj - 2.0 * c * Sj), d39 = L(2.0 * a * SjCj);
        add("density gradient term" + tag, L(partial(usq + gsq, i)), d38);
        add("density matrix term" + tag, L(div_cols(GtG, i)), d39);
        add("L2 total" + tag, L2[i], 0.5 * d38 - d39);
        const SpectralField d311 = L(a * SiCj);
        add("L3 term" + tag, l3(u, u[i]), d311);

        const SpectralField Scorr = a * SiCj - 2.0 * (a + b) * SjCj - 2.0 * c * Sj;
        const SpectralField ru = dt.du[i] + convection(u, u[i]) + L1[i] + L2[i];
        add("assembled u residual" + tag, ru, -b * SiCj + L(Scorr));
        const SpectralField rg_cf = -b * SiCj + L(a * SiCj);
        add("assembled density residual" + tag, dt.du[i] + convection(u, u[i]) + l3(u, u[i]), rg_cf);
        gamma_sum += rg_cf;

        const SpectralField Slit = a * SiCj + 3.0 * (a - b) * SjCj - 3.0 * c * Sj;
        out.literal_assembly = std::max(out.literal_assembly, max_coeff_diff(ru, -b * SiCj + L(Slit)));
    }
    add("scalar density residual", r.dgamma, gamma_sum);
    return out;
}

FamilyGap family_gap(int n, double s, int d, double T, int samples) {
    ApproxFamilyParams p;
    p.n = n;
    p.s = s;
    p.d = d;
    p.T = T;
    p.sigma = 0.5 * (d / 2.0 + std::min(s - 1.0, 1.0 + d / 2.0));
    p.validate();
    if (samples < 1) throw std::invalid_argument("samples must be >= 1");
    // the difference is linear in the family, so K >= n suffices
    const Grid g(d, smallest_grid(8, n));
    auto gap_at = [&](double t) {
        State plus = State::zero(g), minus = State::zero(g);
        ApproxFamilyParams q = p;
        fill_family(plus, q, t);
        q.kappa = -1;
        fill_family(minus, q, t);
        for (int i = 0; i < d; ++i) plus.u[i] -= minus.u[i];
        plus.gamma -= minus.gamma;
        return sobolev_norm(plus, s);
    };
    std::vector<double> ts;
    for (int k = 0; k <= samples; ++k) ts.push_back(T * k / samples);
    ts.push_back(std::min(T, pi / 2));
    FamilyGap out;
    out.initial = gap_at(0.0);
    for (double t : ts) {
        const double v = gap_at(t);
        if (v > out.sup) {
            out.sup = v;
            out.t_sup = t;
        }
    }
    return out;
}

SimulatedGap simulated_gap(int n, double s, int d, double T, std::uint64_t seed, const GapRun& run) {
    ApproxFamilyParams p;
    p.n = n;
    p.s = s;
    p.d = d;
    p.T = T;
    p.sigma = 0.5 * (d / 2.0 + std::min(s - 1.0, 1.0 + d / 2.0));
    p.validate();
    if (!(run.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    const double steps_d = T / run.dt;
    const long steps = std::lround(steps_d);
    if (std::abs(steps_d - steps) > 1e-9 * std::max(1.0, steps_d)) throw std::invalid_argument("T must be a multiple of dt");

    const Grid g(d, family_grid_size(n, run.grid_n));
    SimulatedGap out;
    out.family_sup = family_gap(n, s, d, T).sup;

    // both runs share the Brownian path; with linear noise they are advanced in the mu-transformed variables
    const WienerPath path(seed, run.dt, int(steps), run.c != 0.0 ? 1 : 0);
    auto W = [&](long k) { return run.c != 0.0 ? path.cumulative(0, k) : 0.0; };
    ApproxFamilyParams q = p;
    q.kappa = 1;
    State plus = approx_solution(q, 0.0, g);
    q.kappa = -1;
    State minus = approx_solution(q, 0.0, g);
    auto distance = [&](const State& a, const State& b) {
        State diff = a;
        for (int i = 0; i < d; ++i) diff.u[i] -= b.u[i];
        diff.gamma -= b.gamma;
        return sobolev_norm(diff, s);
    };
    const double limit = SimConfig{}.blowup_winf;
    bool alive_plus = true, alive_minus = true;
    out.t.push_back(0.0);
    out.gap.push_back(distance(plus, minus));
    out.initial = out.gap.back();
    out.sup = out.initial;
    for (long k = 0; k < steps; ++k) {
        const double t = k * run.dt;
        const double m1 = mu(t + run.dt, W(k + 1), run.c);
        auto advance_one = [&](State& yt, bool& alive, Status& st) {
            if (!alive) return;
            yt = step_rk4_random(yt, t, run.dt, W(k), W(k + 1), run.c);
            const double w = winf_norm(untransform_state(yt, m1));
            if (!std::isfinite(w) || w >= limit) {
                alive = false;
                st = Status::broke;
            }
        };
        advance_one(plus, alive_plus, out.status_plus);
        advance_one(minus, alive_minus, out.status_minus);
        if (!alive_plus || !alive_minus) break;
        out.t.push_back(t + run.dt);
        out.gap.push_back(distance(untransform_state(plus, m1), untransform_state(minus, m1)));
        out.sup = std::max(out.sup, out.gap.back());
    }
    return out;
}

State steep_slope_data(const Grid& g, const SteepData& p) {
    if (g.d() != 1) throw std::invalid_argument("steep-slope data are one-dimensional");
    if (!(p.width > 0.0) || !(p.amplitude > 0.0)) throw std::invalid_argument("bump amplitude and width must be positive");
    const int n = g.n();
    RealVec bump(n);
    double mean = 0.0;
    for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int q = -3; q <= 3; ++q) {
            const double z = grid_point(g, k) - pi + 2 * pi * q;
            v += std::exp(-z * z / (2 * p.width * p.width));
        }
        bump[k] = v;
        mean += v / n;
    }
    for (auto& v : bump) v = -p.amplitude * (v - mean);
    const SpectralField du = project(g, bump);
    State y = State::zero(g);
    for (int m = 1; m <= g.cutoff(); ++m) y.u[0].set_coeff(du.coeff(m) / cplx(0.0, m), m);
    y.gamma.set_coeff(0.5 * p.gamma_amplitude, 1);
    return y;
}

std::uint64_t member_seed(std::uint64_t base, std::uint64_t index) { return splitmix64(splitmix64(base) ^ index); }

std::vector<Trajectory> run_members(const SimConfig& cfg, const State& y0, int members, std::uint64_t base_seed, int jobs) {
    if (members < 0) throw std::invalid_argument("member count must be nonnegative");
    cfg.validate();
    std::vector<Trajectory> out(static_cast<std::size_t>(members));
    std::vector<std::exception_ptr> errors(out.size());
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < members; k = next++) {
            try {
                out[k] = simulate(cfg, y0, member_seed(base_seed, std::uint64_t(k)));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const int threads = std::max(1, std::min(jobs, members));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

LognormEnvelope lognorm_envelope(const std::vector<Trajectory>& runs, double t_end, int nodes) {
    if (nodes < 1) throw std::invalid_argument("envelope needs at least one node");
    const double e = std::numbers::e;
    LognormEnvelope env;
    for (int k = 0; k <= nodes; ++k) {
        const double tk = t_end * k / nodes;
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& tr : runs) {
            if (tr.times.empty() || tk > tr.t_stop + 1e-12) continue;
            auto ell = [&](std::size_t r) {
                return std::log(e + tr.hs_u[r] * tr.hs_u[r]) + std::log(e + tr.hs_gamma[r] * tr.hs_gamma[r]);
            };
            const double l0 = ell(0);
            double run_max = -std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < tr.times.size() && tr.times[r] <= tk + 1e-12; ++r) {
                const double v = ell(r) - l0;
                if (std::isfinite(v)) run_max = std::max(run_max, v);
            }
            best = std::max(best, run_max);
        }
        if (std::isfinite(best)) {
            env.t.push_back(tk);
            env.envelope.push_back(best);
        }
    }
    const std::size_t m = env.t.size();
    if (m >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < m; ++k) {
            sx += env.t[k];
            sy += env.envelope[k];
            sxx += env.t[k] * env.t[k];
            sxy += env.t[k] * env.envelope[k];
        }
        env.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        env.intercept = (sy - env.slope * sx) / m;
    } else if (m == 1) {
        env.intercept = env.envelope[0];
    }
    double rr = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double diff = env.envelope[k] - (env.intercept + env.slope * env.t[k]);
        rr += diff * diff;
        env.offset = std::max(env.offset, diff);
    }
    env.residual = m ? std::sqrt(rr / m) : 0.0;
    return env;
}

EnsembleReport summarize(const std::vector<Trajectory>& runs, double t_end) {
    EnsembleReport rep;
    rep.members = int(runs.size());
    for (const auto& tr : runs) {
        rep.seeds.push_back(tr.seed);
        rep.status.push_back(tr.status);
        rep.stop_times.push_back(tr.t_stop);
        switch (tr.status) {
            case Status::survived: ++rep.survived; break;
            case Status::broke:
                ++rep.broke;
                rep.breaking_times.push_back(tr.t_stop);
                rep.clock_gaps.push_back(tr.winf_crossing >= 0 && tr.hs_crossing >= 0 ? std::abs(tr.winf_crossing - tr.hs_crossing)
                                                                                      : -1);
                break;
            case Status::dt_underflow: ++rep.underflow; break;
        }
    }
    if (rep.members > 0) rep.survival_fraction = double(rep.survived) / rep.members;
    rep.lognorm = lognorm_envelope(runs, t_end);
    return rep;
}

int global_regime(const NoiseModel& noise) {
    if (noise.kind != NoiseModel::Kind::polynomial) return 0;
    const double d1 = noise.delta1, d2 = noise.delta2, c1 = std::abs(noise.c1), c2 = std::abs(noise.c2);
    const double c2_edge = std::exp(-0.25) / std::sqrt(2.0);
    const bool u_open = d1 > 0.5 && c1 > 0.0, u_edge = d1 == 0.5 && c1 > std::sqrt(2.0);
    const bool g_open = d2 > 1.0 && c2 > 0.0, g_edge = d2 == 1.0 && c2 > c2_edge;
    if (u_open && g_open) return 1;
    if (u_open && g_edge) return 2;
    if (u_edge && g_open) return 3;
    if (u_edge && g_edge) return 4;
    return 0;
}

EnsembleReport global_ensemble(const SimConfig& cfg, const State& y0, int members, std::uint64_t base_seed, int jobs) {
    const NoiseModel& nz = cfg.noise;
    const bool linear = nz.kind == NoiseModel::Kind::linear && nz.c1 == nz.c2 && nz.c1 != 0.0;
    if (global_regime(nz) == 0 && !linear)
        throw std::invalid_argument(
            "global ensembles need polynomial noise in one of the four global regimes or linear noise with c1 == c2 != 0");
    return summarize(run_members(cfg, y0, members, base_seed, jobs), cfg.t_end);
}

ScaleSweep scale_sweep(const SimConfig& cfg, const State& y0, const std::vector<double>& scales, double winf_factor,
                       double hs_factor, int members, std::uint64_t base_seed, int jobs) {
    if (!(winf_factor > 1.0) || !(hs_factor > 1.0)) throw std::invalid_argument("threshold factors must exceed 1");
    ScaleSweep sw;
    for (double a : scales) {
        if (!(a > 0.0)) throw std::invalid_argument("data scales must be positive");
        State y = y0;
        for (auto& ui : y.u) ui *= a;
        y.gamma *= a;
        SimConfig c = cfg;
        c.blowup_winf = winf_factor * winf_norm(y);
        c.blowup_hs = hs_factor * sobolev_norm(y, cfg.s);
        sw.scales.push_back(a);
        sw.reports.push_back(global_ensemble(c, y, members, base_seed, jobs));
    }
    return sw;
}

std::optional<double> calibrate_hs_threshold(const SimConfig& cfg, const State& y0) {
    SimConfig pilot = cfg;
    pilot.noise = NoiseModel{};
    pilot.blowup_hs = std::numeric_limits<double>::infinity();
    if (pilot.scheme == Scheme::euler_maruyama_regularized) pilot.scheme = Scheme::euler_maruyama;
    const Trajectory tr = simulate(pilot, y0, 0);
    if (tr.winf_crossing < 0) return std::nullopt;
    const std::size_t r = std::size_t(tr.winf_crossing);
    const double h = std::hypot(tr.hs_u[r], tr.hs_gamma[r]);
    return std::isfinite(h) ? std::optional<double>(h) : std::nullopt;
}

EnsembleReport breaking_ensemble(const SimConfig& cfg, const State& y0, double lambda, int members, std::uint64_t base_seed,
                                 int jobs) {
    if (cfg.grid.d() != 1) throw std::invalid_argument("breaking ensembles are one-dimensional");
    const NoiseModel& nz = cfg.noise;
    if (nz.kind != NoiseModel::Kind::linear || nz.c1 != nz.c2 || nz.c1 == 0.0)
        throw std::invalid_argument("breaking ensembles need linear noise with c1 == c2 != 0");
    const BreakingAssessment b = breaking_condition(y0.u[0], y0.gamma, nz.c1, lambda);
    if (!b.satisfied)
        throw std::invalid_argument("initial data violate the slope condition: min u0' = " + std::to_string(b.min_slope0) +
                                    " is not below " + std::to_string(b.threshold));

    const std::vector<Trajectory> runs = run_members(cfg, y0, members, base_seed, jobs);
    EnsembleReport rep = summarize(runs, cfg.t_end);
    rep.riccati_window = b.predicted_window;
    const double bar = -std::sqrt(b.energy0);
    for (const auto& tr : runs) {
        if (tr.status != Status::broke) continue;
        long first = long(tr.times.size()) - 1;
        if (tr.winf_crossing >= 0) first = std::min(first, tr.winf_crossing);
        if (tr.hs_crossing >= 0) first = std::min(first, tr.hs_crossing);
        bool ok = false;
        for (long r = 0; r <= first && !ok; ++r) ok = tr.min_slope[std::size_t(r)] <= bar;
        rep.slope_ordering = rep.slope_ordering && ok;
    }
    return rep;
}

}  // namespace mch2
