#include "mch2/verification.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mch2/operators.hpp"
#include "mch2/spectral.hpp"

namespace mch2 {

int SuiteResult::passed() const {
    return int(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return c.pass; }));
}

namespace {

const double pi = std::numbers::pi;

Check make(std::string name, double value, double tol, std::string detail = "") {
    return Check{std::move(name), value, tol, std::isfinite(value) && value <= tol, std::move(detail)};
}

// normal coefficients on |m_i| <= kmax, damped by exp(-decay |m|^2)
SpectralField random_field(const Grid& g, std::mt19937_64& rng, int kmax, double decay = 0.0) {
    std::normal_distribution<double> nd;
    RealVec v(g.physical_size());
    for (auto& x : v) x = nd(rng);
    SpectralField f = to_spectral(g, v);
    for_each_mode(g, [&](std::size_t i, const Mode& m) {
        if (std::abs(m.m[0]) > kmax || std::abs(m.m[1]) > kmax)
            f[i] = 0.0;
        else
            f[i] *= std::exp(-decay * double(m.m2)) * std::sqrt(double(g.physical_size()));
    });
    return f;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
    return mx;
}

double max_abs(const SpectralField& a) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i]));
    return mx;
}

double tendency_diff(const Tendency& a, const Tendency& b) {
    double mx = max_diff(a.dgamma, b.dgamma);
    for (std::size_t i = 0; i < a.du.size(); ++i) mx = std::max(mx, max_diff(a.du[i], b.du[i]));
    return mx;
}

double tendency_max(const Tendency& a) {
    double mx = max_abs(a.dgamma);
    for (const auto& f : a.du) mx = std::max(mx, max_abs(f));
    return mx;
}

std::string str(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

// coefficients |a_m| = (1 + |m|^2)^{-(s + d/2 + 0.1)/2} with random phases: in H^s, barely
SpectralField sobolev_profile(const Grid& g, double s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ph(0.0, 2.0 * pi);
    SpectralField f(g);
    const double p = -(s + g.d() / 2.0 + 0.1) / 2.0;
    for_each_mode(g, [&](std::size_t i, const Mode& m) {
        if (!m.retained) return;
        const double amp = std::pow(1.0 + double(m.m2), p);
        f[i] = m.weight == 1.0 ? cplx(amp, 0.0) : std::polar(amp, ph(rng));
    });
    return f;
}

}  // namespace

SuiteResult operator_suite(std::uint64_t seed) {
    SuiteResult r;
    std::mt19937_64 rng(seed);

    double worst = 0.0;
    for (int d : {1, 2}) {
        Grid g(d, d == 1 ? 512 : 128);
        for (int trial = 0; trial < 10; ++trial) {
            const SpectralField f = random_field(g, rng, g.cutoff());
            const SpectralField back = bessel_potential(bessel_potential(f, 2.0), -2.0);
            worst = std::max(worst, max_diff(back, f) / max_abs(f));
        }
    }
    r.checks.push_back(make("inverse Bessel potential", worst, 1e-12, "max relative coefficient error, d = 1, 2"));

    {
        using boost::math::quadrature::gauss_kronrod;
        Grid g(1, 512);
        SpectralField f = random_field(g, rng, 6);
        SpectralField c9(g);
        c9.set_coeff(0.5, 9);
        f += c9;
        const SpectralField gf = greens_convolve(f);
        double err = 0.0, scale = 0.0;
        for (int k = 0; k < 512; k += 37) {
            const double x = grid_point(g, k);
            // kernel argument stays in [0, 2pi] where G is smooth
            auto integrand = [&](double y) { return greens_kernel(x - y) * evaluate(f, y); };
            const double q = gauss_kronrod<double, 31>::integrate(integrand, x - 2.0 * pi, x, 12, 1e-14);
            const double m = evaluate(gf, x);
            err = std::max(err, std::abs(q - m));
            scale = std::max(scale, std::abs(m));
        }
        r.checks.push_back(make("Green's convolution vs multiplier", err / scale, 1e-10, "N = 512, 14 points, adaptive Gauss-Kronrod"));
    }

    {
        Grid g(1, 128);
        double rel = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            State y;
            y.u.push_back(random_field(g, rng, 1 + trial % g.cutoff(), 0.001));
            y.gamma = random_field(g, rng, 1 + trial % g.cutoff(), 0.001);
            const Tendency a = drift(y), b = rhs_1d(y.u[0], y.gamma);
            rel = std::max(rel, tendency_diff(a, b) / std::max(1e-300, tendency_max(b)));
        }
        r.checks.push_back(make("drift vs 1-D Green's form", rel, 1e-10, "100 random band-limited states, N = 128"));
    }
    return r;
}

SuiteResult mollifier_suite(std::uint64_t seed) {
    SuiteResult r;
    std::mt19937_64 rng(seed);

    // ||f - J_eps f||_{H^1} / eps^{s-1} stays bounded for f in H^2 as eps runs over 2^-3 .. 2^-8
    const double s = 2.0, rr = 1.0;
    for (int d : {1, 2}) {
        Grid g(d, d == 1 ? 4096 : 1024);
        const SpectralField f = sobolev_profile(g, s, rng);
        std::vector<double> ratios;
        for (int k = 3; k <= (d == 1 ? 8 : 7); ++k) {
            const double eps = std::ldexp(1.0, -k);
            ratios.push_back(sobolev_norm(f - mollify(f, eps), rr) / std::pow(eps, s - rr));
        }
        const double mx = *std::max_element(ratios.begin(), ratios.end());
        // pass iff max ratio <= 2 x first and last <= first
        const double measure = std::max(mx / (2.0 * ratios.front()), ratios.back() / ratios.front());
        r.checks.push_back(make("approximation rate d = " + std::to_string(d), measure, 1.0,
                                "ratios " + str(ratios.front()) + " .. " + str(ratios.back()) + ", max " + str(mx)));
    }

    double bound = 0.0, adjoint = 0.0;
    for (int d : {1, 2}) {
        Grid g(d, 64);
        for (int trial = 0; trial < 20; ++trial) {
            const SpectralField f = random_field(g, rng, g.cutoff()), h = random_field(g, rng, g.cutoff());
            for (double eps : {0.5, 0.25, 0.1, 0.05}) {
                const double lo = 1.0, hi = 2.5;
                // the symbol vanishes beyond |m|^2 = 4d / eps^2
                const double C = std::pow(1.0 + 4.0 * d, (hi - lo) / 2.0);
                bound = std::max(bound, sobolev_norm(mollify(f, eps), hi) / (C * std::pow(eps, lo - hi) * sobolev_norm(f, lo)));
                const double a = inner_product(mollify(f, eps), h), b = inner_product(f, mollify(h, eps));
                adjoint = std::max(adjoint, std::abs(a - b) / (1.0 + std::abs(a)));
            }
        }
    }
    r.checks.push_back(make("smoothing bound", bound, 1.0 + 1e-12, "max ||J f||_{H^2.5} / (C eps^{-1.5} ||f||_{H^1})"));
    r.checks.push_back(make("self-adjointness", adjoint, 1e-10, "max |(Jf,h) - (f,Jh)| / (1 + |(Jf,h)|)"));
    return r;
}

}  // namespace mch2
