#include "mch2/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace mch2 {

double h1_integral(const State& y) {
    const double n = sobolev_norm(y, 1.0);
    return std::pow(2.0 * std::numbers::pi, y.d()) * n * n;
}

double h1_energy(const State& y) {
    if (y.d() != 1) throw std::invalid_argument("h1_energy is defined for d = 1");
    return h1_integral(y);
}

double min_slope(const SpectralField& u) {
    const Grid& g = u.grid();
    if (g.d() != 1) throw std::invalid_argument("min_slope is defined for d = 1");
    const Grid fine(1, 4 * g.n());
    SpectralField ux(fine);
    for (int m = 1; m < g.n() / 2; ++m) ux[std::size_t(m)] = cplx(0.0, m) * u[std::size_t(m)];
    const RealVec v = to_physical(ux);
    return *std::min_element(v.begin(), v.end());
}

double breaking_threshold(double E0, double c, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0, 1)");
    if (!(E0 >= 0.0)) throw std::invalid_argument("energy must be nonnegative");
    const double c2 = c * c;
    return -c2 / (2.0 * lambda) - std::sqrt(c2 * c2 / (4.0 * lambda * lambda) + E0);
}

BreakingAssessment breaking_condition(const SpectralField& u0, const SpectralField& gamma0, double c, double lambda) {
    if (u0.grid().d() != 1 || gamma0.grid() != u0.grid()) throw std::invalid_argument("breaking condition needs 1-D data on one grid");
    BreakingAssessment b;
    b.energy0 = h1_integral(State{{u0}, gamma0});
    b.threshold = breaking_threshold(b.energy0, c, lambda);
    b.min_slope0 = min_slope(u0);
    b.satisfied = b.min_slope0 < b.threshold;
    const double c2 = c * c, disc = std::sqrt(c2 * c2 + 4.0 * lambda * lambda * b.energy0);
    b.sigma1 = (-c2 + disc) / (2.0 * lambda);
    b.sigma2 = (-c2 - disc) / (2.0 * lambda);
    b.predicted_window = riccati_window(b.min_slope0, b.energy0);
    return b;
}

std::optional<double> riccati_window(double H0, double E0) {
    if (!(E0 >= 0.0)) throw std::invalid_argument("energy must be nonnegative");
    if (!(H0 < -std::sqrt(E0))) return std::nullopt;
    return -(2.0 / H0) / (1.0 - E0 / (H0 * H0));
}

TransportCheck transport_residual(const FlowPath& path, double c, const std::vector<double>& x_samples) {
    const Characteristics ch = characteristic_flow(path, c, x_samples);
    const SpectralField rho0 = bessel_potential(path.y_tilde.front().gamma, 2.0);
    std::vector<double> r0(x_samples.size());
    double scale = 0.0;
    for (std::size_t p = 0; p < x_samples.size(); ++p) {
        r0[p] = evaluate(rho0, x_samples[p]);
        scale = std::max(scale, std::abs(r0[p]));
    }
    TransportCheck out;
    out.min_phi_x = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ch.t.size(); ++k) {
        const SpectralField rho = bessel_potential(path.y_tilde[k].gamma, 2.0);
        for (std::size_t p = 0; p < x_samples.size(); ++p) {
            const double lhs = evaluate(rho, ch.phi[k][p]) * ch.phi_x[k][p];
            out.residual = std::max(out.residual, std::abs(lhs - r0[p]));
            out.min_phi_x = std::min(out.min_phi_x, ch.phi_x[k][p]);
        }
    }
    out.relative = scale > 0.0 ? out.residual / scale : out.residual;
    return out;
}

double log_norm_functional(const State& y, double s) {
    const double a = sobolev_norm(y.u, s), b = sobolev_norm(y.gamma, s);
    return std::log(std::numbers::e + a * a) + std::log(std::numbers::e + b * b);
}

}  // namespace mch2
