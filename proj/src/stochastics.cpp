#include "mch2/stochastics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mch2 {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    constexpr std::uint64_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = M0 * c[0], p1 = M1 * c[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

double keyed_normal(std::uint64_t seed, std::uint32_t driver, std::uint32_t level, std::uint64_t index) {
    const auto r = philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), driver, level},
                              {std::uint32_t(seed), std::uint32_t(seed >> 32)});
    // 53-bit uniforms; u1 is shifted off zero so the logarithm stays finite
    const std::uint64_t a = (std::uint64_t(r[0]) << 21) ^ (std::uint64_t(r[1]) >> 11);
    const std::uint64_t b = (std::uint64_t(r[2]) << 21) ^ (std::uint64_t(r[3]) >> 11);
    const double u1 = (double(a) + 0.5) * 0x1.0p-53;
    const double u2 = double(b) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

WienerPath::WienerPath(std::uint64_t seed, double dt, int steps, int drivers)
    : seed_(seed), dt_(dt), steps_(steps), drivers_(drivers) {
    if (!(dt > 0.0)) throw std::invalid_argument("Wiener path step must be positive");
    if (steps < 0 || drivers < 0) throw std::invalid_argument("negative step or driver count");
    inc_.resize(std::size_t(drivers) * steps);
    cum_.resize(std::size_t(drivers) * (steps + 1));
    const double sd = std::sqrt(dt);
    for (int d = 0; d < drivers; ++d) {
        double w = 0.0;
        cum_[std::size_t(d) * (steps + 1)] = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double dw = sd * keyed_normal(seed, std::uint32_t(d), 0, std::uint64_t(k));
            inc_[std::size_t(d) * steps + k] = dw;
            w += dw;
            cum_[std::size_t(d) * (steps + 1) + k + 1] = w;
        }
    }
}

double WienerPath::at(int driver, int level, std::int64_t index) const {
    if (level < 0 || level > 60 || index < 0) throw std::out_of_range("Wiener path query out of range");
    while (level > 0 && index % 2 == 0) {
        index /= 2;
        --level;
    }
    const std::int64_t cell = index >> level;
    if (cell > steps_ || (cell == steps_ && level > 0)) throw std::out_of_range("Wiener path query beyond horizon");
    if (level == 0) return cumulative(driver, int(cell));

    // descend through dyadic cells, bridging the midpoint at every level
    std::int64_t A = cell;
    double left = cumulative(driver, int(cell)), right = cumulative(driver, int(cell) + 1);
    for (int l = 1; l <= level; ++l) {
        const std::int64_t mid = 2 * A + 1;
        const double h = std::ldexp(dt_, -l);
        const double wm = 0.5 * (left + right) +
                          std::sqrt(0.5 * h) * keyed_normal(seed_, std::uint32_t(driver), std::uint32_t(l), std::uint64_t(mid));
        if (l == level) return wm;
        const std::int64_t target = index >> (level - l);
        if (target == 2 * A) {
            right = wm;
            A = 2 * A;
        } else {
            left = wm;
            A = mid;
        }
    }
    return left;  // unreachable: the loop returns at l == level
}

double WienerPath::value(int driver, double t) const {
    if (t <= 0.0) return 0.0;
    const double x = t / dt_;
    int k = int(std::floor(x));
    if (k >= steps_) return cumulative(driver, steps_);
    const double f = x - k;
    return (1.0 - f) * cumulative(driver, k) + f * cumulative(driver, k + 1);
}

WienerPath sample_path(std::uint64_t seed, double dt, int steps, int drivers) {
    return WienerPath(seed, dt, steps, drivers);
}

int NoiseModel::drivers() const {
    switch (kind) {
        case Kind::zero: return 0;
        case Kind::linear:
        case Kind::polynomial: return 1;
        case Kind::finite_mode: return int(modes.size());
    }
    return 0;
}

void NoiseModel::validate(int d) const {
    if (kind == Kind::polynomial) {
        if (delta1 < 0.0 || delta2 < 0.0) throw std::invalid_argument("polynomial noise exponents must be >= 0");
        if (!(s_norm > 1.0 + d / 2.0))
            throw std::invalid_argument("polynomial noise needs s_norm > 1 + d/2 (well-posedness index)");
    }
    if (kind == Kind::finite_mode) {
        if (modes.empty()) throw std::invalid_argument("finite_mode noise needs at least one mode");
        for (const auto& m : modes)
            if (d == 1 && m.q1 != 0) throw std::invalid_argument("finite_mode wave vector has a second component in 1-D");
    }
}

bool NoiseModel::transformable() const {
    return kind == Kind::zero || (kind == Kind::linear && c1 == c2);
}

double NoiseModel::transform_c() const { return kind == Kind::linear ? c1 : 0.0; }

std::string to_string(NoiseModel::Kind k) {
    switch (k) {
        case NoiseModel::Kind::zero: return "zero";
        case NoiseModel::Kind::linear: return "linear";
        case NoiseModel::Kind::polynomial: return "polynomial";
        case NoiseModel::Kind::finite_mode: return "finite_mode";
    }
    return "zero";
}

NoiseModel::Kind noise_kind_from_string(const std::string& s) {
    if (s == "zero") return NoiseModel::Kind::zero;
    if (s == "linear") return NoiseModel::Kind::linear;
    if (s == "polynomial") return NoiseModel::Kind::polynomial;
    if (s == "finite_mode") return NoiseModel::Kind::finite_mode;
    throw std::invalid_argument("unknown noise kind '" + s + "'");
}

std::vector<Tendency> diffusion(double, const State& y, const NoiseModel& model) {
    std::vector<Tendency> out;
    switch (model.kind) {
        case NoiseModel::Kind::zero: break;
        case NoiseModel::Kind::linear:
        case NoiseModel::Kind::polynomial: {
            double a = model.c1, b = model.c2;
            if (model.kind == NoiseModel::Kind::polynomial) {
                if (model.delta1 != 0.0) a *= std::pow(sobolev_norm(y.u, model.s_norm), model.delta1);
                if (model.delta2 != 0.0) b *= std::pow(sobolev_norm(y.gamma, model.s_norm), model.delta2);
            }
            Tendency t = as_tendency(y);
            for (auto& f : t.du) f *= a;
            t.dgamma *= b;
            out.push_back(std::move(t));
            break;
        }
        case NoiseModel::Kind::finite_mode: {
            const Grid& g = y.grid();
            for (const auto& m : model.modes) {
                SpectralField shape(g);
                if (m.q0 == 0 && m.q1 == 0) {
                    shape.set_coeff(1.0, 0, 0);
                } else {
                    shape.set_coeff(0.5, m.q0, m.q1);
                    shape.set_coeff(0.5, -m.q0, -m.q1);
                }
                Tendency t;
                for (const auto& ui : y.u)
                    t.du.push_back(m.amplitude * bessel_potential(dealiased_product(shape, ui), -2.0));
                t.dgamma = m.amplitude * bessel_potential(dealiased_product(shape, y.gamma), -2.0);
                out.push_back(std::move(t));
            }
            break;
        }
    }
    return out;
}

double finite_mode_constant(const NoiseMode& m, double s) {
    // Peetre's inequality on the shifted weights (1 + |k +- q|^2)^{(s-2)/2}
    const double q2 = double(m.q0) * m.q0 + double(m.q1) * m.q1;
    return std::abs(m.amplitude) * std::pow(2.0 * (1.0 + q2), 0.5 * std::abs(s - 2.0));
}

double mu(double t, double W, double c) { return std::exp(0.5 * c * c * t - c * W); }

State transform_state(const State& y, double mu_t) {
    if (!(mu_t > 0.0)) throw std::invalid_argument("transformation factor must be positive");
    State out = y;
    for (auto& f : out.u) f *= mu_t;
    out.gamma *= mu_t;
    return out;
}

State untransform_state(const State& y, double mu_t) {
    if (!(mu_t > 0.0)) throw std::invalid_argument("transformation factor must be positive");
    return transform_state(y, 1.0 / mu_t);
}

}  // namespace mch2
