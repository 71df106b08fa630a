#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mch2/operators.hpp"
#include "mch2/spectral.hpp"

namespace mch2 {

// Philox4x32-10 block: counter and key in, four 32-bit words out.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// One N(0,1) draw addressed by (seed, driver, level, index).
double keyed_normal(std::uint64_t seed, std::uint32_t driver, std::uint32_t level, std::uint64_t index);

class WienerPath {
public:
    WienerPath() = default;
    WienerPath(std::uint64_t seed, double dt, int steps, int drivers);

    std::uint64_t seed() const { return seed_; }
    double dt() const { return dt_; }
    int steps() const { return steps_; }
    int drivers() const { return drivers_; }

    double increment(int driver, int k) const { return inc_[std::size_t(driver) * steps_ + k]; }
    // W(k dt), k in [0, steps]
    double cumulative(int driver, int k) const { return cum_[std::size_t(driver) * (steps_ + 1) + k]; }
    // W(index * dt / 2^level); off-grid points come from Brownian-bridge
    // refinement keyed by (level, index), so every query is reproducible.
    double at(int driver, int level, std::int64_t index) const;
    // piecewise-linear interpolation of the base-grid values
    double value(int driver, double t) const;

private:
    std::uint64_t seed_ = 0;
    double dt_ = 0.0;
    int steps_ = 0, drivers_ = 0;
    std::vector<double> inc_, cum_;
};

WienerPath sample_path(std::uint64_t seed, double dt, int steps, int drivers);

struct NoiseMode {
    int q0 = 0, q1 = 0;  // wave vector of the shaping factor cos(q.x)
    double amplitude = 0.0;
};

struct NoiseModel {
    enum class Kind { zero, linear, polynomial, finite_mode };
    Kind kind = Kind::zero;
    double c1 = 0.0, c2 = 0.0;
    double delta1 = 0.0, delta2 = 0.0;
    double s_norm = 2.0;
    std::vector<NoiseMode> modes;

    // linear and polynomial share one scalar driver between u and gamma
    int drivers() const;
    void validate(int d) const;
    // linear with c1 == c2 (the case the exponential transformation removes)
    bool transformable() const;
    double transform_c() const;
};

std::string to_string(NoiseModel::Kind k);
NoiseModel::Kind noise_kind_from_string(const std::string& s);

// One coefficient field per driver. finite_mode driver k returns
// a_k Lambda^{-2}(cos(q_k.x) u_i, cos(q_k.x) gamma).
std::vector<Tendency> diffusion(double t, const State& y, const NoiseModel& model);

// Growth constant of one finite_mode coefficient:
// ||a Lambda^{-2}(cos(q.x) f)||_{H^s} <= constant * ||f||_{H^s}.
double finite_mode_constant(const NoiseMode& m, double s);

double mu(double t, double W, double c);
State transform_state(const State& y, double mu_t);
State untransform_state(const State& y, double mu_t);

}  // namespace mch2
