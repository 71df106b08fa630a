#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mch2/operators.hpp"
#include "mch2/spectral.hpp"
#include "mch2/stochastics.hpp"

namespace mch2 {

enum class Scheme { euler_maruyama, euler_maruyama_regularized, rk4_random_pde };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SimConfig {
    Grid grid;
    double s = 2.0;  // Sobolev index of the H^s clock
    double dt = 1e-3;
    double t_end = 1.0;
    NoiseModel noise;
    Scheme scheme = Scheme::euler_maruyama;
    RegularizationParams reg;
    double blowup_winf = 1e3;
    double blowup_hs = 1e6;
    double dt_min = 1e-10;
    int record_every = 1;
    bool adaptive = true;
    // watch mu y instead of y (linear noise only); y and mu y blow up together, but the
    // explicit factor mu^{-1} alone can cross a finite threshold
    bool transformed_clocks = false;

    void validate() const;
};

enum class Status { survived, broke, dt_underflow };
std::string to_string(Status s);

struct Trajectory {
    std::vector<double> times, hs_u, hs_gamma, winf, energy, min_slope;
    Status status = Status::survived;
    double t_stop = 0.0;  // first clock crossing, underflow time, or t_end
    std::uint64_t seed = 0;
    // record indices of the first W^{1,inf} and H^s threshold crossings, -1 if none
    long winf_crossing = -1, hs_crossing = -1;
    State final_state;
};

// Euler-Maruyama step; dW holds one increment per noise driver.
State step_em(const State& y, double t, double dt, const std::vector<double>& dW, const NoiseModel& model,
              const std::optional<RegularizationParams>& reg = std::nullopt);

// Classical RK4 on d y~/dt = mu^{-1}(t) drift(y~), with W linear from W0 to W1 over the step.
State step_rk4_random(const State& yt, double t, double dt, double W0, double W1, double c);

// Called at t = 0 and after every accepted step with (t, W(t), mu(t), y~, y).
using Observer = std::function<void(double, double, double, const State&, const State&)>;

Trajectory simulate(const SimConfig& cfg, const State& y0, std::uint64_t seed, const Observer& observer = {});

// Transformed velocity fields at integrator times, as consumed by the characteristic solver.
struct FlowPath {
    std::vector<double> t, W;
    std::vector<State> y_tilde;
};
Observer record_flow(FlowPath& path);

struct Characteristics {
    std::vector<double> t;
    std::vector<std::vector<double>> phi, phi_x;  // [time][sample]
};

// dPhi/dt = mu^{-1} u~(t, Phi) and d log Phi_x/dt = mu^{-1} u~_x(t, Phi), by RK4 with the
// velocity linear in time between stored snapshots. 1-D only.
Characteristics characteristic_flow(const FlowPath& path, double c, const std::vector<double>& x0);

}  // namespace mch2
