#pragma once

#include <optional>
#include <vector>

#include "mch2/dynamics.hpp"
#include "mch2/spectral.hpp"

namespace mch2 {

// integral over the circle of u^2 + u_x^2 + gamma^2 + gamma_x^2 (d = 1)
double h1_energy(const State& y);
// (2 pi)^d ||y||_{H^1}^2, the same integral in any dimension
double h1_integral(const State& y);

// inf of du/dx on a 4x zero-padded grid (d = 1)
double min_slope(const SpectralField& u);

struct BreakingAssessment {
    double threshold = 0.0;
    double min_slope0 = 0.0;
    double energy0 = 0.0;
    bool satisfied = false;
    double sigma1 = 0.0, sigma2 = 0.0;
    std::optional<double> predicted_window;
};

// right-hand side of the slope condition: -c^2/(2 lambda) - sqrt(c^4/(4 lambda^2) + E0)
double breaking_threshold(double E0, double c, double lambda);
BreakingAssessment breaking_condition(const SpectralField& u0, const SpectralField& gamma0, double c, double lambda);

// Deterministic (mu = 1) reduction of the Riccati bound: the time by which
// H' <= -(H^2 - E0)/2 drives H(0) = H0 to -infinity. Empty when H0 >= -sqrt(E0).
std::optional<double> riccati_window(double H0, double E0);

struct TransportCheck {
    double residual = 0.0;      // sup |rho~(t, Phi) Phi_x - rho0|
    double relative = 0.0;      // residual / sup |rho0| over the samples
    double min_phi_x = 0.0;
};

// rho~ = Lambda^2 gamma~ carried along the characteristics of the stored path.
TransportCheck transport_residual(const FlowPath& path, double c, const std::vector<double>& x_samples);

double log_norm_functional(const State& y, double s);

}  // namespace mch2
