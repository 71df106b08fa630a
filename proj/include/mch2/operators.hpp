#pragma once

#include <vector>

#include "mch2/spectral.hpp"

namespace mch2 {

using Velocity = std::vector<SpectralField>;

struct Tendency {
    std::vector<SpectralField> du;
    SpectralField dgamma;

    static Tendency zero(const Grid& g);
    Tendency& operator+=(const Tendency& o);
    Tendency& operator*=(double c);
    Tendency& axpy(double c, const Tendency& o);
};

// y + h k
State advance(const State& y, double h, const Tendency& k);
Tendency as_tendency(const State& y);

struct RegularizationParams {
    double epsilon = 0.5;
    double R = 1.0;
    void validate() const;
};

// sum_j u_j d_j f
SpectralField convection(const Velocity& u, const SpectralField& f);

// The nonlocal parts of the drift. Gradients follow (grad u)_{ij} = d_j u_i and
// a matrix divergence acts on columns: (div M)_i = sum_j d_j M_{ji}.
Velocity l1(const Velocity& u);
Velocity l2(const SpectralField& gamma);
SpectralField l3(const Velocity& u, const SpectralField& gamma);

// du = -(u.grad u + L1(u) + L2(gamma)), dgamma = -(u.grad gamma + L3(u, gamma))
Tendency drift(const State& y);

// Green's-function form of the 1-D system, independent of drift().
Tendency rhs_1d(const SpectralField& u, const SpectralField& gamma);
double greens_kernel(double x);
SpectralField greens_convolve(const SpectralField& f);

// smooth cutoff: 1 on [0, R], 0 on [2R, inf)
double truncation(double x, double R);
Tendency drift_regularized(const State& y, const RegularizationParams& p);

}  // namespace mch2
