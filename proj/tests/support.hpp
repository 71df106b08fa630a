#pragma once

#include <cmath>
#include <random>

#include "mch2/operators.hpp"
#include "mch2/spectral.hpp"

namespace testing_support {

// Random real field limited to |m_i| <= kmax, with coefficients damped by
// exp(-decay |m|^2) so high modes stay small.
inline mch2::SpectralField random_field(const mch2::Grid& g, std::mt19937_64& rng, int kmax, double decay = 0.0) {
    std::normal_distribution<double> nd;
    mch2::RealVec v(g.physical_size());
    for (auto& x : v) x = nd(rng);
    mch2::SpectralField f = mch2::to_spectral(g, v);
    mch2::for_each_mode(g, [&](std::size_t i, const mch2::Mode& m) {
        const int a0 = std::abs(m.m[0]), a1 = std::abs(m.m[1]);
        if (a0 > kmax || a1 > kmax)
            f[i] = 0.0;
        else
            f[i] *= std::exp(-decay * double(m.m2)) * std::sqrt(double(g.physical_size()));
    });
    return f;
}

inline mch2::State random_state(const mch2::Grid& g, std::mt19937_64& rng, int kmax, double decay = 0.0) {
    mch2::State y;
    for (int i = 0; i < g.d(); ++i) y.u.push_back(random_field(g, rng, kmax, decay));
    y.gamma = random_field(g, rng, kmax, decay);
    return y;
}

inline double max_coeff_diff(const mch2::SpectralField& a, const mch2::SpectralField& b) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i] - b[i]));
    return mx;
}

inline double max_coeff(const mch2::SpectralField& a) {
    double mx = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mx = std::max(mx, std::abs(a[i]));
    return mx;
}

// field from a callable evaluated at the collocation points
template <class F>
mch2::SpectralField sample(const mch2::Grid& g, F&& f) {
    mch2::RealVec v(g.physical_size());
    const int n = g.n();
    if (g.d() == 1) {
        for (int k = 0; k < n; ++k) v[k] = f(mch2::grid_point(g, k), 0.0);
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v[std::size_t(i) * n + j] = f(mch2::grid_point(g, i), mch2::grid_point(g, j));
    }
    return mch2::to_spectral(g, v);
}

}  // namespace testing_support
