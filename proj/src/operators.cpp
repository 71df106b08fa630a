#include "mch2/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mch2 {

Tendency Tendency::zero(const Grid& g) {
    Tendency t;
    t.du.assign(g.d(), SpectralField(g));
    t.dgamma = SpectralField(g);
    return t;
}

Tendency& Tendency::operator+=(const Tendency& o) { return axpy(1.0, o); }

Tendency& Tendency::operator*=(double c) {
    for (auto& f : du) f *= c;
    dgamma *= c;
    return *this;
}

Tendency& Tendency::axpy(double c, const Tendency& o) {
    for (std::size_t i = 0; i < du.size(); ++i) du[i].axpy(c, o.du[i]);
    dgamma.axpy(c, o.dgamma);
    return *this;
}

State advance(const State& y, double h, const Tendency& k) {
    State out = y;
    for (std::size_t i = 0; i < out.u.size(); ++i) out.u[i].axpy(h, k.du[i]);
    out.gamma.axpy(h, k.dgamma);
    return out;
}

Tendency as_tendency(const State& y) { return Tendency{y.u, y.gamma}; }

void RegularizationParams::validate() const {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw std::invalid_argument("regularization epsilon must lie in (0, 1]");
    if (!(R > 0.0)) throw std::invalid_argument("truncation radius R must be positive");
}

namespace {

using Matrix = std::vector<std::vector<RealVec>>;

// Collocation values of a velocity and its Jacobian G[i][j] = d_j u_i.
struct PhysVelocity {
    std::vector<RealVec> u;
    Matrix G;
    RealVec div;
};

struct PhysScalar {
    RealVec f;
    std::vector<RealVec> grad;
};

PhysVelocity physical_velocity(const Velocity& u) {
    const int d = int(u.size());
    PhysVelocity p;
    p.G.resize(d);
    for (int i = 0; i < d; ++i) {
        p.u.push_back(to_physical(u[i]));
        for (int j = 0; j < d; ++j) p.G[i].push_back(to_physical(partial(u[i], j)));
    }
    p.div = p.G[0][0];
    for (int i = 1; i < d; ++i)
        for (std::size_t k = 0; k < p.div.size(); ++k) p.div[k] += p.G[i][i][k];
    return p;
}

PhysScalar physical_scalar(const SpectralField& f) {
    PhysScalar p;
    p.f = to_physical(f);
    for (int j = 0; j < f.grid().d(); ++j) p.grad.push_back(to_physical(partial(f, j)));
    return p;
}

void check_velocity(const Velocity& u) {
    if (u.empty() || int(u.size()) != u.front().grid().d())
        throw std::invalid_argument("velocity needs one component per dimension");
    for (const auto& c : u)
        if (c.grid() != u.front().grid()) throw std::invalid_argument("velocity components on different grids");
}

// Lambda^{-2}( (div M)_i + V_i ) with (div M)_i = sum_j d_j M[j][i]; V may be empty.
Velocity nonlocal(const Grid& g, const Matrix& M, const std::vector<RealVec>& V) {
    const int d = g.d();
    Velocity out;
    for (int i = 0; i < d; ++i) {
        SpectralField acc = V.empty() ? SpectralField(g) : project(g, V[i]);
        for (int j = 0; j < d; ++j) acc += partial(project(g, M[j][i]), j);
        out.push_back(bessel_potential(acc, -2.0));
    }
    return out;
}

Matrix l1_matrix(const PhysVelocity& p) {
    const int d = int(p.u.size());
    const std::size_t n = p.div.size();
    Matrix M(d, std::vector<RealVec>(d, RealVec(n, 0.0)));
    for (std::size_t k = 0; k < n; ++k) {
        double gsq = 0.0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) gsq += p.G[i][j][k] * p.G[i][j][k];
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double gg = 0.0, ggt = 0.0, gtg = 0.0;
                for (int l = 0; l < d; ++l) {
                    gg += p.G[i][l][k] * p.G[l][j][k];
                    ggt += p.G[i][l][k] * p.G[j][l][k];
                    gtg += p.G[l][i][k] * p.G[l][j][k];
                }
                M[i][j][k] = (i == j ? 0.5 * gsq : 0.0) + gg + ggt - gtg - p.div[k] * p.G[i][j][k];
            }
        }
    }
    return M;
}

// (div u) u_i + sum_j u_j d_i u_j
std::vector<RealVec> l1_vector(const PhysVelocity& p) {
    const int d = int(p.u.size());
    const std::size_t n = p.div.size();
    std::vector<RealVec> V(d, RealVec(n, 0.0));
    for (int i = 0; i < d; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            double v = p.div[k] * p.u[i][k];
            for (int j = 0; j < d; ++j) v += p.u[j][k] * p.G[j][i][k];
            V[i][k] = v;
        }
    return V;
}

Matrix l2_matrix(const PhysScalar& q) {
    const int d = int(q.grad.size());
    const std::size_t n = q.f.size();
    Matrix M(d, std::vector<RealVec>(d, RealVec(n, 0.0)));
    for (std::size_t k = 0; k < n; ++k) {
        double g2 = 0.0;
        for (int j = 0; j < d; ++j) g2 += q.grad[j][k] * q.grad[j][k];
        const double diag = 0.5 * (q.f[k] * q.f[k] + g2);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) M[i][j][k] = (i == j ? diag : 0.0) - q.grad[i][k] * q.grad[j][k];
    }
    return M;
}

SpectralField l3_from(const Grid& g, const PhysVelocity& p, const PhysScalar& q) {
    const int d = g.d();
    const std::size_t n = q.f.size();
    // W_l = (G^T grad gamma)_l + (G grad gamma)_l - (div u) d_l gamma
    SpectralField acc(g);
    RealVec w(n);
    for (int l = 0; l < d; ++l) {
        for (std::size_t k = 0; k < n; ++k) {
            double v = -p.div[k] * q.grad[l][k];
            for (int j = 0; j < d; ++j) v += p.G[j][l][k] * q.grad[j][k] + p.G[l][j][k] * q.grad[j][k];
            w[k] = v;
        }
        acc += partial(project(g, w), l);
    }
    for (std::size_t k = 0; k < n; ++k) w[k] = p.div[k] * q.f[k];
    acc += project(g, w);
    return bessel_potential(acc, -2.0);
}

SpectralField convection_from(const Grid& g, const PhysVelocity& p, const std::vector<RealVec>& grad) {
    RealVec w(p.div.size(), 0.0);
    for (std::size_t j = 0; j < p.u.size(); ++j)
        for (std::size_t k = 0; k < w.size(); ++k) w[k] += p.u[j][k] * grad[j][k];
    return project(g, w);
}

void add_matrix(Matrix& A, const Matrix& B) {
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < A.size(); ++j)
            for (std::size_t k = 0; k < A[i][j].size(); ++k) A[i][j][k] += B[i][j][k];
}

}  // namespace

SpectralField convection(const Velocity& u, const SpectralField& f) {
    check_velocity(u);
    if (f.grid() != u.front().grid()) throw std::invalid_argument("convection operands on different grids");
    const PhysVelocity p = physical_velocity(u);
    std::vector<RealVec> grad;
    for (int j = 0; j < f.grid().d(); ++j) grad.push_back(to_physical(partial(f, j)));
    return convection_from(f.grid(), p, grad);
}

Velocity l1(const Velocity& u) {
    check_velocity(u);
    const PhysVelocity p = physical_velocity(u);
    return nonlocal(u.front().grid(), l1_matrix(p), l1_vector(p));
}

Velocity l2(const SpectralField& gamma) {
    return nonlocal(gamma.grid(), l2_matrix(physical_scalar(gamma)), {});
}

SpectralField l3(const Velocity& u, const SpectralField& gamma) {
    check_velocity(u);
    if (gamma.grid() != u.front().grid()) throw std::invalid_argument("l3 operands on different grids");
    return l3_from(gamma.grid(), physical_velocity(u), physical_scalar(gamma));
}

Tendency drift(const State& y) {
    check_velocity(y.u);
    if (!same_grid(y)) throw std::invalid_argument("state fields on different grids");
    const Grid& g = y.grid();
    const PhysVelocity p = physical_velocity(y.u);
    const PhysScalar q = physical_scalar(y.gamma);

    // L1 and L2 share one Lambda^{-2} div, so their matrices are summed first
    Matrix M = l1_matrix(p);
    add_matrix(M, l2_matrix(q));
    Velocity nl = nonlocal(g, M, l1_vector(p));

    Tendency t;
    for (int i = 0; i < g.d(); ++i) {
        SpectralField c = convection_from(g, p, p.G[i]);
        c += nl[i];
        c *= -1.0;
        t.du.push_back(std::move(c));
    }
    t.dgamma = convection_from(g, p, q.grad);
    t.dgamma += l3_from(g, p, q);
    t.dgamma *= -1.0;
    return t;
}

double greens_kernel(double x) {
    const double pi = std::numbers::pi;
    const double z = x - 2.0 * pi * std::floor(x / (2.0 * pi)) - pi;
    return std::cosh(z) / (2.0 * std::sinh(pi));
}

SpectralField greens_convolve(const SpectralField& f) {
    if (f.grid().d() != 1) throw std::invalid_argument("Green's kernel is one-dimensional");
    SpectralField out = f;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) { out[i] /= 1.0 + double(m.m2); });
    return out;
}

Tendency rhs_1d(const SpectralField& u, const SpectralField& gamma) {
    if (u.grid().d() != 1 || gamma.grid().d() != 1) throw std::invalid_argument("rhs_1d requires d = 1");
    if (u.grid() != gamma.grid()) throw std::invalid_argument("rhs_1d operands on different grids");
    const SpectralField ux = partial(u, 0), gx = partial(gamma, 0);
    auto mul = [](const SpectralField& a, const SpectralField& b) { return dealiased_product(a, b); };

    SpectralField pressure = mul(u, u);
    pressure.axpy(0.5, mul(ux, ux));
    pressure.axpy(0.5, mul(gamma, gamma));
    pressure.axpy(-0.5, mul(gx, gx));

    Tendency t;
    SpectralField du = mul(u, ux);
    du += partial(greens_convolve(pressure), 0);
    du *= -1.0;
    t.du.push_back(std::move(du));

    SpectralField uxgx = mul(ux, gx);
    SpectralField src = partial(uxgx, 0);
    src += mul(ux, gamma);
    t.dgamma = mul(u, gx);
    t.dgamma += greens_convolve(src);
    t.dgamma *= -1.0;
    return t;
}

double truncation(double x, double R) {
    if (!(R > 0.0)) throw std::invalid_argument("truncation radius must be positive");
    return mollifier_symbol(x / R);
}

Tendency drift_regularized(const State& y, const RegularizationParams& prm) {
    prm.validate();
    const Grid& g = y.grid();
    const double w = truncation(winf_norm(y), prm.R);
    if (w == 0.0) return Tendency::zero(g);

    // F(y) = drift(y) + B(y, y); the mollified convection replaces B
    Tendency t = drift(y);
    for (int i = 0; i < g.d(); ++i) t.du[i] += convection(y.u, y.u[i]);
    t.dgamma += convection(y.u, y.gamma);

    auto J = [&](const SpectralField& f) { return mollify(f, prm.epsilon); };
    Velocity ju;
    for (const auto& c : y.u) ju.push_back(J(c));
    for (int i = 0; i < g.d(); ++i) t.du[i] -= J(convection(ju, ju[i]));
    t.dgamma -= J(convection(ju, J(y.gamma)));
    t *= w;
    return t;
}

}  // namespace mch2
