#include "mch2/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace mch2 {

Grid::Grid(int d, int n, double dealias_fraction) : d_(d), n_(n), frac_(dealias_fraction) {
    if (d != 1 && d != 2) throw std::invalid_argument("grid dimension must be 1 or 2, got " + std::to_string(d));
    if (n < 8 || (n & (n - 1)) != 0)
        throw std::invalid_argument("grid size must be a power of two >= 8, got " + std::to_string(n));
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw std::invalid_argument("dealias fraction must lie in (0, 1]");
    // the small epsilon keeps 2/3 * 3k/2 from rounding down
    k_ = int(std::floor(dealias_fraction * (n / 2) + 1e-9));
    if (k_ < 2) throw std::invalid_argument("retained-mode cutoff below 2");
}

std::size_t SpectralField::index_of(int m0, int m1, bool& conj) const {
    const int n = grid_.n(), h = grid_.half();
    auto wrap = [n](int m) { return ((m % n) + n) % n; };
    conj = false;
    if (grid_.d() == 1) {
        if (m0 < 0) {
            conj = true;
            m0 = -m0;
        }
        if (m0 > n / 2) throw std::out_of_range("mode outside the grid");
        return std::size_t(m0);
    }
    if (m1 == -n / 2) {
        // the -n/2 column aliases +n/2
        m1 = n / 2;
    } else if (m1 < 0) {
        conj = true;
        m0 = -m0;
        m1 = -m1;
    }
    if (m1 > n / 2 || m0 > n / 2 || m0 < -n / 2) throw std::out_of_range("mode outside the grid");
    return std::size_t(wrap(m0)) * h + std::size_t(m1);
}

cplx SpectralField::coeff(int m0, int m1) const {
    bool c = false;
    const cplx v = a_[index_of(m0, m1, c)];
    return c ? std::conj(v) : v;
}

void SpectralField::set_coeff(cplx value, int m0, int m1) {
    bool c = false;
    a_[index_of(m0, m1, c)] = c ? std::conj(value) : value;
    if (grid_.d() == 2 && (m1 == 0 || m1 == grid_.n() / 2 || m1 == -grid_.n() / 2)) {
        bool c2 = false;
        a_[index_of(-m0, m1 == 0 ? 0 : m1, c2)] = c2 ? value : std::conj(value);
    }
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (o.grid_ != grid_) throw std::invalid_argument("fields live on different grids");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    if (o.grid_ != grid_) throw std::invalid_argument("fields live on different grids");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double c) {
    for (auto& v : a_) v *= c;
    return *this;
}

SpectralField& SpectralField::axpy(double c, const SpectralField& o) {
    if (o.grid_ != grid_) throw std::invalid_argument("fields live on different grids");
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += c * o.a_[i];
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double c, SpectralField a) { return a *= c; }

State State::zero(const Grid& g) {
    State y;
    y.u.assign(g.d(), SpectralField(g));
    y.gamma = SpectralField(g);
    return y;
}

RealVec to_physical(const SpectralField& f) {
    const Grid& g = f.grid();
    ComplexVec scratch(f.data(), f.data() + f.size());
    RealVec out(g.physical_size());
    detail::backward(g, scratch.data(), out.data());
    return out;
}

SpectralField to_spectral(const Grid& g, const RealVec& values) {
    if (values.size() != g.physical_size()) throw std::invalid_argument("value count does not match grid");
    SpectralField f(g);
    detail::forward(g, values.data(), f.data());
    const double scale = 1.0 / double(g.physical_size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= scale;
    return f;
}

SpectralField truncate(const SpectralField& f) {
    SpectralField out = f;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        if (!m.retained) out[i] = 0.0;
    });
    return out;
}

SpectralField project(const Grid& g, const RealVec& values) {
    SpectralField f = to_spectral(g, values);
    for_each_mode(g, [&](std::size_t i, const Mode& m) {
        if (!m.retained) f[i] = 0.0;
    });
    return f;
}

double grid_point(const Grid& g, int k) { return 2.0 * std::numbers::pi * k / g.n(); }

SpectralField bessel_potential(const SpectralField& f, double s) {
    SpectralField out = f;
    if (s == 0.0) return out;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        out[i] *= std::pow(1.0 + double(m.m2), 0.5 * s);
    });
    return out;
}

double sobolev_norm(const SpectralField& f, double s) {
    double sum = 0.0;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        const double a2 = std::norm(f[i]);
        if (a2 == 0.0) return;
        sum += m.weight * (s == 0.0 ? a2 : std::pow(1.0 + double(m.m2), s) * a2);
    });
    return std::sqrt(sum);
}

double sobolev_norm(const std::vector<SpectralField>& v, double s) {
    double sum = 0.0;
    for (const auto& f : v) {
        const double x = sobolev_norm(f, s);
        sum += x * x;
    }
    return std::sqrt(sum);
}

double sobolev_norm(const State& y, double s) {
    const double a = sobolev_norm(y.u, s), b = sobolev_norm(y.gamma, s);
    return std::sqrt(a * a + b * b);
}

double inner_product(const SpectralField& a, const SpectralField& b) {
    if (a.grid() != b.grid()) throw std::invalid_argument("fields live on different grids");
    double sum = 0.0;
    for_each_mode(a.grid(), [&](std::size_t i, const Mode& m) {
        sum += m.weight * (a[i] * std::conj(b[i])).real();
    });
    return sum;
}

namespace {

double max_abs(const RealVec& v) {
    double mx = 0.0;
    for (double x : v) {
        const double a = std::abs(x);
        if (!(a <= mx)) mx = a;  // propagates NaN
    }
    return mx;
}

double field_w1inf(const SpectralField& f) {
    double mx = max_abs(to_physical(f));
    for (int j = 0; j < f.grid().d(); ++j) mx = std::max(mx, max_abs(to_physical(partial(f, j))));
    return mx;
}

}  // namespace

double winf_norm(const State& y) {
    double mx = field_w1inf(y.gamma);
    for (const auto& ui : y.u) {
        const double v = field_w1inf(ui);
        if (!(v <= mx)) mx = v;
    }
    return mx;
}

double mollifier_symbol(double xi) {
    const double x = std::abs(xi);
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return 0.0;
    const double t = x - 1.0;
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

SpectralField mollify(const SpectralField& f, double eps) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("mollifier scale must lie in (0, 1]");
    SpectralField out = f;
    const int d = f.grid().d();
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        double j = mollifier_symbol(eps * m.m[0]);
        if (d == 2) j *= mollifier_symbol(eps * m.m[1]);
        out[i] *= j;
    });
    return out;
}

SpectralField partial(const SpectralField& f, int axis) {
    if (axis < 0 || axis >= f.grid().d()) throw std::invalid_argument("derivative axis out of range");
    SpectralField out(f.grid());
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        out[i] = cplx(0.0, double(m.k[axis])) * f[i];
    });
    return out;
}

std::vector<SpectralField> gradient(const SpectralField& f) {
    std::vector<SpectralField> g;
    for (int j = 0; j < f.grid().d(); ++j) g.push_back(partial(f, j));
    return g;
}

SpectralField divergence(const std::vector<SpectralField>& v) {
    if (v.empty()) throw std::invalid_argument("divergence of an empty vector field");
    const Grid& g = v.front().grid();
    if (int(v.size()) != g.d()) throw std::invalid_argument("vector field needs d components");
    SpectralField out(g);
    for (int j = 0; j < g.d(); ++j) out += partial(v[j], j);
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        out[i] *= -double(long(m.k[0]) * m.k[0] + long(m.k[1]) * m.k[1]);
    });
    return out;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
    if (f.grid() != g.grid()) throw std::invalid_argument("fields live on different grids");
    // f*g and g*f must agree bitwise; multiplication of doubles commutes, so
    // the only requirement is that both orders run the same transforms
    RealVec a = to_physical(f), b = to_physical(g);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
    return project(f.grid(), a);
}

namespace {

int block_index(long m2) {
    if (m2 == 0) return -1;
    int q = 0;
    long bound = 1;  // 4^q
    while (m2 >= bound) {
        ++q;
        bound *= 4;
    }
    return q;
}

}  // namespace

SpectralField lp_block(const SpectralField& f, int q) {
    if (q < -1) throw std::invalid_argument("Littlewood-Paley index must be >= -1");
    SpectralField out(f.grid());
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        if (block_index(m.m2) == q) out[i] = f[i];
    });
    return out;
}

double besov_norm(const SpectralField& f, double s, double r) {
    std::vector<double> blocks;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        const std::size_t q = std::size_t(block_index(m.m2) + 1);
        if (blocks.size() <= q) blocks.resize(q + 1, 0.0);
        blocks[q] += m.weight * std::norm(f[i]);
    });
    double acc = 0.0;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const double q = double(k) - 1.0;
        const double term = std::pow(2.0, s * q) * std::sqrt(blocks[k]);
        if (r <= 0.0)
            acc = std::max(acc, term);
        else
            acc += std::pow(term, r);
    }
    return r <= 0.0 ? acc : std::pow(acc, 1.0 / r);
}

double evaluate(const SpectralField& f, double x0, double x1) {
    const bool two = f.grid().d() == 2;
    double sum = 0.0;
    for_each_mode(f.grid(), [&](std::size_t i, const Mode& m) {
        if (f[i] == 0.0) return;
        const double phase = m.m[0] * x0 + (two ? m.m[1] * x1 : 0.0);
        sum += m.weight * (f[i].real() * std::cos(phase) - f[i].imag() * std::sin(phase));
    });
    return sum;
}

double hermitian_defect(const SpectralField& f) {
    const Grid& g = f.grid();
    const int n = g.n(), h = g.half();
    double defect = 0.0;
    if (g.d() == 1) return std::max(std::abs(f[0].imag()), std::abs(f[std::size_t(n / 2)].imag()));
    for (int j : {0, n / 2}) {
        for (int i = 0; i < n; ++i) {
            const int mirror = (n - i) % n;
            const cplx a = f[std::size_t(i) * h + j], b = f[std::size_t(mirror) * h + j];
            defect = std::max(defect, std::abs(a - std::conj(b)));
        }
    }
    return defect;
}

bool same_grid(const State& y) {
    if (int(y.u.size()) != y.d()) return false;
    for (const auto& ui : y.u)
        if (ui.grid() != y.gamma.grid()) return false;
    return true;
}

}  // namespace mch2
