#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <new>
#include <vector>

namespace mch2 {

using cplx = std::complex<double>;

// fftw_malloc-backed storage so that every buffer satisfies the SIMD alignment
// the cached plans were created with.
void* aligned_alloc_bytes(std::size_t bytes);
void aligned_free(void* p) noexcept;

template <class T>
struct FftwAllocator {
    using value_type = T;
    FftwAllocator() noexcept = default;
    template <class U>
    FftwAllocator(const FftwAllocator<U>&) noexcept {}
    T* allocate(std::size_t n) {
        if (n > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_alloc();
        return static_cast<T*>(aligned_alloc_bytes(n * sizeof(T)));
    }
    void deallocate(T* p, std::size_t) noexcept { aligned_free(p); }
    template <class U>
    bool operator==(const FftwAllocator<U>&) const noexcept { return true; }
};

using RealVec = std::vector<double, FftwAllocator<double>>;
using ComplexVec = std::vector<cplx, FftwAllocator<cplx>>;

class Grid {
public:
    Grid() : Grid(1, 8) {}
    Grid(int d, int n, double dealias_fraction = 2.0 / 3.0);

    int d() const { return d_; }
    int n() const { return n_; }
    double dealias_fraction() const { return frac_; }
    // largest retained |m_i|
    int cutoff() const { return k_; }
    // length of the stored last axis (r2c half spectrum)
    int half() const { return n_ / 2 + 1; }
    std::size_t physical_size() const { return d_ == 1 ? std::size_t(n_) : std::size_t(n_) * n_; }
    std::size_t spectral_size() const { return d_ == 1 ? std::size_t(half()) : std::size_t(n_) * half(); }
    int wavenumber(int index) const { return index <= n_ / 2 ? index : index - n_; }

    bool operator==(const Grid& o) const { return d_ == o.d_ && n_ == o.n_ && k_ == o.k_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    int d_, n_, k_;
    double frac_;
};

struct Mode {
    int m[2];     // lattice vector (m[1] = 0 when d = 1)
    int k[2];     // differentiation wavenumbers, Nyquist entries zeroed
    long m2;      // |m|^2
    double weight;  // 2 when the conjugate partner is implicit in the half spectrum
    bool retained;  // all |m_i| <= cutoff
};

template <class F>
void for_each_mode(const Grid& g, F&& f) {
    const int n = g.n(), h = g.half(), kc = g.cutoff();
    auto w = [n](int j) { return (j == 0 || j == n / 2) ? 1.0 : 2.0; };
    auto dk = [n](int m) { return (m == n / 2 || m == -n / 2) ? 0 : m; };
    if (g.d() == 1) {
        for (int j = 0; j < h; ++j)
            f(std::size_t(j), Mode{{j, 0}, {dk(j), 0}, long(j) * j, w(j), j <= kc});
        return;
    }
    for (int i = 0; i < n; ++i) {
        const int mi = g.wavenumber(i);
        for (int j = 0; j < h; ++j) {
            const bool keep = (mi < 0 ? -mi : mi) <= kc && j <= kc;
            f(std::size_t(i) * h + j,
              Mode{{mi, j}, {dk(mi), dk(j)}, long(mi) * mi + long(j) * j, w(j), keep});
        }
    }
}

// Real scalar field on the torus stored as normalized Fourier coefficients
// a_m = N^{-d} sum_x f(x) e^{-i m.x} in the r2c half-spectrum layout.
class SpectralField {
public:
    SpectralField() : SpectralField(Grid()) {}
    explicit SpectralField(const Grid& g) : grid_(g), a_(g.spectral_size(), cplx(0.0)) {}

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return a_.size(); }
    cplx& operator[](std::size_t i) { return a_[i]; }
    const cplx& operator[](std::size_t i) const { return a_[i]; }
    cplx* data() { return a_.data(); }
    const cplx* data() const { return a_.data(); }

    // coefficient of an arbitrary lattice vector with |m_i| <= n/2
    cplx coeff(int m0, int m1 = 0) const;
    // sets a_m and, implicitly or explicitly, a_{-m} = conj(a_m)
    void set_coeff(cplx value, int m0, int m1 = 0);

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double c);
    // this += c * o
    SpectralField& axpy(double c, const SpectralField& o);

private:
    std::size_t index_of(int m0, int m1, bool& conj) const;

    Grid grid_;
    ComplexVec a_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double c, SpectralField a);

struct State {
    std::vector<SpectralField> u;
    SpectralField gamma;

    const Grid& grid() const { return gamma.grid(); }
    int d() const { return gamma.grid().d(); }
    static State zero(const Grid& g);
};

RealVec to_physical(const SpectralField& f);
SpectralField to_spectral(const Grid& g, const RealVec& values);
// to_spectral followed by removal of every mode with some |m_i| > K
SpectralField project(const Grid& g, const RealVec& values);
SpectralField truncate(const SpectralField& f);

// collocation coordinate x_k = 2 pi k / N
double grid_point(const Grid& g, int k);

SpectralField bessel_potential(const SpectralField& f, double s);
double sobolev_norm(const SpectralField& f, double s);
// norm on the product space: sqrt of the summed squares over components
double sobolev_norm(const std::vector<SpectralField>& v, double s);
double sobolev_norm(const State& y, double s);
// real part of sum_m a_m conj(b_m): the coefficient L2 pairing
double inner_product(const SpectralField& a, const SpectralField& b);

double winf_norm(const State& y);

double mollifier_symbol(double xi);
SpectralField mollify(const SpectralField& f, double eps);

SpectralField partial(const SpectralField& f, int axis);
std::vector<SpectralField> gradient(const SpectralField& f);
SpectralField divergence(const std::vector<SpectralField>& v);
SpectralField laplacian(const SpectralField& f);

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

SpectralField lp_block(const SpectralField& f, int q);
// r <= 0 selects the sup over blocks
double besov_norm(const SpectralField& f, double s, double r);

// direct Fourier sum at an arbitrary point, O(N^d)
double evaluate(const SpectralField& f, double x0, double x1 = 0.0);

double hermitian_defect(const SpectralField& f);
bool same_grid(const State& y);

}  // namespace mch2
