#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace mch2 {

void* aligned_alloc_bytes(std::size_t bytes) {
    void* p = fftw_malloc(bytes == 0 ? 1 : bytes);
    if (!p) throw std::bad_alloc();
    return p;
}

void aligned_free(void* p) noexcept { fftw_free(p); }

namespace detail {
namespace {

struct Plans {
    fftw_plan r2c;
    fftw_plan c2r;
};

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is, so only creation sits behind the lock.
const Plans& plans_for(const Grid& g) {
    static std::mutex mtx;
    static std::map<std::pair<int, int>, Plans> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto key = std::make_pair(g.d(), g.n());
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    RealVec r(g.physical_size());
    ComplexVec c(g.spectral_size());
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    Plans p{};
    if (g.d() == 1) {
        p.r2c = fftw_plan_dft_r2c_1d(g.n(), r.data(), cp, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_1d(g.n(), cp, r.data(), FFTW_ESTIMATE);
    } else {
        p.r2c = fftw_plan_dft_r2c_2d(g.n(), g.n(), r.data(), cp, FFTW_ESTIMATE);
        p.c2r = fftw_plan_dft_c2r_2d(g.n(), g.n(), cp, r.data(), FFTW_ESTIMATE);
    }
    return cache.emplace(key, p).first->second;
}

}  // namespace

void forward(const Grid& g, const double* in, cplx* out) {
    fftw_execute_dft_r2c(plans_for(g).r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}

void backward(const Grid& g, cplx* in, double* out) {
    fftw_execute_dft_c2r(plans_for(g).c2r, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace detail
}  // namespace mch2
