#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mch2 {

struct Check {
    std::string name;
    double value = 0.0;      // measured quantity
    double tolerance = 0.0;  // pass iff value <= tolerance
    bool pass = false;
    std::string detail;
};

struct SuiteResult {
    std::vector<Check> checks;
    int passed() const;
    bool ok() const { return passed() == int(checks.size()); }
};

// Lambda^{-2} Lambda^2 f = f, Green's convolution against the Fourier multiplier at N = 512,
// drift against the 1-D Green's form on 100 random band-limited states.
SuiteResult operator_suite(std::uint64_t seed = 1);

// Mollifier approximation rate, smoothing bound and self-adjointness.
SuiteResult mollifier_suite(std::uint64_t seed = 1);

}  // namespace mch2
