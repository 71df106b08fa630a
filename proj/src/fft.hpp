#pragma once

#include "mch2/spectral.hpp"

namespace mch2::detail {

// Unnormalized real-to-half-complex transform of a physical array.
void forward(const Grid& g, const double* in, cplx* out);
// Inverse of forward up to the factor N^d; the input buffer is overwritten.
void backward(const Grid& g, cplx* in, double* out);

}  // namespace mch2::detail
