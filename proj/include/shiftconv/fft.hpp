#pragma once

#include <complex>
#include <span>
#include <vector>

namespace shiftconv {

using cplx = std::complex<double>;

/// Sign of the exponent: Forward computes sum_j x_j e^{-2 pi i jk/n},
/// Backward sum_j x_j e^{+2 pi i jk/n}.  Neither is normalized.
enum class FftSign { Forward, Backward };

/// Unnormalized DFT of arbitrary length (FFTW backend).
std::vector<cplx> dft(std::span<const cplx> in, FftSign sign);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace shiftconv
