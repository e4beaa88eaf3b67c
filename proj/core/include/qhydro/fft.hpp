#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace qhydro::fft {

using Complex = std::complex<double>;

enum class Direction { forward, inverse };

// Batched in-place complex transform of `howmany` sequences of length `n`,
// element j of sequence b at data[b * dist + j * stride]. Unnormalized in
// both directions. Plans are created once per layout and shared; execution
// is thread-safe.
void transform(std::span<Complex> data, std::size_t n, std::size_t howmany,
               std::size_t stride, std::size_t dist, Direction direction);

inline void forward(std::span<Complex> data) {
  transform(data, data.size(), 1, 1, data.size(), Direction::forward);
}

// Inverse transform scaled by 1/n, so inverse(forward(x)) == x.
void inverse(std::span<Complex> data);

// Row-major n1 x n2 array, full 2D transform. inverse2d is scaled by 1/(n1*n2).
void forward2d(std::span<Complex> data, std::size_t n1, std::size_t n2);
void inverse2d(std::span<Complex> data, std::size_t n1, std::size_t n2);

}  // namespace qhydro::fft
