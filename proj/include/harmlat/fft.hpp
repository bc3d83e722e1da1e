#pragma once

#include <complex>
#include <vector>

namespace harmlat {

using Complex = std::complex<double>;

// In-place transform of a G^d array stored with the first axis slowest.
// forward: X_r = sum_n x_n e^{-2 pi i n.r / G}; inverse includes 1/G^d.
void fft_nd(std::vector<Complex>& data, int dimension, int grid, bool inverse);

// Linear index of offset n (reduced mod G) in a G^d array.
std::size_t grid_index(const std::vector<int>& n, int grid);
std::size_t grid_index(const std::vector<long>& n, int grid);

}  // namespace harmlat
