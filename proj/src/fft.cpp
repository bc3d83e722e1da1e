#include "harmlat/fft.hpp"

#include <unsupported/Eigen/FFT>

#include "harmlat/parallel.hpp"

namespace harmlat {

namespace {

// Transforms `lines` strided 1D sequences of length G.
void transform_axis(std::vector<Complex>& data, int grid, std::size_t lines, std::size_t stride,
                    std::size_t block, bool inverse) {
    std::size_t g = static_cast<std::size_t>(grid);
    parallel_for(
        lines,
        [&](std::size_t begin, std::size_t end) {
            Eigen::FFT<double> fft;
            std::vector<Complex> in(g), out(g);
            for (std::size_t line = begin; line < end; ++line) {
                // line -> (outer, inner) with outer stepping by block = G * stride
                std::size_t base = (line / stride) * block + line % stride;
                for (std::size_t k = 0; k < g; ++k) in[k] = data[base + k * stride];
                if (inverse)
                    fft.inv(out, in);
                else
                    fft.fwd(out, in);
                for (std::size_t k = 0; k < g; ++k) data[base + k * stride] = out[k];
            }
        },
        std::max<std::size_t>(1, 65536 / g));
}

}  // namespace

void fft_nd(std::vector<Complex>& data, int dimension, int grid, bool inverse) {
    std::size_t g = static_cast<std::size_t>(grid);
    std::size_t total = data.size();
    std::size_t stride = 1;
    for (int axis = 0; axis < dimension; ++axis) {
        std::size_t block = stride * g;
        transform_axis(data, grid, total / g, stride, block, inverse);
        stride = block;
    }
}

std::size_t grid_index(const std::vector<int>& n, int grid) {
    std::size_t idx = 0;
    for (int v : n) {
        long r = ((static_cast<long>(v) % grid) + grid) % grid;
        idx = idx * static_cast<std::size_t>(grid) + static_cast<std::size_t>(r);
    }
    return idx;
}

std::size_t grid_index(const std::vector<long>& n, int grid) {
    std::size_t idx = 0;
    for (long v : n) {
        long r = ((v % grid) + grid) % grid;
        idx = idx * static_cast<std::size_t>(grid) + static_cast<std::size_t>(r);
    }
    return idx;
}

}  // namespace harmlat
