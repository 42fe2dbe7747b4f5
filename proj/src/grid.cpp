#include "nsbesov/grid.hpp"

#include <cmath>
#include <string>

#include "nsbesov/errors.hpp"

namespace nsbesov {

namespace {
bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }
}  // namespace

Grid::Grid(int n, int N, double L) : n_(n), N_(N), L_(L) {
    k_unit_ = 2.0 * M_PI / L;
    size_ = 1;
    for (int d = 0; d < n; ++d) size_ *= static_cast<std::size_t>(N);
}

double Grid::k_max() const {
    const double half = N_ / 2;
    return k_unit_ * half * std::sqrt(static_cast<double>(n_));
}

std::array<int, 3> Grid::freqs(std::size_t flat) const {
    std::array<int, 3> m{0, 0, 0};
    for (int d = n_ - 1; d >= 0; --d) {
        m[d] = freq(static_cast<int>(flat % N_));
        flat /= N_;
    }
    return m;
}

std::size_t Grid::flat(const std::array<int, 3>& m) const {
    std::size_t idx = 0;
    for (int d = 0; d < n_; ++d) idx = idx * N_ + index_of_freq(m[d]);
    return idx;
}

std::size_t Grid::conjugate_index(std::size_t flat_idx) const {
    auto m = freqs(flat_idx);
    for (int d = 0; d < n_; ++d) {
        // -(-N/2) wraps back to -N/2 (self-paired Nyquist)
        int neg = -m[d];
        if (neg == N_ / 2) neg = -N_ / 2;
        m[d] = neg;
    }
    return flat(m);
}

double Grid::k_squared(std::size_t flat_idx) const {
    const auto m = freqs(flat_idx);
    double s = 0.0;
    for (int d = 0; d < n_; ++d) s += static_cast<double>(m[d]) * m[d];
    return k_unit_ * k_unit_ * s;
}

std::array<double, 3> Grid::k_vector(std::size_t flat_idx) const {
    const auto m = freqs(flat_idx);
    std::array<double, 3> k{0.0, 0.0, 0.0};
    for (int d = 0; d < n_; ++d) k[d] = k_unit_ * m[d];
    return k;
}

Grid make_grid(int n, int N, double L) {
    if (n != 2 && n != 3) throw precondition_error("invalid-dimension: n must be 2 or 3, got " + std::to_string(n));
    if (!is_power_of_two(N) || N < 8)
        throw precondition_error("non-power-of-two: N must be a power of two >= 8, got " + std::to_string(N));
    if (!(L > 0.0)) throw precondition_error("invalid-box-length: L must be positive");
    return Grid(n, N, L);
}

}  // namespace nsbesov
