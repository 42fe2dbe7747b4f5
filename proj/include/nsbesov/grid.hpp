#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace nsbesov {

// Periodic box [0,L)^n sampled at N points per axis. Wavenumbers are
// k = (2pi/L) m with integer m in the standard DFT layout
// m in {0,...,N/2-1, -N/2,...,-1} per axis.
class Grid {
  public:
    Grid() = default;
    Grid(int n, int N, double L);

    int dim() const { return n_; }
    int points_per_axis() const { return N_; }
    double box_length() const { return L_; }
    std::size_t size() const { return size_; }  // N^n

    double k_unit() const { return k_unit_; }  // 2pi/L
    double k_min() const { return k_unit_; }   // smallest nonzero |k|
    double k_max() const;                      // largest |k| on the lattice

    // integer frequency of axis-index i (0 <= i < N)
    int freq(int i) const { return i < N_ / 2 ? i : i - N_; }
    // axis-index of integer frequency m (-N/2 <= m < N/2)
    int index_of_freq(int m) const { return m >= 0 ? m : m + N_; }

    // decode flat index -> per-axis integer frequencies
    std::array<int, 3> freqs(std::size_t flat) const;
    // encode per-axis integer frequencies -> flat index
    std::size_t flat(const std::array<int, 3>& m) const;
    // flat index of the frequency-negated mode (per-axis mod N)
    std::size_t conjugate_index(std::size_t flat) const;

    // |k|^2 and k-vector at a flat index, in physical wavenumber units
    double k_squared(std::size_t flat) const;
    std::array<double, 3> k_vector(std::size_t flat) const;

    bool operator==(const Grid& other) const {
        return n_ == other.n_ && N_ == other.N_ && L_ == other.L_;
    }
    bool operator!=(const Grid& other) const { return !(*this == other); }

  private:
    int n_ = 0;
    int N_ = 0;
    double L_ = 0.0;
    double k_unit_ = 0.0;
    std::size_t size_ = 0;
};

// Validates n in {2,3}, N a power of two >= 8, L > 0.
Grid make_grid(int n, int N, double L);

}  // namespace nsbesov
