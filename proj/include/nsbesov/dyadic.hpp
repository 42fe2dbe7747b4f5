#pragma once

#include <vector>

#include "nsbesov/field.hpp"

namespace nsbesov {

// Canonical radial cutoff: chi(r) = 1 for r <= 1, 0 for r >= 2, and
// exp(-exp(1/(2-r) - 1/(r-1))) in between -- C-infinity, monotone.
double dyadic_cutoff(double r);

// phi(xi) = chi(|xi|) - chi(2|xi|): supported in {1/2 <= |xi| <= 2},
// telescoping to sum_j phi(xi/2^j) = 1 for xi != 0.
double dyadic_phi(double abs_xi);

// phi_j weight at wavenumber magnitude |k|
inline double dyadic_phi_j(double abs_k, int j) { return dyadic_phi(std::ldexp(abs_k, -j)); }

// Dyadic index range whose annuli [2^{j-1}, 2^{j+1}] meet the grid's nonzero
// wavenumber magnitudes.
struct DyadicRange {
    int j_min;
    int j_max;
    int count() const { return j_max - j_min + 1; }
};
DyadicRange dyadic_range(const Grid& grid);

// The family {phi_j(D)f}. Block j has Fourier support inside the annulus
// {2^{j-1} <= |k| <= 2^{j+1}} (coefficients outside are bit-zero), and the
// blocks sum back to f (zero mode excluded).
struct DyadicDecomposition {
    int j_min = 0;
    std::vector<SpectralField> blocks;  // blocks[i] is phi_{j_min+i}(D)f

    int j_of(int i) const { return j_min + i; }
    SpectralField reconstruct() const;
};

DyadicDecomposition dyadic_decompose(const SpectralField& f);

// Single block phi_j(D)f without materializing the rest.
SpectralField dyadic_block(const SpectralField& f, int j);

}  // namespace nsbesov
