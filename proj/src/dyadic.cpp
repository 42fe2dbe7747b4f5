#include "nsbesov/dyadic.hpp"

#include <cmath>

#include "nsbesov/errors.hpp"

namespace nsbesov {

double dyadic_cutoff(double r) {
    if (r <= 1.0) return 1.0;
    if (r >= 2.0) return 0.0;
    return std::exp(-std::exp(1.0 / (2.0 - r) - 1.0 / (r - 1.0)));
}

double dyadic_phi(double abs_xi) { return dyadic_cutoff(abs_xi) - dyadic_cutoff(2.0 * abs_xi); }

DyadicRange dyadic_range(const Grid& grid) {
    const double k_lo = grid.k_min();
    const double k_hi = grid.k_max();
    // annulus [2^{j-1}, 2^{j+1}] meets [k_lo, k_hi] iff 2^{j+1} >= k_lo and
    // 2^{j-1} <= k_hi (closed-interval intersection)
    const int j_min = static_cast<int>(std::ceil(std::log2(k_lo) - 1.0 - 1e-12));
    const int j_max = static_cast<int>(std::floor(std::log2(k_hi) + 1.0 + 1e-12));
    return DyadicRange{j_min, j_max};
}

SpectralField DyadicDecomposition::reconstruct() const {
    if (blocks.empty()) throw precondition_error("empty decomposition");
    SpectralField sum = blocks[0];
    for (std::size_t i = 1; i < blocks.size(); ++i) sum += blocks[i];
    return sum;
}

SpectralField dyadic_block(const SpectralField& f, int j) {
    const Grid& g = f.grid();
    SpectralField out(g, f.is_real());
    for (std::size_t i = 1; i < g.size(); ++i) {
        const cplx c = f.coeff(i);
        if (c == cplx(0.0, 0.0)) continue;
        const double w = dyadic_phi_j(std::sqrt(g.k_squared(i)), j);
        if (w != 0.0) out.coeffs()[i] = w * c;
    }
    return out;
}

DyadicDecomposition dyadic_decompose(const SpectralField& f) {
    const DyadicRange range = dyadic_range(f.grid());
    DyadicDecomposition dec;
    dec.j_min = range.j_min;
    dec.blocks.reserve(range.count());
    for (int j = range.j_min; j <= range.j_max; ++j) dec.blocks.push_back(dyadic_block(f, j));
    return dec;
}

}  // namespace nsbesov
