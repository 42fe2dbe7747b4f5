#include "nsbesov/random.hpp"

#include <cmath>
#include <random>

#include "nsbesov/errors.hpp"
#include "nsbesov/multipliers.hpp"

namespace nsbesov {

void SpectrumProfile::validate(const Grid& grid) const {
    if (!(alpha > -grid.dim() / 2.0))
        throw precondition_error("spectrum-profile: alpha must exceed -n/2");
    const double nyq = grid.k_unit() * (grid.points_per_axis() / 2.0);
    if (k_cut > nyq + 1e-12)
        throw precondition_error("spectrum-profile: k_cut exceeds the grid Nyquist wavenumber");
}

SpectralField scalar_field_with_spectrum(const Grid& grid, double alpha, double k_cut,
                                         std::uint64_t seed) {
    SpectralField f(grid, true);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
    if (k_cut <= 0.0) k_cut = grid.k_max() + 1.0;
    const int nyq = grid.points_per_axis() / 2;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (i == 0) continue;
        const std::size_t j = grid.conjugate_index(i);
        if (j < i) continue;  // pair already assigned
        const auto m = grid.freqs(i);
        bool nyquist = false;
        for (int d = 0; d < grid.dim(); ++d)
            if (m[d] == -nyq) nyquist = true;
        if (nyquist) continue;  // self-paired planes stay zero
        const double phase = unif(rng);  // one draw per pair, fixed order
        const double kk = std::sqrt(grid.k_squared(i));
        if (kk > k_cut) continue;
        const double amp = std::pow(kk, alpha);
        f.coeffs()[i] = amp * cplx(std::cos(phase), std::sin(phase));
        f.coeffs()[j] = std::conj(f.coeffs()[i]);
    }
    f.zero_mean();
    return f;
}

VectorField vector_field_with_spectrum(const Grid& grid, double alpha, double k_cut,
                                       std::uint64_t seed, bool solenoidal) {
    VectorField v(grid, true);
    for (int d = 0; d < grid.dim(); ++d)
        v[d] = scalar_field_with_spectrum(grid, alpha, k_cut,
                                          seed + 0x9E3779B97F4A7C15ULL * (d + 1));
    if (solenoidal) v = leray_project(v);
    return v;
}

SpectralField random_scalar_field(const Grid& grid, const SpectrumProfile& profile) {
    profile.validate(grid);
    return scalar_field_with_spectrum(grid, profile.alpha, profile.k_cut, profile.seed);
}

VectorField random_field(const Grid& grid, const SpectrumProfile& profile, bool solenoidal) {
    profile.validate(grid);
    return vector_field_with_spectrum(grid, profile.alpha, profile.k_cut, profile.seed, solenoidal);
}

}  // namespace nsbesov
