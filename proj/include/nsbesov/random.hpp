#pragma once

#include <cstdint>

#include "nsbesov/field.hpp"

namespace nsbesov {

// Algebraic spectrum |u(k)| ~ |k|^alpha up to the cutoff k_cut, random
// phases, deterministic in the seed.
struct SpectrumProfile {
    double alpha = 1.0;
    double k_cut = 0.0;  // 0 means the grid maximum
    std::uint64_t seed = 0;

    void validate(const Grid& grid) const;
};

// Real scalar field with the prescribed spectrum. Identical seeds give
// bit-identical fields.
SpectralField random_scalar_field(const Grid& grid, const SpectrumProfile& profile);

// Real vector field, one independent stream per component. `solenoidal`
// applies the Leray projection after generation, so the solenoidal output
// equals the projected non-solenoidal one.
VectorField random_field(const Grid& grid, const SpectrumProfile& profile, bool solenoidal);

// Generator without the SpectrumProfile range checks, for synthesizing
// steeper-than--n/2 low-frequency envelopes (experiment data, flat Besov
// profiles). k_cut = 0 means no cutoff (the full lattice).
SpectralField scalar_field_with_spectrum(const Grid& grid, double alpha, double k_cut,
                                         std::uint64_t seed);
VectorField vector_field_with_spectrum(const Grid& grid, double alpha, double k_cut,
                                       std::uint64_t seed, bool solenoidal);

}  // namespace nsbesov
