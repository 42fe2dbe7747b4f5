#pragma once

#include <functional>
#include <string>

#include "nsbesov/field.hpp"

namespace nsbesov {

// Scalar Fourier symbol m(xi), defined for xi != 0. `homogeneity` is the
// degree a when m is a-homogeneous (informational).
struct MultiplierSymbol {
    std::function<cplx(const std::array<double, 3>&, double /*|xi|*/)> evaluator;
    double homogeneity = 0.0;
    std::string name;
};

// Point of the sector S_omega = {z != 0 : |arg z| >= omega}.
struct SectorPoint {
    cplx lambda;
    double omega = M_PI / 6.0;

    void validate() const;
};

// m(D)f as pointwise symbol application on the grid (the dyadic-sum
// realization telescopes to the same thing; see apply_multiplier_dyadic).
// Throws if the symbol is not finite at some nonzero grid wavenumber.
SpectralField apply_multiplier(const MultiplierSymbol& sym, const SpectralField& f);
VectorField apply_multiplier(const MultiplierSymbol& sym, const VectorField& f);

// Cross-check path: sum_j m phi(./2^j) f-hat over the grid's dyadic range.
SpectralField apply_multiplier_dyadic(const MultiplierSymbol& sym, const SpectralField& f);

// Helmholtz/Leray projection, symbol matrix delta_ij - xi_i xi_j / |xi|^2.
VectorField leray_project(const VectorField& v);

// (-Delta)^{a/2}: |xi|^a. Negative a is fine (k = 0 is excluded).
SpectralField frac_laplacian(const SpectralField& f, double a);
VectorField frac_laplacian(const VectorField& f, double a);

// (lambda + Delta)^{-b/2}: (lambda - |xi|^2)^{-b/2}, principal branch.
// b = 2 is the resolvent R_Delta(lambda).
SpectralField resolvent_laplacian(const SpectralField& f, const SectorPoint& pt, double b);
VectorField resolvent_laplacian(const VectorField& f, const SectorPoint& pt, double b);

// Same field as resolvent_laplacian plus the certified L^p-gain ratio
//   ||out||_{B^s_{p0,q}} vs |lambda|^{-(b - n(1/p - 1/p0))/2} ||f||_{B^s_{p,q}}
// Requires p0 > p and b >= n/p.
struct LpGainResult {
    SpectralField field;
    double lhs_norm;
    double rhs_scale;
    double ratio;
};
LpGainResult resolvent_lp_gain(const SpectralField& f, const SectorPoint& pt, double b, double s,
                               double p, double p0);

// |xi|^a (lambda - |xi|^2)^{-b/2} with 0 <= a <= b.
SpectralField composition(const SpectralField& f, const SectorPoint& pt, double a, double b);
VectorField composition(const VectorField& f, const SectorPoint& pt, double a, double b);

// e^{t Delta}: e^{-t |xi|^2}, t >= 0.
SpectralField heat_semigroup(const SpectralField& f, double t);
VectorField heat_semigroup(const VectorField& f, double t);

}  // namespace nsbesov
