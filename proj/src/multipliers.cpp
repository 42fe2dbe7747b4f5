#include "nsbesov/multipliers.hpp"

#include <cmath>

#include "nsbesov/dyadic.hpp"
#include "nsbesov/errors.hpp"
#include "nsbesov/norms.hpp"

namespace nsbesov {

void SectorPoint::validate() const {
    if (lambda == cplx(0.0, 0.0)) throw precondition_error("sector-violation: lambda = 0");
    if (!(omega > 0.0 && omega < M_PI / 2.0))
        throw precondition_error("sector-violation: omega must lie in (0, pi/2)");
    if (std::abs(std::arg(lambda)) < omega - 1e-14)
        throw precondition_error("sector-violation: |arg(lambda)| < omega");
}

namespace {

bool symbol_is_real(const cplx& v) { return v.imag() == 0.0; }

template <typename SymbolFn>
SpectralField apply_pointwise(const SpectralField& f, SymbolFn&& sym, bool real_symbol) {
    const Grid& g = f.grid();
    SpectralField out(g, f.is_real() && real_symbol);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const cplx c = f.coeff(i);
        if (c == cplx(0.0, 0.0)) continue;
        out.coeffs()[i] = sym(i) * c;
    }
    return out;
}

cplx eval_symbol_checked(const MultiplierSymbol& sym, const Grid& g, std::size_t i) {
    const cplx v = sym.evaluator(g.k_vector(i), std::sqrt(g.k_squared(i)));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw numerical_error("symbol-singular-on-grid: symbol '" + sym.name +
                              "' not finite at a nonzero wavenumber");
    return v;
}

}  // namespace

SpectralField apply_multiplier(const MultiplierSymbol& sym, const SpectralField& f) {
    const Grid& g = f.grid();
    bool real_out = f.is_real();
    SpectralField out(g, true);
    for (std::size_t i = 1; i < g.size(); ++i) {
        const cplx v = eval_symbol_checked(sym, g, i);
        out.coeffs()[i] = v * f.coeff(i);
        if (!symbol_is_real(v)) real_out = false;
    }
    out.set_is_real(real_out);
    return out;
}

VectorField apply_multiplier(const MultiplierSymbol& sym, const VectorField& f) {
    VectorField out(f.grid(), f.is_real());
    for (int d = 0; d < f.ncomp(); ++d) out[d] = apply_multiplier(sym, f[d]);
    return out;
}

SpectralField apply_multiplier_dyadic(const MultiplierSymbol& sym, const SpectralField& f) {
    const Grid& g = f.grid();
    const DyadicRange range = dyadic_range(g);
    SpectralField out(g, f.is_real());
    bool real_out = f.is_real();
    for (int j = range.j_min; j <= range.j_max; ++j) {
        for (std::size_t i = 1; i < g.size(); ++i) {
            const cplx c = f.coeff(i);
            if (c == cplx(0.0, 0.0)) continue;
            const double w = dyadic_phi_j(std::sqrt(g.k_squared(i)), j);
            if (w == 0.0) continue;
            const cplx v = eval_symbol_checked(sym, g, i);
            out.coeffs()[i] += v * w * c;
            if (!symbol_is_real(v)) real_out = false;
        }
    }
    out.set_is_real(real_out);
    return out;
}

VectorField leray_project(const VectorField& v) {
    const Grid& g = v.grid();
    VectorField out(g, v.is_real());
    const int n = g.dim();
    for (std::size_t i = 1; i < g.size(); ++i) {
        const auto k = g.k_vector(i);
        const double k2 = g.k_squared(i);
        cplx kdotu(0.0, 0.0);
        for (int d = 0; d < n; ++d) kdotu += k[d] * v[d].coeff(i);
        const cplx scale = kdotu / k2;
        for (int d = 0; d < n; ++d) out[d].coeffs()[i] = v[d].coeff(i) - k[d] * scale;
    }
    return out;
}

SpectralField frac_laplacian(const SpectralField& f, double a) {
    const Grid& g = f.grid();
    return apply_pointwise(
        f, [&](std::size_t i) { return cplx(std::pow(g.k_squared(i), 0.5 * a), 0.0); }, true);
}

VectorField frac_laplacian(const VectorField& f, double a) {
    VectorField out(f.grid(), f.is_real());
    for (int d = 0; d < f.ncomp(); ++d) out[d] = frac_laplacian(f[d], a);
    return out;
}

SpectralField resolvent_laplacian(const SpectralField& f, const SectorPoint& pt, double b) {
    pt.validate();
    if (!(b >= 0.0)) throw precondition_error("resolvent: b must be >= 0");
    const Grid& g = f.grid();
    return apply_pointwise(
        f, [&](std::size_t i) { return std::pow(pt.lambda - g.k_squared(i), -0.5 * b); }, false);
}

VectorField resolvent_laplacian(const VectorField& f, const SectorPoint& pt, double b) {
    VectorField out(f.grid(), false);
    for (int d = 0; d < f.ncomp(); ++d) out[d] = resolvent_laplacian(f[d], pt, b);
    return out;
}

LpGainResult resolvent_lp_gain(const SpectralField& f, const SectorPoint& pt, double b, double s,
                               double p, double p0) {
    const int n = f.grid().dim();
    if (!(p0 > p)) throw precondition_error("lp-gain: need p0 > p");
    if (!(b >= n / p)) throw precondition_error("condition-b-violation: need b >= n/p");
    LpGainResult res{resolvent_laplacian(f, pt, b), 0.0, 0.0, 0.0};
    res.lhs_norm = besov_value(res.field, s, p0);
    const double exponent = -(b - n * (1.0 / p - 1.0 / p0)) / 2.0;
    res.rhs_scale = std::pow(std::abs(pt.lambda), exponent) * besov_value(f, s, p);
    res.ratio = res.rhs_scale > 0.0 ? res.lhs_norm / res.rhs_scale : 0.0;
    return res;
}

SpectralField composition(const SpectralField& f, const SectorPoint& pt, double a, double b) {
    pt.validate();
    if (!(0.0 <= a && a <= b)) throw precondition_error("composition: need 0 <= a <= b");
    const Grid& g = f.grid();
    return apply_pointwise(
        f,
        [&](std::size_t i) {
            const double k2 = g.k_squared(i);
            return std::pow(k2, 0.5 * a) * std::pow(pt.lambda - k2, -0.5 * b);
        },
        false);
}

VectorField composition(const VectorField& f, const SectorPoint& pt, double a, double b) {
    VectorField out(f.grid(), false);
    for (int d = 0; d < f.ncomp(); ++d) out[d] = composition(f[d], pt, a, b);
    return out;
}

SpectralField heat_semigroup(const SpectralField& f, double t) {
    if (!(t >= 0.0)) throw precondition_error("negative-time: heat semigroup needs t >= 0");
    const Grid& g = f.grid();
    return apply_pointwise(
        f, [&](std::size_t i) { return cplx(std::exp(-t * g.k_squared(i)), 0.0); }, true);
}

VectorField heat_semigroup(const VectorField& f, double t) {
    VectorField out(f.grid(), f.is_real());
    for (int d = 0; d < f.ncomp(); ++d) out[d] = heat_semigroup(f[d], t);
    return out;
}

}  // namespace nsbesov
