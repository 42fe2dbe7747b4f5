#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "nsbesov/field.hpp"
#include "nsbesov/multipliers.hpp"
#include "nsbesov/norms.hpp"

namespace nsbesov {

// Stationary background U of the perturbation B[w] = P div(U (x) w + w (x) U).
struct Background {
    VectorField U;
    double weak_ln_norm = 0.0;
    bool zero = true;

    static Background from_field(const VectorField& U);
    static Background none(const Grid& grid);
};

// Discretization of the sector contour Gamma = Gamma_- u Gamma_0 u Gamma_+.
// The arc radius is scaled to min(1, 1/t) and the rays truncated at
// max(50, 30/t) unless R_max is set explicitly; quadrature is composite
// Gauss-Legendre with the given node totals.
struct ContourSpec {
    double theta = M_PI / 3.0;
    int nodes_arc = 64;
    int nodes_ray = 96;
    double R_max = 0.0;  // 0 = automatic max(50, 30/t)

    void validate(double omega) const;
};

struct NeumannReport {
    int terms_used = 0;
    double last_term_norm = 0.0;
    bool converged = false;
};

struct GeneratorFit {
    std::vector<double> times;
    std::vector<double> residuals;
    double slope = 0.0;
    double r2 = 0.0;
};

// One row of a verifier table: an estimate evaluated at one abscissa.
struct RatioRow {
    std::string tag;
    double abscissa;  // t or |lambda|
    double lhs_norm;
    double rhs_scale;
    double ratio;
};

// A = -Delta + B around the background U, with the function-space context
// (integrability p, sector angle omega) fixed at construction.
class PerturbedOperator {
  public:
    PerturbedOperator(Background bg, double p, double omega = M_PI / 6.0);

    const Background& background() const { return bg_; }
    double p() const { return p_; }
    double omega() const { return omega_; }
    double critical_s() const;  // s(p) = -1 + n/p

    // P div(U (x) w + w (x) U); output divergence-free, dealiased.
    VectorField apply_B(const VectorField& w) const;
    // -Delta w + B[w]
    VectorField apply_A(const VectorField& w) const;
    // C_theta = (-Delta)^{-(2-theta)/2} B (-Delta)^{-theta/2}, theta in [0,2]
    VectorField apply_C_theta(const VectorField& w, double theta) const;

    // R_A(lambda) f by the Neumann series (1 - R_Delta B)^{-1} R_Delta.
    // Increments are measured in B^{s(p)}_{p,inf} relative to the leading
    // term; three consecutive growing increments raise neumann-divergence.
    std::pair<VectorField, NeumannReport> resolvent(const VectorField& f, const SectorPoint& pt,
                                                    double tol = 1e-10, int max_terms = 64) const;

    // (lambda - A) r, for residual checks of the resolvent identity
    VectorField apply_lambda_minus_A(const VectorField& r, const SectorPoint& pt) const;

    // e^{-tA} f via the Dunford integral over the contour. The result is the
    // Hermitian part of the quadrature sum; an anti-Hermitian residue above
    // 1e-9 relative (or a ray-truncation tail estimate above `tail_tol`)
    // is an error.
    VectorField semigroup_contour(const VectorField& f, double t, const ContourSpec& spec = {},
                                  double tail_tol = 1e-6, double neumann_tol = 1e-10) const;

    // e^{-tA} f by exponential time differencing: exact e^{h Delta}
    // integrating factor, Heun two-stage treatment of -B (second order).
    // U = 0 reproduces the heat multiplier at machine precision.
    VectorField semigroup_timestep(const VectorField& f, double t, double dt) const;

    // int_{t0}^t e^{-(t-sigma)A} F(sigma) dsigma with graded Gauss-Legendre
    // panels clustering at sigma = t; panel count doubles until the result
    // moves by less than rel_tol (error quadrature-not-converged otherwise).
    VectorField duhamel(const std::function<VectorField(double)>& source, double t0, double t,
                        int base_panels = 6, int gauss_per_panel = 8, double rel_tol = 1e-5,
                        double semigroup_dt = 0.02) const;

    // Duhamel integral of a constant-in-time source on a whole time grid in
    // one exponential-integrator pass: v' = -A v + F, v(0) = 0. The step is
    // max(dt, dt_growth * t), so long saturated windows stay affordable.
    std::vector<VectorField> duhamel_constant_source(const VectorField& F,
                                                     const std::vector<double>& t_grid, double dt,
                                                     double dt_growth = 0.0,
                                                     double dt_max = 0.25) const;

    // Smoothing-estimate sweeps for the three semigroup bounds; rows tagged
    // "uniform", "gain", "continuity".
    std::vector<RatioRow> verify_smoothing(const VectorField& f, double s, double tau,
                                           const std::vector<double>& t_grid, double dt) const;

    // Difference-quotient generator residual ||(e^{-tA}f - f)/t + A f|| in
    // B^{s-2-tau}_{p,inf}, fitted log-log against t.
    GeneratorFit verify_generator(const VectorField& f, const std::vector<double>& t_grid, double s,
                                  double tau, double dt) const;

  private:
    VectorField nonlinear_rhs(const VectorField& w) const;  // -B[w]

    Background bg_;
    double p_;
    double omega_;
    std::vector<std::vector<cplx>> U_phys_;  // dealiased physical samples of U
};

// One Cox-Matthews ETD2RK step of w' = Delta w + N(w,t); the heat factor is
// exact, constant sources have exact discrete steady states, and stationary
// points of the continuous equation are fixed points of the map.
VectorField etd2rk_step(const VectorField& w, double h, double t_now,
                        const std::function<VectorField(const VectorField&, double)>& N);

// Simple least squares on (log t, log y); r2 is the squared correlation.
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LogLogFit fit_loglog(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace nsbesov
