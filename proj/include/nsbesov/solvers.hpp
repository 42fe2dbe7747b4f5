#pragma once

#include <optional>
#include <vector>

#include "nsbesov/perturbed.hpp"

namespace nsbesov {

// P div(u (x) u), dealiased: the projected convective term.
VectorField convective_divergence(const VectorField& u);

struct StationaryResult {
    VectorField U;
    int iterations = 0;
    std::vector<double> increments;            // ||U_{m+1} - U_m|| in the critical norm
    std::vector<double> contraction_factors;   // successive increment ratios
    std::vector<double> iterate_norms;         // ||U_m|| history
    double critical_norm = 0.0;                // ||U|| in B^{s(p)}_{p,inf}
    double forcing_norm = 0.0;                 // ||f|| in B^{s(p)-2}_{p,inf}
    std::optional<double> extra_norm;          // ||U|| in B^{s_extra}_{p,inf}
    std::optional<double> extra_ratio;         // vs ||f|| in B^{s_extra-2}_{p,inf}
    double residual = 0.0;                     // relative fixed-point defect
};

// Successive approximation U_{m+1} = (-Delta)^{-1} P f - (-Delta)^{-1} P div(U_m (x) U_m).
// Requires n/2 < p < n. Throws numerical_error("non-contraction...") when the
// increment ratios stay >= 1 for five consecutive iterations.
StationaryResult solve_stationary(const VectorField& f, double p,
                                  std::optional<double> s_extra = std::nullopt, double tol = 1e-10,
                                  int max_iter = 60);

struct EvolutionPath {
    std::vector<double> times;
    std::vector<VectorField> states;

    int index_of(double t) const;  // exact sample lookup, -1 if absent
};

struct PicardPath {
    EvolutionPath path;
    int iterations = 0;
    double final_increment = 0.0;   // sup-over-samples critical-norm increment
    double integral_residual = 0.0; // ||w - e^{-tA}b + B(w,w)|| / ||w||, sup over samples
};

// Picard iterates w_{m+1}(t) = e^{-tA} b - B(w_m, w_m)(t) evaluated on the
// sample grid; the Duhamel term is re-integrated on that grid by ETD2RK with
// a piecewise-linear source. substeps subdivide every sample interval.
PicardPath solve_perturbation_picard(const VectorField& b, const Background& bg, double p,
                                     const std::vector<double>& sample_times, int max_picard = 16,
                                     double tol = 1e-8, int substeps = 4);

// Exponential-integrator evolution of the projected equation
// u' = Delta u - P div(u (x) u) + P f, sampled at the given times.
// With f = 0 the kinetic energy must not increase (monitored per step).
EvolutionPath solve_ns_direct(const VectorField& a, const VectorField& f, double T, double dt,
                              const std::vector<double>& sample_times,
                              bool disable_nonlinearity = false);

// || (w(t+h) - w(t-h)) / 2h + A w(t) + P div(w (x) w)(t) - P f || in
// B^{s(p)-2}_{p,inf} at an interior sample; O(h^2) + solver tolerance.
double residual_differential(const EvolutionPath& path, const VectorField& f, const Background& bg,
                             double p, double t);

struct ContinuityFit {
    std::vector<double> times;
    std::vector<double> norms;
    double slope = 0.0;
    bool pass = false;  // slope >= alpha/2 - 0.1
};

// Rate of attainment of the initial value: log-log slope of
// ||u(t) - a||_{B^{s(p)-alpha}_{p,inf}} over the earliest sampled decade.
ContinuityFit check_initial_continuity(const EvolutionPath& path, const VectorField& a,
                                       double alpha, double p);

}  // namespace nsbesov
