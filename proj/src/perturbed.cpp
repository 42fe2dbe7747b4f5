#include "nsbesov/perturbed.hpp"

#include <algorithm>
#include <cmath>

#include "nsbesov/errors.hpp"

namespace nsbesov {

// --- Background ---------------------------------------------------------------

Background Background::from_field(const VectorField& U) {
    if (!U.divergence_free_within(1e-10))
        throw precondition_error("background: U must be divergence-free");
    Background bg;
    bg.U = U;
    bg.zero = max_abs_coeff(U) == 0.0;
    bg.weak_ln_norm = bg.zero ? 0.0 : weak_lp_norm(U, static_cast<double>(U.grid().dim()));
    return bg;
}

Background Background::none(const Grid& grid) {
    Background bg;
    bg.U = VectorField(grid, true);
    bg.zero = true;
    bg.weak_ln_norm = 0.0;
    return bg;
}

void ContourSpec::validate(double omega) const {
    if (!(theta > omega && theta < M_PI / 2.0))
        throw precondition_error("contour: theta must lie in (omega, pi/2)");
    if (nodes_arc < 8 || nodes_ray < 8) throw precondition_error("contour: node counts must be >= 8");
    if (R_max != 0.0 && R_max < 10.0) throw precondition_error("contour: R_max must be >= 10");
}

// --- PerturbedOperator ----------------------------------------------------------

PerturbedOperator::PerturbedOperator(Background bg, double p, double omega)
    : bg_(std::move(bg)), p_(p), omega_(omega) {
    if (!(p_ > 1.0)) throw precondition_error("perturbed-operator: p must exceed 1");
    if (!bg_.zero) {
        const Grid& g = bg_.U.grid();
        U_phys_.resize(g.dim());
        for (int d = 0; d < g.dim(); ++d) {
            SpectralField u = bg_.U[d];
            dealias_23(u);
            U_phys_[d] = inverse_transform_complex(u);
        }
    }
}

double PerturbedOperator::critical_s() const {
    return critical_smoothness(bg_.U.grid().dim(), p_);
}

VectorField PerturbedOperator::apply_B(const VectorField& w) const {
    const Grid& g = bg_.U.grid();
    if (w.grid() != g) throw precondition_error("grid-mismatch");
    VectorField out(g, w.is_real());
    if (bg_.zero) return out;

    const int n = g.dim();
    std::vector<std::vector<cplx>> w_phys(n);
    for (int d = 0; d < n; ++d) {
        SpectralField wd = w[d];
        dealias_23(wd);
        w_phys[d] = inverse_transform_complex(wd);
    }
    // T_ij = U_i w_j + w_i U_j; (div T)_j = sum_i i k_i T_ij
    std::vector<std::vector<SpectralField>> T(n, std::vector<SpectralField>(n));
    std::vector<cplx> buf(g.size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            for (std::size_t x = 0; x < g.size(); ++x)
                buf[x] = U_phys_[i][x] * w_phys[j][x] + w_phys[i][x] * U_phys_[j][x];
            SpectralField t = transform_complex(g, buf);
            dealias_23(t);
            T[i][j] = t;
            if (j != i) T[j][i] = std::move(t);
        }
    for (int j = 0; j < n; ++j) {
        for (std::size_t x = 1; x < g.size(); ++x) {
            const auto k = g.k_vector(x);
            cplx acc(0.0, 0.0);
            for (int i = 0; i < n; ++i) acc += cplx(0.0, k[i]) * T[i][j].coeff(x);
            out[j].coeffs()[x] = acc;
        }
    }
    out.set_is_real(w.is_real());
    return leray_project(out);
}

VectorField PerturbedOperator::apply_A(const VectorField& w) const {
    const Grid& g = w.grid();
    VectorField out = apply_B(w);
    for (int d = 0; d < g.dim(); ++d)
        for (std::size_t i = 1; i < g.size(); ++i)
            out[d].coeffs()[i] += g.k_squared(i) * w[d].coeff(i);
    return out;
}

VectorField PerturbedOperator::apply_C_theta(const VectorField& w, double theta) const {
    if (!(theta >= 0.0 && theta <= 2.0))
        throw precondition_error("theta-out-of-range: C_theta needs theta in [0,2]");
    return frac_laplacian(apply_B(frac_laplacian(w, -theta)), -(2.0 - theta));
}

std::pair<VectorField, NeumannReport> PerturbedOperator::resolvent(const VectorField& f,
                                                                   const SectorPoint& pt,
                                                                   double tol,
                                                                   int max_terms) const {
    pt.validate();
    VectorField term = resolvent_laplacian(f, pt, 2.0);
    NeumannReport report;
    report.terms_used = 1;
    if (bg_.zero) {
        report.converged = true;
        return {std::move(term), report};
    }
    const double s = critical_s();
    const double scale = besov_value(term, s, p_);
    VectorField sum = term;
    double prev1 = scale, prev2 = scale;
    int growth_streak = 0;
    for (int m = 1; m < max_terms; ++m) {
        term = resolvent_laplacian(apply_B(term), pt, 2.0);
        sum += term;
        ++report.terms_used;
        const double nrm = besov_value(term, s, p_);
        report.last_term_norm = nrm;
        if (nrm <= tol * std::max(scale, 1e-300)) {
            report.converged = true;
            // require monotone decrease over the trailing terms
            report.converged = report.converged && nrm <= prev1 && prev1 <= prev2;
            return {std::move(sum), report};
        }
        growth_streak = nrm > prev1 ? growth_streak + 1 : 0;
        if (growth_streak >= 3)
            throw numerical_error(
                "neumann-divergence: resolvent increments grew for 3 consecutive terms "
                "(background too large for the smallness regime)");
        prev2 = prev1;
        prev1 = nrm;
    }
    report.converged = false;
    return {std::move(sum), report};
}

VectorField PerturbedOperator::apply_lambda_minus_A(const VectorField& r,
                                                    const SectorPoint& pt) const {
    const Grid& g = r.grid();
    VectorField out = apply_B(r);
    out *= -1.0;
    for (int d = 0; d < g.dim(); ++d)
        for (std::size_t i = 1; i < g.size(); ++i)
            out[d].coeffs()[i] += (pt.lambda - g.k_squared(i)) * r[d].coeff(i);
    return out;
}

// --- Dunford contour --------------------------------------------------------------

namespace {

struct QuadNode {
    cplx lambda;
    cplx weight;  // includes dlambda and traversal sign
};

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    // Newton on Legendre polynomials; nodes on (-1,1)
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < n; ++i) {
        double xi = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = xi;
            for (int k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
            const double step = p1 / dp;
            xi -= step;
            if (std::abs(step) < 1e-15) break;
        }
        double p0 = 1.0, p1 = xi;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        const double dp = n * (xi * p1 - p0) / (xi * xi - 1.0);
        x[i] = xi;
        w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
}

// composite GL panels over [a,b]; appends (node, weight)
void gl_panels(double a, double b, int panels, int per_panel, std::vector<double>& nodes,
               std::vector<double>& weights) {
    std::vector<double> x, w;
    gauss_legendre(per_panel, x, w);
    for (int p = 0; p < panels; ++p) {
        const double lo = a + (b - a) * p / panels;
        const double hi = a + (b - a) * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (int i = 0; i < per_panel; ++i) {
            nodes.push_back(mid + half * x[i]);
            weights.push_back(half * w[i]);
        }
    }
}

// contour nodes for traversal with winding +1 around the spectrum:
// in along the upper ray, counterclockwise arc through -rho, out along the
// lower ray
std::vector<QuadNode> contour_nodes(double theta, int n_arc, int n_ray, double rho, double R_max,
                                    int per_panel) {
    std::vector<QuadNode> out;
    std::vector<double> s, ws;
    gl_panels(std::log(rho), std::log(R_max), std::max(1, n_ray / per_panel), per_panel, s, ws);
    const cplx up = std::exp(cplx(0.0, theta));
    const cplx dn = std::exp(cplx(0.0, -theta));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double r = std::exp(s[i]);
        // upper ray traversed inward: minus sign; dlambda = lambda ds
        out.push_back({r * up, -ws[i] * r * up});
        out.push_back({r * dn, ws[i] * r * dn});
    }
    std::vector<double> psi, wpsi;
    gl_panels(theta, 2.0 * M_PI - theta, std::max(1, n_arc / per_panel), per_panel, psi, wpsi);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const cplx lam = rho * std::exp(cplx(0.0, psi[i]));
        out.push_back({lam, wpsi[i] * cplx(0.0, 1.0) * lam});
    }
    return out;
}

}  // namespace

VectorField PerturbedOperator::semigroup_contour(const VectorField& f, double t,
                                                 const ContourSpec& spec, double tail_tol,
                                                 double neumann_tol) const {
    if (!(t > 0.0)) throw precondition_error("semigroup-contour: t must be positive");
    spec.validate(omega_);
    const Grid& g = f.grid();
    const double rho = std::min(1.0, 1.0 / t);
    const double R_max = spec.R_max > 0.0 ? spec.R_max : std::max(50.0, 30.0 / t);
    const auto nodes = contour_nodes(spec.theta, spec.nodes_arc, spec.nodes_ray, rho, R_max, 16);

    VectorField acc(g, false);
    double outer_resolvent_norm = 0.0;
    double outer_r = 0.0;
    for (const QuadNode& node : nodes) {
        const auto [rf, report] = resolvent(f, SectorPoint{node.lambda, omega_}, neumann_tol, 64);
        if (!report.converged)
            throw numerical_error("neumann-divergence: contour node did not converge");
        const double r_abs = std::abs(node.lambda);
        if (r_abs > outer_r) {
            outer_r = r_abs;
            outer_resolvent_norm = l2_coeff_norm(rf);
        }
        const cplx factor = std::exp(-t * node.lambda) * node.weight / cplx(0.0, 2.0 * M_PI);
        for (int d = 0; d < g.dim(); ++d) {
            const auto& src = rf[d].coeffs();
            auto& dst = acc[d].coeffs();
            for (std::size_t i = 0; i < g.size(); ++i) dst[i] += factor * src[i];
        }
    }

    // ray truncation estimate: |e^{-t lambda}| decays like e^{-t r cos theta}
    const double tail = std::exp(-t * R_max * std::cos(spec.theta)) * outer_resolvent_norm /
                        (M_PI * t * std::cos(spec.theta));
    const double result_scale = l2_coeff_norm(acc);
    if (result_scale > 0.0 && tail > tail_tol * result_scale)
        throw numerical_error("tail-bound-violation: R_max too small for the requested time");

    if (!f.is_real()) return acc;

    // split off the anti-Hermitian residue; the Dunford integral of a real
    // operator applied to a real field is real
    VectorField herm(g, true);
    double anti_worst = 0.0, herm_scale = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const std::size_t j = g.conjugate_index(i);
            const cplx h = 0.5 * (acc[d].coeff(i) + std::conj(acc[d].coeff(j)));
            herm[d].coeffs()[i] = h;
            anti_worst = std::max(anti_worst, std::abs(acc[d].coeff(i) - h));
            herm_scale = std::max(herm_scale, std::abs(h));
        }
    }
    if (herm_scale > 0.0 && anti_worst > 1e-9 * herm_scale)
        throw numerical_error("contour quadrature failed: imaginary residue above 1e-9 relative");
    return herm;
}

// --- exponential time differencing --------------------------------------------------

VectorField PerturbedOperator::nonlinear_rhs(const VectorField& w) const {
    VectorField out = apply_B(w);
    out *= -1.0;
    return out;
}

namespace {

// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2 with series
// fallbacks near z = 0
double phi1(double z) {
    if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
    return std::expm1(z) / z;
}
double phi2(double z) {
    if (std::abs(z) < 1e-5) return 0.5 + z / 6.0 + z * z / 24.0;
    return (std::expm1(z) - z) / (z * z);
}

VectorField apply_phi(const VectorField& v, double h, double (*phi)(double)) {
    const Grid& g = v.grid();
    VectorField out(g, v.is_real());
    for (int d = 0; d < g.dim(); ++d)
        for (std::size_t i = 1; i < g.size(); ++i)
            out[d].coeffs()[i] = phi(-h * g.k_squared(i)) * v[d].coeff(i);
    return out;
}

}  // namespace

// One Cox-Matthews ETD2RK step of w' = Delta w + N(w,t):
//   a = e^{h Delta} w + h phi1(h Delta) N(w, t)
//   w+ = a + h phi2(h Delta) (N(a, t+h) - N(w, t))
// The heat factor is exact; constant-in-time sources have exact discrete
// steady states, and stationary points of the continuous equation are fixed
// points of the map.
VectorField etd2rk_step(const VectorField& w, double h, double t_now,
                        const std::function<VectorField(const VectorField&, double)>& N) {
    const VectorField k1 = N(w, t_now);
    VectorField a = heat_semigroup(w, h);
    VectorField hk1 = apply_phi(k1, h, phi1);
    hk1 *= h;
    a += hk1;
    VectorField dk = N(a, t_now + h);
    dk -= k1;
    VectorField corr = apply_phi(dk, h, phi2);
    corr *= h;
    a += corr;
    return a;
}

VectorField PerturbedOperator::semigroup_timestep(const VectorField& f, double t, double dt) const {
    if (!(t >= 0.0)) throw precondition_error("semigroup-timestep: t must be >= 0");
    if (!(dt > 0.0)) throw precondition_error("semigroup-timestep: dt must be positive");
    if (t == 0.0) return f;
    if (bg_.zero) return heat_semigroup(f, t);
    const int steps = std::max(1, static_cast<int>(std::ceil(t / dt - 1e-12)));
    const double h = t / steps;
    const double in_scale = l2_coeff_norm(f);
    VectorField w = f;
    const auto N = [this](const VectorField& v, double) { return nonlinear_rhs(v); };
    for (int s = 0; s < steps; ++s) {
        w = etd2rk_step(w, h, s * h, N);
        if (l2_coeff_norm(w) > 10.0 * in_scale)
            throw numerical_error("unstable-step: norm grew beyond 10x the input");
    }
    return w;
}

// --- Duhamel ----------------------------------------------------------------------

VectorField PerturbedOperator::duhamel(const std::function<VectorField(double)>& source, double t0,
                                       double t, int base_panels, int gauss_per_panel,
                                       double rel_tol, double semigroup_dt) const {
    if (!(t > t0 && t0 >= 0.0)) throw precondition_error("duhamel: need t > t0 >= 0");
    const Grid& g = bg_.U.grid();

    auto propagate = [&](const VectorField& v, double span) {
        if (span <= 0.0) return v;
        if (bg_.zero) return heat_semigroup(v, span);
        return semigroup_timestep(v, span, semigroup_dt);
    };

    auto evaluate = [&](int panels) {
        // graded edges clustering at sigma = t with ratio-2 panel widths
        std::vector<double> edges;
        edges.push_back(t0);
        for (int k = panels - 1; k >= 1; --k) edges.push_back(t - (t - t0) * std::ldexp(1.0, -k));
        edges.push_back(t);
        VectorField acc(g, true);
        std::vector<double> x, w;
        gauss_legendre(gauss_per_panel, x, w);
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double mid = 0.5 * (edges[e] + edges[e + 1]);
            const double half = 0.5 * (edges[e + 1] - edges[e]);
            for (int i = 0; i < gauss_per_panel; ++i) {
                const double sigma = mid + half * x[i];
                VectorField term = propagate(source(sigma), t - sigma);
                term *= half * w[i];
                acc += term;
            }
        }
        return acc;
    };

    int panels = base_panels;
    VectorField coarse = evaluate(panels);
    for (int round = 0; round < 3; ++round) {
        panels *= 2;
        const VectorField fine = evaluate(panels);
        VectorField diff = fine;
        diff -= coarse;
        const double scale = l2_coeff_norm(fine);
        if (scale == 0.0 || l2_coeff_norm(diff) <= rel_tol * scale) return fine;
        coarse = fine;
    }
    throw numerical_error("quadrature-not-converged: Duhamel panel doubling did not settle");
}

std::vector<VectorField> PerturbedOperator::duhamel_constant_source(
    const VectorField& F, const std::vector<double>& t_grid, double dt, double dt_growth,
    double dt_max) const {
    const Grid& g = F.grid();
    std::vector<VectorField> out;
    out.reserve(t_grid.size());
    if (bg_.zero) {
        // exact per-mode integral: (1 - e^{-t|k|^2})/|k|^2
        for (double t : t_grid) {
            VectorField v(g, F.is_real());
            for (int d = 0; d < g.dim(); ++d)
                for (std::size_t i = 1; i < g.size(); ++i) {
                    const double k2 = g.k_squared(i);
                    v[d].coeffs()[i] = F[d].coeff(i) * ((1.0 - std::exp(-t * k2)) / k2);
                }
            out.push_back(std::move(v));
        }
        return out;
    }
    // ETD2RK for v' = Delta v + (-B[v] + F)
    VectorField v(g, F.is_real());
    double now = 0.0;
    const auto N = [this, &F](const VectorField& w, double) {
        VectorField r = nonlinear_rhs(w);
        r += F;
        return r;
    };
    for (double t : t_grid) {
        if (!(t >= now)) throw precondition_error("duhamel: t_grid must be nondecreasing");
        while (now < t - 1e-14) {
            const double h = std::min({std::max(dt, std::min(dt_growth * now, dt_max)), t - now});
            v = etd2rk_step(v, h, now, N);
            now += h;
        }
        out.push_back(v);
    }
    return out;
}

// --- verifiers -------------------------------------------------------------------

std::vector<RatioRow> PerturbedOperator::verify_smoothing(const VectorField& f, double s,
                                                          double tau,
                                                          const std::vector<double>& t_grid,
                                                          double dt) const {
    if (!(s > -2.0 && s < 1.0)) throw precondition_error("exponent-out-of-range: need -2 < s < 1");
    if (!(tau > 0.0 && tau < 1.0 - s))
        throw precondition_error("exponent-out-of-range: gain estimate needs tau in (0, 1-s)");
    const double uplus = 1.0 + bg_.weak_ln_norm;
    const double base = besov_value(f, s, p_);
    std::vector<RatioRow> rows;
    VectorField state = f;
    double now = 0.0;
    for (double t : t_grid) {
        state = semigroup_timestep(state, t - now, dt);
        now = t;
        const double uniform = besov_value(state, s, p_);
        rows.push_back({"uniform", t, uniform, uplus * base, uniform / (uplus * base)});
        const double gain = besov_norm(state, BesovIndex{s + tau, p_, 1.0}).value;
        const double gain_rhs = std::pow(t, -tau / 2.0) * uplus * base;
        rows.push_back({"gain", t, gain, gain_rhs, gain / gain_rhs});
        VectorField diff = state;
        diff -= f;
        const double cont = besov_value(diff, s - tau, p_);
        const double cont_rhs = std::pow(t, tau / 2.0) * base;
        rows.push_back({"continuity", t, cont, cont_rhs, cont / cont_rhs});
    }
    return rows;
}

GeneratorFit PerturbedOperator::verify_generator(const VectorField& f,
                                                 const std::vector<double>& t_grid, double s,
                                                 double tau, double dt) const {
    if (!(s > 0.0 && s < 1.0)) throw precondition_error("exponent-out-of-range: need 0 < s < 1");
    if (!(tau >= 0.0 && tau <= 2.0 && tau < s))
        throw precondition_error("exponent-out-of-range: need 0 <= tau <= 2 and tau < s");
    const VectorField Af = apply_A(f);
    GeneratorFit fit;
    for (double t : t_grid) {
        VectorField resid = semigroup_timestep(f, t, dt);
        resid -= f;
        resid *= 1.0 / t;
        resid += Af;
        fit.times.push_back(t);
        fit.residuals.push_back(besov_value(resid, s - 2.0 - tau, p_));
    }
    const LogLogFit ls = fit_loglog(fit.times, fit.residuals);
    fit.slope = ls.slope;
    fit.r2 = ls.r2;
    return fit;
}

LogLogFit fit_loglog(const std::vector<double>& t, const std::vector<double>& y) {
    if (t.size() != y.size() || t.size() < 2)
        throw precondition_error("fit: need at least two samples");
    const int m = static_cast<int>(t.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int i = 0; i < m; ++i) {
        if (!(t[i] > 0.0) || !(y[i] > 0.0))
            throw precondition_error("nonpositive-norm: log-log fit needs positive data");
        const double X = std::log(t[i]), Y = std::log(y[i]);
        sx += X;
        sy += Y;
        sxx += X * X;
        sxy += X * Y;
        syy += Y * Y;
    }
    LogLogFit fit;
    const double denom = m * sxx - sx * sx;
    fit.slope = (m * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / m;
    const double sse_num = (m * sxy - sx * sy);
    const double var_y = m * syy - sy * sy;
    fit.r2 = var_y > 0.0 ? (sse_num * sse_num) / (denom * var_y) : 1.0;
    return fit;
}

}  // namespace nsbesov
