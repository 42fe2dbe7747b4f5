#include "nsbesov/solvers.hpp"

#include <algorithm>
#include <cmath>

#include "nsbesov/errors.hpp"

namespace nsbesov {

VectorField convective_divergence(const VectorField& u) {
    const Grid& g = u.grid();
    const int n = g.dim();
    std::vector<std::vector<cplx>> u_phys(n);
    for (int d = 0; d < n; ++d) {
        SpectralField ud = u[d];
        dealias_23(ud);
        u_phys[d] = inverse_transform_complex(ud);
    }
    std::vector<std::vector<SpectralField>> T(n, std::vector<SpectralField>(n));
    std::vector<cplx> buf(g.size());
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            for (std::size_t x = 0; x < g.size(); ++x) buf[x] = u_phys[i][x] * u_phys[j][x];
            SpectralField t = transform_complex(g, buf);
            dealias_23(t);
            T[i][j] = t;
            if (j != i) T[j][i] = std::move(t);
        }
    VectorField div(g, u.is_real());
    for (int j = 0; j < n; ++j) {
        for (std::size_t x = 1; x < g.size(); ++x) {
            const auto k = g.k_vector(x);
            cplx acc(0.0, 0.0);
            for (int i = 0; i < n; ++i) acc += cplx(0.0, k[i]) * T[i][j].coeff(x);
            div[j].coeffs()[x] = acc;
        }
    }
    div.set_is_real(u.is_real());
    return leray_project(div);
}

// --- stationary Picard -----------------------------------------------------------

StationaryResult solve_stationary(const VectorField& f, double p, std::optional<double> s_extra,
                                  double tol, int max_iter) {
    const Grid& g = f.grid();
    const int n = g.dim();
    if (!(n / 2.0 < p && p < n))
        throw precondition_error("p-out-of-range: stationary solver needs n/2 < p < n");
    const double sp = critical_smoothness(n, p);

    StationaryResult res;
    res.forcing_norm = besov_value(f, sp - 2.0, p);
    const VectorField U0 = frac_laplacian(leray_project(f), -2.0);
    VectorField U = U0;
    res.iterations = 1;
    res.iterate_norms.push_back(besov_value(U, sp, p));

    if (res.forcing_norm == 0.0) {
        res.U = U;
        res.critical_norm = 0.0;
        return res;
    }

    int non_contraction_streak = 0;
    for (int m = 1; m < max_iter; ++m) {
        VectorField next = U0;
        next -= frac_laplacian(convective_divergence(U), -2.0);
        VectorField delta = next;
        delta -= U;
        const double inc = besov_value(delta, sp, p);
        res.increments.push_back(inc);
        ++res.iterations;
        if (res.increments.size() >= 2) {
            const double factor = inc / res.increments[res.increments.size() - 2];
            res.contraction_factors.push_back(factor);
            non_contraction_streak = factor >= 1.0 ? non_contraction_streak + 1 : 0;
            if (non_contraction_streak >= 5)
                throw numerical_error(
                    "non-contraction: stationary iteration failed to contract for 5 "
                    "consecutive steps (forcing too large)");
        }
        U = std::move(next);
        res.iterate_norms.push_back(besov_value(U, sp, p));
        if (inc <= tol * std::max(res.iterate_norms.back(), 1e-300)) break;
    }

    res.critical_norm = res.iterate_norms.back();
    // fixed-point defect, relative
    VectorField defect = U;
    defect += frac_laplacian(convective_divergence(U), -2.0);
    defect -= U0;
    res.residual = besov_value(defect, sp, p) / std::max(res.critical_norm, 1e-300);
    if (s_extra) {
        res.extra_norm = besov_value(U, *s_extra, p);
        const double fs = besov_value(f, *s_extra - 2.0, p);
        if (fs > 0.0) res.extra_ratio = *res.extra_norm / fs;
    }
    res.U = std::move(U);
    return res;
}

// --- evolution paths ---------------------------------------------------------------

int EvolutionPath::index_of(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return static_cast<int>(i);
    return -1;
}

namespace {

void check_samples(const std::vector<double>& sample_times) {
    if (sample_times.empty()) throw precondition_error("sample times must be nonempty");
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
        if (!(sample_times[i] > 0.0)) throw precondition_error("sample times must be positive");
        if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
            throw precondition_error("sample times must be strictly increasing");
    }
}

}  // namespace

PicardPath solve_perturbation_picard(const VectorField& b, const Background& bg, double p,
                                     const std::vector<double>& sample_times, int max_picard,
                                     double tol, int substeps) {
    check_samples(sample_times);
    if (!b.divergence_free_within(1e-10))
        throw precondition_error("perturbation data must be divergence-free");
    const Grid& g = b.grid();
    const PerturbedOperator op(bg, p);
    const double sp = op.critical_s();
    const std::size_t ns = sample_times.size();

    // linear part w0(t_i) = e^{-t A} b, stepped cumulatively through the grid
    std::vector<VectorField> w0;
    w0.reserve(ns + 1);
    w0.push_back(b);
    {
        VectorField state = b;
        double now = 0.0;
        for (double t : sample_times) {
            const double span = t - now;
            state = op.semigroup_timestep(state, span, span / substeps);
            now = t;
            w0.push_back(state);
        }
    }

    std::vector<double> all_times;
    all_times.push_back(0.0);
    for (double t : sample_times) all_times.push_back(t);

    double w0_scale = 0.0;
    for (const auto& s : w0) w0_scale = std::max(w0_scale, besov_value(s, sp, p));

    std::vector<VectorField> w = w0;
    PicardPath out;

    // spectral piecewise-linear interpolation of the quadratic source
    auto make_source = [&](const std::vector<VectorField>& states) {
        std::vector<VectorField> q;
        q.reserve(states.size());
        for (const auto& s : states) q.push_back(convective_divergence(s));
        return q;
    };

    auto duhamel_on_grid = [&](const std::vector<VectorField>& q) {
        // v' = Delta v + (-B[v] + q(t)), v(0) = 0, sampled on all_times
        std::vector<VectorField> path;
        path.reserve(all_times.size());
        VectorField v(g, true);
        path.push_back(v);
        for (std::size_t i = 1; i < all_times.size(); ++i) {
            const double t0 = all_times[i - 1], t1 = all_times[i];
            const VectorField& q0 = q[i - 1];
            const VectorField& q1 = q[i];
            const auto N = [&](const VectorField& z, double t) {
                const double theta = (t - t0) / (t1 - t0);
                VectorField r = op.apply_B(z);
                r *= -1.0;
                VectorField src = q0;
                src *= (1.0 - theta);
                VectorField src1 = q1;
                src1 *= theta;
                src += src1;
                r += src;
                return r;
            };
            const double h = (t1 - t0) / substeps;
            for (int s = 0; s < substeps; ++s) v = etd2rk_step(v, h, t0 + s * h, N);
            path.push_back(v);
        }
        return path;
    };

    double prev_inc = kInfinity;
    int growth_streak = 0;
    for (int m = 0; m < max_picard; ++m) {
        const auto q = make_source(w);
        const auto corr = duhamel_on_grid(q);
        double inc = 0.0;
        std::vector<VectorField> next;
        next.reserve(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            VectorField wi = w0[i];
            wi -= corr[i];
            VectorField d = wi;
            d -= w[i];
            inc = std::max(inc, besov_value(d, sp, p));
            next.push_back(std::move(wi));
        }
        w = std::move(next);
        ++out.iterations;
        out.final_increment = inc;
        if (inc <= tol * std::max(w0_scale, 1e-300)) break;
        growth_streak = inc > prev_inc ? growth_streak + 1 : 0;
        if (growth_streak >= 3)
            throw numerical_error("picard-divergence: iteration increments grew for 3 "
                                  "consecutive sweeps (data too large)");
        prev_inc = inc;
        if (m == max_picard - 1)
            throw numerical_error("picard-divergence: iteration did not reach tolerance");
    }

    // integral-equation residual on the final iterate
    {
        const auto q = make_source(w);
        const auto corr = duhamel_on_grid(q);
        double worst = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            VectorField r = w[i];
            r -= w0[i];
            r += corr[i];
            worst = std::max(worst, besov_value(r, sp, p));
        }
        out.integral_residual = worst / std::max(w0_scale, 1e-300);
    }

    out.path.times = std::move(all_times);
    out.path.states = std::move(w);
    return out;
}

EvolutionPath solve_ns_direct(const VectorField& a, const VectorField& f, double T, double dt,
                              const std::vector<double>& sample_times, bool disable_nonlinearity) {
    check_samples(sample_times);
    if (!(dt > 0.0) || !(T > 0.0)) throw precondition_error("solve_ns_direct: need T, dt > 0");
    if (!a.divergence_free_within(1e-10))
        throw precondition_error("initial data must be divergence-free");
    if (sample_times.back() > T + 1e-12) throw precondition_error("sample beyond the horizon");
    const Grid& g = a.grid();
    const VectorField Pf = leray_project(f);
    const bool forced = max_abs_coeff(Pf) > 0.0;

    const auto N = [&](const VectorField& u, double) {
        VectorField r = Pf;
        if (!disable_nonlinearity) r -= convective_divergence(u);
        return r;
    };

    EvolutionPath path;
    path.times.push_back(0.0);
    path.states.push_back(a);
    VectorField u = a;
    double now = 0.0;
    double energy = 0.0;
    for (const cplx& c : u[0].coeffs()) energy += std::norm(c);
    for (int d = 1; d < g.dim(); ++d)
        for (const cplx& c : u[d].coeffs()) energy += std::norm(c);

    const double in_scale = l2_coeff_norm(a) + l2_coeff_norm(Pf);
    for (double t : sample_times) {
        while (now < t - 1e-14) {
            const double h = std::min(dt, t - now);
            u = etd2rk_step(u, h, now, N);
            now += h;
            const double e2 = l2_coeff_norm(u);
            if (e2 > 10.0 * std::max(in_scale, 1e-300))
                throw numerical_error("unstable-step: norm grew beyond 10x the data scale");
            if (!forced) {
                const double enew = e2 * e2;
                if (enew > energy * (1.0 + 1e-10))
                    throw numerical_error("unstable-step: unforced kinetic energy increased");
                energy = enew;
            }
        }
        path.times.push_back(t);
        path.states.push_back(u);
    }
    return path;
}

double residual_differential(const EvolutionPath& path, const VectorField& f, const Background& bg,
                             double p, double t) {
    const int idx = path.index_of(t);
    if (idx <= 0 || idx + 1 >= static_cast<int>(path.times.size()))
        throw precondition_error("t-out-of-range: need an interior sample with neighbors");
    const Grid& g = path.states[idx].grid();
    const double sp = critical_smoothness(g.dim(), p);
    const PerturbedOperator op(bg, p);

    const double h2 = path.times[idx + 1] - path.times[idx - 1];
    VectorField quot = path.states[idx + 1];
    quot -= path.states[idx - 1];
    quot *= 1.0 / h2;

    VectorField resid = quot;
    resid += op.apply_A(path.states[idx]);
    resid += convective_divergence(path.states[idx]);
    resid -= leray_project(f);
    return besov_value(resid, sp - 2.0, p);
}

ContinuityFit check_initial_continuity(const EvolutionPath& path, const VectorField& a,
                                       double alpha, double p) {
    if (!(alpha >= 0.0 && alpha <= 2.0))
        throw precondition_error("alpha must lie in [0,2]");
    const Grid& g = a.grid();
    const double sp = critical_smoothness(g.dim(), p);
    ContinuityFit fit;
    // earliest sampled decade (t > 0)
    double t_lo = kInfinity;
    for (std::size_t i = 0; i < path.times.size(); ++i)
        if (path.times[i] > 0.0) t_lo = std::min(t_lo, path.times[i]);
    if (!(t_lo < kInfinity)) throw precondition_error("insufficient-samples");
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        const double t = path.times[i];
        if (t <= 0.0 || t > 10.0 * t_lo + 1e-12) continue;
        VectorField d = path.states[i];
        d -= a;
        const double nrm = besov_value(d, sp - alpha, p);
        if (nrm > 0.0) {
            fit.times.push_back(t);
            fit.norms.push_back(nrm);
        }
    }
    if (fit.times.size() < 3) throw precondition_error("insufficient-samples: need >= 3 in a decade");
    if (alpha == 0.0) {
        // boundedness only: no meaningful rate
        const LogLogFit ls = fit_loglog(fit.times, fit.norms);
        fit.slope = ls.slope;
        fit.pass = fit.slope >= -0.1;
        return fit;
    }
    const LogLogFit ls = fit_loglog(fit.times, fit.norms);
    fit.slope = ls.slope;
    fit.pass = fit.slope >= alpha / 2.0 - 0.1;
    return fit;
}

}  // namespace nsbesov
