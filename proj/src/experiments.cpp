#include "nsbesov/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nsbesov/errors.hpp"
#include "nsbesov/random.hpp"
#include "nsbesov/snapshot.hpp"

namespace nsbesov {

using ordered_json = nlohmann::ordered_json;

// --- config ---------------------------------------------------------------------

std::vector<double> ExperimentConfig::sample_times() const {
    std::vector<double> ts;
    for (double t = t_min; t <= t_max * (1.0 + 1e-9); t *= std::sqrt(2.0)) ts.push_back(t);
    if (ts.empty() || ts.back() < 0.99 * t_max) ts.push_back(t_max);
    return ts;
}

void ExperimentConfig::validate() const {
    if (n != 2 && n != 3) throw precondition_error("config: n must be 2 or 3");
    if (!(n / 2.0 < p && p < n)) throw precondition_error("config: need n/2 < p < n");
    const double sp = s_p();
    if (!(tau_H > 0.0 && tau_H < 2.0 - n / p))
        throw precondition_error("config: tau_H must lie in (0, 2 - n/p)");
    if (!(s > 0.0 && s < sp)) throw precondition_error("config: s must lie in (0, s(p))");
    if (!(tau_L > 0.0 && tau_L <= sp - s + 1e-12))
        throw precondition_error("config: tau_L must lie in (0, s(p) - s]");
    if (!(t_min > 0.0 && t_min < t_max)) throw precondition_error("config: need 0 < t_min < t_max");
    const double window = 0.1 * std::pow(L / (2.0 * M_PI), 2);
    if (t_max > window * (1.0 + 1e-9))
        throw precondition_error("window-violation: t_max exceeds 0.1 (L/2pi)^2");
    if (!(dt > 0.0)) throw precondition_error("config: dt must be positive");
    if (method != "direct" && method != "picard")
        throw precondition_error("config: method must be 'direct' or 'picard'");
    if (!(epsilon >= 0.0) || !(forcing_amplitude >= 0.0))
        throw precondition_error("config: amplitudes must be nonnegative");
}

namespace {

void apply_key(ExperimentConfig& cfg, const std::string& key, const ordered_json& value) {
    if (key == "n") cfg.n = value.get<int>();
    else if (key == "N") cfg.N = value.get<int>();
    else if (key == "L") cfg.L = value.get<double>();
    else if (key == "p") cfg.p = value.get<double>();
    else if (key == "s") cfg.s = value.get<double>();
    else if (key == "tau_H") cfg.tau_H = value.get<double>();
    else if (key == "tau_L") cfg.tau_L = value.get<double>();
    else if (key == "forcing_amplitude") cfg.forcing_amplitude = value.get<double>();
    else if (key == "forcing_alpha") cfg.forcing_alpha = value.get<double>();
    else if (key == "forcing_k_cut") cfg.forcing_k_cut = value.get<double>();
    else if (key == "epsilon") cfg.epsilon = value.get<double>();
    else if (key == "perturbation_alpha") cfg.perturbation_alpha = value.get<double>();
    else if (key == "perturbation_k_cut") cfg.perturbation_k_cut = value.get<double>();
    else if (key == "t_min") cfg.t_min = value.get<double>();
    else if (key == "t_max") cfg.t_max = value.get<double>();
    else if (key == "dt") cfg.dt = value.get<double>();
    else if (key == "picard_substeps") cfg.picard_substeps = value.get<int>();
    else if (key == "method") cfg.method = value.get<std::string>();
    else if (key == "seed_forcing") cfg.seed_forcing = value.get<std::uint64_t>();
    else if (key == "seed_perturbation") cfg.seed_perturbation = value.get<std::uint64_t>();
    else if (key == "out_prefix") cfg.out_prefix = value.get<std::string>();
    else throw precondition_error("config: unknown key '" + key + "'");
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw io_error(std::string("config: JSON parse failure: ") + e.what());
    }
    if (!j.is_object()) throw precondition_error("config: top level must be a JSON object");
    ExperimentConfig cfg;
    for (const auto& [key, value] : j.items()) apply_key(cfg, key, value);
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("io-error: cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

std::string ExperimentConfig::to_json() const {
    ordered_json j;
    j["n"] = n;
    j["N"] = N;
    j["L"] = L;
    j["p"] = p;
    j["s"] = s;
    j["tau_H"] = tau_H;
    j["tau_L"] = tau_L;
    j["forcing_amplitude"] = forcing_amplitude;
    j["forcing_alpha"] = forcing_alpha;
    j["forcing_k_cut"] = forcing_k_cut;
    j["epsilon"] = epsilon;
    j["perturbation_alpha"] = perturbation_alpha;
    j["perturbation_k_cut"] = perturbation_k_cut;
    j["t_min"] = t_min;
    j["t_max"] = t_max;
    j["dt"] = dt;
    j["picard_substeps"] = picard_substeps;
    j["method"] = method;
    j["seed_forcing"] = seed_forcing;
    j["seed_perturbation"] = seed_perturbation;
    j["out_prefix"] = out_prefix;
    return j.dump(2) + "\n";
}

// --- decay fits -------------------------------------------------------------------

DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples,
                   std::pair<double, double> window, double predicted) {
    DecayFit fit;
    fit.t_lo = window.first;
    fit.t_hi = window.second;
    fit.predicted = predicted;
    std::vector<double> ts, ys;
    for (const auto& [t, y] : samples) {
        if (t < window.first - 1e-12 || t > window.second + 1e-12) continue;
        if (!(y > 0.0)) throw precondition_error("nonpositive-norm: decay fit needs positive norms");
        fit.samples.push_back({t, y});
        ts.push_back(t);
        ys.push_back(y);
    }
    if (ts.size() < 6) throw precondition_error("insufficient-samples: decay fit needs >= 6 in window");
    const LogLogFit ls = fit_loglog(ts, ys);
    fit.slope = ls.slope;
    fit.r2 = ls.r2;
    fit.pass = std::abs(fit.slope - predicted) <= 0.15;
    return fit;
}

// --- stability pipeline --------------------------------------------------------------

StabilityReport run_stability_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const Grid grid = make_grid(cfg.n, cfg.N, cfg.L);
    const double sp = cfg.s_p();
    const double dealias_cut = grid.k_unit() * (cfg.N / 3.0);

    StabilityReport rep;
    rep.cfg = cfg;

    // forcing with prescribed profile, scaled to the requested norm
    VectorField f(grid, true);
    if (cfg.forcing_amplitude > 0.0) {
        const double kc = cfg.forcing_k_cut > 0.0 ? cfg.forcing_k_cut : dealias_cut;
        f = vector_field_with_spectrum(grid, cfg.forcing_alpha, kc, cfg.seed_forcing, true);
        f = frac_laplacian(f, 2.0);  // generate through (-Delta) so U0 has the profile
        const double nrm = besov_value(f, sp - 2.0, cfg.p);
        f *= cfg.forcing_amplitude / nrm;
    }
    const StationaryResult st = solve_stationary(f, cfg.p);
    rep.stationary_norm = st.critical_norm;
    rep.forcing_norm = st.forcing_norm;

    // low-frequency perturbation b with ||b||_{B^{s(p)}_{p,inf}} = epsilon
    VectorField b(grid, true);
    if (cfg.epsilon > 0.0) {
        const double kc = cfg.perturbation_k_cut > 0.0 ? cfg.perturbation_k_cut : dealias_cut;
        b = vector_field_with_spectrum(grid, cfg.b_alpha(), kc, cfg.seed_perturbation, true);
        b *= cfg.epsilon / besov_value(b, sp, cfg.p);
    }

    const std::vector<double> samples = cfg.sample_times();
    std::vector<VectorField> w_states;
    if (cfg.method == "direct") {
        VectorField a = st.U;
        a += b;
        const EvolutionPath path = solve_ns_direct(a, f, cfg.t_max, cfg.dt, samples);
        for (std::size_t i = 1; i < path.states.size(); ++i) {
            VectorField w = path.states[i];
            w -= st.U;
            w_states.push_back(std::move(w));
        }
    } else {
        const Background bg = Background::from_field(st.U);
        const PicardPath pic =
            solve_perturbation_picard(b, bg, cfg.p, samples, 16, 1e-8, cfg.picard_substeps);
        for (std::size_t i = 1; i < pic.path.states.size(); ++i)
            w_states.push_back(pic.path.states[i]);
    }

    rep.times = samples;
    const DyadicRange range = dyadic_range(grid);
    for (const VectorField& w : w_states) {
        const auto profile = block_lp_profile(w, cfg.p);
        rep.besov_high.push_back(
            besov_norm_from_profile(profile, range, BesovIndex{sp + cfg.tau_H, cfg.p, 1.0}, cfg.n)
                .value);
        rep.besov_base.push_back(
            besov_norm_from_profile(profile, range, BesovIndex{sp, cfg.p, kInfinity}, cfg.n).value);
        rep.besov_low.push_back(
            besov_norm_from_profile(profile, range, BesovIndex{sp - cfg.tau_L, cfg.p, kInfinity},
                                    cfg.n)
                .value);
        rep.weak_high.push_back(lp_norm(w, cfg.n / (1.0 - cfg.tau_H)));
        rep.weak_low.push_back(weak_lp_norm(w, cfg.n / (1.0 + cfg.tau_L)));
        rep.sup_base = std::max(rep.sup_base, rep.besov_base.back());
    }

    rep.stationary_fixture =
        cfg.epsilon == 0.0 || rep.sup_base <= 1e-6 * std::max(rep.stationary_norm, 1e-300);
    if (!rep.stationary_fixture) {
        std::vector<std::pair<double, double>> hi, lo;
        for (std::size_t i = 0; i < rep.times.size(); ++i) {
            hi.push_back({rep.times[i], rep.besov_high[i]});
            lo.push_back({rep.times[i], rep.besov_low[i]});
        }
        rep.fit_high = fit_decay(hi, {cfg.t_min, cfg.t_max}, -cfg.tau_H / 2.0);
        rep.fit_low = fit_decay(lo, {cfg.t_min, cfg.t_max}, -cfg.gamma() / 2.0);
        rep.pass_high = rep.fit_high.slope <= rep.fit_high.predicted + 0.15;
        rep.pass_low = rep.fit_low.slope <= rep.fit_low.predicted + 0.15;
    }
    return rep;
}

std::string StabilityReport::stability_csv() const {
    std::ostringstream out;
    out << "t,besov_high,besov_base,besov_low,weak_lp_high,weak_lp_low\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        out << format_double(times[i]) << ',' << format_double(besov_high[i]) << ','
            << format_double(besov_base[i]) << ',' << format_double(besov_low[i]) << ','
            << format_double(weak_high[i]) << ',' << format_double(weak_low[i]) << '\n';
    }
    return out.str();
}

std::string StabilityReport::summary_json() const {
    ordered_json j;
    j["slope_high"] = stationary_fixture ? ordered_json() : ordered_json(fit_high.slope);
    j["slope_low"] = stationary_fixture ? ordered_json() : ordered_json(fit_low.slope);
    j["predicted_high"] = -cfg.tau_H / 2.0;
    j["predicted_low"] = -cfg.gamma() / 2.0;
    j["pass_high"] = pass_high;
    j["pass_low"] = pass_low;
    j["gamma"] = cfg.gamma();
    j["tau_H"] = cfg.tau_H;
    j["tau_L"] = cfg.tau_L;
    j["s"] = cfg.s;
    j["p"] = cfg.p;
    j["n"] = cfg.n;
    j["N"] = cfg.N;
    j["L"] = cfg.L;
    j["seeds"] = {cfg.seed_forcing, cfg.seed_perturbation};
    if (stationary_fixture) j["stationary_fixture"] = true;
    j["sup_base"] = sup_base;
    j["stationary_norm"] = stationary_norm;
    return j.dump(2) + "\n";
}

// --- verification suites ----------------------------------------------------------------

namespace {

std::string param_string(std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [k, v] : kv) {
        if (!first) out << ' ';
        first = false;
        out << k << '=' << format_double(v);
    }
    return out.str();
}

double drift(double a, double b) { return std::abs(b - a) / std::max(std::abs(a), 1e-300); }

// ensemble ratio statistics evaluated at N and at 2N on the embedded fields
template <typename RatioFn>
std::pair<ConstantStats, ConstantStats> two_resolution_stats(const Grid& coarse, const Grid& fine,
                                                             int count, std::uint64_t seed,
                                                             RatioFn&& ratio) {
    std::vector<double> r32, r64;
    for (int i = 0; i < count; ++i) {
        const double a = ratio(coarse, seed + static_cast<std::uint64_t>(i), false);
        const double b = ratio(fine, seed + static_cast<std::uint64_t>(i), true);
        if (a > 0.0) r32.push_back(a);
        if (b > 0.0) r64.push_back(b);
    }
    return {stats_of(std::move(r32)), stats_of(std::move(r64))};
}

SuiteReport run_emb_suite(int N, double L, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "emb";
    const Grid coarse = make_grid(3, N, L);
    const Grid fine = make_grid(3, 2 * N, L);
    const double s = 0.5, p = 2.0;
    const double ell = 3.0 * p / (3.0 - s * p);
    const int count = 100;
    std::vector<double> r32, r64;
    for (int i = 0; i < count; ++i) {
        const SpectralField f = scalar_field_with_spectrum(coarse, 0.5, 0.0, seed + i);
        const double den = besov_value(f, s, p);
        if (den == 0.0) continue;
        r32.push_back(weak_lp_norm(f, ell) / den);
        const SpectralField F = embed(f, fine);
        r64.push_back(weak_lp_norm(F, ell) / besov_value(F, s, p));
    }
    const ConstantStats st32 = stats_of(std::move(r32));
    const ConstantStats st64 = stats_of(std::move(r64));
    rep.constants.push_back({"emb", param_string({{"s", s}, {"p", p}, {"l", ell}}), st32.max,
                             st32.median, N});
    rep.constants.push_back({"emb", param_string({{"s", s}, {"p", p}, {"l", ell}}), st64.max,
                             st64.median, 2 * N});
    const double d = drift(st32.max, st64.max);
    rep.stable = d < 0.25;
    rep.verdicts.push_back("emb max-ratio drift " + format_double(d) +
                           (rep.stable ? " (stable)" : " (UNSTABLE)"));
    return rep;
}

SuiteReport run_product_suite(int N, double L, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "product";
    const Grid coarse = make_grid(3, N, L);
    const Grid fine = make_grid(3, 2 * N, L);
    const double s = 0.5, p = 2.0;
    const int count = 100;
    // inputs band-limited to N/6 so the product (bandwidth N/3) survives the
    // dealias rule identically on both grids
    const double kc = coarse.k_unit() * (coarse.points_per_axis() / 6.0 - 0.4);
    std::vector<double> r32, r64;
    for (int i = 0; i < count; ++i) {
        const SpectralField q = scalar_field_with_spectrum(coarse, 0.5, kc, seed + 2 * i);
        const SpectralField h = scalar_field_with_spectrum(coarse, 0.5, kc, seed + 2 * i + 1);
        const double den = weak_lp_norm(q, 3.0) * besov_value(h, s, p);
        if (den == 0.0) continue;
        r32.push_back(besov_value(pointwise_product(q, h), s - 1.0, p) / den);
        const SpectralField Q = embed(q, fine), H = embed(h, fine);
        const double den2 = weak_lp_norm(Q, 3.0) * besov_value(H, s, p);
        r64.push_back(besov_value(pointwise_product(Q, H), s - 1.0, p) / den2);
    }
    const ConstantStats st32 = stats_of(std::move(r32));
    const ConstantStats st64 = stats_of(std::move(r64));
    rep.constants.push_back({"product", param_string({{"s", s}, {"p", p}}), st32.max, st32.median, N});
    rep.constants.push_back({"product", param_string({{"s", s}, {"p", p}}), st64.max, st64.median,
                             2 * N});
    const double d = drift(st32.max, st64.max);
    rep.stable = d < 0.25;
    rep.verdicts.push_back("product max-ratio drift " + format_double(d) +
                           (rep.stable ? " (stable)" : " (UNSTABLE)"));
    return rep;
}

VectorField suite_background(const Grid& g, double target, std::uint64_t seed) {
    VectorField U = vector_field_with_spectrum(g, 0.0, 3.0 * g.k_unit(), seed, true);
    U *= target / besov_value(U, critical_smoothness(g.dim(), 2.0), 2.0);
    return U;
}

Background resolve_background(const Grid& g, const SuiteOverrides& ov, double target,
                              std::uint64_t seed) {
    if (ov.U_snapshot == "zero") return Background::none(g);
    if (!ov.U_snapshot.empty()) {
        const Snapshot snap = load_snapshot(ov.U_snapshot);
        return Background::from_field(snap.as_vector());
    }
    return Background::from_field(suite_background(g, target, seed));
}

SuiteReport run_ab_suite(int N, double L, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "ab";
    const Grid coarse = make_grid(3, N, L);
    const Grid fine = make_grid(3, 2 * N, L);
    const double s = 0.5, p = 2.0;
    const int count = 100;
    const VectorField U32 = suite_background(coarse, 0.3, seed * 7 + 1);
    const VectorField U64 = embed(U32, fine);
    const PerturbedOperator op32(Background::from_field(U32), p);
    const PerturbedOperator op64(Background::from_field(U64), p);
    const double kc = coarse.k_unit() * (coarse.points_per_axis() / 6.0 - 0.4);
    std::vector<double> r32, r64;
    for (int i = 0; i < count; ++i) {
        const VectorField w = vector_field_with_spectrum(coarse, 0.5, kc, seed + i, true);
        const double den32 = op32.background().weak_ln_norm * besov_value(w, s, p);
        if (den32 == 0.0) continue;
        r32.push_back(besov_value(op32.apply_B(w), s - 2.0, p) / den32);
        const VectorField W = embed(w, fine);
        const double den64 = op64.background().weak_ln_norm * besov_value(W, s, p);
        r64.push_back(besov_value(op64.apply_B(W), s - 2.0, p) / den64);
    }
    const ConstantStats st32 = stats_of(std::move(r32));
    const ConstantStats st64 = stats_of(std::move(r64));
    rep.constants.push_back({"ab", param_string({{"s", s}, {"p", p}}), st32.max, st32.median, N});
    rep.constants.push_back({"ab", param_string({{"s", s}, {"p", p}}), st64.max, st64.median, 2 * N});
    const double d = drift(st32.max, st64.max);
    rep.stable = d < 0.25;
    rep.verdicts.push_back("ab max-ratio drift " + format_double(d) +
                           (rep.stable ? " (stable)" : " (UNSTABLE)"));
    return rep;
}

SuiteReport run_multipliers_suite(int N, double L, std::uint64_t seed) {
    SuiteReport rep;
    rep.name = "multipliers";
    const Grid g = make_grid(3, N, L);
    const int count = 20;
    // fractional-Laplacian mapping constants
    for (double a : {0.5, 1.0, -1.0}) {
        std::vector<double> ratios;
        for (int i = 0; i < count; ++i) {
            const SpectralField f = scalar_field_with_spectrum(g, 0.5, 0.0, seed + i);
            const double den = besov_value(f, 0.25, 2.0);
            if (den == 0.0) continue;
            ratios.push_back(besov_value(frac_laplacian(f, a), 0.25 - a, 2.0) / den);
        }
        const ConstantStats st = stats_of(std::move(ratios));
        rep.constants.push_back({"frac_laplacian", param_string({{"a", a}, {"s", 0.25}, {"p", 2.0}}),
                                 st.max, st.median, N});
        if (st.max > std::pow(4.0, std::abs(a))) {
            rep.stable = false;
            rep.verdicts.push_back("frac_laplacian a=" + format_double(a) +
                                   " exceeded the per-block bound (UNSTABLE)");
        }
    }
    // resolvent L^p gain slope on a coherent bump profile
    {
        SpectralField f(g, true);
        for (int j = -1; j <= 4; ++j) {
            SpectralField shell(g, true);
            for (std::size_t i = 1; i < g.size(); ++i) {
                const double kk = std::sqrt(g.k_squared(i));
                if (kk > 0.0 && static_cast<int>(std::lround(std::log2(kk))) == j)
                    shell.coeffs()[i] = cplx(1.0, 0.0);
            }
            const double nrm = lp_norm(shell, 2.0);
            if (nrm == 0.0) continue;
            shell *= 1.0 / nrm;
            f += shell;
        }
        const double b = 2.0, p = 2.0, p0 = 4.0;
        const double predicted = -(b - 3.0 * (1.0 / p - 1.0 / p0)) / 2.0;
        std::vector<double> ls, ns;
        for (double r = 2.56; r <= 256.0 + 1e-9; r *= 2.0) {
            const SectorPoint pt{r * std::exp(cplx(0.0, 2.0 * M_PI / 3.0))};
            const LpGainResult res = resolvent_lp_gain(f, pt, b, 0.0, p, p0);
            rep.sweep.push_back({"lp_gain", r, res.lhs_norm, res.rhs_scale, res.ratio});
            ls.push_back(r);
            ns.push_back(res.lhs_norm);
        }
        const LogLogFit fit = fit_loglog(ls, ns);
        const bool ok = std::abs(fit.slope - predicted) < 0.1 * std::abs(predicted);
        if (!ok) rep.stable = false;
        rep.verdicts.push_back("lp_gain slope " + format_double(fit.slope) + " vs predicted " +
                               format_double(predicted) + (ok ? " (ok)" : " (FAIL)"));
    }
    return rep;
}

SuiteReport run_semigroup_suite(int N, double L, std::uint64_t seed, const SuiteOverrides& ov) {
    SuiteReport rep;
    rep.name = "semigroup";
    const Grid g = make_grid(3, N, L);
    const double p = 2.0;
    const double s = ov.s.value_or(0.0);
    const double tau = ov.tau.value_or(0.5);
    VectorField flat(g, true);
    for (int d = 0; d < 3; ++d)
        flat[d] = scalar_field_with_spectrum(g, -s - 1.5, 0.0, seed + 400 + d);
    flat = leray_project(flat);
    const double lo = ov.t_min.value_or(0.002), hi = ov.t_max.value_or(0.02);
    std::vector<double> ts;
    for (double t = lo; t <= hi * (1.0 + 1e-9); t *= std::pow(hi / lo, 0.125)) ts.push_back(t);

    for (const auto& [label, bg] :
         std::vector<std::pair<std::string, Background>>{
             {"U0", Background::none(g)},
             {"smallU", resolve_background(g, ov, 0.1, seed * 3 + 5)}}) {
        const PerturbedOperator op(bg, p);
        const auto rows = op.verify_smoothing(flat, s, tau, ts, 2e-4);
        std::vector<double> t_gain, n_gain;
        for (const auto& r : rows) {
            rep.sweep.push_back({label + ":" + r.tag, r.abscissa, r.lhs_norm, r.rhs_scale, r.ratio});
            if (r.tag == "gain") {
                t_gain.push_back(r.abscissa);
                n_gain.push_back(r.lhs_norm);
            }
        }
        const LogLogFit fit = fit_loglog(t_gain, n_gain);
        const bool ok = std::abs(fit.slope + tau / 2.0) < 0.1;
        if (!ok) rep.stable = false;
        rep.verdicts.push_back(label + " gain slope " + format_double(fit.slope) + " vs " +
                               format_double(-tau / 2.0) + (ok ? " (ok)" : " (FAIL)"));
    }
    return rep;
}

SuiteReport run_resolvent_suite(int N, double L, std::uint64_t seed, const SuiteOverrides& ov) {
    SuiteReport rep;
    rep.name = "resolvent";
    const Grid g = make_grid(3, N, L);
    const PerturbedOperator op(resolve_background(g, ov, 0.1, seed * 5 + 3), 2.0);
    std::vector<double> taus{0.0, 0.5, 1.0};
    if (ov.tau) taus = {*ov.tau};
    for (double tau : taus) {
        const double s = ov.s.value_or(tau < 1.0 ? 0.0 : -0.1);
        VectorField flat(g, true);
        for (int d = 0; d < 3; ++d)
            flat[d] = scalar_field_with_spectrum(g, -s - 1.5, 0.0, seed + 500 + d);
        flat = leray_project(flat);
        std::vector<double> ls, ns;
        for (double r = 2.56; r <= 256.0 + 1e-9; r *= 2.0) {
            const SectorPoint pt{r * std::exp(cplx(0.0, 2.0 * M_PI / 3.0))};
            const auto [rf, report] = op.resolvent(flat, pt);
            const double nrm = besov_value(rf, s + tau, 2.0);
            rep.sweep.push_back({"tau=" + format_double(tau), r, nrm,
                                 std::pow(r, -(2.0 - tau) / 2.0), nrm * std::pow(r, (2.0 - tau) / 2.0)});
            ls.push_back(r);
            ns.push_back(nrm);
        }
        const LogLogFit fit = fit_loglog(ls, ns);
        const bool ok = std::abs(fit.slope + (2.0 - tau) / 2.0) < 0.1;
        if (!ok) rep.stable = false;
        rep.verdicts.push_back("tau=" + format_double(tau) + " slope " + format_double(fit.slope) +
                               " vs " + format_double(-(2.0 - tau) / 2.0) + (ok ? " (ok)" : " (FAIL)"));
    }
    return rep;
}

SuiteReport run_critical_suite(int N, double L, std::uint64_t seed, const SuiteOverrides& ov) {
    SuiteReport rep;
    rep.name = "critical";
    const double s = ov.s.value_or(0.5), p = 2.0;
    const double lo = ov.t_min.value_or(1.0), hi = ov.t_max.value_or(100.0);
    std::vector<double> ts;
    for (double t = lo; t <= hi * (1.0 + 1e-9); t *= std::sqrt(10.0)) ts.push_back(t);

    auto sup_ratio = [&](const Grid& g, const VectorField& G, const Background& bg) {
        const PerturbedOperator op(bg, p);
        const double denom = besov_value(G, s - 2.0, p);
        const auto path = op.duhamel_constant_source(G, ts, 0.01, 0.02, 0.1);
        double lo = kInfinity, hi = 0.0;
        for (std::size_t i = 0; i < path.size(); ++i) {
            const double ratio = besov_value(path[i], s, p) / denom;
            rep.sweep.push_back({"N=" + std::to_string(g.points_per_axis()), ts[i],
                                 besov_value(path[i], s, p), denom, ratio});
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
        return std::make_pair(lo, hi);
    };

    const Grid coarse = make_grid(3, N, L);
    const Grid fine = make_grid(3, 2 * N, L);
    VectorField G = vector_field_with_spectrum(coarse, 0.5, 4.0 * coarse.k_unit(), seed + 900, true);
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 1; i < coarse.size(); ++i)
            if (coarse.k_squared(i) < 2.0 * coarse.k_unit() * coarse.k_unit())
                G[d].coeffs()[i] = cplx(0, 0);
    const Background bg32 = resolve_background(coarse, ov, 0.1, seed * 11 + 7);

    const auto [lo32, hi32] = sup_ratio(coarse, G, bg32);
    const auto [lo64, hi64] =
        sup_ratio(fine, embed(G, fine), bg32.zero ? Background::none(fine)
                                                  : Background::from_field(embed(bg32.U, fine)));

    const double t_var = (hi32 - lo32) / hi32;
    const double res_var = drift(hi32, hi64);
    rep.stable = t_var < 0.25 && res_var < 0.25;
    rep.verdicts.push_back("ratio varies " + format_double(t_var) + " across two decades, " +
                           format_double(res_var) + " across resolutions" +
                           (rep.stable ? " (stable)" : " (UNSTABLE)"));
    rep.constants.push_back({"critical", param_string({{"s", s}, {"p", p}}), hi32, lo32, N});
    rep.constants.push_back({"critical", param_string({{"s", s}, {"p", p}}), hi64, lo64, 2 * N});
    return rep;
}

SuiteReport run_generator_suite(int N, double L, std::uint64_t seed, const SuiteOverrides& ov) {
    SuiteReport rep;
    rep.name = "generator";
    const Grid g = make_grid(3, N, L);
    const double s = ov.s.value_or(0.5), tau = ov.tau.value_or(0.25), p = 2.0;
    VectorField f(g, true);
    for (int d = 0; d < 3; ++d) f[d] = scalar_field_with_spectrum(g, -s - 1.5, 0.0, seed + 600 + d);
    f = leray_project(f);
    const PerturbedOperator op(resolve_background(g, ov, 0.05, seed * 13 + 1), p);
    const double lo = ov.t_min.value_or(0.004), hi = ov.t_max.value_or(0.25);
    std::vector<double> ts;
    for (double t = lo; t <= hi * (1.0 + 1e-9); t *= 2.0) ts.push_back(t);
    const GeneratorFit fit = op.verify_generator(f, ts, s, tau, 2e-4);
    for (std::size_t i = 0; i < fit.times.size(); ++i)
        rep.sweep.push_back({"residual", fit.times[i], fit.residuals[i],
                             std::pow(fit.times[i], tau / 2.0), 0.0});
    const bool ok = fit.slope >= tau / 2.0 - 0.1;
    rep.stable = ok;
    rep.verdicts.push_back("generator slope " + format_double(fit.slope) + " vs floor " +
                           format_double(tau / 2.0 - 0.1) + (ok ? " (ok)" : " (FAIL)"));
    return rep;
}

}  // namespace

std::string SuiteReport::constants_csv() const {
    std::ostringstream out;
    out << "suite,params,ratio_max,ratio_median,resolution\n";
    for (const auto& r : constants)
        out << r.suite << ",\"" << r.params << "\"," << format_double(r.ratio_max) << ','
            << format_double(r.ratio_median) << ',' << r.resolution << '\n';
    return out.str();
}

std::vector<std::pair<std::string, std::string>> SuiteReport::sweep_csvs() const {
    std::vector<std::string> tags;
    for (const auto& r : sweep)
        if (std::find(tags.begin(), tags.end(), r.tag) == tags.end()) tags.push_back(r.tag);
    std::sort(tags.begin(), tags.end());
    std::vector<std::pair<std::string, std::string>> out;
    for (const std::string& tag : tags) {
        std::ostringstream csv;
        csv << "t,lhs_norm,rhs_scale,ratio\n";
        for (const auto& r : sweep) {
            if (r.tag != tag) continue;
            csv << format_double(r.abscissa) << ',' << format_double(r.lhs_norm) << ','
                << format_double(r.rhs_scale) << ',' << format_double(r.ratio) << '\n';
        }
        std::string name = tag;
        for (char& ch : name)
            if (ch == ':' || ch == '=' || ch == ' ' || ch == '.') ch = '_';
        out.push_back({name, csv.str()});
    }
    return out;
}

std::vector<SuiteReport> run_verification_suites(const std::vector<std::string>& selection,
                                                 int N, double L, std::uint64_t seed,
                                                 const SuiteOverrides& overrides) {
    if (selection.empty()) throw precondition_error("suite selection must be nonempty");
    std::vector<std::string> names = selection;
    if (names.size() == 1 && names[0] == "all")
        names = {"emb", "product", "ab", "multipliers", "semigroup", "resolvent", "critical",
                 "generator"};
    std::sort(names.begin(), names.end());
    std::vector<SuiteReport> out;
    for (const std::string& name : names) {
        if (name == "emb") out.push_back(run_emb_suite(N, L, seed));
        else if (name == "product") out.push_back(run_product_suite(N, L, seed));
        else if (name == "ab") out.push_back(run_ab_suite(N, L, seed));
        else if (name == "multipliers") out.push_back(run_multipliers_suite(N, L, seed));
        else if (name == "semigroup") out.push_back(run_semigroup_suite(N, L, seed, overrides));
        else if (name == "resolvent") out.push_back(run_resolvent_suite(N, L, seed, overrides));
        else if (name == "critical") out.push_back(run_critical_suite(N, L, seed, overrides));
        else if (name == "generator") out.push_back(run_generator_suite(N, L, seed, overrides));
        else throw precondition_error("unknown suite '" + name + "'");
    }
    return out;
}

void emit_report(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("io-error: cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw io_error("io-error: write failed for '" + path + "'");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace nsbesov
