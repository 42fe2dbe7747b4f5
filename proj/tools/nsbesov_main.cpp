// nsbesov: spectral laboratory for stationary Navier-Stokes backgrounds and
// their perturbations on the periodic box.
//
// Subcommands: norms, stationary, evolve, verify, stability.
// Exit codes: 0 success, 2 precondition violation, 3 numerical failure,
// 4 I/O failure.

#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsbesov/errors.hpp"
#include "nsbesov/experiments.hpp"
#include "nsbesov/random.hpp"
#include "nsbesov/snapshot.hpp"

using namespace nsbesov;

namespace {

VectorField load_vector(const std::string& path) {
    const Snapshot snap = load_snapshot(path);
    if (snap.is_vector()) return snap.as_vector();
    throw precondition_error("snapshot '" + path + "' is not a vector field");
}

struct NormsArgs {
    std::string input;
    double s = 0.5;
    double p = 2.0;
    double q = kInfinity;
    double weak_lp = 0.0;
    std::string report = "csv";
    std::string out;
};

int run_norms(const NormsArgs& args) {
    const Snapshot snap = load_snapshot(args.input);
    const BesovIndex idx{args.s, args.p, args.q};
    NormReport rep;
    double weak = 0.0;
    if (snap.is_vector()) {
        const VectorField v = snap.as_vector();
        rep = besov_norm(v, idx);
        if (args.weak_lp > 0.0) weak = weak_lp_norm(v, args.weak_lp);
    } else {
        rep = besov_norm(snap.as_scalar(), idx);
        if (args.weak_lp > 0.0) weak = weak_lp_norm(snap.as_scalar(), args.weak_lp);
    }

    std::ostringstream out;
    if (args.report == "csv") {
        out << "j,block_lp,weighted\n";
        for (const auto& [j, w] : rep.per_block) {
            const double block = w / std::pow(2.0, idx.s * j);
            out << j << ',' << format_double(block) << ',' << format_double(w) << '\n';
        }
        out << "summary,," << format_double(rep.value) << '\n';
        if (args.weak_lp > 0.0)
            out << "weak_lp_" << format_double(args.weak_lp) << ",," << format_double(weak) << '\n';
    } else if (args.report == "json") {
        std::ostringstream blocks;
        out << "{\n  \"value\": " << format_double(rep.value) << ",\n  \"per_block\": [";
        for (std::size_t i = 0; i < rep.per_block.size(); ++i) {
            if (i) out << ", ";
            out << "[" << rep.per_block[i].first << ", " << format_double(rep.per_block[i].second)
                << "]";
        }
        out << "]";
        if (args.weak_lp > 0.0) out << ",\n  \"weak_lp\": " << format_double(weak);
        if (!rep.warnings.empty()) {
            out << ",\n  \"warnings\": [";
            for (std::size_t i = 0; i < rep.warnings.size(); ++i) {
                if (i) out << ", ";
                out << '"' << rep.warnings[i] << '"';
            }
            out << "]";
        }
        out << "\n}\n";
    } else {
        throw precondition_error("--report must be csv or json");
    }
    for (const std::string& w : rep.warnings) std::cerr << "warning: " << w << "\n";
    if (args.out.empty())
        std::cout << out.str();
    else
        emit_report(out.str(), args.out);
    return 0;
}

struct StationaryArgs {
    std::string force;
    double p = 2.0;
    std::optional<double> s_extra;
    double tol = 1e-10;
    std::string out = "stationary";
};

int run_stationary(const StationaryArgs& args) {
    const VectorField f = load_vector(args.force);
    const StationaryResult res = solve_stationary(f, args.p, args.s_extra, args.tol);
    save_snapshot(res.U, args.out + ".nsbf");
    std::ostringstream rep;
    rep << "stationary solve\n"
        << "  iterations: " << res.iterations << '\n'
        << "  forcing norm (critical-2): " << format_double(res.forcing_norm) << '\n'
        << "  solution norm (critical): " << format_double(res.critical_norm) << '\n'
        << "  relative residual: " << format_double(res.residual) << '\n';
    if (res.extra_norm) rep << "  extra norm: " << format_double(*res.extra_norm) << '\n';
    if (res.extra_ratio) rep << "  extra ratio: " << format_double(*res.extra_ratio) << '\n';
    rep << "  contraction factors:";
    for (double c : res.contraction_factors) rep << ' ' << format_double(c);
    rep << '\n';
    emit_report(rep.str(), args.out + ".txt");
    std::cout << rep.str();
    return 0;
}

struct EvolveArgs {
    std::string initial;
    std::string force;
    std::string background = "zero";
    double T = 1.0;
    double dt = 0.01;
    int samples = 16;
    double p = 2.0;
    std::string method = "direct";
    std::string out_prefix = "evolve";
};

int run_evolve(const EvolveArgs& args) {
    const VectorField a = load_vector(args.initial);
    const Grid& g = a.grid();
    VectorField f(g, true);
    if (!args.force.empty()) f = load_vector(args.force);

    std::vector<double> samples;
    for (int i = 1; i <= args.samples; ++i) samples.push_back(args.T * i / args.samples);

    EvolutionPath path;
    if (args.method == "direct") {
        path = solve_ns_direct(a, f, args.T, args.dt, samples);
    } else if (args.method == "picard") {
        // the perturbation equation runs around the background; --initial is
        // still the full velocity a, so b = a - U
        Background bg = Background::none(g);
        if (args.background == "solve") {
            const StationaryResult st = solve_stationary(f, args.p);
            bg = Background::from_field(st.U);
        } else if (args.background != "zero") {
            bg = Background::from_field(load_vector(args.background));
        }
        VectorField b = a;
        b -= bg.U;
        const PicardPath pic = solve_perturbation_picard(b, bg, args.p, samples);
        path = pic.path;
        for (auto& state : path.states) state += bg.U;
        std::cout << "picard iterations: " << pic.iterations
                  << ", integral residual: " << format_double(pic.integral_residual) << "\n";
    } else {
        throw precondition_error("--method must be direct or picard");
    }

    const double sp = critical_smoothness(g.dim(), args.p);
    std::ostringstream csv;
    csv << "t,besov_critical,besov_low,l2\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        csv << format_double(path.times[i]) << ','
            << format_double(besov_value(path.states[i], sp, args.p)) << ','
            << format_double(besov_value(path.states[i], sp - 0.25, args.p)) << ','
            << format_double(lp_norm(path.states[i], 2.0)) << '\n';
        char name[32];
        std::snprintf(name, sizeof(name), "_%04zu.nsbf", i);
        save_snapshot(path.states[i], args.out_prefix + name);
    }
    emit_report(csv.str(), args.out_prefix + "_trace.csv");
    save_snapshot(path.states.back(), args.out_prefix + "_final.nsbf");
    std::cout << "wrote " << args.out_prefix << "_trace.csv, " << path.times.size()
              << " state snapshots, and " << args.out_prefix << "_final.nsbf\n";
    return 0;
}

struct VerifyArgs {
    std::vector<std::string> suites{"all"};
    int N = 32;
    double L = 2.0 * M_PI;
    std::uint64_t seed = 2024;
    std::string out = "verify";
    std::string U_snapshot;
    double s = 0.0, tau = 0.0, t_min = 0.0, t_max = 0.0;
    bool has_s = false, has_tau = false, has_tmin = false, has_tmax = false;
};

int run_verify(const VerifyArgs& args) {
    SuiteOverrides ov;
    ov.U_snapshot = args.U_snapshot;
    if (args.has_s) ov.s = args.s;
    if (args.has_tau) ov.tau = args.tau;
    if (args.has_tmin) ov.t_min = args.t_min;
    if (args.has_tmax) ov.t_max = args.t_max;
    const auto reports = run_verification_suites(args.suites, args.N, args.L, args.seed, ov);
    bool all_stable = true;
    for (const auto& rep : reports) {
        if (!rep.constants.empty())
            emit_report(rep.constants_csv(), args.out + "_" + rep.name + "_constants.csv");
        for (const auto& [tag, csv] : rep.sweep_csvs())
            emit_report(csv, args.out + "_" + rep.name + "_" + tag + ".csv");
        for (const std::string& v : rep.verdicts) std::cout << rep.name << ": " << v << "\n";
        all_stable = all_stable && rep.stable;
    }
    std::cout << (all_stable ? "all suites stable\n" : "SOME SUITES UNSTABLE\n");
    return all_stable ? 0 : 3;
}

struct StabilityArgs {
    std::string config;
    std::vector<std::string> overrides;
};

int run_stability(const StabilityArgs& args) {
    ExperimentConfig cfg;
    if (!args.config.empty()) cfg = ExperimentConfig::from_json_file(args.config);
    if (!args.overrides.empty()) {
        // apply key=value overrides through the JSON path so types and
        // unknown keys are policed in one place
        std::string patch = "{";
        for (std::size_t i = 0; i < args.overrides.size(); ++i) {
            const auto eq = args.overrides[i].find('=');
            if (eq == std::string::npos)
                throw precondition_error("override must look like key=value");
            const std::string key = args.overrides[i].substr(0, eq);
            const std::string val = args.overrides[i].substr(eq + 1);
            if (i) patch += ",";
            const bool quoted = key == "method" || key == "out_prefix";
            patch += "\"" + key + "\":" + (quoted ? "\"" + val + "\"" : val);
        }
        patch += "}";
        ExperimentConfig base = cfg;
        const std::string merged = [&] {
            auto j = nlohmann::ordered_json::parse(base.to_json());
            auto o = nlohmann::ordered_json::parse(patch);
            for (const auto& [k, v] : o.items()) j[k] = v;
            return j.dump();
        }();
        cfg = ExperimentConfig::from_json_text(merged);
    }
    const StabilityReport rep = run_stability_experiment(cfg);
    emit_report(rep.stability_csv(), cfg.out_prefix + ".csv");
    emit_report(rep.summary_json(), cfg.out_prefix + "_summary.json");
    std::cout << rep.summary_json();
    if (rep.stationary_fixture) std::cout << "stationary fixture: traces at noise level\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral Navier-Stokes stability laboratory"};
    app.require_subcommand(1);

    NormsArgs nargs;
    CLI::App* norms = app.add_subcommand("norms", "Besov/Lorentz norms of a snapshot");
    norms->add_option("--input", nargs.input, "snapshot path")->required();
    norms->add_option("--s", nargs.s, "smoothness index");
    norms->add_option("--p", nargs.p, "integrability index");
    norms->add_option("--q", nargs.q, "summation index (inf default)");
    norms->add_option("--weak-lp", nargs.weak_lp, "also report the weak-L^p norm");
    norms->add_option("--report", nargs.report, "csv|json");
    norms->add_option("--out", nargs.out, "output file (stdout default)");

    StationaryArgs sargs;
    CLI::App* stationary = app.add_subcommand("stationary", "stationary solution by Picard iteration");
    stationary->add_option("--force", sargs.force, "forcing snapshot")->required();
    stationary->add_option("--p", sargs.p, "integrability index");
    double s_extra_val = 0.0;
    CLI::Option* s_extra_opt =
        stationary->add_option("--s", s_extra_val, "extra smoothness to report");
    stationary->add_option("--tol", sargs.tol, "fixed-point tolerance");
    stationary->add_option("--out", sargs.out, "output prefix");

    EvolveArgs eargs;
    CLI::App* evolve = app.add_subcommand("evolve", "evolve the projected equation");
    evolve->add_option("--initial", eargs.initial, "initial snapshot")->required();
    evolve->add_option("--force", eargs.force, "forcing snapshot");
    evolve->add_option("--background", eargs.background, "snapshot path | solve | zero");
    evolve->add_option("--T", eargs.T, "horizon");
    evolve->add_option("--dt", eargs.dt, "time step");
    evolve->add_option("--samples", eargs.samples, "number of samples");
    evolve->add_option("--p", eargs.p, "integrability index");
    evolve->add_option("--method", eargs.method, "direct|picard");
    evolve->add_option("--out-prefix", eargs.out_prefix, "output prefix");

    VerifyArgs vargs;
    CLI::App* verify = app.add_subcommand("verify", "estimate-verification suites");
    verify->add_option("--suite", vargs.suites, "suite names or 'all'");
    verify->add_option("--N", vargs.N, "points per axis");
    verify->add_option("--L", vargs.L, "box length");
    verify->add_option("--seed", vargs.seed, "ensemble seed");
    verify->add_option("--out", vargs.out, "output prefix");
    verify->add_option("--U", vargs.U_snapshot, "background snapshot path or 'zero'");
    CLI::Option* vs = verify->add_option("--s", vargs.s, "smoothness override");
    CLI::Option* vt = verify->add_option("--tau", vargs.tau, "gain override");
    CLI::Option* vt0 = verify->add_option("--t-min", vargs.t_min, "window start");
    CLI::Option* vt1 = verify->add_option("--t-max", vargs.t_max, "window end");

    StabilityArgs stargs;
    CLI::App* stability = app.add_subcommand("stability", "stationary-stability experiment");
    stability->add_option("--config", stargs.config, "JSON config file");
    stability->add_option("--set", stargs.overrides, "key=value override (repeatable)");

    try {
        app.parse(argc, argv);
        if (norms->parsed()) return run_norms(nargs);
        if (stationary->parsed()) {
            if (s_extra_opt->count() > 0) sargs.s_extra = s_extra_val;
            return run_stationary(sargs);
        }
        if (evolve->parsed()) return run_evolve(eargs);
        if (verify->parsed()) {
            vargs.has_s = vs->count() > 0;
            vargs.has_tau = vt->count() > 0;
            vargs.has_tmin = vt0->count() > 0;
            vargs.has_tmax = vt1->count() > 0;
            return run_verify(vargs);
        }
        if (stability->parsed()) return run_stability(stargs);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const precondition_error& e) {
        std::cerr << "precondition violation: " << e.what() << "\n";
        return 2;
    } catch (const numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        std::cerr << "io failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
