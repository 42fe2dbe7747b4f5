#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsbesov/solvers.hpp"

namespace nsbesov {

// Configuration of a stability run; JSON keys match the field names, see
// docs/config-schema.md. Unknown keys are errors.
struct ExperimentConfig {
    int n = 3;
    int N = 64;
    double L = 16.0 * M_PI;
    double p = 2.0;
    double s = 0.25;
    double tau_H = 0.25;
    double tau_L = 0.25;
    double forcing_amplitude = 0.02;   // ||f|| in B^{s(p)-2}_{p,inf}
    double forcing_alpha = 0.0;
    double forcing_k_cut = 0.0;        // 0 = 2/3 of Nyquist
    double epsilon = 0.01;             // ||a - U|| in B^{s(p)}_{p,inf}
    double perturbation_alpha = 0.0;   // 0 = automatic -s(p) - n/2
    double perturbation_k_cut = 0.0;   // 0 = 2/3 of Nyquist
    double t_min = 0.05;
    double t_max = 6.4;
    double dt = 0.05;
    int picard_substeps = 4;
    std::string method = "direct";     // direct | picard
    std::uint64_t seed_forcing = 1;
    std::uint64_t seed_perturbation = 2;
    std::string out_prefix = "stability";

    double s_p() const { return critical_smoothness(n, p); }
    double gamma() const { return s_p() - tau_L - s; }
    double b_alpha() const { return perturbation_alpha != 0.0 ? perturbation_alpha : -s_p() - n / 2.0; }
    std::vector<double> sample_times() const;  // geometric t_i = t_min 2^{i/2}

    void validate() const;
    static ExperimentConfig from_json_file(const std::string& path);
    static ExperimentConfig from_json_text(const std::string& text);
    std::string to_json() const;
};

struct DecayFit {
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::vector<std::pair<double, double>> samples;
    double slope = 0.0;
    double r2 = 0.0;
    double predicted = 0.0;
    bool pass = false;  // |slope - predicted| <= 0.15
};

// Least squares of log(norm) on log(t) inside the window; needs >= 6 samples
// with positive norms.
DecayFit fit_decay(const std::vector<std::pair<double, double>>& samples,
                   std::pair<double, double> window, double predicted);

struct StabilityReport {
    ExperimentConfig cfg;
    bool stationary_fixture = false;  // epsilon = 0: traces at noise level
    double stationary_norm = 0.0;     // ||U|| in the critical norm
    double forcing_norm = 0.0;
    double sup_base = 0.0;            // sup_t ||u(t)-U|| in B^{s(p)}_{p,inf}
    std::vector<double> times;
    std::vector<double> besov_high;   // B^{s(p)+tau_H}_{p,1}
    std::vector<double> besov_base;   // B^{s(p)}_{p,inf}
    std::vector<double> besov_low;    // B^{s(p)-tau_L}_{p,inf}
    std::vector<double> weak_high;    // L^{n/(1-tau_H)}
    std::vector<double> weak_low;     // L^{n/(1+tau_L),inf}
    DecayFit fit_high;                // predicted -tau_H/2
    DecayFit fit_low;                 // predicted -gamma/2
    bool pass_high = false;           // slope <= predicted + 0.15
    bool pass_low = false;

    std::string stability_csv() const;  // t, besov_high, besov_base, besov_low, weak_lp_high, weak_lp_low
    std::string summary_json() const;
};

StabilityReport run_stability_experiment(const ExperimentConfig& cfg);

// --- verification suites ----------------------------------------------------------

// One empirical-constant row of a suite CSV:
// suite, params, ratio_max, ratio_median, resolution
struct SuiteRow {
    std::string suite;
    std::string params;
    double ratio_max = 0.0;
    double ratio_median = 0.0;
    int resolution = 0;
};

struct SuiteReport {
    std::string name;
    std::vector<SuiteRow> constants;   // empirical constants per configuration
    std::vector<RatioRow> sweep;       // per-abscissa rows (t or |lambda|)
    std::vector<std::string> verdicts; // human-readable stability verdicts
    bool stable = true;                // every drift within 25%

    std::string constants_csv() const;
    // one CSV per estimate tag, columns t,lhs_norm,rhs_scale,ratio
    std::vector<std::pair<std::string, std::string>> sweep_csvs() const;
};

// Optional overrides for the perturbed-operator suites; unset fields fall
// back to per-suite defaults.
struct SuiteOverrides {
    std::string U_snapshot;  // empty = built-in small background, "zero" = none
    std::optional<double> s;
    std::optional<double> tau;
    std::optional<double> t_min;
    std::optional<double> t_max;
};

// Runs the named suites ("emb", "product", "ab", "multipliers", "semigroup",
// "resolvent", "critical", "generator" or "all") at desk scale.
std::vector<SuiteReport> run_verification_suites(const std::vector<std::string>& selection,
                                                 int N, double L, std::uint64_t seed,
                                                 const SuiteOverrides& overrides = {});

// Write text to a file; identical inputs produce identical bytes.
void emit_report(const std::string& text, const std::string& path);

std::string format_double(double v);  // shortest roundtrip-exact decimal

}  // namespace nsbesov
