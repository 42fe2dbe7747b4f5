#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nsbesov/dyadic.hpp"
#include "nsbesov/field.hpp"

namespace nsbesov {

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// s(p) = -1 + n/p, the Navier-Stokes-critical smoothness.
double critical_smoothness(int n, double p);

// Index triple (s, p, q) of the homogeneous Besov norm.
struct BesovIndex {
    double s = 0.0;
    double p = 2.0;
    double q = kInfinity;

    // Banach iff s < n/p, or s <= n/p when q = 1.
    bool banach_range(int n) const;
    void validate() const;
};

struct NormReport {
    double value = 0.0;
    std::vector<std::pair<int, double>> per_block;  // (j, 2^{js} ||phi_j f||_p)
    std::vector<std::string> warnings;
};

// --- Lebesgue / Lorentz quasinorms -------------------------------------------
// Grid quadrature ||f||_p = (sum |f(x)|^p (L/N)^n)^{1/p}; p = inf is the max.
// Vector overloads act on the pointwise Euclidean magnitude.

double lp_norm(const SpectralField& f, double p);
double lp_norm(const VectorField& f, double p);
double lp_norm_of_samples(std::vector<double>& magnitudes, const Grid& grid, double p);

// sup_{lambda>0} lambda |{|f| > lambda}|^{1/p} via the sorted rearrangement;
// exact for the discrete measure with cells of volume (L/N)^n.
double weak_lp_norm(const SpectralField& f, double p);
double weak_lp_norm(const VectorField& f, double p);

// --- Besov norms ---------------------------------------------------------------

// Per-block L^p profile b_j for j in dyadic_range(grid); the basis for every
// Besov aggregation of the same field (blocks are computed once).
std::vector<double> block_lp_profile(const SpectralField& f, double p);
std::vector<double> block_lp_profile(const VectorField& f, double p);

NormReport besov_norm_from_profile(const std::vector<double>& profile, const DyadicRange& range,
                                   const BesovIndex& idx, int n);

NormReport besov_norm(const SpectralField& f, const BesovIndex& idx);
NormReport besov_norm(const VectorField& f, const BesovIndex& idx);

// shorthand for the common sup-type norm value
double besov_value(const VectorField& f, double s, double p);
double besov_value(const SpectralField& f, double s, double p);

// --- K-functional ---------------------------------------------------------------

// Upper bound on K(lambda, f; L^{p0}, L^{p1}) over frequency-threshold splits
// f = sum_{j>=t} phi_j f + sum_{j<t} phi_j f. The candidate norm pairs are
// lambda-independent, so one object serves a whole lambda sweep.
class KFunctionalBound {
  public:
    KFunctionalBound(const SpectralField& f, double p0, double p1, int max_splits = 64);
    double eval(double lambda) const;

  private:
    std::vector<std::pair<double, double>> candidates_;  // (||f0||_{p0}, ||f1||_{p1})
};

double k_functional(const SpectralField& f, double lambda, double p0, double p1,
                    int max_splits = 64);

// --- inequality ensembles --------------------------------------------------------

struct ConstantStats {
    double max = 0.0;
    double median = 0.0;
    double min = 0.0;
    int count = 0;
};

// Embedding ratio ||f||_{L^{l,inf}} / ||f||_{B^s_{p,inf}} with
// l = np/(n - sp), over an ensemble of random solenoidal fields.
ConstantStats verify_embedding(const Grid& grid, int ensemble, double s, double p,
                               std::uint64_t seed);

// Product ratio ||gh||_{B^{s-1}_{p,inf}} / (||g||_{L^{n,inf}} ||h||_{B^s_{p,inf}})
// over random scalar pairs; requires n >= 3, n/2 < p < n, 0 < s < 1.
ConstantStats verify_product(const Grid& grid, int ensemble, double p, double s,
                             std::uint64_t seed);

ConstantStats stats_of(std::vector<double> ratios);

}  // namespace nsbesov
