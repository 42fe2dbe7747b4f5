#include "nsbesov/norms.hpp"

#include <algorithm>
#include <cmath>

#include "nsbesov/errors.hpp"
#include "nsbesov/random.hpp"

namespace nsbesov {

double critical_smoothness(int n, double p) { return -1.0 + n / p; }

bool BesovIndex::banach_range(int n) const {
    const double np = n / p;
    if (s < np) return true;
    return s <= np && q == 1.0;
}

void BesovIndex::validate() const {
    if (!(p >= 1.0)) throw precondition_error("besov-index: p must be >= 1");
    if (!(q >= 1.0)) throw precondition_error("besov-index: q must be >= 1");
}

// --- L^p ------------------------------------------------------------------------

namespace {

std::vector<double> magnitudes_of(const SpectralField& f) {
    const std::vector<cplx> samples = inverse_transform_complex(f);
    std::vector<double> mag(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) mag[i] = std::abs(samples[i]);
    return mag;
}

std::vector<double> magnitudes_of(const VectorField& f) {
    std::vector<double> mag;
    for (int d = 0; d < f.ncomp(); ++d) {
        const std::vector<cplx> samples = inverse_transform_complex(f[d]);
        if (mag.empty()) mag.assign(samples.size(), 0.0);
        for (std::size_t i = 0; i < samples.size(); ++i) mag[i] += std::norm(samples[i]);
    }
    for (double& v : mag) v = std::sqrt(v);
    return mag;
}

double weak_lp_of_magnitudes(std::vector<double>& mag, const Grid& grid, double p) {
    if (!(p >= 1.0) || p == kInfinity) throw precondition_error("weak-lp: p must be finite, >= 1");
    std::sort(mag.begin(), mag.end(), std::greater<double>());
    const double cell = std::pow(grid.box_length() / grid.points_per_axis(), grid.dim());
    double best = 0.0;
    for (std::size_t k = 0; k < mag.size(); ++k) {
        if (mag[k] == 0.0) break;
        best = std::max(best, mag[k] * std::pow((k + 1) * cell, 1.0 / p));
    }
    return best;
}

}  // namespace

double lp_norm_of_samples(std::vector<double>& mag, const Grid& grid, double p) {
    if (!(p >= 1.0)) throw precondition_error("lp-norm: p must be >= 1");
    if (p == kInfinity) {
        double m = 0.0;
        for (double v : mag) m = std::max(m, v);
        return m;
    }
    const double cell = std::pow(grid.box_length() / grid.points_per_axis(), grid.dim());
    double acc = 0.0;
    for (double v : mag) acc += std::pow(v, p);
    return std::pow(acc * cell, 1.0 / p);
}

double lp_norm(const SpectralField& f, double p) {
    auto mag = magnitudes_of(f);
    return lp_norm_of_samples(mag, f.grid(), p);
}

double lp_norm(const VectorField& f, double p) {
    auto mag = magnitudes_of(f);
    return lp_norm_of_samples(mag, f.grid(), p);
}

double weak_lp_norm(const SpectralField& f, double p) {
    auto mag = magnitudes_of(f);
    return weak_lp_of_magnitudes(mag, f.grid(), p);
}

double weak_lp_norm(const VectorField& f, double p) {
    auto mag = magnitudes_of(f);
    return weak_lp_of_magnitudes(mag, f.grid(), p);
}

// --- Besov -----------------------------------------------------------------------

std::vector<double> block_lp_profile(const SpectralField& f, double p) {
    const DyadicRange range = dyadic_range(f.grid());
    std::vector<double> profile;
    profile.reserve(range.count());
    for (int j = range.j_min; j <= range.j_max; ++j) profile.push_back(lp_norm(dyadic_block(f, j), p));
    return profile;
}

std::vector<double> block_lp_profile(const VectorField& f, double p) {
    const Grid& g = f.grid();
    const DyadicRange range = dyadic_range(g);
    std::vector<double> profile;
    profile.reserve(range.count());
    for (int j = range.j_min; j <= range.j_max; ++j) {
        VectorField block(g, f.is_real());
        for (int d = 0; d < g.dim(); ++d) block[d] = dyadic_block(f[d], j);
        profile.push_back(lp_norm(block, p));
    }
    return profile;
}

NormReport besov_norm_from_profile(const std::vector<double>& profile, const DyadicRange& range,
                                   const BesovIndex& idx, int n) {
    idx.validate();
    NormReport report;
    report.per_block.reserve(profile.size());
    for (int i = 0; i < static_cast<int>(profile.size()); ++i) {
        const int j = range.j_min + i;
        report.per_block.emplace_back(j, std::pow(2.0, idx.s * j) * profile[i]);
    }
    if (idx.q == kInfinity) {
        for (const auto& [j, w] : report.per_block) report.value = std::max(report.value, w);
    } else {
        double acc = 0.0;
        for (const auto& [j, w] : report.per_block) acc += std::pow(w, idx.q);
        report.value = std::pow(acc, 1.0 / idx.q);
    }
    if (!idx.banach_range(n))
        report.warnings.push_back("index (s,p,q) outside the Banach range s < n/p (or s <= n/p, q = 1)");
    return report;
}

NormReport besov_norm(const SpectralField& f, const BesovIndex& idx) {
    return besov_norm_from_profile(block_lp_profile(f, idx.p), dyadic_range(f.grid()), idx,
                                   f.grid().dim());
}

NormReport besov_norm(const VectorField& f, const BesovIndex& idx) {
    return besov_norm_from_profile(block_lp_profile(f, idx.p), dyadic_range(f.grid()), idx,
                                   f.grid().dim());
}

double besov_value(const VectorField& f, double s, double p) {
    return besov_norm(f, BesovIndex{s, p, kInfinity}).value;
}

double besov_value(const SpectralField& f, double s, double p) {
    return besov_norm(f, BesovIndex{s, p, kInfinity}).value;
}

// --- K-functional -------------------------------------------------------------------

KFunctionalBound::KFunctionalBound(const SpectralField& f, double p0, double p1, int max_splits) {
    if (!(1.0 < p0 && p0 < p1 && p1 <= kInfinity))
        throw precondition_error("k-functional: need 1 < p0 < p1 <= inf");
    const Grid& g = f.grid();
    DyadicDecomposition dec = dyadic_decompose(f);
    // threshold t in j_min..j_max+1: f0 = sum_{j>=t} blocks (L^{p0}),
    // f1 = sum_{j<t} blocks (L^{p1}); prefix/suffix sums keep the trivial
    // splits exactly zero
    const int nb = static_cast<int>(dec.blocks.size());
    const int thresholds = std::min(nb + 1, max_splits);
    std::vector<SpectralField> suffix(nb + 1, SpectralField(g, f.is_real()));
    std::vector<SpectralField> prefix(nb + 1, SpectralField(g, f.is_real()));
    for (int i = nb - 1; i >= 0; --i) {
        suffix[i] = suffix[i + 1];
        suffix[i] += dec.blocks[i];
    }
    for (int i = 0; i < nb; ++i) {
        prefix[i + 1] = prefix[i];
        prefix[i + 1] += dec.blocks[i];
    }
    for (int t = 0; t < thresholds; ++t)
        candidates_.emplace_back(lp_norm(suffix[t], p0), lp_norm(prefix[t], p1));
}

double KFunctionalBound::eval(double lambda) const {
    if (!(lambda > 0.0)) throw precondition_error("k-functional: lambda must be positive");
    double best = kInfinity;
    for (const auto& [a, b] : candidates_) best = std::min(best, a + lambda * b);
    return best;
}

double k_functional(const SpectralField& f, double lambda, double p0, double p1, int max_splits) {
    return KFunctionalBound(f, p0, p1, max_splits).eval(lambda);
}

// --- ensembles ------------------------------------------------------------------------

ConstantStats stats_of(std::vector<double> ratios) {
    ConstantStats st;
    st.count = static_cast<int>(ratios.size());
    if (ratios.empty()) return st;
    std::sort(ratios.begin(), ratios.end());
    st.min = ratios.front();
    st.max = ratios.back();
    st.median = ratios[ratios.size() / 2];
    return st;
}

ConstantStats verify_embedding(const Grid& grid, int ensemble, double s, double p,
                               std::uint64_t seed) {
    const int n = grid.dim();
    const double pprime = p / (p - 1.0);
    if (!(1.0 < p && p < kInfinity) || !(s != 0.0 && -n / pprime <= s && s < n / p))
        throw precondition_error(
            "exponent-out-of-range: need 1 < p < inf and nonzero s in [-n/p', n/p)");
    const double ell = n * p / (n - s * p);
    std::vector<double> ratios;
    ratios.reserve(ensemble);
    for (int i = 0; i < ensemble; ++i) {
        SpectrumProfile prof;
        prof.alpha = 0.5;
        prof.seed = seed + static_cast<std::uint64_t>(i);
        const SpectralField f = random_scalar_field(grid, prof);
        // s > 0 embeds the Besov norm into weak-L^l; s < 0 goes the other way
        const double num = s > 0.0 ? weak_lp_norm(f, ell) : besov_value(f, s, p);
        const double den = s > 0.0 ? besov_value(f, s, p) : weak_lp_norm(f, ell);
        if (den == 0.0) continue;
        ratios.push_back(num / den);
    }
    return stats_of(std::move(ratios));
}

ConstantStats verify_product(const Grid& grid, int ensemble, double p, double s,
                             std::uint64_t seed) {
    const int n = grid.dim();
    if (n < 3 || !(n / 2.0 < p && p < n) || !(0.0 < s && s < 1.0))
        throw precondition_error("exponent-out-of-range: need n >= 3, n/2 < p < n, 0 < s < 1");
    std::vector<double> ratios;
    ratios.reserve(ensemble);
    for (int i = 0; i < ensemble; ++i) {
        SpectrumProfile pg, ph;
        pg.alpha = 0.5;
        pg.seed = seed + 2 * static_cast<std::uint64_t>(i);
        ph.alpha = 0.5;
        ph.seed = seed + 2 * static_cast<std::uint64_t>(i) + 1;
        const SpectralField g = random_scalar_field(grid, pg);
        const SpectralField h = random_scalar_field(grid, ph);
        const double denom = weak_lp_norm(g, static_cast<double>(n)) * besov_value(h, s, p);
        if (denom == 0.0) continue;  // degenerate pair skipped
        const SpectralField gh = pointwise_product(g, h);
        ratios.push_back(besov_value(gh, s - 1.0, p) / denom);
    }
    return stats_of(std::move(ratios));
}

}  // namespace nsbesov
