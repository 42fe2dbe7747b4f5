#include "doctest.h"

#include <cmath>

#include "nsbesov/errors.hpp"
#include "nsbesov/multipliers.hpp"
#include "nsbesov/norms.hpp"
#include "nsbesov/random.hpp"

using namespace nsbesov;

namespace {

double max_diff(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.grid().size(); ++i)
        worst = std::max(worst, std::abs(a.coeff(i) - b.coeff(i)));
    return worst;
}

double max_diff(const VectorField& a, const VectorField& b) {
    double worst = 0.0;
    for (int d = 0; d < a.ncomp(); ++d) worst = std::max(worst, max_diff(a[d], b[d]));
    return worst;
}

SpectralField cosine_mode(const Grid& g, int m_axis0, double amp = 1.0) {
    SpectralField f(g, true);
    f.coeffs()[g.flat({m_axis0, 0, 0})] = cplx(0.5 * amp, 0.0);
    f.coeffs()[g.flat({-m_axis0, 0, 0})] = cplx(0.5 * amp, 0.0);
    return f;
}

}  // namespace

TEST_CASE("apply_multiplier: identity symbol, eigenmode, dyadic cross-check") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 5;
    const SpectralField f = random_scalar_field(g, prof);

    SUBCASE("m = 1 is the identity on mean-zero fields") {
        MultiplierSymbol one{[](const std::array<double, 3>&, double) { return cplx(1.0, 0.0); },
                             0.0, "one"};
        CHECK(max_diff(apply_multiplier(one, f), f) == 0.0);
    }

    SUBCASE("|xi|^2 fixes cos(x1)") {
        MultiplierSymbol lap{[](const std::array<double, 3>&, double kk) { return cplx(kk * kk, 0.0); },
                             2.0, "laplacian"};
        const SpectralField c = cosine_mode(g, 1);
        CHECK(max_diff(apply_multiplier(lap, c), c) < 1e-14);
    }

    SUBCASE("dyadic-sum path agrees with the pointwise path to 1e-12") {
        MultiplierSymbol half{[](const std::array<double, 3>&, double kk) {
                                  return cplx(std::sqrt(kk), 0.0);
                              },
                              0.5, "sqrt"};
        const SpectralField a = apply_multiplier(half, f);
        const SpectralField b = apply_multiplier_dyadic(half, f);
        CHECK(max_diff(a, b) < 1e-12 * max_abs_coeff(a));
    }

    SUBCASE("symbols singular on the lattice are rejected") {
        MultiplierSymbol bad{[](const std::array<double, 3>&, double kk) {
                                 return cplx(1.0 / (kk * kk - 4.0), 0.0);  // blows up at |k| = 2
                             },
                             0.0, "singular"};
        CHECK_THROWS_AS(apply_multiplier(bad, f), numerical_error);
    }
}

TEST_CASE("leray projection algebra") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 9;

    SUBCASE("pure gradients are annihilated") {
        const SpectralField phi = random_scalar_field(g, prof);
        const VectorField grad = gradient(phi);
        CHECK(max_abs_coeff(leray_project(grad)) < 1e-12 * max_abs_coeff(grad));
    }

    SUBCASE("divergence-free fields are fixed") {
        const VectorField v = random_field(g, prof, true);
        CHECK(max_diff(leray_project(v), v) < 1e-12 * max_abs_coeff(v));
    }

    SUBCASE("idempotent, annihilates divergence, self-adjoint") {
        const VectorField v = random_field(g, prof, false);
        const VectorField pv = leray_project(v);
        CHECK(max_diff(leray_project(pv), pv) < 1e-12 * max_abs_coeff(pv));
        CHECK(max_abs_coeff(divergence(pv)) < 1e-13 * g.k_max() * max_abs_coeff(pv));

        SpectrumProfile prof2;
        prof2.seed = 10;
        const VectorField w = random_field(g, prof2, false);
        // <Pv, w> = <v, Pw> in the spectral inner product
        cplx lhs(0, 0), rhs(0, 0);
        const VectorField pw = leray_project(w);
        for (int d = 0; d < 3; ++d)
            for (std::size_t i = 0; i < g.size(); ++i) {
                lhs += pv[d].coeff(i) * std::conj(w[d].coeff(i));
                rhs += v[d].coeff(i) * std::conj(pw[d].coeff(i));
            }
        CHECK(std::abs(lhs - rhs) < 1e-12 * std::abs(lhs));
    }
}

TEST_CASE("fractional Laplacian: eigenmode, exact inverse, per-block bound") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);

    SUBCASE("a = 2 on cos(x1) is the identity (|k| = 1)") {
        const SpectralField c = cosine_mode(g, 1);
        CHECK(max_diff(frac_laplacian(c, 2.0), c) < 1e-14);
    }

    SUBCASE("negative power inverts exactly on mean-zero fields") {
        SpectrumProfile prof;
        prof.seed = 12;
        const SpectralField f = random_scalar_field(g, prof);
        const SpectralField back = frac_laplacian(frac_laplacian(f, 0.7), -0.7);
        CHECK(max_diff(back, f) < 1e-12 * max_abs_coeff(f));
    }

    SUBCASE("mapping ratio bounded by 4^{|a|} at p = 2") {
        SpectrumProfile prof;
        prof.seed = 13;
        const SpectralField f = random_scalar_field(g, prof);
        for (double a : {0.5, 1.0, -1.0}) {
            const double s = 0.25;
            const double lhs = besov_value(frac_laplacian(f, a), s - a, 2.0);
            const double rhs = besov_value(f, s, 2.0);
            CHECK(lhs <= std::pow(4.0, std::abs(a)) * rhs * (1 + 1e-12));
        }
    }
}

TEST_CASE("resolvent of the Laplacian") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 19;
    const SpectralField f = random_scalar_field(g, prof);

    SUBCASE("sector membership is validated") {
        CHECK_THROWS_AS(resolvent_laplacian(f, SectorPoint{cplx(5.0, 0.0)}, 2.0), precondition_error);
        CHECK_THROWS_AS(resolvent_laplacian(f, SectorPoint{cplx(0.0, 0.0)}, 2.0), precondition_error);
        CHECK_NOTHROW(resolvent_laplacian(f, SectorPoint{cplx(-3.0, 0.1)}, 2.0));
    }

    SUBCASE("single mode scales by (lambda - |k|^2)^{-1}") {
        SpectralField mode(g, false);
        mode.coeffs()[g.flat({2, 1, 0})] = cplx(1.0, 0.0);
        const cplx lambda = 4.0 * std::exp(cplx(0.0, 2.0 * M_PI / 3.0));
        const SpectralField r = resolvent_laplacian(mode, SectorPoint{lambda}, 2.0);
        const cplx expected = 1.0 / (lambda - 5.0);
        CHECK(std::abs(r.coeff(g.flat({2, 1, 0})) - expected) < 1e-14);
    }

    SUBCASE("(lambda + Delta) inverts the resolvent") {
        const cplx lambda = 7.0 * std::exp(cplx(0.0, 2.5));
        const SpectralField r = resolvent_laplacian(f, SectorPoint{lambda}, 2.0);
        // apply (lambda - |k|^2) pointwise
        SpectralField back(g, false);
        for (std::size_t i = 1; i < g.size(); ++i)
            back.coeffs()[i] = (lambda - g.k_squared(i)) * r.coeff(i);
        CHECK(max_diff(back, f) < 1e-12 * max_abs_coeff(f));
    }

    SUBCASE("|lambda|-scaled norm stays bounded along a ray") {
        double worst = 0.0;
        for (double r : {1.0, 10.0, 100.0}) {
            const cplx lambda = r * std::exp(cplx(0.0, 2.0 * M_PI / 3.0));
            const SpectralField out = resolvent_laplacian(f, SectorPoint{lambda}, 2.0);
            const double ratio = besov_value(out, 0.25, 2.0) * r / besov_value(f, 0.25, 2.0);
            worst = std::max(worst, ratio);
        }
        CHECK(worst < 3.0);  // distance of the ray to the spectrum is sin(pi/3)
    }

    SUBCASE("scaled resolvent constant is nonincreasing along the ray beyond the spectrum") {
        // within the spectral bulk the constant plateaus near csc(theta);
        // beyond 2 k_max^2 it decreases monotonically toward 1
        const double kmax2 = g.k_max() * g.k_max();
        double prev = kInfinity;
        for (double r = 2.0 * kmax2; r <= 32.0 * kmax2; r *= 2.0) {
            const cplx lambda = r * std::exp(cplx(0.0, M_PI / 3.0));
            const SpectralField out = resolvent_laplacian(f, SectorPoint{lambda}, 2.0);
            const double c = besov_value(out, 0.25, 2.0) * r / besov_value(f, 0.25, 2.0);
            CHECK(c <= prev * (1.0 + 1e-12));
            prev = c;
        }
        // plateau region: bounded by the sector geometry with a little slack
        for (double r : {4.0, 16.0, 64.0}) {
            const cplx lambda = r * std::exp(cplx(0.0, M_PI / 3.0));
            const SpectralField out = resolvent_laplacian(f, SectorPoint{lambda}, 2.0);
            const double c = besov_value(out, 0.25, 2.0) * r / besov_value(f, 0.25, 2.0);
            CHECK(c <= 1.0 / std::sin(M_PI / 3.0) * 1.03);
        }
    }

    SUBCASE("resolvent identity R(lambda) - R(mu) = (mu - lambda) R(lambda) R(mu)") {
        const cplx lambda = 5.0 * std::exp(cplx(0.0, 2.0));
        const cplx mu = 12.0 * std::exp(cplx(0.0, -2.4));
        const SpectralField rl = resolvent_laplacian(f, SectorPoint{lambda}, 2.0);
        const SpectralField rm = resolvent_laplacian(f, SectorPoint{mu}, 2.0);
        SpectralField lhs = rl;
        lhs -= rm;
        SpectralField rhs = resolvent_laplacian(rm, SectorPoint{lambda}, 2.0);
        rhs *= (mu - lambda);
        CHECK(max_diff(lhs, rhs) < 1e-11 * std::max(1.0, max_abs_coeff(lhs)));
    }
}

TEST_CASE("resolvent L^p gain") {
    const Grid g = make_grid(3, 32, 2.0 * M_PI);

    SUBCASE("condition b >= n/p is enforced") {
        SpectrumProfile prof;
        prof.seed = 3;
        const SpectralField f = random_scalar_field(g, prof);
        CHECK_THROWS_AS(resolvent_lp_gain(f, SectorPoint{cplx(-2.0, 1.0)}, 1.0, 0.0, 2.0, 4.0),
                        precondition_error);
    }

    SUBCASE("lambda-sweep slope matches -(b - n(1/p - 1/p0))/2 within 10%") {
        // Coherent-phase bump: every mode of shell j carries the same real
        // amplitude, normalized so the 2^{js}-weighted L^p shell profile is
        // flat. Aligned phases saturate Bernstein, which random phases do
        // not, and the L^p gain rate is a Bernstein effect.
        const double b = 2.0, p = 2.0, p0 = 4.0, s = 0.0;
        SpectralField f(g, true);
        for (int j = -1; j <= 4; ++j) {
            SpectralField shell(g, true);
            for (std::size_t i = 1; i < g.size(); ++i) {
                const double kk = std::sqrt(g.k_squared(i));
                const int jhat = static_cast<int>(std::lround(std::log2(kk)));
                if (jhat == j) shell.coeffs()[i] = cplx(1.0, 0.0);
            }
            const double norm = lp_norm(shell, p);
            if (norm == 0.0) continue;
            shell *= std::pow(2.0, -j * s) / norm;
            f += shell;
        }
        const double predicted = -(b - 3.0 * (1.0 / p - 1.0 / p0)) / 2.0;
        std::vector<double> logl, logn;
        for (double r = 1.5; r <= 160.0; r *= 2.0) {
            const cplx lambda = r * std::exp(cplx(0.0, 2.0 * M_PI / 3.0));
            const LpGainResult res = resolvent_lp_gain(f, SectorPoint{lambda}, b, s, p, p0);
            logl.push_back(std::log(r));
            logn.push_back(std::log(res.lhs_norm));
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const int m = static_cast<int>(logl.size());
        for (int i = 0; i < m; ++i) {
            sx += logl[i];
            sy += logn[i];
            sxx += logl[i] * logl[i];
            sxy += logl[i] * logn[i];
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        CHECK(std::abs(slope - predicted) < 0.1 * std::abs(predicted));
    }

    SUBCASE("single mode scales every norm by |m_b(k)|") {
        SpectralField f(g, true);
        f.coeffs()[g.flat({0, 4, 0})] = cplx(0.5, 0.0);
        f.coeffs()[g.flat({0, -4, 0})] = cplx(0.5, 0.0);
        const cplx lambda = 30.0 * std::exp(cplx(0.0, 2.1));
        const LpGainResult res = resolvent_lp_gain(f, SectorPoint{lambda}, 2.0, 0.25, 2.0, 4.0);
        const double scale = std::abs(1.0 / (lambda - 16.0));
        CHECK(res.lhs_norm ==
              doctest::Approx(scale * besov_value(f, 0.25, 4.0)).epsilon(1e-12));
    }
}

TEST_CASE("composition operator m_{a,b}") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 43;
    const SpectralField f = random_scalar_field(g, prof);
    const SectorPoint pt{8.0 * std::exp(cplx(0.0, 2.2))};

    SUBCASE("a = 0 reduces to the resolvent power") {
        CHECK(max_diff(composition(f, pt, 0.0, 2.0), resolvent_laplacian(f, pt, 2.0)) < 1e-14);
    }

    SUBCASE("a = b = 2 on a single mode") {
        SpectralField mode(g, false);
        mode.coeffs()[g.flat({1, 1, 1})] = cplx(2.0, 0.0);
        const SpectralField out = composition(mode, pt, 2.0, 2.0);
        const cplx expected = 2.0 * 3.0 / (pt.lambda - 3.0);
        CHECK(std::abs(out.coeff(g.flat({1, 1, 1})) - expected) < 1e-13);
    }

    SUBCASE("all three evaluation orders agree to 1e-12") {
        const SpectralField direct = composition(f, pt, 1.0, 2.0);
        const SpectralField ab = frac_laplacian(resolvent_laplacian(f, pt, 2.0), 1.0);
        const SpectralField ba = resolvent_laplacian(frac_laplacian(f, 1.0), pt, 2.0);
        CHECK(max_diff(direct, ab) < 1e-12 * max_abs_coeff(direct));
        CHECK(max_diff(direct, ba) < 1e-12 * max_abs_coeff(direct));
    }

    SUBCASE("precondition 0 <= a <= b") {
        CHECK_THROWS_AS(composition(f, pt, 3.0, 2.0), precondition_error);
        CHECK_THROWS_AS(composition(f, pt, -1.0, 2.0), precondition_error);
    }
}

TEST_CASE("heat semigroup") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 47;
    const SpectralField f = random_scalar_field(g, prof);

    SUBCASE("t = 0 is the identity; negative t rejected") {
        CHECK(max_diff(heat_semigroup(f, 0.0), f) == 0.0);
        CHECK_THROWS_AS(heat_semigroup(f, -0.5), precondition_error);
    }

    SUBCASE("cos(x1) decays by e^{-t}") {
        const SpectralField c = cosine_mode(g, 1);
        SpectralField expected = c;
        expected *= std::exp(-1.0);
        CHECK(max_diff(heat_semigroup(c, 1.0), expected) < 1e-15);
    }

    SUBCASE("semigroup law is exact") {
        const SpectralField one = heat_semigroup(heat_semigroup(f, 0.3), 0.7);
        const SpectralField two = heat_semigroup(f, 1.0);
        CHECK(max_diff(one, two) < 1e-15);
    }

    SUBCASE("smoothing ratio finite and resolution-stable") {
        SpectrumProfile flat;
        flat.seed = 48;
        flat.alpha = -1.45;
        const double s = 0.0, tau = 0.5, p = 2.0;
        const SpectralField f32 = random_scalar_field(make_grid(3, 32, 2.0 * M_PI), flat);
        const Grid fine = make_grid(3, 64, 2.0 * M_PI);
        const SpectralField f64 = embed(f32, fine);
        auto sup_ratio = [&](const SpectralField& field) {
            double worst = 0.0;
            const double denom = besov_value(field, s, p);
            for (double t = 0.01; t <= 0.1; t *= std::sqrt(2.0)) {
                const double num =
                    besov_norm(heat_semigroup(field, t), BesovIndex{s + tau, p, 1.0}).value;
                worst = std::max(worst, std::pow(t, tau / 2.0) * num / denom);
            }
            return worst;
        };
        const double r32 = sup_ratio(f32);
        const double r64 = sup_ratio(f64);
        CHECK(std::isfinite(r32));
        CHECK(std::abs(r64 - r32) / r32 < 0.25);
    }
}

TEST_CASE("commuting symbols commute as operators") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 53;
    const SpectralField f = random_scalar_field(g, prof);
    const SectorPoint pt{5.0 * std::exp(cplx(0.0, 2.0))};

    const SpectralField a = heat_semigroup(frac_laplacian(f, 1.0), 0.2);
    const SpectralField b = frac_laplacian(heat_semigroup(f, 0.2), 1.0);
    CHECK(max_diff(a, b) < 1e-12 * max_abs_coeff(a));

    const SpectralField c = resolvent_laplacian(frac_laplacian(f, 0.5), pt, 2.0);
    const SpectralField d = frac_laplacian(resolvent_laplacian(f, pt, 2.0), 0.5);
    CHECK(max_diff(c, d) < 1e-12 * max_abs_coeff(c));
}
