#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "nsbesov/errors.hpp"
#include "nsbesov/field.hpp"
#include "nsbesov/multipliers.hpp"
#include "nsbesov/random.hpp"
#include "nsbesov/snapshot.hpp"

using namespace nsbesov;

namespace {

std::vector<double> cosine_samples(const Grid& g, int axis, int m) {
    std::vector<double> s(g.size());
    const int N = g.points_per_axis();
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t rest = i;
        int idx[3] = {0, 0, 0};
        for (int d = g.dim() - 1; d >= 0; --d) {
            idx[d] = static_cast<int>(rest % N);
            rest /= N;
        }
        const double x = g.box_length() * idx[axis] / N;
        s[i] = std::cos(m * 2.0 * M_PI / g.box_length() * x);
    }
    return s;
}

std::vector<double> random_mean_zero_samples(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> s(g.size());
    double mean = 0.0;
    for (double& v : s) {
        v = unif(rng);
        mean += v;
    }
    mean /= s.size();
    for (double& v : s) v -= mean;
    return s;
}

}  // namespace

TEST_CASE("make_grid accepts valid parameters and rejects bad ones") {
    const Grid g = make_grid(3, 32, 2.0 * M_PI);
    CHECK(g.dim() == 3);
    CHECK(g.size() == 32u * 32u * 32u);
    // L = 2pi makes k = m: integer frequencies bounded by N/2
    CHECK(g.k_unit() == doctest::Approx(1.0));
    double max_m = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.freqs(i);
        for (int d = 0; d < 3; ++d) max_m = std::max(max_m, static_cast<double>(std::abs(m[d])));
    }
    CHECK(max_m == 16);

    const Grid g2 = make_grid(3, 8, 1.0);
    CHECK(g2.k_unit() == doctest::Approx(2.0 * M_PI));

    CHECK_THROWS_AS(make_grid(3, 33, 2.0 * M_PI), precondition_error);
    CHECK_THROWS_AS(make_grid(3, 4, 2.0 * M_PI), precondition_error);
    CHECK_THROWS_AS(make_grid(4, 32, 2.0 * M_PI), precondition_error);
    CHECK_THROWS_AS(make_grid(3, 32, -1.0), precondition_error);
}

TEST_CASE("transform of a pure cosine puts 1/2 at +-k") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    const SpectralField f = transform(g, cosine_samples(g, 0, 1));
    const std::size_t plus = g.flat({1, 0, 0});
    const std::size_t minus = g.flat({-1, 0, 0});
    CHECK(std::abs(f.coeff(plus) - cplx(0.5, 0.0)) < 1e-13);
    CHECK(std::abs(f.coeff(minus) - cplx(0.5, 0.0)) < 1e-13);
    double off = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (i != plus && i != minus) off = std::max(off, std::abs(f.coeff(i)));
    CHECK(off < 1e-13);
    CHECK(f.hermitian_within());
}

TEST_CASE("transform of zeros is zero and zero mode is always pinned") {
    const Grid g = make_grid(2, 8, 1.0);
    const SpectralField f = transform(g, std::vector<double>(g.size(), 0.0));
    CHECK(max_abs_coeff(f) == 0.0);

    const SpectralField c = transform(g, std::vector<double>(g.size(), 7.5));
    CHECK(std::abs(c.coeff(0)) == 0.0);  // constants are projected out
}

TEST_CASE("roundtrip identity on mean-zero samples") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    const auto samples = random_mean_zero_samples(g, 11);
    const SpectralField f = transform(g, samples);
    const auto back = inverse_transform(f);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        worst = std::max(worst, std::abs(back[i] - samples[i]));
        scale = std::max(scale, std::abs(samples[i]));
    }
    CHECK(worst < 1e-12 * scale);
}

TEST_CASE("energy identity: physical quadrature equals L^n sum of |coeffs|^2") {
    const Grid g = make_grid(3, 16, 2.5);
    const auto samples = random_mean_zero_samples(g, 5);
    const SpectralField f = transform(g, samples);
    const double cell = std::pow(g.box_length() / g.points_per_axis(), 3);
    double phys = 0.0;
    const auto back = inverse_transform(f);  // mean-free version of samples
    for (double v : back) phys += v * v * cell;
    double spec = 0.0;
    for (const cplx& c : f.coeffs()) spec += std::norm(c);
    spec *= std::pow(g.box_length(), 3);
    CHECK(phys == doctest::Approx(spec).epsilon(1e-10));
}

TEST_CASE("random_field is deterministic and solenoidal option projects") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.alpha = 1.0;
    prof.seed = 7;
    const VectorField a = random_field(g, prof, true);
    const VectorField b = random_field(g, prof, true);
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(a[d].coeff(i) == b[d].coeff(i));

    CHECK(a.divergence_free_within(1e-10));
    CHECK(a.is_real());
    for (int d = 0; d < 3; ++d) CHECK(a[d].hermitian_within());

    const VectorField raw = random_field(g, prof, false);
    const VectorField projected = leray_project(raw);
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(std::abs(projected[d].coeff(i) - a[d].coeff(i)) < 1e-15);
}

TEST_CASE("random_field validates the profile") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile bad;
    bad.alpha = -2.0;  // <= -n/2
    CHECK_THROWS_AS(random_field(g, bad, false), precondition_error);
    SpectrumProfile badcut;
    badcut.k_cut = 100.0;
    CHECK_THROWS_AS(random_field(g, badcut, false), precondition_error);
}

TEST_CASE("pointwise_product: cos * cos puts 1/4 at m = +-2 e1") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    const SpectralField f = transform(g, cosine_samples(g, 0, 1));
    const SpectralField prod = pointwise_product(f, f);
    const std::size_t p2 = g.flat({2, 0, 0});
    const std::size_t m2 = g.flat({-2, 0, 0});
    CHECK(std::abs(prod.coeff(p2) - cplx(0.25, 0.0)) < 1e-13);
    CHECK(std::abs(prod.coeff(m2) - cplx(0.25, 0.0)) < 1e-13);
    CHECK(std::abs(prod.coeff(0)) == 0.0);  // cos^2 mean removed
    double off = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (i != p2 && i != m2) off = std::max(off, std::abs(prod.coeff(i)));
    CHECK(off < 1e-13);
}

TEST_CASE("pointwise_product with zero is zero, and grids must match") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    const SpectralField f = transform(g, random_mean_zero_samples(g, 3));
    const SpectralField z(g, true);
    CHECK(max_abs_coeff(pointwise_product(f, z)) == 0.0);

    const Grid g2 = make_grid(3, 32, 2.0 * M_PI);
    const SpectralField h(g2, true);
    CHECK_THROWS_AS(pointwise_product(f, h), precondition_error);
}

TEST_CASE("pointwise_product matches brute-force spectral convolution at N=16") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile pf, pg;
    pf.seed = 21;
    pg.seed = 22;
    const SpectralField f = random_scalar_field(g, pf);
    const SpectralField h = random_scalar_field(g, pg);
    const SpectralField prod = pointwise_product(f, h);

    // oracle: dealias both inputs, convolve exactly (no wrap can land inside
    // the retained band), re-truncate, zero mean
    SpectralField fa = f, ha = h;
    dealias_23(fa);
    dealias_23(ha);
    const int cut = g.points_per_axis() / 3;
    std::vector<std::pair<std::array<int, 3>, cplx>> fm, hm;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (fa.coeff(i) != cplx(0, 0)) fm.push_back({g.freqs(i), fa.coeff(i)});
        if (ha.coeff(i) != cplx(0, 0)) hm.push_back({g.freqs(i), ha.coeff(i)});
    }
    SpectralField oracle(g, true);
    for (const auto& [mf, cf] : fm)
        for (const auto& [mh, ch] : hm) {
            const std::array<int, 3> m{mf[0] + mh[0], mf[1] + mh[1], mf[2] + mh[2]};
            if (std::abs(m[0]) > cut || std::abs(m[1]) > cut || std::abs(m[2]) > cut) continue;
            oracle.coeffs()[g.flat(m)] += cf * ch;
        }
    oracle.zero_mean();

    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(prod.coeff(i) - oracle.coeff(i)));
    CHECK(worst < 1e-12 * std::max(1.0, max_abs_coeff(oracle)));
}

TEST_CASE("pointwise_product is commutative and bilinear") {
    const Grid g = make_grid(2, 16, 2.0 * M_PI);
    SpectrumProfile pa, pb, pc;
    pa.seed = 31;
    pb.seed = 32;
    pc.seed = 33;
    const SpectralField a = random_scalar_field(g, pa);
    const SpectralField b = random_scalar_field(g, pb);
    const SpectralField c = random_scalar_field(g, pc);

    const SpectralField ab = pointwise_product(a, b);
    const SpectralField ba = pointwise_product(b, a);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(ab.coeff(i) - ba.coeff(i)));
    CHECK(worst < 1e-14);

    SpectralField bc = b;
    bc += c;
    const SpectralField lhs = pointwise_product(a, bc);
    SpectralField rhs = pointwise_product(a, b);
    rhs += pointwise_product(a, c);
    worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(lhs.coeff(i) - rhs.coeff(i)));
    CHECK(worst < 1e-13 * std::max(1.0, max_abs_coeff(lhs)));
}

TEST_CASE("snapshot roundtrip is bit-exact and re-save is byte-identical") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 99;
    const VectorField v = random_field(g, prof, true);
    const std::string path = "snapshot_test.nsbf";
    const std::string path2 = "snapshot_test2.nsbf";
    save_snapshot(v, path);
    const Snapshot snap = load_snapshot(path);
    REQUIRE(snap.is_vector());
    const VectorField w = snap.as_vector();
    for (int d = 0; d < 3; ++d)
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(v[d].coeff(i) == w[d].coeff(i));

    save_snapshot(w, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::vector<char> b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::vector<char> b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("snapshot loader rejects garbage and truncated files") {
    {
        std::ofstream out("bad_magic.nsbf", std::ios::binary);
        out << "JUNKJUNKJUNK";
    }
    CHECK_THROWS_AS(load_snapshot("bad_magic.nsbf"), io_error);
    std::remove("bad_magic.nsbf");

    const Grid g = make_grid(2, 8, 1.0);
    SpectrumProfile prof;
    const VectorField v = random_field(g, prof, false);
    save_snapshot(v, "trunc.nsbf");
    {
        std::ifstream in("trunc.nsbf", std::ios::binary);
        std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        buf.resize(buf.size() / 2);
        std::ofstream out("trunc.nsbf", std::ios::binary | std::ios::trunc);
        out.write(buf.data(), buf.size());
    }
    CHECK_THROWS_AS(load_snapshot("trunc.nsbf"), io_error);
    std::remove("trunc.nsbf");

    CHECK_THROWS_AS(load_snapshot("does_not_exist.nsbf"), io_error);
}

TEST_CASE("embed preserves coefficients on the finer grid") {
    const Grid g = make_grid(3, 16, 2.0 * M_PI);
    const Grid fine = make_grid(3, 32, 2.0 * M_PI);
    SpectrumProfile prof;
    prof.seed = 13;
    prof.k_cut = 5.0;
    const SpectralField f = random_scalar_field(g, prof);
    const SpectralField F = embed(f, fine);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.freqs(i);
        if (m[0] == -8 || m[1] == -8 || m[2] == -8) continue;
        CHECK(F.coeff(fine.flat(m)) == f.coeff(i));
    }
    // physical samples at shared points coincide (band-limited interpolation)
    const auto cs = inverse_transform(f);
    const auto fs = inverse_transform(F);
    const int N = g.points_per_axis();
    double worst = 0.0;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b)
            for (int c = 0; c < N; ++c) {
                const std::size_t ic = (static_cast<std::size_t>(a) * N + b) * N + c;
                const std::size_t jc =
                    (static_cast<std::size_t>(2 * a) * 32 + 2 * b) * 32 + 2 * c;
                worst = std::max(worst, std::abs(cs[ic] - fs[jc]));
            }
    CHECK(worst < 1e-12);
}
