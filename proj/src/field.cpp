#include "nsbesov/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>

#include "nsbesov/errors.hpp"

namespace nsbesov {

// --- FFTW plan cache --------------------------------------------------------
// One out-of-place c2c plan per (dim, N, sign), executed on caller buffers
// via fftw_execute_dft (thread-safe); planner access is serialized.

namespace {

struct PlanKey {
    int n;
    int N;
    int sign;
    bool operator<(const PlanKey& o) const {
        if (n != o.n) return n < o.n;
        if (N != o.N) return N < o.N;
        return sign < o.sign;
    }
};

class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void execute(int n, int N, int sign, cplx* in, cplx* out) {
        fftw_plan plan;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const PlanKey key{n, N, sign};
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                std::vector<int> dims(n, N);
                std::size_t total = 1;
                for (int d = 0; d < n; ++d) total *= N;
                std::vector<cplx> a(total), b(total);
                plan = fftw_plan_dft(n, dims.data(), reinterpret_cast<fftw_complex*>(a.data()),
                                     reinterpret_cast<fftw_complex*>(b.data()), sign,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
                it = plans_.emplace(key, plan).first;
            }
            plan = it->second;
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out));
    }

  private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

void check_same_grid(const Grid& a, const Grid& b) {
    if (a != b) throw precondition_error("grid-mismatch");
}

}  // namespace

// --- SpectralField -----------------------------------------------------------

bool SpectralField::hermitian_within(double tol) const {
    double max_amp = 0.0;
    for (const cplx& c : coeffs_) max_amp = std::max(max_amp, std::abs(c));
    if (max_amp == 0.0) return true;
    double worst = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        const std::size_t j = grid_.conjugate_index(i);
        worst = std::max(worst, std::abs(coeffs_[j] - std::conj(coeffs_[i])));
    }
    return worst <= tol * max_amp;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    check_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    is_real_ = is_real_ && other.is_real_;
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    check_same_grid(grid_, other.grid_);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    is_real_ = is_real_ && other.is_real_;
    return *this;
}

SpectralField& SpectralField::operator*=(double a) {
    for (cplx& c : coeffs_) c *= a;
    return *this;
}

SpectralField& SpectralField::operator*=(cplx a) {
    for (cplx& c : coeffs_) c *= a;
    if (a.imag() != 0.0) is_real_ = false;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double a, SpectralField f) { return f *= a; }

// --- VectorField --------------------------------------------------------------

bool VectorField::is_real() const {
    for (const auto& c : comps_)
        if (!c.is_real()) return false;
    return true;
}

void VectorField::set_is_real(bool v) {
    for (auto& c : comps_) c.set_is_real(v);
}

void VectorField::zero_mean() {
    for (auto& c : comps_) c.zero_mean();
}

bool VectorField::divergence_free_within(double tol) const {
    const Grid& g = grid();
    double max_amp = 0.0;
    for (const auto& c : comps_)
        for (const cplx& v : c.coeffs()) max_amp = std::max(max_amp, std::abs(v));
    if (max_amp == 0.0) return true;
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.k_vector(i);
        cplx div(0.0, 0.0);
        for (int d = 0; d < g.dim(); ++d) div += k[d] * comps_[d].coeff(i);
        worst = std::max(worst, std::abs(div));
    }
    return worst <= tol * max_amp;
}

VectorField& VectorField::operator+=(const VectorField& other) {
    for (int d = 0; d < ncomp(); ++d) comps_[d] += other.comps_[d];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
    for (int d = 0; d < ncomp(); ++d) comps_[d] -= other.comps_[d];
    return *this;
}

VectorField& VectorField::operator*=(double a) {
    for (auto& c : comps_) c *= a;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double a, VectorField f) { return f *= a; }

// --- transforms ----------------------------------------------------------------

SpectralField transform_complex(const Grid& grid, const std::vector<cplx>& samples) {
    if (samples.size() != grid.size()) throw precondition_error("shape-mismatch");
    SpectralField f(grid, false);
    std::vector<cplx> in(samples);
    PlanCache::instance().execute(grid.dim(), grid.points_per_axis(), FFTW_FORWARD, in.data(),
                                  f.coeffs().data());
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (cplx& c : f.coeffs()) c *= scale;
    f.zero_mean();
    return f;
}

SpectralField transform(const Grid& grid, const std::vector<double>& samples) {
    if (samples.size() != grid.size()) throw precondition_error("shape-mismatch");
    std::vector<cplx> in(samples.begin(), samples.end());
    SpectralField f = transform_complex(grid, in);
    f.set_is_real(true);
    return f;
}

std::vector<cplx> inverse_transform_complex(const SpectralField& f) {
    std::vector<cplx> in(f.coeffs());
    std::vector<cplx> out(in.size());
    PlanCache::instance().execute(f.grid().dim(), f.grid().points_per_axis(), FFTW_BACKWARD,
                                  in.data(), out.data());
    return out;
}

std::vector<double> inverse_transform(const SpectralField& f) {
    std::vector<cplx> out = inverse_transform_complex(f);
    std::vector<double> re(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
    return re;
}

// --- spectral algebra ------------------------------------------------------------

void dealias_23(SpectralField& f) {
    const Grid& g = f.grid();
    const int cut = g.points_per_axis() / 3;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto m = g.freqs(i);
        for (int d = 0; d < g.dim(); ++d) {
            if (std::abs(m[d]) > cut) {
                f.coeffs()[i] = cplx(0.0, 0.0);
                break;
            }
        }
    }
    f.zero_mean();
}

void dealias_23(VectorField& v) {
    for (int d = 0; d < v.ncomp(); ++d) dealias_23(v[d]);
}

SpectralField pointwise_product_general(const SpectralField& f, const SpectralField& g) {
    check_same_grid(f.grid(), g.grid());
    SpectralField a = f;
    SpectralField b = g;
    dealias_23(a);
    dealias_23(b);
    const std::vector<cplx> fa = inverse_transform_complex(a);
    const std::vector<cplx> fb = inverse_transform_complex(b);
    std::vector<cplx> prod(fa.size());
    for (std::size_t i = 0; i < fa.size(); ++i) prod[i] = fa[i] * fb[i];
    SpectralField out = transform_complex(f.grid(), prod);
    dealias_23(out);
    out.set_is_real(f.is_real() && g.is_real());
    return out;
}

SpectralField pointwise_product(const SpectralField& f, const SpectralField& g) {
    if (!f.is_real() || !g.is_real()) throw precondition_error("pointwise_product requires real fields");
    return pointwise_product_general(f, g);
}

SpectralField derivative(const SpectralField& f, int axis) {
    const Grid& g = f.grid();
    SpectralField out(g, f.is_real());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.k_vector(i);
        out.coeffs()[i] = cplx(0.0, k[axis]) * f.coeff(i);
    }
    return out;
}

SpectralField divergence(const VectorField& v) {
    const Grid& g = v.grid();
    SpectralField out(g, v.is_real());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto k = g.k_vector(i);
        cplx acc(0.0, 0.0);
        for (int d = 0; d < g.dim(); ++d) acc += cplx(0.0, k[d]) * v[d].coeff(i);
        out.coeffs()[i] = acc;
    }
    return out;
}

VectorField gradient(const SpectralField& phi) {
    const Grid& g = phi.grid();
    VectorField out(g, phi.is_real());
    for (int d = 0; d < g.dim(); ++d) out[d] = derivative(phi, d);
    return out;
}

double max_abs_coeff(const SpectralField& f) {
    double m = 0.0;
    for (const cplx& c : f.coeffs()) m = std::max(m, std::abs(c));
    return m;
}

double max_abs_coeff(const VectorField& v) {
    double m = 0.0;
    for (int d = 0; d < v.ncomp(); ++d) m = std::max(m, max_abs_coeff(v[d]));
    return m;
}

double l2_coeff_norm(const VectorField& v) {
    double s = 0.0;
    for (int d = 0; d < v.ncomp(); ++d)
        for (const cplx& c : v[d].coeffs()) s += std::norm(c);
    return std::sqrt(s);
}

SpectralField embed(const SpectralField& f, const Grid& fine) {
    const Grid& g = f.grid();
    if (fine.dim() != g.dim() || fine.box_length() != g.box_length() ||
        fine.points_per_axis() < g.points_per_axis())
        throw precondition_error("embed: target grid must refine the source grid");
    SpectralField out(fine, f.is_real());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const cplx c = f.coeff(i);
        if (c == cplx(0.0, 0.0)) continue;
        const auto m = g.freqs(i);
        // skip source Nyquist planes: they have no unambiguous continuum mode
        bool nyquist = false;
        for (int d = 0; d < g.dim(); ++d)
            if (m[d] == -g.points_per_axis() / 2) nyquist = true;
        if (nyquist) continue;
        out.coeffs()[fine.flat(m)] = c;
    }
    return out;
}

VectorField embed(const VectorField& f, const Grid& fine) {
    VectorField out(fine, f.is_real());
    for (int d = 0; d < f.ncomp(); ++d) out[d] = embed(f[d], fine);
    return out;
}

}  // namespace nsbesov
