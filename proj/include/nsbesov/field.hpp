#pragma once

#include <complex>
#include <vector>

#include "nsbesov/grid.hpp"

namespace nsbesov {

using cplx = std::complex<double>;

// Fourier-side representation of a scalar field on the periodic grid.
// Coefficients are stored as the full complex cube in row-major DFT index
// order. The zero mode is pinned to 0 (mean-free surrogate for homogeneous
// spaces). `is_real` marks Hermitian-symmetric fields, i.e. coeff(-k) =
// conj(coeff(k)) with self-paired Nyquist planes real.
class SpectralField {
  public:
    SpectralField() = default;
    explicit SpectralField(const Grid& grid, bool is_real = true)
        : grid_(grid), is_real_(is_real), coeffs_(grid.size(), cplx(0.0, 0.0)) {}

    const Grid& grid() const { return grid_; }
    bool is_real() const { return is_real_; }
    void set_is_real(bool v) { is_real_ = v; }

    const std::vector<cplx>& coeffs() const { return coeffs_; }
    std::vector<cplx>& coeffs() { return coeffs_; }
    cplx coeff(std::size_t i) const { return coeffs_[i]; }

    void zero_mean() { coeffs_[0] = cplx(0.0, 0.0); }

    // max_k |coeff(-k) - conj(coeff(k))| <= tol * max_k |coeff(k)|
    bool hermitian_within(double tol = 1e-12) const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double a);
    SpectralField& operator*=(cplx a);

  private:
    Grid grid_;
    bool is_real_ = true;
    std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double a, SpectralField f);

// n-component field sharing one grid.
class VectorField {
  public:
    VectorField() = default;
    explicit VectorField(const Grid& grid, bool is_real = true) {
        comps_.reserve(grid.dim());
        for (int d = 0; d < grid.dim(); ++d) comps_.emplace_back(grid, is_real);
    }

    const Grid& grid() const { return comps_.at(0).grid(); }
    int ncomp() const { return static_cast<int>(comps_.size()); }
    const SpectralField& operator[](int i) const { return comps_[i]; }
    SpectralField& operator[](int i) { return comps_[i]; }

    bool is_real() const;
    void set_is_real(bool v);
    void zero_mean();

    // max_k |k . u(k)| <= tol * max_k |u(k)|
    bool divergence_free_within(double tol = 1e-10) const;

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double a);

  private:
    std::vector<SpectralField> comps_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double a, VectorField f);

// --- transforms -----------------------------------------------------------
//
// Forward divides by N^n, so cos(k.x) has coefficients 1/2 at +-k; the
// inverse is the plain synthesis sum. The forward zeroes the k=0 mode
// (fields are mean-free by construction), so roundtrip identity holds for
// mean-zero samples.

SpectralField transform(const Grid& grid, const std::vector<double>& samples);
SpectralField transform_complex(const Grid& grid, const std::vector<cplx>& samples);
std::vector<double> inverse_transform(const SpectralField& f);
std::vector<cplx> inverse_transform_complex(const SpectralField& f);

// --- spectral algebra ------------------------------------------------------

// Dealiased product: modes with any |m_i| > N/3 are zeroed before and after
// the physical-space multiplication; the zero mode is re-zeroed.
// Requires both fields real; use pointwise_product_general for complex
// intermediates (same dealiasing, no realness requirement).
SpectralField pointwise_product(const SpectralField& f, const SpectralField& g);
SpectralField pointwise_product_general(const SpectralField& f, const SpectralField& g);

void dealias_23(SpectralField& f);
void dealias_23(VectorField& v);

// i k_d f  (spectral derivative along axis d)
SpectralField derivative(const SpectralField& f, int axis);
// sum_d i k_d v_d
SpectralField divergence(const VectorField& v);
// (grad phi)_d = i k_d phi
VectorField gradient(const SpectralField& phi);

double max_abs_coeff(const SpectralField& f);
double max_abs_coeff(const VectorField& v);
double l2_coeff_norm(const VectorField& v);

// Zero-pad f onto a finer grid (same L, larger N); the continuum field is
// unchanged. N_fine must be a multiple of 2 of the source and contain all
// source modes.
SpectralField embed(const SpectralField& f, const Grid& fine);
VectorField embed(const VectorField& f, const Grid& fine);

}  // namespace nsbesov
