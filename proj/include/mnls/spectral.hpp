#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace mnls {

using Complex = std::complex<double>;

/// Uniform periodic grid on the torus [0, 2*pi)^d with M points per axis.
///
/// Wavenumbers per axis are {-M/2, ..., M/2 - 1}; coefficients are stored in
/// the usual DFT order (non-negative modes first) with the last axis varying
/// fastest.
class Grid {
public:
    Grid(int dimension, int points_per_axis);

    int dimension() const { return dimension_; }
    int points_per_axis() const { return points_; }
    int largest_mode() const { return points_ / 2; }
    std::size_t size() const { return size_; }

    /// Node spacing 2*pi/M.
    double spacing() const;
    /// Spacing measured per largest mode, 2*pi/K; the convention used when
    /// quoting resolutions as "K = 2^7, dx = 0.049".
    double spacing_per_mode() const;

    /// Signed wavenumber of storage position `index` along one axis.
    int wavenumber(int index) const { return index < points_ / 2 ? index : index - points_; }
    /// Storage position of signed wavenumber k along one axis.
    int index_of(int k) const;
    double node(int j) const;

    /// |k|^2 for every flat storage index.
    std::span<const double> wavenumber_norm_sq() const { return *norm_sq_; }

    /// Multi-index (per axis storage positions) of a flat index.
    std::vector<int> unflatten(std::size_t flat) const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dimension_ == b.dimension_ && a.points_ == b.points_;
    }

private:
    int dimension_;
    int points_;
    std::size_t size_;
    std::shared_ptr<const std::vector<double>> norm_sq_;
};

/// Grid with M = 2K points per axis.
Grid make_grid(int dimension, int largest_mode);

/// Complex field on a periodic grid, held by its Fourier coefficients
/// f(x) = sum_k c_k exp(i k.x).
class SpectralField {
public:
    SpectralField(Grid grid, std::vector<Complex> coefficients);

    static SpectralField zero(const Grid& grid);

    const Grid& grid() const { return grid_; }
    std::span<const Complex> coefficients() const { return coefficients_; }
    /// Coefficient of the signed wavenumber k (d = 1).
    Complex coefficient(int k) const;

    bool is_finite() const;
    /// c_{-k} == conj(c_k) within `tolerance`, skipping the unpaired -M/2 modes.
    bool is_hermitian(double tolerance = 0.0) const;

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(Complex scale);

private:
    Grid grid_;
    std::vector<Complex> coefficients_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(Complex scale, SpectralField a);

SpectralField transform_forward(std::span<const Complex> values, const Grid& grid);
std::vector<Complex> transform_inverse(const SpectralField& field);

/// Samples f on the grid nodes and transforms. Only d = 1.
template <class F>
SpectralField sample_field(const Grid& grid, F&& f) {
    std::vector<Complex> values(grid.size());
    for (int j = 0; j < grid.points_per_axis(); ++j) values[j] = f(grid.node(j));
    return transform_forward(values, grid);
}

/// (sum_k (1 + |k|^2)^sigma |c_k|^2)^(1/2).
double h_sigma_norm(const SpectralField& field, double sigma);

/// Zeroes every mode with some |k_axis| > M/3.
SpectralField dealias_filter(const SpectralField& field);

/// |u|^2 u evaluated pointwise on the grid, optionally with 2/3-rule
/// truncation of the input and the product.
SpectralField cubic_nonlinearity(const SpectralField& field, bool dealias = false);

/// exp(-i * scale * |u|^2) u evaluated pointwise on the grid.
SpectralField nonlinear_phase(const SpectralField& field, double scale, bool dealias = false);

} // namespace mnls
