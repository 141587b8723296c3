#include "mnls/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace mnls {

namespace {

// fftw's planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans live for the whole process.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int dimension, int points, int sign) {
        std::lock_guard lock(mutex_);
        auto key = std::make_tuple(dimension, points, sign);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::size_t total = 1;
        for (int i = 0; i < dimension; ++i) total *= static_cast<std::size_t>(points);
        std::vector<int> dims(dimension, points);
        std::vector<Complex> scratch_in(total), scratch_out(total);
        fftw_plan plan = fftw_plan_dft(dimension, dims.data(),
                                       reinterpret_cast<fftw_complex*>(scratch_in.data()),
                                       reinterpret_cast<fftw_complex*>(scratch_out.data()), sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan) throw std::runtime_error("fftw: failed to create plan");
        plans_.emplace(key, plan);
        return plan;
    }

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
    }

    std::mutex mutex_;
    std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

void execute(const Grid& grid, int sign, std::span<const Complex> in, std::span<Complex> out) {
    fftw_plan plan = PlanCache::instance().get(grid.dimension(), grid.points_per_axis(), sign);
    // fftw does not modify the input of an out-of-place complex transform.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

std::vector<Complex> to_physical(const SpectralField& field) {
    std::vector<Complex> values(field.grid().size());
    execute(field.grid(), FFTW_BACKWARD, field.coefficients(), values);
    return values;
}

SpectralField from_physical(std::span<const Complex> values, const Grid& grid) {
    std::vector<Complex> coefficients(grid.size());
    execute(grid, FFTW_FORWARD, values, coefficients);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (auto& c : coefficients) c *= scale;
    return SpectralField(grid, std::move(coefficients));
}

bool outside_two_thirds(const Grid& grid, std::size_t flat) {
    const int cutoff = grid.points_per_axis() / 3;
    for (int index : grid.unflatten(flat)) {
        if (std::abs(grid.wavenumber(index)) > cutoff) return true;
    }
    return false;
}

} // namespace

Grid::Grid(int dimension, int points_per_axis) : dimension_(dimension), points_(points_per_axis) {
    if (dimension < 1) throw std::invalid_argument("grid dimension must be positive");
    if (points_per_axis < 2 || points_per_axis % 2 != 0)
        throw std::invalid_argument("grid points per axis must be even and >= 2, got " +
                                    std::to_string(points_per_axis));
    size_ = 1;
    for (int i = 0; i < dimension; ++i) size_ *= static_cast<std::size_t>(points_);

    auto norm_sq = std::make_shared<std::vector<double>>(size_, 0.0);
    for (std::size_t flat = 0; flat < size_; ++flat) {
        double sum = 0.0;
        for (int index : unflatten(flat)) {
            const double k = wavenumber(index);
            sum += k * k;
        }
        (*norm_sq)[flat] = sum;
    }
    norm_sq_ = std::move(norm_sq);
}

double Grid::spacing() const { return 2.0 * std::numbers::pi / points_; }

double Grid::spacing_per_mode() const { return 2.0 * std::numbers::pi / largest_mode(); }

int Grid::index_of(int k) const {
    if (k < -points_ / 2 || k >= points_ / 2)
        throw std::out_of_range("wavenumber " + std::to_string(k) + " outside grid");
    return k >= 0 ? k : k + points_;
}

double Grid::node(int j) const { return 2.0 * std::numbers::pi * j / points_; }

std::vector<int> Grid::unflatten(std::size_t flat) const {
    std::vector<int> indices(dimension_);
    for (int axis = dimension_ - 1; axis >= 0; --axis) {
        indices[axis] = static_cast<int>(flat % static_cast<std::size_t>(points_));
        flat /= static_cast<std::size_t>(points_);
    }
    return indices;
}

Grid make_grid(int dimension, int largest_mode) {
    if (largest_mode < 1) throw std::invalid_argument("largest mode must be >= 1");
    if (dimension < 1) throw std::invalid_argument("grid dimension must be positive");
    return Grid(dimension, 2 * largest_mode);
}

SpectralField::SpectralField(Grid grid, std::vector<Complex> coefficients)
    : grid_(std::move(grid)), coefficients_(std::move(coefficients)) {
    if (coefficients_.size() != grid_.size())
        throw std::invalid_argument("coefficient count " + std::to_string(coefficients_.size()) +
                                    " does not match grid size " + std::to_string(grid_.size()));
}

SpectralField SpectralField::zero(const Grid& grid) {
    return SpectralField(grid, std::vector<Complex>(grid.size()));
}

Complex SpectralField::coefficient(int k) const {
    if (grid_.dimension() != 1) throw std::logic_error("coefficient(k) needs a 1-d grid");
    return coefficients_[grid_.index_of(k)];
}

bool SpectralField::is_finite() const {
    return std::all_of(coefficients_.begin(), coefficients_.end(), [](const Complex& c) {
        return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
}

bool SpectralField::is_hermitian(double tolerance) const {
    const int m = grid_.points_per_axis();
    for (std::size_t flat = 0; flat < coefficients_.size(); ++flat) {
        auto indices = grid_.unflatten(flat);
        bool unpaired = false;
        std::size_t mirror = 0;
        for (int index : indices) {
            if (index == m / 2) unpaired = true;
            mirror = mirror * m + static_cast<std::size_t>((m - index) % m);
        }
        if (unpaired) continue;
        if (std::abs(coefficients_[mirror] - std::conj(coefficients_[flat])) > tolerance) return false;
    }
    return true;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < coefficients_.size(); ++i) coefficients_[i] += other.coefficients_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    if (!(grid_ == other.grid_)) throw std::invalid_argument("grid mismatch");
    for (std::size_t i = 0; i < coefficients_.size(); ++i) coefficients_[i] -= other.coefficients_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(Complex scale) {
    for (auto& c : coefficients_) c *= scale;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(Complex scale, SpectralField a) { return a *= scale; }

SpectralField transform_forward(std::span<const Complex> values, const Grid& grid) {
    if (values.size() != grid.size())
        throw std::invalid_argument("value count " + std::to_string(values.size()) +
                                    " does not match grid size " + std::to_string(grid.size()));
    return from_physical(values, grid);
}

std::vector<Complex> transform_inverse(const SpectralField& field) { return to_physical(field); }

double h_sigma_norm(const SpectralField& field, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("sobolev index must be nonnegative");
    const auto norm_sq = field.grid().wavenumber_norm_sq();
    const auto coefficients = field.coefficients();
    double sum = 0.0;
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        sum += std::pow(1.0 + norm_sq[i], sigma) * std::norm(coefficients[i]);
    }
    return std::sqrt(sum);
}

SpectralField dealias_filter(const SpectralField& field) {
    std::vector<Complex> coefficients(field.coefficients().begin(), field.coefficients().end());
    for (std::size_t i = 0; i < coefficients.size(); ++i) {
        if (outside_two_thirds(field.grid(), i)) coefficients[i] = 0.0;
    }
    return SpectralField(field.grid(), std::move(coefficients));
}

SpectralField cubic_nonlinearity(const SpectralField& field, bool dealias) {
    auto values = dealias ? to_physical(dealias_filter(field)) : to_physical(field);
    for (auto& z : values) z *= std::norm(z);
    auto product = from_physical(values, field.grid());
    return dealias ? dealias_filter(product) : product;
}

SpectralField nonlinear_phase(const SpectralField& field, double scale, bool dealias) {
    auto values = to_physical(field);
    for (auto& z : values) z *= std::polar(1.0, -scale * std::norm(z));
    auto product = from_physical(values, field.grid());
    return dealias ? dealias_filter(product) : product;
}

} // namespace mnls
