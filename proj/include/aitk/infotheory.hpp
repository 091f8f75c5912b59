#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aitk/grove.hpp"

namespace aitk {

struct Axis {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    std::size_t count = 0;

    double spacing() const { return (upper - lower) / static_cast<double>(count); }
    // Midpoint of cell i.
    double center(std::size_t i) const { return lower + (static_cast<double>(i) + 0.5) * spacing(); }
};

/// Rectangular grid of cells; values are stored row-major (last axis fastest).
struct GridSpec {
    std::vector<Axis> axes;

    void validate() const;
    std::size_t size() const;
    double cell_volume() const;
    std::size_t axis_index(std::string_view name) const;
    std::size_t stride(std::size_t axis) const;
};

class GridDistribution {
public:
    /// Normalizes `values` so the midpoint quadrature integrates to 1.
    static GridDistribution normalized(GridSpec grid, std::vector<double> values, double eps);

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double eps() const { return eps_; }

    double integral() const;
    double peak() const;

    std::string serialize() const;
    static GridDistribution deserialize(std::string_view text);

private:
    GridDistribution(GridSpec grid, std::vector<double> values, double eps)
        : grid_(std::move(grid)), values_(std::move(values)), eps_(eps) {}

    GridSpec grid_;
    std::vector<double> values_;
    double eps_;
};

/// Gaussian regularization of the Dirac delta centred at `center`.
double smoothed_delta(double x, double center, double eps);

/// Symbol bindings for the nested-delta construction. `sigma_pair` serves
/// forms with two point arguments, `sigma_lift` / `tau_lift` the lifted
/// operators (maps applied to the metric value), `phi` a self-map of points.
struct MetricBinding {
    std::function<double(double)> sigma;
    std::function<double(double, double)> sigma_pair;
    std::function<double(double)> sigma_lift;
    std::function<double(double)> tau;
    std::function<double(double)> tau_lift;
    std::function<double(double)> phi;
    std::vector<double> theta;
};

/// Axis names a supported expression needs, in grid order: point axes, then
/// "a" (outer offset) and, for depth 1, "b" (inner offset).
std::vector<std::string> required_axes(const TopologyExpr& expr);

/// Offset windows default to the observed range of the inner functional
/// widened by 3 eps on each side.
GridSpec default_grid(const TopologyExpr& expr, const MetricBinding& binding, const std::vector<Axis>& point_axes,
                      double eps, std::size_t offset_count);

GridDistribution build_nested_distribution(const TopologyExpr& expr, const MetricBinding& binding,
                                           const GridSpec& grid, double eps);

/// Integrates out one axis.
GridDistribution marginalize(const GridDistribution& dist, std::string_view axis);

double fisher_information(const GridDistribution& dist, std::size_t axis);
double fisher_information(const GridDistribution& dist, std::string_view axis);
/// One-dimensional density samples with uniform spacing.
double fisher_information(std::span<const double> density, double spacing);

/// d/dx ln f by central differences (one-sided at the ends), with the value
/// floor applied inside the logarithm.
std::vector<double> log_derivative(std::span<const double> density, double spacing);

struct AxisInformation {
    std::string axis;
    double information = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    double product = 0.0;  // variance * information
};

struct CramerRaoReport {
    std::vector<AxisInformation> axes;
    bool single_axis = false;
    bool bound_holds = true;  // variance * information >= 1 - tolerance on a single-axis family
};

CramerRaoReport cramer_rao_report(const GridDistribution& dist, double tolerance = 0.01);

/// Location family N(mean, sd) sampled on `samples` cells spanning
/// mean +/- span_sd * sd.
GridDistribution gaussian_location(double mean, double sd, std::size_t samples, double span_sd);

// Three-index information tensor over the four-tuple point. Component
// (i, j, k) lives at i * 16 + j * 4 + k; D_ij is the smoothed delta of
// sum_k Lambda^{ijk}(mbar_k) - a_ij.
struct InfoTensorBinding {
    std::array<std::function<double(double)>, 64> lambda;
    std::array<double, 16> offsets{};

    static constexpr std::size_t at(std::size_t i, std::size_t j, std::size_t k) { return i * 16 + j * 4 + k; }
};

std::array<double, 16> delta_matrix(const InfoTensorBinding& binding, const std::array<double, 4>& mbar, double eps);

/// D_ij d_i ln D_kl d_j ln D_kl summed over all indices, derivatives by
/// central differences in the components of mbar.
double information_density(const InfoTensorBinding& binding, const std::array<double, 4>& mbar, double eps);

// Named scalar maps for config-driven bindings: identity, square, abs, sin,
// cos, tanh, exp, scale:<c>, shift:<c>, affine:<a>:<b>.
std::function<double(double)> named_function(std::string_view spec);
// Named point-pair maps: diff, absdiff, sum, product.
std::function<double(double, double)> named_pair_function(std::string_view spec);

}  // namespace aitk
